#pragma once

#include "tdgl/fespace.hpp"
#include "tdgl/geometry.hpp"
#include "tdgl/mesh.hpp"

#include <array>
#include <complex>
#include <functional>
#include <string>

namespace tdgl {

/// Scalar time profile: exp(rate * t) or t^power.
struct TimeFactor {
  enum class Kind { Exponential, Power };
  Kind kind = Kind::Exponential;
  double p = 0.0;

  double value(double t) const { return kind == Kind::Exponential ? std::exp(p * t) : std::pow(t, p); }
  double derivative(double t) const
  {
    return kind == Kind::Exponential ? p * std::exp(p * t) : (p == 0.0 ? 0.0 : p * std::pow(t, p - 1.0));
  }
};

/**
 * Spatial profiles and their derivatives at one point. Two-dimensional
 * fields keep z = 0; the 2D curl of A and the scalar H_e live in the z
 * component, and curl_He is the rotated gradient (dH/dy, -dH/dx).
 */
struct SpatialSample {
  Complex psi{};
  std::array<Complex, 3> grad_psi{};
  Complex lap_psi{};
  Vec3 A{};
  double div_A = 0.0;
  Vec3 curl_A{};
  Vec3 lap_A{};
  Vec3 He{};
  Vec3 curl_He{};
};

/**
 * @brief Exact solution of the forced TDGL system with separable fields
 *        psi = a(t) Psi(x), A = b(t) A(x), H_e = c(t) H(x).
 *
 * The forcing terms are the strong-form residuals
 *   g = psi_t - i kappa (div A) psi + (i/kappa grad + A)^2 psi + (|psi|^2 - 1) psi,
 *   f = A_t - grad div A + curl curl A - (1/kappa) Im(conj(psi) grad psi) + |psi|^2 A - curl H_e,
 * each written as sum_k coefficient_k(t) * term_k(x).
 */
class ManufacturedCase {
public:
  static constexpr int kTerms = 5;
  using SpatialFn = std::function<SpatialSample(const Vec3&)>;

  ManufacturedCase(std::string name, Domain domain, double kappa, double final_time, TimeFactor psi_time,
                   TimeFactor A_time, TimeFactor He_time, SpatialFn spatial);

  const std::string& name() const { return name_; }
  Domain domain() const { return domain_; }
  int dim() const { return domain_dimension(domain_); }
  double kappa() const { return kappa_; }
  double final_time() const { return final_time_; }

  SpatialSample spatial(const Vec3& x) const { return spatial_(x); }
  double psi_factor(double t) const { return psi_time_.value(t); }
  double A_factor(double t) const { return A_time_.value(t); }
  double He_factor(double t) const { return He_time_.value(t); }

  Complex psi(const Vec3& x, double t) const;
  std::array<Complex, 3> grad_psi(const Vec3& x, double t) const;
  Vec3 A(const Vec3& x, double t) const;
  double div_A(const Vec3& x, double t) const;
  /// curl A, the exact sigma (z component in 2D).
  Vec3 sigma(const Vec3& x, double t) const;
  Vec3 He(const Vec3& x, double t) const;
  Vec3 curl_He(const Vec3& x, double t) const;
  Complex g(const Vec3& x, double t) const;
  Vec3 f(const Vec3& x, double t) const;

  std::array<Complex, kTerms> g_terms(const SpatialSample& s) const;
  std::array<double, kTerms> g_coefficients(double t) const;
  std::array<Vec3, kTerms> f_terms(const SpatialSample& s) const;
  std::array<double, kTerms> f_coefficients(double t) const;

private:
  std::string name_;
  Domain domain_;
  double kappa_;
  double final_time_;
  TimeFactor psi_time_;
  TimeFactor A_time_;
  TimeFactor He_time_;
  SpatialFn spatial_;
};

/// C^3 cut-off: 0.1 below 0.1, a degree-7 Hermite blend on [0.1, 0.4], 0 above.
struct SepticCutoff {
  /// Coefficients in powers of (s - 0.1).
  std::array<double, 8> coefficients{};

  /// k-th derivative of the blending polynomial (no clamping).
  double upsilon(double s, int k = 0) const;
  /// k-th derivative of the piecewise cut-off.
  double phi(double s, int k = 0) const;
};

SepticCutoff septic_cutoff();

/// psi = e^{-t}(cos pi x + i cos pi y), A = (e^{y-t} sin pi x, e^{x-t} sin pi y), kappa = 1, T = 1.
ManufacturedCase square2d_case();
/// Corner-singular solution on the L-shape with the septic cut-off, kappa = 10, T = 1.
ManufacturedCase lshape2d_case();
/// psi = e^t cos pi z (cos pi x + i cos pi y), A = e^t (sin 2pi x sin 2pi y, sin 2pi y sin 2pi z, sin 2pi z), kappa = 1.
ManufacturedCase cube3d_case();
/// Identically zero fields and forcing.
ManufacturedCase zero_case(Domain domain, double kappa = 1.0, double final_time = 1.0);

}  // namespace tdgl
