#include "tdgl/manufactured.hpp"

#include "tdgl/jet.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tdgl {

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 curl_of(const std::array<Jet, 3>& a)
{
  return {a[2].g[1] - a[1].g[2], a[0].g[2] - a[2].g[0], a[1].g[0] - a[0].g[1]};
}

// curl curl a = grad div a - lap a, from the Hessians.
Vec3 curl_curl_of(const std::array<Jet, 3>& a)
{
  Vec3 r{};
  for (int i = 0; i < 3; ++i) {
    double grad_div = 0.0;
    for (int j = 0; j < 3; ++j) {
      grad_div += a[j].hess(i, j);
    }
    r[i] = grad_div - a[i].laplacian();
  }
  return r;
}

// When he_is_curl is set, H_e is curl A and he is ignored.
SpatialSample sample_from_jets(const Jet& psi_re, const Jet& psi_im, const std::array<Jet, 3>& a,
                               const std::array<Jet, 3>& he, bool he_is_curl)
{
  SpatialSample s;
  s.psi = {psi_re.v, psi_im.v};
  for (int d = 0; d < 3; ++d) {
    s.grad_psi[d] = {psi_re.g[d], psi_im.g[d]};
    s.A[d] = a[d].v;
    s.lap_A[d] = a[d].laplacian();
    s.div_A += a[d].g[d];
  }
  s.lap_psi = {psi_re.laplacian(), psi_im.laplacian()};
  s.curl_A = curl_of(a);
  if (he_is_curl) {
    s.He = s.curl_A;
    s.curl_He = curl_curl_of(a);
  } else {
    for (int d = 0; d < 3; ++d) {
      s.He[d] = he[d].v;
    }
    s.curl_He = curl_of(he);
  }
  return s;
}

std::array<Jet, 3> jet_point(const Vec3& x)
{
  return {Jet::variable(0, x[0]), Jet::variable(1, x[1]), Jet::variable(2, x[2])};
}

}  // namespace

ManufacturedCase::ManufacturedCase(std::string name, Domain domain, double kappa, double final_time, TimeFactor psi_time,
                                   TimeFactor A_time, TimeFactor He_time, SpatialFn spatial)
    : name_(std::move(name)),
      domain_(domain),
      kappa_(kappa),
      final_time_(final_time),
      psi_time_(psi_time),
      A_time_(A_time),
      He_time_(He_time),
      spatial_(std::move(spatial))
{
  if (!(kappa > 0.0) || !(final_time > 0.0)) {
    throw std::invalid_argument("ManufacturedCase: kappa and final time must be positive");
  }
}

Complex ManufacturedCase::psi(const Vec3& x, double t) const { return psi_factor(t) * spatial(x).psi; }

std::array<Complex, 3> ManufacturedCase::grad_psi(const Vec3& x, double t) const
{
  auto g = spatial(x).grad_psi;
  for (auto& v : g) {
    v *= psi_factor(t);
  }
  return g;
}

Vec3 ManufacturedCase::A(const Vec3& x, double t) const { return A_factor(t) * spatial(x).A; }
double ManufacturedCase::div_A(const Vec3& x, double t) const { return A_factor(t) * spatial(x).div_A; }
Vec3 ManufacturedCase::sigma(const Vec3& x, double t) const { return A_factor(t) * spatial(x).curl_A; }
Vec3 ManufacturedCase::He(const Vec3& x, double t) const { return He_factor(t) * spatial(x).He; }
Vec3 ManufacturedCase::curl_He(const Vec3& x, double t) const { return He_factor(t) * spatial(x).curl_He; }

std::array<Complex, ManufacturedCase::kTerms> ManufacturedCase::g_terms(const SpatialSample& s) const
{
  const Complex I(0.0, 1.0);
  const double k = kappa_;
  Complex a_grad{};
  double a2 = 0.0;
  for (int d = 0; d < 3; ++d) {
    a_grad += s.A[d] * s.grad_psi[d];
    a2 += s.A[d] * s.A[d];
  }
  return {s.psi, -s.lap_psi / (k * k), I * (1.0 / k - k) * s.div_A * s.psi + (2.0 * I / k) * a_grad, a2 * s.psi,
          std::norm(s.psi) * s.psi};
}

std::array<double, ManufacturedCase::kTerms> ManufacturedCase::g_coefficients(double t) const
{
  const double a = psi_factor(t);
  const double b = A_factor(t);
  return {psi_time_.derivative(t) - a, a, a * b, a * b * b, a * a * a};
}

std::array<Vec3, ManufacturedCase::kTerms> ManufacturedCase::f_terms(const SpatialSample& s) const
{
  Vec3 current{};
  for (int d = 0; d < 3; ++d) {
    current[d] = -std::imag(std::conj(s.psi) * s.grad_psi[d]) / kappa_;
  }
  return {s.A, -1.0 * s.lap_A, current, std::norm(s.psi) * s.A, -1.0 * s.curl_He};
}

std::array<double, ManufacturedCase::kTerms> ManufacturedCase::f_coefficients(double t) const
{
  const double a = psi_factor(t);
  const double b = A_factor(t);
  return {A_time_.derivative(t), b, a * a, a * a * b, He_factor(t)};
}

Complex ManufacturedCase::g(const Vec3& x, double t) const
{
  const auto terms = g_terms(spatial(x));
  const auto c = g_coefficients(t);
  Complex r{};
  for (int k = 0; k < kTerms; ++k) {
    r += c[k] * terms[k];
  }
  return r;
}

Vec3 ManufacturedCase::f(const Vec3& x, double t) const
{
  const auto terms = f_terms(spatial(x));
  const auto c = f_coefficients(t);
  Vec3 r{};
  for (int k = 0; k < kTerms; ++k) {
    r = r + c[k] * terms[k];
  }
  return r;
}

double SepticCutoff::upsilon(double s, int k) const
{
  const double u = s - 0.1;
  double r = 0.0;
  for (int n = 7; n >= k; --n) {
    double c = coefficients[n];
    for (int j = 0; j < k; ++j) {
      c *= n - j;
    }
    r = r * u + c;
  }
  return r;
}

double SepticCutoff::phi(double s, int k) const
{
  if (s < 0.1) {
    return k == 0 ? 0.1 : 0.0;
  }
  if (s > 0.4) {
    return 0.0;
  }
  return upsilon(s, k);
}

SepticCutoff septic_cutoff()
{
  // Rows: derivatives 0..3 at u = 0 and at u = 0.3 of sum_n c_n u^n.
  Eigen::Matrix<double, 8, 8> H = Eigen::Matrix<double, 8, 8>::Zero();
  Eigen::Matrix<double, 8, 1> rhs = Eigen::Matrix<double, 8, 1>::Zero();
  for (int side = 0; side < 2; ++side) {
    const double u = side == 0 ? 0.0 : 0.3;
    for (int k = 0; k < 4; ++k) {
      for (int n = k; n < 8; ++n) {
        double c = std::pow(u, n - k);
        for (int j = 0; j < k; ++j) {
          c *= n - j;
        }
        H(4 * side + k, n) = c;
      }
    }
  }
  rhs(0) = 0.1;
  const Eigen::Matrix<double, 8, 1> c = H.fullPivLu().solve(rhs);
  SepticCutoff cut;
  for (int n = 0; n < 8; ++n) {
    cut.coefficients[n] = c(n);
  }
  return cut;
}

ManufacturedCase square2d_case()
{
  auto spatial = [](const Vec3& p) {
    const auto [x, y, z] = jet_point(p);
    const Jet re = cos(kPi * x);
    const Jet im = cos(kPi * y);
    const std::array<Jet, 3> a{exp(y) * sin(kPi * x), exp(x) * sin(kPi * y), Jet(0.0)};
    const std::array<Jet, 3> he{Jet(0.0), Jet(0.0), exp(x) * sin(kPi * y) - exp(y) * sin(kPi * x)};
    return sample_from_jets(re, im, a, he, false);
  };
  const TimeFactor decay{TimeFactor::Kind::Exponential, -1.0};
  return ManufacturedCase("square2d", Domain::UnitSquare, 1.0, 1.0, decay, decay, decay, spatial);
}

ManufacturedCase lshape2d_case()
{
  const SepticCutoff cut = septic_cutoff();
  std::array<double, 8> dcoef{};
  for (int n = 1; n < 8; ++n) {
    dcoef[n - 1] = n * cut.coefficients[n];
  }
  auto spatial = [cut, dcoef](const Vec3& p) {
    const double r0 = std::hypot(p[0], p[1]);
    if (r0 > 0.4 || r0 == 0.0) {
      // Outside the support everything vanishes; at the corner psi and curl A tend to 0.
      return SpatialSample{};
    }
    const auto [x, y, z] = jet_point(p);
    const Jet r = sqrt(x * x + y * y);
    Jet theta = atan2(y, x);
    if (theta.v < 0.0) {
      theta.v += 2.0 * kPi;
    }
    Jet phi(0.1);
    Jet dphi(0.0);
    if (r0 >= 0.1) {
      const Jet u = r - Jet(0.1);
      phi = polynomial(cut.coefficients, u);
      dphi = polynomial(dcoef, u);
    }
    const Jet r23 = pow(r, 2.0 / 3.0);
    const Jet psi = phi * r23 * cos((2.0 / 3.0) * theta);
    const Jet radial = (4.0 / 3.0) * phi * pow(r, -1.0 / 3.0) + dphi * r23;
    const std::array<Jet, 3> a{radial * cos((1.0 / 3.0) * theta), radial * sin((1.0 / 3.0) * theta), Jet(0.0)};
    return sample_from_jets(psi, Jet(0.0), a, {}, true);
  };
  const TimeFactor quad{TimeFactor::Kind::Power, 2.0};
  return ManufacturedCase("lshape2d", Domain::LShape, 10.0, 1.0, quad, quad, quad, spatial);
}

ManufacturedCase cube3d_case()
{
  auto spatial = [](const Vec3& p) {
    const auto [x, y, z] = jet_point(p);
    const Jet cz = cos(kPi * z);
    const Jet re = cos(kPi * x) * cz;
    const Jet im = cos(kPi * y) * cz;
    const Jet sx = sin(2.0 * kPi * x);
    const Jet sy = sin(2.0 * kPi * y);
    const Jet sz = sin(2.0 * kPi * z);
    const std::array<Jet, 3> a{sx * sy, sy * sz, sz};
    const std::array<Jet, 3> he{-2.0 * kPi * sy * cos(2.0 * kPi * z), Jet(0.0),
                                -2.0 * kPi * sx * cos(2.0 * kPi * y)};
    return sample_from_jets(re, im, a, he, false);
  };
  const TimeFactor growth{TimeFactor::Kind::Exponential, 1.0};
  return ManufacturedCase("cube3d", Domain::UnitCube, 1.0, 1.0, growth, growth, growth, spatial);
}

ManufacturedCase zero_case(Domain domain, double kappa, double final_time)
{
  const TimeFactor one{TimeFactor::Kind::Exponential, 0.0};
  return ManufacturedCase("zero", domain, kappa, final_time, one, one, one,
                          [](const Vec3&) { return SpatialSample{}; });
}

}  // namespace tdgl
