#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace tdgl {

/**
 * @brief Second-order forward-mode jet in three variables.
 *
 * Carries a value, its gradient and its (symmetric) Hessian through
 * arithmetic and elementary functions.
 */
struct Jet {
  double v = 0.0;
  std::array<double, 3> g{};
  std::array<double, 9> h{};  // row-major 3x3

  Jet() = default;
  Jet(double value) : v(value) {}  // NOLINT: constants convert implicitly

  static Jet variable(int k, double value)
  {
    Jet j(value);
    j.g[k] = 1.0;
    return j;
  }

  double hess(int a, int b) const { return h[3 * a + b]; }
  double laplacian() const { return h[0] + h[4] + h[8]; }
};

namespace detail {

// f(a) given f, f', f''.
inline Jet chain(const Jet& a, double f, double df, double d2f)
{
  Jet r(f);
  for (int i = 0; i < 3; ++i) {
    r.g[i] = df * a.g[i];
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      r.h[3 * i + j] = df * a.h[3 * i + j] + d2f * a.g[i] * a.g[j];
    }
  }
  return r;
}

// F(a, b) given F and its first and second partials.
inline Jet chain2(const Jet& a, const Jet& b, double f, double fa, double fb, double faa, double fab, double fbb)
{
  Jet r(f);
  for (int i = 0; i < 3; ++i) {
    r.g[i] = fa * a.g[i] + fb * b.g[i];
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      r.h[3 * i + j] = fa * a.h[3 * i + j] + fb * b.h[3 * i + j] + faa * a.g[i] * a.g[j] +
                       fab * (a.g[i] * b.g[j] + b.g[i] * a.g[j]) + fbb * b.g[i] * b.g[j];
    }
  }
  return r;
}

}  // namespace detail

inline Jet operator+(const Jet& a, const Jet& b)
{
  Jet r(a.v + b.v);
  for (int i = 0; i < 3; ++i) {
    r.g[i] = a.g[i] + b.g[i];
  }
  for (int i = 0; i < 9; ++i) {
    r.h[i] = a.h[i] + b.h[i];
  }
  return r;
}

inline Jet operator-(const Jet& a)
{
  Jet r(-a.v);
  for (int i = 0; i < 3; ++i) {
    r.g[i] = -a.g[i];
  }
  for (int i = 0; i < 9; ++i) {
    r.h[i] = -a.h[i];
  }
  return r;
}

inline Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }

inline Jet operator*(const Jet& a, const Jet& b)
{
  return detail::chain2(a, b, a.v * b.v, b.v, a.v, 0.0, 1.0, 0.0);
}

inline Jet operator*(double s, const Jet& a)
{
  Jet r(s * a.v);
  for (int i = 0; i < 3; ++i) {
    r.g[i] = s * a.g[i];
  }
  for (int i = 0; i < 9; ++i) {
    r.h[i] = s * a.h[i];
  }
  return r;
}

inline Jet operator*(const Jet& a, double s) { return s * a; }

inline Jet operator/(const Jet& a, const Jet& b)
{
  const double ib = 1.0 / b.v;
  return a * detail::chain(b, ib, -ib * ib, 2.0 * ib * ib * ib);
}

inline Jet sin(const Jet& a) { return detail::chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet cos(const Jet& a) { return detail::chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline Jet exp(const Jet& a)
{
  const double e = std::exp(a.v);
  return detail::chain(a, e, e, e);
}
inline Jet sqrt(const Jet& a)
{
  const double s = std::sqrt(a.v);
  return detail::chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet pow(const Jet& a, double p)
{
  const double f = std::pow(a.v, p);
  return detail::chain(a, f, p * f / a.v, p * (p - 1.0) * f / (a.v * a.v));
}

/// atan2(y, x) with its derivatives; values in (-pi, pi].
inline Jet atan2(const Jet& y, const Jet& x)
{
  const double rho = x.v * x.v + y.v * y.v;
  const double r2 = rho * rho;
  return detail::chain2(y, x, std::atan2(y.v, x.v), x.v / rho, -y.v / rho, -2.0 * x.v * y.v / r2,
                        (y.v * y.v - x.v * x.v) / r2, 2.0 * x.v * y.v / r2);
}

/// Horner evaluation of sum_k c[k] a^k.
template <std::size_t N>
Jet polynomial(const std::array<double, N>& c, const Jet& a)
{
  Jet r(c[N - 1]);
  for (std::size_t k = N - 1; k-- > 0;) {
    r = r * a + Jet(c[k]);
  }
  return r;
}

}  // namespace tdgl
