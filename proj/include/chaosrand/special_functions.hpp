#pragma once

// erfc and the regularized incomplete gamma functions used for p-values.
//
// P(a, x) uses the power series when x < a + 1, Q(a, x) uses the Lentz
// continued fraction otherwise; each is obtained from the other as 1 - value
// on the opposite side, where that value is not small. erfc(x) for x >= 0.5
// is Q(1/2, x^2); below that it is 1 - erf(x) from the Maclaurin series.

#include <cmath>
#include <limits>
#include <numbers>

#include "chaosrand/error.hpp"

namespace chaosrand::special {

namespace detail {

inline constexpr int kMaxIterations = 10000;
inline constexpr double kEps = 1e-16;
inline constexpr double kTiny = 1e-300;

inline double log_prefactor(double a, double x) { return -x + a * std::log(x) - std::lgamma(a); }

inline double gamma_p_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int i = 0; i < kMaxIterations; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(log_prefactor(a, x));
}

inline double gamma_q_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return std::exp(log_prefactor(a, x)) * h;
}

inline void check_args(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0) || !std::isfinite(a)) {
    throw Error(Errc::invalid_input, "incomplete gamma needs a > 0, x >= 0");
  }
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
  detail::check_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return detail::gamma_p_series(a, x);
  return 1.0 - detail::gamma_q_fraction(a, x);
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double gamma_q(double a, double x) {
  detail::check_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_fraction(a, x);
}

inline double erfc(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) return 2.0 - erfc(-x);
  if (x >= 0.5) return gamma_q(0.5, x * x);
  // erf(x) = 2/sqrt(pi) * sum (-1)^n x^(2n+1) / (n! (2n+1))
  const double x2 = x * x;
  double power = x;
  double sum = x;
  for (int n = 1; n < 60; ++n) {
    power *= -x2 / n;
    const double term = power / (2 * n + 1);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * detail::kEps) break;
  }
  return 1.0 - 2.0 * std::numbers::inv_sqrtpi * sum;
}

/// Upper-tail probability of a chi-square statistic with `dof` degrees of freedom.
inline double chi_square_sf(double statistic, double dof) {
  if (statistic <= 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * statistic);
}

}  // namespace chaosrand::special
