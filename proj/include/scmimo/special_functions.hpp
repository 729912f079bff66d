#pragma once

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <limits>
#include <string>

#include "scmimo/errors.hpp"

namespace scmimo {

// Digamma psi(x) for x > 0. Recurrence psi(x) = psi(x + 1) - 1/x lifts the
// argument to x >= 10, then the Stirling asymptotic series is applied.
// Absolute error stays below 1e-12 on [1e-3, 1e6].
double digamma(double x);

// psi(n) for a positive integer n: -gamma + sum_{k<n} 1/k.
double digamma_int(int n);

// ln Gamma(n) = ln (n-1)! for a positive integer n.
double log_gamma_int(int n);

// Gamma(n) = (n-1)! for positive integer n (exact for n <= 23).
double gamma_int(int n);

namespace detail {

template <class T>
void check_expint_args(int n, const T& x) {
  if (n < 1) throw InvalidArgument("exp_integral: order must be >= 1, got " + std::to_string(n));
  if (!(x >= T(0))) throw DomainError("exp_integral: argument must be >= 0");
  if (x == T(0) && n == 1) throw DomainError("exp_integral: E_1 diverges at 0");
}

// e^x E_n(x) for x > 1 by the modified Lentz continued fraction
//   E_n(x) = e^{-x} / (x + n - 1*n/(x + n + 2 - 2(n+1)/(x + n + 4 - ...)))
template <class T>
T scaled_expint_continued_fraction(int n, const T& x) {
  using std::abs;
  const T eps = std::numeric_limits<T>::epsilon();
  const T tiny = std::numeric_limits<T>::min() / eps;
  T b = x + T(n);
  T c = T(1) / tiny;
  T d = T(1) / b;
  T h = d;
  for (int i = 1; i < 100000; ++i) {
    const T an = -T(i) * T(n - 1 + i);
    b += T(2);
    d = T(1) / (an * d + b);
    c = b + an / c;
    const T del = c * d;
    h *= del;
    if (abs(del - T(1)) <= eps) return h;
  }
  throw NumericalFailure("exp_integral: continued fraction did not converge");
}

// E_1(x) for 0 < x <= 1 from the convergent series
//   E_1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!).
template <class T>
T expint_e1_series(const T& x) {
  using std::abs;
  using std::log;
  const T eps = std::numeric_limits<T>::epsilon();
  T sum(0);
  T term(1);
  for (int k = 1; k < 10000; ++k) {
    term *= -x / T(k);
    const T add = term / T(k);
    sum += add;
    if (abs(add) <= eps * abs(sum)) break;
  }
  return -boost::math::constants::euler<T>() - log(x) - sum;
}

}  // namespace detail

// Exponentially scaled exponential integral e^x E_n(x). Stays finite where
// E_n underflows (large x), which the exact MMSE sum needs for tiny
// eigenvalues. For x > 1 every order comes from its own continued
// fraction; for x <= 1, E_1 comes from the series and higher orders from the
// upward recurrence E_{m+1}(x) = (e^{-x} - x E_m(x)) / m, which is stable
// because x <= m there.
template <class T>
T scaled_exp_integral(int n, const T& x) {
  using std::exp;
  detail::check_expint_args(n, x);
  if (x == T(0)) return T(1) / T(n - 1);
  if (x > T(1)) return detail::scaled_expint_continued_fraction(n, x);
  const T emx = exp(-x);
  T e = detail::expint_e1_series(x);
  for (int m = 1; m < n; ++m) e = (emx - x * e) / T(m);
  return e / emx;
}

// E_n(x) = int_1^inf e^{-xt} t^{-n} dt.
template <class T>
T exp_integral(int n, const T& x) {
  using std::exp;
  detail::check_expint_args(n, x);
  if (x == T(0)) return T(1) / T(n - 1);
  if (x > T(1)) return exp(-x) * detail::scaled_expint_continued_fraction(n, x);
  const T emx = exp(-x);
  T e = detail::expint_e1_series(x);
  for (int m = 1; m < n; ++m) e = (emx - x * e) / T(m);
  return e;
}

}  // namespace scmimo
