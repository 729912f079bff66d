#include "scmimo/special_functions.hpp"

#include <cmath>
#include <string>

namespace scmimo {

namespace {
constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
}

double digamma(double x) {
  if (!std::isfinite(x) || !(x > 0.0)) {
    throw DomainError("digamma: argument must be finite and > 0, got " + std::to_string(x));
  }
  double shift = 0.0;
  while (x < 10.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Stirling series with Bernoulli numbers B_2 .. B_14.
  const double tail =
      inv2 * (1.0 / 12 -
              inv2 * (1.0 / 120 -
                      inv2 * (1.0 / 252 -
                              inv2 * (1.0 / 240 -
                                      inv2 * (1.0 / 132 -
                                              inv2 * (691.0 / 32760 - inv2 / 12.0))))));
  return shift + std::log(x) - 0.5 * inv - tail;
}

double digamma_int(int n) {
  if (n < 1) throw DomainError("digamma_int: n must be >= 1, got " + std::to_string(n));
  double harmonic = 0.0;
  for (int k = 1; k < n; ++k) harmonic += 1.0 / k;
  return harmonic - kEulerGamma;
}

double log_gamma_int(int n) {
  if (n < 1) throw DomainError("log_gamma_int: n must be >= 1, got " + std::to_string(n));
  double acc = 0.0;
  for (int k = 2; k < n; ++k) acc += std::log(static_cast<double>(k));
  return acc;
}

double gamma_int(int n) {
  if (n < 1) throw DomainError("gamma_int: n must be >= 1, got " + std::to_string(n));
  double acc = 1.0;
  for (int k = 2; k < n; ++k) acc *= k;
  return acc;
}

}  // namespace scmimo
