#include "scmimo/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "scmimo/errors.hpp"
#include "scmimo/vandermonde_kernel.hpp"

namespace scmimo {

EigenSpectrum::EigenSpectrum(std::vector<double> betas) : betas_(std::move(betas)) {
  if (betas_.empty()) throw InvalidArgument("EigenSpectrum: empty spectrum");
  for (double b : betas_) {
    if (!std::isfinite(b)) throw InvalidArgument("EigenSpectrum: non-finite eigenvalue");
    if (b <= 0.0) {
      throw DegenerateSpectrum("EigenSpectrum: non-positive eigenvalue " + std::to_string(b));
    }
  }
  const std::size_t P = betas_.size();
  for (std::size_t i = 1; i < P; ++i) {
    if (betas_[i] < betas_[i - 1]) throw InvalidArgument("EigenSpectrum: eigenvalues must be ascending");
    if (betas_[i] == betas_[i - 1]) {
      throw DegenerateSpectrum("EigenSpectrum: repeated eigenvalue " + std::to_string(betas_[i]));
    }
  }
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < P; ++i) min_gap = std::min(min_gap, betas_[i] - betas_[i - 1]);
  min_relative_gap_ = P == 1 ? 1.0 : min_gap / betas_.back();

  double log_v = 0.0;
  for (std::size_t i = 0; i < P; ++i) {
    for (std::size_t j = i + 1; j < P; ++j) log_v += std::log(betas_[j] - betas_[i]);
  }
  log_vandermonde_ = log_v;
}

double elementary_symmetric(std::span<const double> values, int k) {
  if (k < 0 || k > static_cast<int>(values.size())) return 0.0;
  const auto e = detail::elementary_symmetric_all(std::vector<double>(values.begin(), values.end()));
  return e[static_cast<std::size_t>(k)];
}

std::vector<double> y_ratios(const EigenSpectrum& spectrum) {
  const auto betas = spectrum.betas();
  const std::size_t P = betas.size();
  return detail::evaluate_ratio_batch(spectrum, [&](auto tag) {
    using T = typename decltype(tag)::type;
    using std::log;
    const auto inv = detail::inverse_vandermonde<T>(betas);
    std::vector<T> logs(P);
    for (std::size_t p = 0; p < P; ++p) logs[p] = log(T(betas[p]));
    std::vector<detail::SignedSum<T>> sums(P);
    for (std::size_t p = 0; p < P; ++p) {
      T power(1);  // beta_p^{n-1}
      const T bp(betas[p]);
      for (std::size_t n = 0; n < P; ++n) {
        sums[n].add(inv(n, p) * power * logs[p]);
        power *= bp;
      }
    }
    return sums;
  });
}

double y_ratio(const EigenSpectrum& spectrum, int n) {
  if (n < 1 || n > spectrum.size()) {
    throw InvalidArgument("y_ratio: column index " + std::to_string(n) + " outside 1.." +
                          std::to_string(spectrum.size()));
  }
  return y_ratios(spectrum)[static_cast<std::size_t>(n - 1)];
}

DeltaRatios delta_ratios(const EigenSpectrum& spectrum, int K) {
  if (K < 1 || K > spectrum.size()) {
    throw InvalidArgument("delta_ratios: K must lie in 1..P, got " + std::to_string(K));
  }
  const auto e = detail::elementary_symmetric_all(
      std::vector<double>(spectrum.betas().begin(), spectrum.betas().end()));
  DeltaRatios out;
  out.delta1 = std::exp(std::lgamma(K + 1.0)) * e[static_cast<std::size_t>(K)];
  out.delta2 = std::exp(std::lgamma(static_cast<double>(K))) * e[static_cast<std::size_t>(K - 1)];
  return out;
}

namespace {

void check_cofactor_indices(const EigenSpectrum& spectrum, int l, int n) {
  const int P = spectrum.size();
  if (l < 1 || l > P || n < 1 || n > P) {
    throw InvalidArgument("cofactor index (" + std::to_string(l) + ", " + std::to_string(n) +
                          ") outside 1.." + std::to_string(P));
  }
}

// ln e_{P-n}(beta without l).
double log_elementary_without(const EigenSpectrum& spectrum, int l, int n) {
  std::vector<double> others;
  for (int p = 0; p < spectrum.size(); ++p) {
    if (p != l - 1) others.push_back(spectrum[p]);
  }
  const auto e = detail::elementary_symmetric_all(others);
  return std::log(e[static_cast<std::size_t>(spectrum.size() - n)]);
}

}  // namespace

double cofactor_D(const EigenSpectrum& spectrum, int l, int n) {
  check_cofactor_indices(spectrum, l, n);
  const int P = spectrum.size();
  double log_v = 0.0;
  for (int i = 0; i < P; ++i) {
    if (i == l - 1) continue;
    for (int j = i + 1; j < P; ++j) {
      if (j == l - 1) continue;
      log_v += std::log(spectrum[j] - spectrum[i]);
    }
  }
  const double mag = std::exp(log_v + log_elementary_without(spectrum, l, n));
  return ((l + n) % 2 == 0) ? mag : -mag;
}

double normalized_cofactor(const EigenSpectrum& spectrum, int l, int n) {
  check_cofactor_indices(spectrum, l, n);
  const int P = spectrum.size();
  const double bl = spectrum[l - 1];
  double log_denom = 0.0;
  for (int j = 0; j < P; ++j) {
    if (j != l - 1) log_denom += std::log(std::abs(bl - spectrum[j]));
  }
  const double mag = std::exp(log_elementary_without(spectrum, l, n) - log_denom);
  return ((l + n) % 2 == 0) ? mag : -mag;
}

}  // namespace scmimo
