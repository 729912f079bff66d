#include "scmimo/analytic.hpp"

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <numeric>
#include <string>

#include "scmimo/errors.hpp"
#include "scmimo/special_functions.hpp"
#include "scmimo/vandermonde_kernel.hpp"

namespace scmimo {

namespace {

constexpr double kLog2e = 1.4426950408889634074;

double sum_of_squares(std::span<const double> betas) {
  double s = 0.0;
  for (double b : betas) s += b * b;
  return s;
}

void check_users(const EigenSpectrum& spectrum, int K, const char* who) {
  if (K < 1 || K > spectrum.size()) {
    throw InvalidArgument(std::string(who) + ": K must lie in 1.." + std::to_string(spectrum.size()) +
                          ", got " + std::to_string(K));
  }
}

void check_zetas(std::span<const double> zetas, const char* who) {
  if (zetas.empty()) throw InvalidArgument(std::string(who) + ": no users");
  for (double z : zetas) {
    if (!(z > 0.0) || !std::isfinite(z)) {
      throw InvalidArgument(std::string(who) + ": large-scale gains must be positive");
    }
  }
}

void check_snr(double p_u, const char* who) {
  if (!(p_u > 0.0) || !std::isfinite(p_u)) throw InvalidArgument(std::string(who) + ": p_u must be > 0");
}

// E{ln|W_m|} from precomputed y ratios (index n-1).
double logdet_from_ratios(const std::vector<double>& y, int P, int users) {
  double s = 0.0;
  for (int n = 1; n <= users; ++n) s += digamma_int(n);
  for (int n = P - users + 1; n <= P; ++n) s += y[static_cast<std::size_t>(n - 1)];
  return s;
}

double zf_lower_from_exponent(double exponent, std::span<const double> zetas, double p_u) {
  const double g = std::exp(exponent);
  double r = 0.0;
  for (double z : zetas) r += std::log2(1.0 + p_u * z * g);
  return r;
}

double zf_upper_from_terms(const DeltaRatios& delta, double logdet_km1, std::span<const double> zetas,
                           double p_u) {
  double r = 0.0;
  for (double z : zetas) r += std::log2(delta.delta2 + p_u * z * delta.delta1) - logdet_km1 * kLog2e;
  return r;
}

// sum_l sum_{n=P-m+1}^{P} beta_l^{n-1} [D^{-1}]_{n,l} sum_{h=1}^{m+n-P} e^{x_l} E_h(x_l)
// for m = K and m = K - 1 (cumulative = true), or the single h = K+n-P
// term of their difference (cumulative = false).
std::vector<double> mmse_sums(const EigenSpectrum& spectrum, int K, double p_u, bool cumulative) {
  const auto betas = spectrum.betas();
  const int P = spectrum.size();
  return detail::evaluate_ratio_batch(spectrum, [&](auto tag) {
    using T = typename decltype(tag)::type;
    const auto inv = detail::inverse_vandermonde<T>(betas);
    const T p(p_u);
    std::vector<detail::SignedSum<T>> sums(cumulative ? 2 : 1);
    for (int l = 0; l < P; ++l) {
      const T b(betas[static_cast<std::size_t>(l)]);
      const T x = T(1) / (b * p);
      std::vector<T> scaled(static_cast<std::size_t>(K) + 1, T(0));
      for (int h = 1; h <= K; ++h) scaled[static_cast<std::size_t>(h)] = scaled_exp_integral<T>(h, x);
      T power(1);
      for (int n = 1; n < P - K + 1; ++n) power *= b;
      for (int n = P - K + 1; n <= P; ++n) {
        const T w = power * inv(static_cast<std::size_t>(n - 1), static_cast<std::size_t>(l));
        if (cumulative) {
          T acc(0);
          for (int h = 1; h <= K + n - P; ++h) acc += scaled[static_cast<std::size_t>(h)];
          sums[0].add(w * acc);
          if (n >= P - K + 2) sums[1].add(w * (acc - scaled[static_cast<std::size_t>(K + n - P)]));
        } else {
          sums[0].add(w * scaled[static_cast<std::size_t>(K + n - P)]);
        }
        power *= b;
      }
    }
    return sums;
  });
}

}  // namespace

GramMoments gram_moments(std::span<const double> betas, std::span<const double> zetas, int M) {
  if (M < 1) throw InvalidArgument("gram_moments: M must be >= 1");
  check_zetas(zetas, "gram_moments");
  const double sb2 = sum_of_squares(betas);
  const std::size_t K = zetas.size();
  GramMoments out;
  out.norm4.resize(K);
  out.norm2.resize(K);
  out.cross.assign(K, std::vector<double>(K, 0.0));
  const double m = static_cast<double>(M);
  for (std::size_t k = 0; k < K; ++k) {
    out.norm4[k] = zetas[k] * zetas[k] * (m * m + sb2);
    out.norm2[k] = m * zetas[k];
    for (std::size_t l = 0; l < K; ++l) {
      if (l != k) out.cross[k][l] = zetas[k] * zetas[l] * sb2;
    }
  }
  return out;
}

double mrc_approx(std::span<const double> betas, std::span<const double> zetas, int M, double p_u) {
  if (M < 1) throw InvalidArgument("mrc_approx: M must be >= 1");
  check_zetas(zetas, "mrc_approx");
  check_snr(p_u, "mrc_approx");
  const double sb2 = sum_of_squares(betas);
  const double m = static_cast<double>(M);
  const double total = std::accumulate(zetas.begin(), zetas.end(), 0.0);
  double r = 0.0;
  for (double z : zetas) {
    const double others = total - z;
    r += std::log2(1.0 + p_u * z * (m * m + sb2) / (p_u * others * sb2 + m));
  }
  return r;
}

double expected_logdet_unit(const EigenSpectrum& spectrum, int users) {
  if (users < 0 || users > spectrum.size()) {
    throw InvalidArgument("expected_logdet: user count outside 0..P");
  }
  if (users == 0) return 0.0;
  return logdet_from_ratios(y_ratios(spectrum), spectrum.size(), users);
}

double expected_logdet(const EigenSpectrum& spectrum, std::span<const double> zetas,
                       std::optional<int> drop_user) {
  check_zetas(zetas, "expected_logdet");
  const int K = static_cast<int>(zetas.size());
  check_users(spectrum, K, "expected_logdet");
  if (drop_user && (*drop_user < 0 || *drop_user >= K)) {
    throw InvalidArgument("expected_logdet: drop_user outside 0..K-1");
  }
  double s = 0.0;
  for (int k = 0; k < K; ++k) {
    if (drop_user && *drop_user == k) continue;
    s += std::log(zetas[static_cast<std::size_t>(k)]);
  }
  return s + expected_logdet_unit(spectrum, drop_user ? K - 1 : K);
}

double zf_lower(const EigenSpectrum& spectrum, std::span<const double> zetas, double p_u) {
  check_zetas(zetas, "zf_lower");
  check_snr(p_u, "zf_lower");
  const int K = static_cast<int>(zetas.size());
  check_users(spectrum, K, "zf_lower");
  const double exponent = digamma_int(K) + y_ratio(spectrum, spectrum.size() - K + 1);
  return zf_lower_from_exponent(exponent, zetas, p_u);
}

double zf_upper(const EigenSpectrum& spectrum, std::span<const double> zetas, double p_u) {
  check_zetas(zetas, "zf_upper");
  check_snr(p_u, "zf_upper");
  const int K = static_cast<int>(zetas.size());
  check_users(spectrum, K, "zf_upper");
  return zf_upper_from_terms(delta_ratios(spectrum, K), expected_logdet_unit(spectrum, K - 1), zetas,
                             p_u);
}

double mmse_exact(const EigenSpectrum& spectrum, int K, double p_u) {
  check_users(spectrum, K, "mmse_exact");
  check_snr(p_u, "mmse_exact");
  return K * kLog2e * mmse_sums(spectrum, K, p_u, false)[0];
}

double mmse_exact_cumulative(const EigenSpectrum& spectrum, int K, double p_u) {
  check_users(spectrum, K, "mmse_exact_cumulative");
  check_snr(p_u, "mmse_exact_cumulative");
  const auto s = mmse_sums(spectrum, K, p_u, true);
  return K * kLog2e * (s[0] - s[1]);
}

EigenDensity::EigenDensity(const EigenSpectrum& spectrum, int K)
    : K_(K), P_(spectrum.size()), betas_(spectrum.betas().begin(), spectrum.betas().end()) {
  check_users(spectrum, K, "eigen_pdf");
  using T = mp::Float80;
  const auto inv = detail::inverse_vandermonde<T>(spectrum.betas());
  coeffs_.assign(static_cast<std::size_t>(P_ * K_), 0.0);
  for (int l = 0; l < P_; ++l) {
    const T b(betas_[static_cast<std::size_t>(l)]);
    const T scale = pow(b, P_ - K_ - 1) / T(K_);
    for (int j = 0; j < K_; ++j) {
      const int n = P_ - K_ + 1 + j;
      const T c = scale * inv(static_cast<std::size_t>(n - 1), static_cast<std::size_t>(l)) /
                  T(gamma_int(K_ - P_ + n));
      coeffs_[static_cast<std::size_t>(l * K_ + j)] = static_cast<double>(c);
    }
  }
}

double EigenDensity::operator()(double x) const {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("eigen_pdf: x must be positive and finite");
  double f = 0.0;
  for (int l = 0; l < P_; ++l) {
    const double e = std::exp(-x / betas_[static_cast<std::size_t>(l)]);
    if (e == 0.0) continue;
    double xp = 1.0;  // x^j
    for (int j = 0; j < K_; ++j) {
      f += coeffs_[static_cast<std::size_t>(l * K_ + j)] * xp * e;
      xp *= x;
    }
  }
  return f;
}

double eigen_pdf(double x, const EigenSpectrum& spectrum, int K) {
  return EigenDensity(spectrum, K)(x);
}

PreparedSpectrum prepare_spectrum(std::span<const double> betas) {
  std::vector<double> v(betas.begin(), betas.end());
  for (double b : v) {
    if (!(b > 0.0)) throw DegenerateSpectrum("spectrum has a non-positive eigenvalue (rank-deficient Gram)");
  }
  bool jittered = false;
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i + 1;
    while (j < v.size() && v[j] == v[i]) ++j;
    for (std::size_t r = i + 1; r < j; ++r) {
      v[r] *= 1.0 + kTieJitter * static_cast<double>(r - i);
      jittered = true;
    }
    i = j;
  }
  return PreparedSpectrum{EigenSpectrum(std::move(v)), jittered};
}

AnalyticEvaluator::AnalyticEvaluator(std::span<const double> betas, int M, int K, double p_u)
    : M_(M), K_(K), p_u_(p_u), sum_beta_sq_(sum_of_squares(betas)) {
  check_snr(p_u, "AnalyticEvaluator");
  if (K < 1 || K > static_cast<int>(betas.size()) || M < 1) {
    throw InvalidArgument("AnalyticEvaluator: need 1 <= K <= P and M >= 1");
  }
  std::optional<PreparedSpectrum> prepared;
  try {
    prepared = prepare_spectrum(betas);
  } catch (const DegenerateSpectrum&) {
    flags_.push_back("degenerate_spectrum");
    return;
  }
  const EigenSpectrum& s = prepared->spectrum;
  if (prepared->jittered) flags_.push_back("jittered");
  if (s.ill_conditioned()) flags_.push_back("extended_precision");
  try {
    const auto y = y_ratios(s);
    const int P = s.size();
    zf_exponent_ = digamma_int(K) + y[static_cast<std::size_t>(P - K)];
    logdet_km1_ = logdet_from_ratios(y, P, K - 1);
    delta_ = delta_ratios(s, K);
    mmse_ = mmse_exact(s, K, p_u);
  } catch (const NumericalFailure&) {
    flags_.push_back("numerical_failure");
    zf_exponent_.reset();
    logdet_km1_.reset();
    delta_.reset();
    mmse_.reset();
  }
}

double AnalyticEvaluator::mrc(std::span<const double> zetas) const {
  check_zetas(zetas, "mrc_approx");
  const double m = static_cast<double>(M_);
  const double total = std::accumulate(zetas.begin(), zetas.end(), 0.0);
  double r = 0.0;
  for (double z : zetas) {
    r += std::log2(1.0 + p_u_ * z * (m * m + sum_beta_sq_) / (p_u_ * (total - z) * sum_beta_sq_ + m));
  }
  return r;
}

std::optional<double> AnalyticEvaluator::zf_lower(std::span<const double> zetas) const {
  if (!zf_exponent_) return std::nullopt;
  check_zetas(zetas, "zf_lower");
  return zf_lower_from_exponent(*zf_exponent_, zetas, p_u_);
}

std::optional<double> AnalyticEvaluator::zf_upper(std::span<const double> zetas) const {
  if (!delta_ || !logdet_km1_) return std::nullopt;
  check_zetas(zetas, "zf_upper");
  return zf_upper_from_terms(*delta_, *logdet_km1_, zetas, p_u_);
}

std::optional<double> AnalyticEvaluator::mmse_unit() const { return mmse_; }

}  // namespace scmimo
