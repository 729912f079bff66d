#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scmimo/spectrum.hpp"

namespace scmimo {

// --- Moments of the correlated channel g_k = sqrt(zeta_k) A h_k ----------

struct GramMoments {
  std::vector<double> norm4;               // E{||g_k||^4} = zeta_k^2 (M^2 + sum beta^2)
  std::vector<double> norm2;               // E{||g_k||^2} = M zeta_k
  std::vector<std::vector<double>> cross;  // E{|g_k^H g_l|^2} = zeta_k zeta_l sum beta^2 (k != l)
};

GramMoments gram_moments(std::span<const double> betas, std::span<const double> zetas, int M);

// --- Closed-form sum SE, bits/s/Hz ---------------------------------------
//
// All take the large-scale gains zeta (size K). With every zeta equal to
// one they reduce to the unit-fading expressions.

// MRC approximation
//   sum_k log2(1 + p zeta_k (M^2 + sum beta^2) / (p sum_{l!=k} zeta_l sum beta^2 + M)).
// Needs only sum beta^2, so degenerate spectra are fine.
double mrc_approx(std::span<const double> betas, std::span<const double> zetas, int M, double p_u);

// ZF lower bound  sum_k log2(1 + p zeta_k exp(psi(K) + |Y_{P-K+1}|/V)).
double zf_lower(const EigenSpectrum& spectrum, std::span<const double> zetas, double p_u);

// ZF upper bound. In the form implemented here the zeta products cancel
// inside the logarithm:
//   sum_k [ log2(delta2 + p zeta_k delta1) - E{ln|W_{K-1}|} / ln 2 ].
double zf_upper(const EigenSpectrum& spectrum, std::span<const double> zetas, double p_u);

// Exact MMSE sum SE for unit large-scale fading:
//   K log2(e) sum_l sum_{n=P-K+1}^{P} beta_l^{n-1} (D_{l,n}/V) e^{x_l} E_{n-P+K}(x_l),
// with x_l = 1 / (beta_l p_u).
double mmse_exact(const EigenSpectrum& spectrum, int K, double p_u);

// The same quantity from the difference of the two cumulative E_h sums
// (log-det of the K-user Wishart minus the (K-1)-user one). Kept as a
// separate evaluation route for cross-checking mmse_exact().
double mmse_exact_cumulative(const EigenSpectrum& spectrum, int K, double p_u);

// --- Log-determinants, nats ----------------------------------------------

// E{ln|W_m|} for the unit-fading Wishart W_m = H_m^H A^H A H_m with m
// columns: sum_{n=1}^{m} psi(n) + sum_{n=P-m+1}^{P} |Y_n|/V. m = 0 gives 0.
double expected_logdet_unit(const EigenSpectrum& spectrum, int users);

// E{ln|G^H G|} = sum_n ln zeta_n + E{ln|W_K|}. With drop_user = k
// (0-based) this is E{ln|G_k^H G_k|} over the other K-1 users.
double expected_logdet(const EigenSpectrum& spectrum, std::span<const double> zetas,
                       std::optional<int> drop_user = std::nullopt);

// --- Marginal eigenvalue density of W_K ----------------------------------

// f(x) = 1/(K V) sum_l sum_{n=P-K+1}^{P} x^{K+n-P-1} e^{-x/beta_l}
//        beta_l^{P-K-1} D_{l,n} / Gamma(K-P+n).
// Coefficients are formed once in extended precision; evaluation is in
// double, so the absolute error is about 1e-16 times the largest term.
class EigenDensity {
 public:
  EigenDensity(const EigenSpectrum& spectrum, int K);

  double operator()(double x) const;
  int users() const { return K_; }
  double largest_beta() const { return betas_.back(); }

 private:
  int K_;
  int P_;
  std::vector<double> betas_;
  std::vector<double> coeffs_;  // (l, j) with j = n - (P-K+1), row-major P x K
};

double eigen_pdf(double x, const EigenSpectrum& spectrum, int K);

// --- Spectrum preparation ------------------------------------------------

struct PreparedSpectrum {
  EigenSpectrum spectrum;
  bool jittered = false;
};

// Builds an EigenSpectrum from raw ascending eigenvalues. Tied values get
// a single deterministic relative perturbation: the j-th member of a run of
// equal values is scaled by (1 + 1e-9 j). Throws DegenerateSpectrum if the
// result is still not strictly ascending or any value is <= 0.
PreparedSpectrum prepare_spectrum(std::span<const double> betas);

inline constexpr double kTieJitter = 1e-9;

// --- Bundle --------------------------------------------------------------

struct AnalyticBundle {
  std::optional<double> mrc_approx;
  std::optional<double> zf_lower;
  std::optional<double> zf_upper;
  std::optional<double> mmse_exact;  // unit large-scale fading only
  std::vector<std::string> flags;
};

// Caches every zeta-independent term so that the bounds can be evaluated
// cheaply for many large-scale profiles.
class AnalyticEvaluator {
 public:
  // Never throws on a degenerate spectrum; the spectrum-based expressions
  // are then reported as unavailable with a flag.
  AnalyticEvaluator(std::span<const double> betas, int M, int K, double p_u);

  double mrc(std::span<const double> zetas) const;
  std::optional<double> zf_lower(std::span<const double> zetas) const;
  std::optional<double> zf_upper(std::span<const double> zetas) const;
  std::optional<double> mmse_unit() const;

  const std::vector<std::string>& flags() const { return flags_; }

 private:
  int M_;
  int K_;
  double p_u_;
  double sum_beta_sq_ = 0.0;
  std::optional<double> zf_exponent_;   // psi(K) + |Y_{P-K+1}|/V
  std::optional<double> logdet_km1_;    // E{ln|W_{K-1}|}
  std::optional<DeltaRatios> delta_;
  std::optional<double> mmse_;
  std::vector<std::string> flags_;
};

}  // namespace scmimo
