#pragma once

#include <span>
#include <vector>

namespace scmimo {

// Strictly ascending, strictly positive eigenvalues beta_1 < ... < beta_P of
// the steering Gram matrix A^H A, plus the conditioning data every
// Vandermonde-type ratio depends on.
class EigenSpectrum {
 public:
  // Throws DegenerateSpectrum on ties or non-positive entries and
  // InvalidArgument on an empty or unsorted list.
  explicit EigenSpectrum(std::vector<double> betas);

  std::span<const double> betas() const { return betas_; }
  int size() const { return static_cast<int>(betas_.size()); }
  double operator[](int i) const { return betas_[static_cast<std::size_t>(i)]; }

  // min_{i<j} (beta_j - beta_i) / beta_P.
  double min_relative_gap() const { return min_relative_gap_; }

  // Set when min_relative_gap() < 1e-8; the ratio kernels then skip the
  // double-precision route and go straight to extended precision.
  bool ill_conditioned() const { return min_relative_gap_ < kConditioningThreshold; }

  // ln prod_{i<j} (beta_j - beta_i). The product itself is positive.
  double log_vandermonde() const { return log_vandermonde_; }

  static constexpr double kConditioningThreshold = 1e-8;

 private:
  std::vector<double> betas_;
  double min_relative_gap_ = 1.0;
  double log_vandermonde_ = 0.0;
};

// Elementary symmetric polynomial e_k of the given values (e_0 = 1).
double elementary_symmetric(std::span<const double> values, int k);

// |Y_n| / prod_{i<j}(beta_j - beta_i), where Y_n is the Vandermonde matrix
// [beta_p^{q-1}] with column n (1-based) multiplied entrywise by ln beta_p.
double y_ratio(const EigenSpectrum& spectrum, int n);

// y_ratio for every n = 1..P (index n-1).
std::vector<double> y_ratios(const EigenSpectrum& spectrum);

struct DeltaRatios {
  double delta1 = 0.0;  // E{|W_K|}
  double delta2 = 0.0;  // E{|W_{K-1}|}, 1 for K = 1
};

// Normalized determinants of the Delta_1 / Delta_2 matrices of the ZF upper
// bound. Both matrices are generalized Vandermonde matrices with a single
// missing power, so the ratios reduce to K! e_K(beta) and (K-1)! e_{K-1}(beta).
DeltaRatios delta_ratios(const EigenSpectrum& spectrum, int K);

// Signed (l, n) cofactor of D = [beta_p^{q-1}] (1-based indices).
double cofactor_D(const EigenSpectrum& spectrum, int l, int n);

// D_{l,n} / prod_{i<j}(beta_j - beta_i), i.e. entry (n, l) of D^{-1}.
// Evaluated without forming the Vandermonde product, so it stays finite
// when the product over- or underflows.
double normalized_cofactor(const EigenSpectrum& spectrum, int l, int n);

}  // namespace scmimo
