#pragma once

// Shared machinery for sums of the form  sum_p [D^{-1}]_{n,p} g(beta_p),
// where D = [beta_p^{q-1}] is the Vandermonde matrix of the spectrum. Every
// determinant ratio in the closed forms (|Y_n|/V, D_{l,n}/V, the MMSE and
// eigenvalue-density sums) has this shape. The entries of D^{-1} come from
// the cofactor identity
//   D_{p,n} = (-1)^{p+n} V(beta without p) e_{P-n}(beta without p),
// so  [D^{-1}]_{n,p} = (-1)^{p+n} e_{P-n}(beta_{-p}) / prod_{j!=p} |beta_p - beta_j|.
// Each entry is a product of positive factors; any cancellation is confined
// to the final sum over p, which is where extended precision is spent.

#include <cmath>
#include <span>
#include <vector>

#include "scmimo/errors.hpp"
#include "scmimo/multiprecision.hpp"
#include "scmimo/spectrum.hpp"

namespace scmimo::detail {

// e_0..e_m of `values` (all positive) by the standard product recurrence.
template <class T>
std::vector<T> elementary_symmetric_all(const std::vector<T>& values) {
  std::vector<T> e(values.size() + 1, T(0));
  e[0] = T(1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t k = i + 1; k >= 1; --k) e[k] += values[i] * e[k - 1];
  }
  return e;
}

// inv(n-1, p-1) = [D^{-1}]_{n,p}, 1-based n, p.
template <class T>
mp::SquareMatrix<T> inverse_vandermonde(std::span<const double> betas) {
  const std::size_t P = betas.size();
  mp::SquareMatrix<T> inv(P);
  std::vector<T> others;
  others.reserve(P);
  for (std::size_t p = 0; p < P; ++p) {
    others.clear();
    T denom(1);
    const T bp(betas[p]);
    for (std::size_t j = 0; j < P; ++j) {
      if (j == p) continue;
      const T bj(betas[j]);
      others.push_back(bj);
      denom *= (j < p) ? bp - bj : bj - bp;
    }
    const std::vector<T> e = elementary_symmetric_all(others);
    for (std::size_t n = 0; n < P; ++n) {
      const T mag = e[P - 1 - n] / denom;
      inv(n, p) = ((n + p) % 2 == 0) ? mag : -mag;
    }
  }
  return inv;
}

template <class T>
struct SignedSum {
  T value = T(0);
  T magnitude = T(0);  // sum of |terms|, used to measure cancellation

  void add(const T& term) {
    using std::abs;
    value += term;
    magnitude += abs(term);
  }
};

// Double results are accepted when at most three digits cancelled.
inline constexpr double kMaxDoubleCancellation = 1e3;
inline constexpr double kExtendedRelTol = 1e-14;

// Evaluates a batch of ratio sums. `eval(Tag<T>)` must return a
// std::vector<SignedSum<T>>. The double route is tried first unless the
// spectrum is flagged ill-conditioned; otherwise, or when cancellation is
// too strong, the batch is re-evaluated at increasing MPFR precision until
// two levels agree.
template <class Eval>
std::vector<double> evaluate_ratio_batch(const EigenSpectrum& spectrum, Eval&& eval) {
  if (!spectrum.ill_conditioned()) {
    const auto sums = eval(mp::Tag<double>{});
    std::vector<double> out;
    out.reserve(sums.size());
    bool ok = true;
    for (const auto& s : sums) {
      if (!std::isfinite(s.value) || !std::isfinite(s.magnitude) ||
          s.magnitude > kMaxDoubleCancellation * std::abs(s.value)) {
        ok = false;
        break;
      }
      out.push_back(s.value);
    }
    if (ok) return out;
  }

  const auto to_double = [&](auto tag) {
    const auto sums = eval(tag);
    std::vector<double> out;
    out.reserve(sums.size());
    for (const auto& s : sums) out.push_back(static_cast<double>(s.value));
    return out;
  };
  const auto agree = [](const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] != b[i] && !(std::abs(a[i] - b[i]) <= kExtendedRelTol * std::abs(b[i]))) return false;
    }
    return true;
  };
  std::vector<double> prev = to_double(mp::Tag<mp::Float40>{});
  std::vector<double> next = to_double(mp::Tag<mp::Float80>{});
  if (agree(prev, next)) return next;
  prev = std::move(next);
  next = to_double(mp::Tag<mp::Float160>{});
  if (agree(prev, next)) return next;
  prev = std::move(next);
  next = to_double(mp::Tag<mp::Float320>{});
  if (agree(prev, next)) return next;
  throw NumericalFailure("determinant ratio did not stabilize at 320 digits");
}

}  // namespace scmimo::detail
