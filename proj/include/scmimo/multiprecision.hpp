#pragma once

// Extended-precision scalar types and helpers shared by the spectrum
// construction (model) and the determinant-ratio kernels (specfun).

#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace scmimo::mp {

template <unsigned Digits>
using Float = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<Digits>,
    boost::multiprecision::et_off>;

using Float40 = Float<40>;
using Float80 = Float<80>;
using Float160 = Float<160>;
using Float320 = Float<320>;

template <class T>
struct Tag {
  using type = T;
};

template <class T>
inline constexpr unsigned kDigits = std::numeric_limits<T>::digits10;

// Dense row-major square matrix; just enough for the small P x P kernels.
template <class T>
class SquareMatrix {
 public:
  explicit SquareMatrix(std::size_t n) : n_(n), data_(n * n, T(0)) {}

  std::size_t size() const { return n_; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }

 private:
  std::size_t n_;
  std::vector<T> data_;
};

// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
// Jacobi keeps small eigenvalues of graded matrices accurate to nearly
// full working precision, which the QR algorithm does not guarantee.
template <class T>
std::vector<T> symmetric_eigenvalues(SquareMatrix<T> a) {
  using std::abs;
  using std::sqrt;
  const std::size_t n = a.size();
  const T eps = std::numeric_limits<T>::epsilon();
  for (int sweep = 0; sweep < 100; ++sweep) {
    T off(0);
    T diag(0);
    for (std::size_t i = 0; i < n; ++i) {
      diag += a(i, i) * a(i, i);
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    }
    if (off <= eps * eps * diag * T(1e-4) || off == T(0)) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const T apq = a(p, q);
        if (apq == T(0)) continue;
        const T theta = (a(q, q) - a(p, p)) / (T(2) * apq);
        const T sign = theta >= T(0) ? T(1) : T(-1);
        const T t = sign / (abs(theta) + sqrt(theta * theta + T(1)));
        const T c = T(1) / sqrt(t * t + T(1));
        const T s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const T akp = a(k, p);
          const T akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const T apk = a(p, k);
          const T aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = T(0);
        a(q, p) = T(0);
      }
    }
  }
  std::vector<T> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);
  std::sort(values.begin(), values.end());
  return values;
}

}  // namespace scmimo::mp
