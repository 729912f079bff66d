#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "oracles.hpp"
#include "scmimo/errors.hpp"
#include "scmimo/rng.hpp"
#include "scmimo/special_functions.hpp"
#include "scmimo/spectrum.hpp"
#include "scmimo/vandermonde_kernel.hpp"

using namespace scmimo;
using doctest::Approx;

namespace {

std::vector<double> random_betas(RngStream& rng, int P, double lo, double hi) {
  std::vector<double> b(static_cast<std::size_t>(P));
  for (double& x : b) x = rng.uniform(lo, hi);
  std::sort(b.begin(), b.end());
  return b;
}

double quad_expint(int n, double x) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate([&](double t) { return std::exp(-x * t) * std::pow(t, -n); }, 1.0,
                              std::numeric_limits<double>::infinity(), 1e-14);
}

}  // namespace

TEST_CASE("digamma closed forms") {
  const double gamma = std::numbers::egamma;
  CHECK(digamma(1.0) == Approx(-gamma).epsilon(1e-14));
  CHECK(digamma(2.0) == Approx(1.0 - gamma).epsilon(1e-14));
  CHECK(digamma(0.5) == Approx(-gamma - 2.0 * std::numbers::ln2).epsilon(1e-14));
  CHECK(digamma_int(1) == Approx(-gamma).epsilon(1e-15));
  CHECK(digamma_int(6) == Approx(-gamma + 1 + 0.5 + 1.0 / 3 + 0.25 + 0.2).epsilon(1e-15));
}

TEST_CASE("digamma absolute error on [1e-3, 1e6]") {
  RngStream rng(11, StreamDomain::kValidation, 1);
  for (int i = 0; i < 400; ++i) {
    const double x = std::pow(10.0, rng.uniform(-3.0, 6.0));
    CHECK(std::abs(digamma(x) - boost::math::digamma(x)) <= 1e-12);
  }
}

TEST_CASE("digamma rejects non-positive arguments") {
  CHECK_THROWS_AS(digamma(0.0), DomainError);
  CHECK_THROWS_AS(digamma(-1.5), DomainError);
}

TEST_CASE("gamma at integers") {
  CHECK(gamma_int(1) == 1.0);
  CHECK(gamma_int(5) == 24.0);
  CHECK(log_gamma_int(11) == Approx(std::log(3628800.0)).epsilon(1e-15));
  CHECK_THROWS_AS(gamma_int(0), DomainError);
}

TEST_CASE("exponential integral examples") {
  CHECK(exp_integral(2, 0.0) == 1.0);
  CHECK(exp_integral(5, 0.0) == Approx(0.25));
  CHECK(exp_integral(2, 1e-12) == Approx(1.0).epsilon(1e-9));
  // E_1(1) against quadrature of the defining integral
  const double e1 = exp_integral(1, 1.0);
  CHECK(e1 == Approx(quad_expint(1, 1.0)).epsilon(1e-12));
  CHECK(e1 == Approx(0.2193839344).epsilon(1e-10));
  // n E_{n+1}(x) + x E_n(x) = e^{-x}
  const double x = 0.7;
  CHECK(std::abs(3 * exp_integral(4, x) + x * exp_integral(3, x) - std::exp(-x)) <= 1e-12);
}

TEST_CASE("exponential integral against quadrature") {
  RngStream rng(12, StreamDomain::kValidation, 1);
  for (int i = 0; i < 200; ++i) {
    const int n = 1 + static_cast<int>(rng.uniform() * 12);
    const double x = std::pow(10.0, rng.uniform(-3.0, 2.0));
    const double ref = quad_expint(n, x);
    CHECK(std::abs(exp_integral(n, x) - ref) <= 1e-10 * ref);
  }
}

TEST_CASE("scaled exponential integral stays finite for huge arguments") {
  // e^x E_1(x) ~ 1/x (1 - 1/x + 2/x^2) for large x
  const double x = 1e6;
  CHECK(scaled_exp_integral(1, x) == Approx((1 - 1 / x + 2 / (x * x)) / x).epsilon(1e-12));
  CHECK(std::isfinite(scaled_exp_integral(3, 1e300)));
  const mp::Float80 big("1e40");
  CHECK(static_cast<double>(scaled_exp_integral(2, big) * big) == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("exponential integral argument checks") {
  CHECK_THROWS_AS(exp_integral(0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(exp_integral(1, 0.0), DomainError);
  CHECK_THROWS_AS(exp_integral(2, -1.0), DomainError);
}

TEST_CASE("spectrum validation") {
  CHECK_THROWS_AS(EigenSpectrum({}), InvalidArgument);
  CHECK_THROWS_AS(EigenSpectrum({1.0, 1.0}), DegenerateSpectrum);
  CHECK_THROWS_AS(EigenSpectrum({0.0, 1.0}), DegenerateSpectrum);
  CHECK_THROWS_AS(EigenSpectrum({2.0, 1.0}), InvalidArgument);
  const EigenSpectrum s({1.0, 1.0 + 1e-10, 4.0});
  CHECK(s.ill_conditioned());
  CHECK_FALSE(EigenSpectrum({1.0, 2.0}).ill_conditioned());
  CHECK(EigenSpectrum({1.0, 2.0, 4.0}).log_vandermonde() == Approx(std::log(1.0 * 3.0 * 2.0)));
}

TEST_CASE("y_ratio two by two") {
  const EigenSpectrum s({1.0, 2.0});
  CHECK(y_ratio(s, 1) == Approx(-std::numbers::ln2).epsilon(1e-14));
  // |[[1, 0], [1, 2 ln 2]]| / (2 - 1) = 2 ln 2
  CHECK(y_ratio(s, 2) == Approx(2.0 * std::numbers::ln2).epsilon(1e-14));
  CHECK_THROWS_AS(y_ratio(s, 3), InvalidArgument);
}

TEST_CASE("y_ratio against LU determinants") {
  RngStream rng(13, StreamDomain::kValidation, 1);
  for (int t = 0; t < 20; ++t) {
    const auto b = random_betas(rng, 5, 0.1, 10.0);
    const EigenSpectrum s(b);
    for (int n = 1; n <= 5; ++n) {
      const double ref = oracle::y_ratio_lu(b, n);
      CHECK(std::abs(y_ratio(s, n) - ref) <= 1e-8 * std::abs(ref));
    }
  }
}

TEST_CASE("y_ratio against 113-bit reference for moderately separated spectra") {
  RngStream rng(14, StreamDomain::kValidation, 1);
  for (int t = 0; t < 20; ++t) {
    const int P = 2 + static_cast<int>(rng.uniform() * 9);
    auto b = random_betas(rng, P, 1e-3, 50.0);
    const EigenSpectrum s(b);
    if (s.min_relative_gap() < 1e-6) continue;
    const auto y = y_ratios(s);
    for (int n = 1; n <= P; ++n) {
      const double ref = oracle::y_ratio_quad(b, n);
      CHECK(std::abs(y[static_cast<std::size_t>(n - 1)] - ref) <= 1e-6 * std::abs(ref));
    }
  }
}

TEST_CASE("sum of y ratios equals sum of log eigenvalues") {
  RngStream rng(15, StreamDomain::kValidation, 1);
  for (int t = 0; t < 30; ++t) {
    const int P = 1 + static_cast<int>(rng.uniform() * 12);
    const auto b = random_betas(rng, P, 1.5, 30.0);
    double logs = 0.0;
    for (double x : b) logs += std::log(x);
    double total = 0.0;
    for (double v : y_ratios(EigenSpectrum(b))) total += v;
    CHECK(std::abs(total - logs) <= 1e-8 * std::abs(logs));
  }
  // Spread over twenty decades: takes the extended-precision route.
  const std::vector<double> wide{1e-20, 3e-15, 2e-9, 1e-4, 0.5, 7.0, 40.0};
  double logs = 0.0;
  for (double x : wide) logs += std::log(x);
  double total = 0.0;
  for (double v : y_ratios(EigenSpectrum(wide))) total += v;
  CHECK(std::abs(total - logs) <= 1e-8 * std::abs(logs));
}

TEST_CASE("delta ratios") {
  const EigenSpectrum two({0.7, 2.5});
  const auto d = delta_ratios(two, 1);
  CHECK(d.delta1 == Approx(3.2).epsilon(1e-14));
  CHECK(d.delta2 == 1.0);
  RngStream rng(16, StreamDomain::kValidation, 1);
  const EigenSpectrum s(random_betas(rng, 6, 0.1, 3.0));
  CHECK(delta_ratios(s, 1).delta2 == 1.0);
  CHECK_THROWS_AS(delta_ratios(s, 7), InvalidArgument);
}

TEST_CASE("delta ratio matches Monte-Carlo determinant moment") {
  RngStream rng(17, StreamDomain::kValidation, 1);
  const auto b = random_betas(rng, 4, 0.2, 3.0);
  const auto d = delta_ratios(EigenSpectrum(b), 2);
  Eigen::VectorXd beta(4);
  for (int i = 0; i < 4; ++i) beta(i) = b[static_cast<std::size_t>(i)];
  constexpr int kDraws = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    Eigen::MatrixXcd H(4, 2);
    for (int c = 0; c < 2; ++c) {
      for (int r = 0; r < 4; ++r) H(r, c) = rng.complex_normal();
    }
    const Eigen::Matrix2cd W = H.adjoint() * beta.asDiagonal() * H;
    const double det = (W(0, 0) * W(1, 1) - W(0, 1) * W(1, 0)).real();
    sum += det;
    sum2 += det * det;
  }
  const double mean = sum / kDraws;
  const double se = std::sqrt((sum2 / kDraws - mean * mean) / kDraws);
  CHECK(std::abs(mean - d.delta1) <= 3 * se);
}

TEST_CASE("cofactors of a 2x2 Vandermonde matrix") {
  const EigenSpectrum s({1.5, 4.0});
  CHECK(cofactor_D(s, 1, 1) == Approx(4.0));
  CHECK(cofactor_D(s, 1, 2) == Approx(-1.0));
  CHECK(cofactor_D(s, 2, 1) == Approx(-1.5));
  CHECK(cofactor_D(s, 2, 2) == Approx(1.0));
  CHECK_THROWS_AS(cofactor_D(s, 0, 1), InvalidArgument);
}

TEST_CASE("Laplace expansion along every row") {
  RngStream rng(18, StreamDomain::kValidation, 1);
  for (int t = 0; t < 20; ++t) {
    const auto b = random_betas(rng, 3, 0.1, 10.0);
    const EigenSpectrum s(b);
    const double v = oracle::vandermonde_product(b);
    for (int l = 1; l <= 3; ++l) {
      double sum = 0.0;
      double alien = 0.0;  // row l entries against row (l mod 3) + 1 cofactors
      const int other = l % 3 + 1;
      for (int n = 1; n <= 3; ++n) {
        sum += std::pow(b[l - 1], n - 1) * cofactor_D(s, l, n);
        alien += std::pow(b[l - 1], n - 1) * cofactor_D(s, other, n);
      }
      CHECK(sum == Approx(v).epsilon(1e-10));
      CHECK(std::abs(alien) <= 1e-10 * std::abs(v) * 100);
    }
  }
}

TEST_CASE("cofactors against LU minors") {
  RngStream rng(19, StreamDomain::kValidation, 1);
  for (int t = 0; t < 10; ++t) {
    const auto b = random_betas(rng, 6, 0.1, 10.0);
    const EigenSpectrum s(b);
    for (int l = 1; l <= 6; ++l) {
      for (int n = 1; n <= 6; ++n) {
        const double ref = oracle::cofactor_lu(b, l, n);
        CHECK(std::abs(cofactor_D(s, l, n) - ref) <= 1e-8 * std::abs(ref));
        CHECK(normalized_cofactor(s, l, n) == Approx(ref / oracle::vandermonde_product(b)).epsilon(1e-8));
      }
    }
  }
  // Last column: signed Vandermonde of the remaining values.
  const std::vector<double> b{0.5, 1.0, 3.0};
  CHECK(cofactor_D(EigenSpectrum(b), 2, 3) == Approx(-(3.0 - 0.5)));
}

TEST_CASE("inverse Vandermonde kernel inverts D") {
  const std::vector<double> b{0.3, 1.1, 2.0, 5.5};
  const auto inv = detail::inverse_vandermonde<double>(b);
  const Eigen::MatrixXd d = oracle::vandermonde(b);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += d(r, k) * inv(static_cast<std::size_t>(k), static_cast<std::size_t>(c));
      CHECK(s == Approx(r == c ? 1.0 : 0.0).epsilon(1e-12));
    }
  }
}
