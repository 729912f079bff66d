#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "scmimo/errors.hpp"
#include "scmimo/model.hpp"
#include "scmimo/rng.hpp"

using namespace scmimo;
using doctest::Approx;

TEST_CASE("steering vector examples") {
  const Eigen::VectorXcd broadside = steering_vector(0.0, 4, 0.5, 4);
  for (int m = 0; m < 4; ++m) {
    CHECK(broadside(m).real() == Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(broadside(m).imag()) <= 1e-15);
  }
  const Eigen::VectorXcd endfire = steering_vector(std::numbers::pi / 2, 2, 0.5, 1);
  CHECK(endfire(0).real() == Approx(1.0));
  CHECK(endfire(1).real() == Approx(-1.0));
  CHECK(std::abs(endfire(1).imag()) <= 1e-15);
  CHECK(steering_vector(std::numbers::pi / 6, 8, 0.05, 12).squaredNorm() ==
        Approx(8.0 / 12.0).epsilon(1e-12));
}

TEST_CASE("steering vector argument checks") {
  CHECK_THROWS_AS(steering_vector(NAN, 4, 0.5, 4), InvalidArgument);
  CHECK_THROWS_AS(steering_vector(0.1, 0, 0.5, 4), InvalidArgument);
  CHECK_THROWS_AS(steering_vector(0.1, 4, 0.0, 4), InvalidArgument);
  CHECK_THROWS_AS(steering_vector(0.1, 4, 0.5, 0), InvalidArgument);
}

TEST_CASE("single DOA gives beta = M") {
  for (int M : {1, 7, 64}) {
    const auto s = build_steering_set(std::vector<double>{0.37}, M, 2.0);
    REQUIRE(s.betas.size() == 1);
    CHECK(s.betas[0] == Approx(M).epsilon(1e-13));
  }
}

TEST_CASE("eigenvalues sum to M") {
  const std::vector<double> doas{-std::numbers::pi / 4, std::numbers::pi / 4};
  const auto s = build_steering_set(doas, 64, 32.0);
  CHECK(std::abs(s.betas[0] + s.betas[1] - 64.0) <= 1e-10);
  CHECK(s.betas[0] <= s.betas[1]);
}

TEST_CASE("P=12 uniform grid against a brute-force Gram matrix") {
  std::vector<double> doas;
  for (int i = 0; i < 12; ++i) doas.push_back(-std::numbers::pi / 2 + std::numbers::pi * (i + 0.5) / 12);
  const auto s = build_steering_set(doas, 128, 4.0);
  const Eigen::MatrixXcd gram = oracle::brute_force_gram(doas, 128, 4.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
  for (int i = 0; i < 12; ++i) {
    CHECK(std::abs(s.betas[static_cast<std::size_t>(i)] - es.eigenvalues()(i)) <= 1e-9);
  }
  CHECK((s.gram - gram).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_FALSE(s.rank_deficient);
}

TEST_CASE("small eigenvalues are resolved below double round-off") {
  // d0 = 1 packs all DOAs into one beam; the smallest eigenvalues sit far
  // below 1e-16 of the largest, yet stay positive and ordered.
  const auto doas = draw_doas(12, 1);
  const auto s = build_steering_set(doas, 128, 1.0);
  CHECK(s.betas.front() > 0.0);
  CHECK(s.betas.front() < 1e-12 * s.betas.back());
  CHECK(std::is_sorted(s.betas.begin(), s.betas.end()));
  double sum = 0.0;
  for (double b : s.betas) sum += b;
  CHECK(sum == Approx(128.0).epsilon(1e-12));
}

TEST_CASE("duplicate DOAs are flagged, not rejected") {
  const std::vector<double> doas{0.2, 0.2, -0.5};
  const auto s = build_steering_set(doas, 16, 4.0);
  CHECK(s.rank_deficient);
  CHECK(s.betas[0] == 0.0);
}

TEST_CASE("steering set argument checks") {
  const std::vector<double> doas{0.1, 0.2, 0.3};
  CHECK_THROWS_AS(build_steering_set(doas, 2, 1.0), InvalidArgument);
  CHECK_THROWS_AS(build_steering_set(doas, 8, 0.0), InvalidArgument);
  const std::vector<double> bad{0.1, INFINITY};
  CHECK_THROWS_AS(build_steering_set(bad, 8, 1.0), InvalidArgument);
}

TEST_CASE("DOA draws are seeded and in range") {
  const auto a = draw_doas(10, 5);
  CHECK(a == draw_doas(10, 5));
  CHECK(a != draw_doas(10, 6));
  for (double t : a) {
    CHECK(t >= -std::numbers::pi / 2);
    CHECK(t <= std::numbers::pi / 2);
  }
}

TEST_CASE("scenario validation") {
  ScenarioConfig c;
  c.doas = draw_doas(c.P, c.seed);
  CHECK_NOTHROW(c.validate());
  ScenarioConfig k = c;
  k.K = 10;
  CHECK_THROWS_AS(k.validate(), InvalidArgument);
  ScenarioConfig p = c;
  p.p_u = -1.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("unit large-scale profile") {
  ScenarioConfig c;
  c.K = 6;
  RngStream rng(1, StreamDomain::kLargeScale, 0);
  const auto prof = sample_large_scale(c, rng);
  CHECK(prof.zetas == std::vector<double>(6, 1.0));
}

TEST_CASE("vanishing exponents give unit gains") {
  ScenarioConfig c;
  c.fading = FadingMode::kPathlossShadowing;
  c.cell.shadowing_sigma_db = 0.0;
  c.cell.pathloss_exponent = 0.0;
  RngStream rng(2, StreamDomain::kLargeScale, 0);
  for (int i = 0; i < 100; ++i) {
    for (double z : sample_large_scale(c, rng).zetas) CHECK(z == Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("shadowing at r_min has zero mean in dB") {
  CellGeometry cell;
  RngStream rng(3, StreamDomain::kValidation, 0);
  double sum = 0.0;
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) {
    const double z = large_scale_gain(cell.r_min_m, sample_shadowing_db(8.0, rng), cell);
    sum += 10.0 * std::log10(z);
  }
  CHECK(std::abs(sum / kDraws) <= 0.1);
}

TEST_CASE("user distances lie inside the cell") {
  CellGeometry cell;
  RngStream rng(4, StreamDomain::kValidation, 0);
  for (int i = 0; i < 10000; ++i) {
    const double r = sample_user_distance(cell, rng);
    CHECK(r >= cell.r_min_m);
    CHECK(r <= cell.radius_m);
  }
}

TEST_CASE("zero small-scale fading gives a zero channel") {
  const auto s = build_steering_set(draw_doas(4, 1), 16, 4.0);
  LargeScaleProfile prof{{1.0, 2.0}, {}};
  const auto ch = assemble_channel(s, Eigen::MatrixXcd::Zero(4, 2), prof);
  CHECK(ch.G.rows() == 16);
  CHECK(ch.G.cols() == 2);
  CHECK(ch.G.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("channel second moments") {
  const int M = 32;
  const auto s = build_steering_set(draw_doas(8, 2), M, 4.0);
  double sum_beta2 = 0.0;
  for (double b : s.betas) sum_beta2 += b * b;
  RngStream rng(5, StreamDomain::kValidation, 0);
  constexpr int kDraws = 100000;
  double norm2 = 0.0;
  double cross = 0.0;
  const LargeScaleProfile one{{1.0}, {}};
  const LargeScaleProfile two{{1.0, 1.0}, {}};
  for (int i = 0; i < kDraws; ++i) {
    norm2 += sample_channel(s, one, rng).G.col(0).squaredNorm();
    const auto ch = sample_channel(s, two, rng);
    cross += std::norm(ch.G.col(0).dot(ch.G.col(1)));
  }
  CHECK(norm2 / kDraws == Approx(M).epsilon(0.02));
  CHECK(cross / kDraws == Approx(sum_beta2).epsilon(0.03));
}

TEST_CASE("channel scales with the square root of the gains") {
  const auto s = build_steering_set(draw_doas(4, 3), 8, 2.0);
  RngStream rng(6, StreamDomain::kValidation, 0);
  Eigen::MatrixXcd H(4, 2);
  for (int c = 0; c < 2; ++c) {
    for (int r = 0; r < 4; ++r) H(r, c) = rng.complex_normal();
  }
  const auto unit = assemble_channel(s, H, {{1.0, 1.0}, {}});
  const auto scaled = assemble_channel(s, H, {{4.0, 9.0}, {}});
  CHECK((scaled.G.col(0) - 2.0 * unit.G.col(0)).norm() <= 1e-12);
  CHECK((scaled.G.col(1) - 3.0 * unit.G.col(1)).norm() <= 1e-12);
  CHECK((unit.G - s.A * H).norm() <= 1e-12);
}
