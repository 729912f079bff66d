#include <doctest.h>

#include <array>
#include <cmath>

#include "scmimo/errors.hpp"
#include "scmimo/model.hpp"
#include "scmimo/monte_carlo.hpp"
#include "scmimo/receivers.hpp"
#include "scmimo/rng.hpp"

using namespace scmimo;
using doctest::Approx;

namespace {

Eigen::MatrixXcd random_matrix(int rows, int cols, std::uint64_t seed) {
  RngStream rng(seed, StreamDomain::kValidation, 7);
  Eigen::MatrixXcd G(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) G(r, c) = rng.complex_normal();
  }
  return G;
}

ScenarioConfig scenario(int M, int K, int P, double d0, double p_u) {
  ScenarioConfig c;
  c.M = M;
  c.K = K;
  c.P = P;
  c.d0 = d0;
  c.p_u = p_u;
  c.doas = draw_doas(P, c.seed);
  return c;
}

constexpr std::array kAll{Receiver::kMrc, Receiver::kZf, Receiver::kMmse};

}  // namespace

TEST_CASE("receiver names round-trip") {
  for (Receiver r : kAll) CHECK(receiver_from_string(to_string(r)) == r);
  CHECK_THROWS(receiver_from_string("SIC"));
}

TEST_CASE("MRC combiner is the channel") {
  const auto G = random_matrix(8, 3, 1);
  CHECK((combiner(G, Receiver::kMrc, 10.0) - G).norm() == 0.0);
}

TEST_CASE("ZF combiner inverts the channel") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto G = random_matrix(10, 4, seed);
    const auto T = combiner(G, Receiver::kZf, 1.0);
    const Eigen::MatrixXcd I = T.adjoint() * G;
    CHECK((I - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-8);
    for (int k = 0; k < 4; ++k) {
      for (int l = 0; l < 4; ++l) {
        if (k == l) continue;
        CHECK(std::abs(T.col(k).dot(G.col(l))) <= 1e-8 * T.col(k).norm() * G.col(l).norm());
      }
    }
  }
}

TEST_CASE("single-user ZF and MRC coincide") {
  const auto G = random_matrix(6, 1, 2);
  const auto zf = combiner(G, Receiver::kZf, 3.0);
  CHECK((zf - G / G.squaredNorm()).norm() <= 1e-14);
  const double mrc = per_user_sinr(G, G, 3.0)(0);
  CHECK(mrc == Approx(3.0 * G.squaredNorm()).epsilon(1e-12));
  CHECK(per_user_sinr(zf, G, 3.0)(0) == Approx(mrc).epsilon(1e-12));
}

TEST_CASE("ZF rejects a rank-deficient channel") {
  Eigen::MatrixXcd G = random_matrix(6, 2, 3);
  G.col(1) = G.col(0);
  CHECK_THROWS_AS(combiner(G, Receiver::kZf, 1.0), SingularChannel);
  CHECK_THROWS_AS(zf_sinr(G, 1.0), SingularChannel);
}

TEST_CASE("MMSE left and right forms agree") {
  const auto G = random_matrix(8, 3, 4);
  const auto left = combiner(G, Receiver::kMmse, 10.0);
  const auto right = mmse_combiner_right_form(G, 10.0);
  CHECK((left - right).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("closed-form SINRs match the generic expression") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto G = random_matrix(12, 5, seed + 100);
    for (Receiver r : kAll) {
      const double p_u = 0.1 * static_cast<double>(seed);
      const auto generic = per_user_sinr(combiner(G, r, p_u), G, p_u);
      const auto closed = closed_form_sinr(G, r, p_u);
      for (int k = 0; k < 5; ++k) CHECK(closed(k) == Approx(generic(k)).epsilon(1e-8));
    }
  }
}

TEST_CASE("MMSE dominates ZF per realization") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto G = random_matrix(8, 4, seed + 200);
    const auto zf = zf_sinr(G, 5.0);
    const auto mmse = mmse_sinr(G, 5.0);
    for (int k = 0; k < 4; ++k) CHECK(mmse(k) >= zf(k) * (1 - 1e-12));
  }
}

TEST_CASE("determinant identity") {
  CHECK(mmse_det_identity_check(random_matrix(6, 2, 5), 1.0).max_relative_residual <= 1e-9);
  CHECK(mmse_det_identity_check(random_matrix(4, 1, 6), 2.0).max_relative_residual <= 1e-14);
  Eigen::MatrixXcd near = random_matrix(6, 3, 7);
  near.col(2) = near.col(1) + 1e-7 * random_matrix(6, 1, 8);
  const auto r = mmse_det_identity_check(near, 1.0);
  CHECK((r.max_relative_residual <= 1e-6 || r.ill_conditioned));
  Eigen::MatrixXcd singular = random_matrix(6, 2, 9);
  singular.col(1) = singular.col(0);
  CHECK_THROWS_AS(mmse_det_identity_check(singular, 1.0), SingularChannel);
}

TEST_CASE("zero-SNR limit") {
  const auto c = scenario(16, 3, 4, 4.0, 1e-12);
  for (Receiver r : kAll) CHECK(mc_sum_se(c, r, 200, 1).sum_se <= 1e-9);
}

TEST_CASE("single-user receivers agree") {
  const auto c = scenario(16, 1, 4, 4.0, 10.0);
  const auto est = mc_sum_se(c, kAll, McOptions{2000, 1});
  CHECK(est[0].sum_se == Approx(est[1].sum_se).epsilon(1e-12));
  CHECK(est[1].sum_se == Approx(est[2].sum_se).epsilon(1e-12));
}

TEST_CASE("estimator bookkeeping") {
  const auto c = scenario(32, 4, 8, 4.0, 10.0);
  const auto est = mc_sum_se(c, kAll, McOptions{500, 1});
  for (const auto& e : est) {
    double total = 0.0;
    for (double v : e.per_user_se) total += v;
    CHECK(e.sum_se == Approx(total).epsilon(1e-12));
    CHECK(e.trials == 500);
    CHECK(e.ci_halfwidth > 0.0);
  }
  CHECK(est[2].sum_se >= est[1].sum_se);
  CHECK(mc_sum_se(c, Receiver::kZf, 500, 1).sum_se == est[1].sum_se);
}

TEST_CASE("estimates do not depend on the worker count") {
  auto c = scenario(32, 4, 8, 2.0, 10.0);
  c.fading = FadingMode::kPathlossShadowing;
  c.profile_mode = ProfileMode::kPerTrial;
  for (Receiver r : kAll) {
    const auto a = mc_sum_se(c, r, 300, 1);
    const auto b = mc_sum_se(c, r, 300, 3);
    CHECK(a.sum_se == b.sum_se);
    CHECK(a.ci_halfwidth == b.ci_halfwidth);
    CHECK(a.per_user_se == b.per_user_se);
  }
}

TEST_CASE("confidence interval shrinks with trials") {
  const auto c = scenario(32, 4, 8, 4.0, 10.0);
  const auto small = mc_sum_se(c, Receiver::kMmse, 400, 1);
  const auto large = mc_sum_se(c, Receiver::kMmse, 6400, 1);
  CHECK(large.ci_halfwidth < 0.5 * small.ci_halfwidth);
}

TEST_CASE("too few trials") {
  const auto c = scenario(16, 2, 4, 4.0, 10.0);
  CHECK_THROWS_AS(mc_sum_se(c, Receiver::kMrc, 99, 1), InvalidArgument);
}

TEST_CASE("fixed profile is reproducible") {
  auto c = scenario(16, 3, 4, 4.0, 10.0);
  c.fading = FadingMode::kPathlossShadowing;
  const auto a = fixed_profile(c);
  CHECK(a.zetas == fixed_profile(c).zetas);
  CHECK(a.zetas.size() == 3);
  for (double z : a.zetas) CHECK(z > 0.0);
  c.profile_mode = ProfileMode::kPerTrial;
  CHECK(trial_profile(c, 0).zetas != trial_profile(c, 1).zetas);
}
