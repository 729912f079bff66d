#include "scmimo/validation.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <fmt/format.h>

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include "scmimo/analytic.hpp"
#include "scmimo/errors.hpp"
#include "scmimo/monte_carlo.hpp"
#include "scmimo/special_functions.hpp"
#include "scmimo/vandermonde_kernel.hpp"
#include "scmimo/sweep.hpp"

namespace scmimo {

namespace {

// Welford accumulator for a sample mean and its standard error.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  double mean() const { return mean_; }
  double standard_error() const {
    return n_ < 2 ? 0.0 : std::sqrt(m2_ / static_cast<double>(n_ - 1) / static_cast<double>(n_));
  }
  // |mean - expected| in standard errors.
  double z(double expected) const { return std::abs(mean_ - expected) / standard_error(); }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

constexpr double kSigmaLimit = 3.0;

std::vector<double> random_spectrum(RngStream& rng, int P, double lo, double hi) {
  std::vector<double> b(static_cast<std::size_t>(P));
  for (double& x : b) x = rng.uniform(lo, hi);
  std::sort(b.begin(), b.end());
  return b;
}

int uniform_int(RngStream& rng, int lo, int hi) {
  return lo + static_cast<int>(std::floor(rng.uniform() * (hi - lo + 1)));
}

Eigen::MatrixXcd random_h(RngStream& rng, int rows, int cols) {
  Eigen::MatrixXcd H(rows, cols);
  for (int k = 0; k < cols; ++k) {
    for (int p = 0; p < rows; ++p) H(p, k) = rng.complex_normal();
  }
  return H;
}

double log_det_hermitian(const Eigen::MatrixXcd& W) {
  const Eigen::LLT<Eigen::MatrixXcd> llt(W);
  if (llt.info() != Eigen::Success) throw SingularChannel("log-determinant of a singular matrix");
  double s = 0.0;
  for (Eigen::Index i = 0; i < W.rows(); ++i) s += 2.0 * std::log(llt.matrixL()(i, i).real());
  return s;
}

double det_hermitian(const Eigen::MatrixXcd& W) {
  if (W.rows() == 0) return 1.0;
  return std::exp(log_det_hermitian(W));
}

CriterionResult make(int id, std::string name, bool passed, std::string detail) {
  return CriterionResult{id, std::move(name), passed, std::move(detail)};
}

}  // namespace

// 1. Second and fourth moments of the correlated channel.
CriterionResult check_moments(const ValidationOptions& opt) {
  constexpr std::size_t kDraws = 100000;
  constexpr std::array<double, 4> kApertures{1.0, 2.0, 4.0, 8.0};
  RngStream pick(opt.seed, StreamDomain::kValidation, 100);
  double worst = 0.0;
  std::string worst_at;
  int failures = 0;
  for (int s = 0; s < 10; ++s) {
    ScenarioConfig c;
    c.P = uniform_int(pick, 2, 12);
    c.M = uniform_int(pick, std::max(c.P, 8), 128);
    c.K = uniform_int(pick, 2, std::min(c.P, 4));
    c.d0 = kApertures[static_cast<std::size_t>(uniform_int(pick, 0, 3))];
    c.doas = draw_doas(c.P, opt.seed + 7919u * static_cast<std::uint64_t>(s + 1));
    c.fading = s % 2 == 0 ? FadingMode::kUnit : FadingMode::kPathlossShadowing;
    c.seed = opt.seed + static_cast<std::uint64_t>(s);
    const SteeringSet steering = build_steering_set(c.doas, c.M, c.d0);
    const LargeScaleProfile profile = fixed_profile(c);
    const GramMoments gm = gram_moments(steering.betas, profile.zetas, c.M);

    RunningStats n4, n2, cross;
    RngStream rng(opt.seed, StreamDomain::kValidation, 1000 + static_cast<std::uint64_t>(s));
    const int K = c.K;
    for (std::size_t d = 0; d < kDraws; ++d) {
      const auto ch = sample_channel(steering, profile, rng);
      const Eigen::MatrixXcd W = ch.G.adjoint() * ch.G;
      double a4 = 0.0, a2 = 0.0, ac = 0.0;
      for (int k = 0; k < K; ++k) {
        const double g2 = W(k, k).real();
        a4 += g2 * g2 / gm.norm4[static_cast<std::size_t>(k)];
        a2 += g2 / gm.norm2[static_cast<std::size_t>(k)];
        for (int l = 0; l < K; ++l) {
          if (l != k) ac += std::norm(W(k, l)) / gm.cross[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)];
        }
      }
      n4.add(a4 / K);
      n2.add(a2 / K);
      cross.add(ac / (K * (K - 1)));
    }
    const std::array<std::pair<const char*, double>, 3> zs{
        {{"norm4", n4.z(1.0)}, {"norm2", n2.z(1.0)}, {"cross", cross.z(1.0)}}};
    for (const auto& [what, z] : zs) {
      if (z > kSigmaLimit) ++failures;
      if (z > worst) {
        worst = z;
        worst_at = fmt::format("{} (M={} P={} K={} d0={} {})", what, c.M, c.P, c.K, c.d0, to_string(c.fading));
      }
    }
  }
  return make(1, "moment suite", failures == 0,
              fmt::format("10 scenarios x 1e5 draws, 30 normalized moments; worst |z| = {:.2f} at {}; "
                          "limit 3 standard errors; {} outside",
                          worst, worst_at, failures));
}

// 2. Expected log-determinant of G^H G.
CriterionResult check_logdet(const ValidationOptions& opt) {
  constexpr std::size_t kDraws = 1000000;
  struct Case {
    int M, P, K;
    double d0;
    FadingMode fading;
  };
  const std::array<Case, 4> cases{{{16, 4, 2, 4.0, FadingMode::kUnit},
                                   {24, 6, 4, 8.0, FadingMode::kUnit},
                                   {16, 5, 3, 4.0, FadingMode::kPathlossShadowing},
                                   {32, 6, 4, 8.0, FadingMode::kPathlossShadowing}}};
  double worst = 0.0;
  int failures = 0;
  std::string parts;
  for (std::size_t s = 0; s < cases.size(); ++s) {
    const auto& cs = cases[s];
    ScenarioConfig c;
    c.M = cs.M;
    c.P = cs.P;
    c.K = cs.K;
    c.d0 = cs.d0;
    c.fading = cs.fading;
    c.seed = opt.seed + s;
    c.doas = draw_doas(c.P, opt.seed + 31u * (s + 1));
    const SteeringSet steering = build_steering_set(c.doas, c.M, c.d0);
    const LargeScaleProfile profile = fixed_profile(c);
    const auto spectrum = prepare_spectrum(steering.betas).spectrum;
    const double expected = expected_logdet(spectrum, profile.zetas);
    RunningStats st;
    RngStream rng(opt.seed, StreamDomain::kValidation, 2000 + s);
    for (std::size_t d = 0; d < kDraws; ++d) {
      const auto ch = sample_channel(steering, profile, rng);
      st.add(log_det_hermitian(ch.G.adjoint() * ch.G));
    }
    const double z = st.z(expected);
    worst = std::max(worst, z);
    if (z > kSigmaLimit) ++failures;
    parts += fmt::format("{}[{} P={} K={}: closed {:.5f} mc {:.5f} z={:.2f}]", parts.empty() ? "" : " ",
                         to_string(c.fading), c.P, c.K, expected, st.mean(), z);
  }
  return make(2, "log-determinant suite", failures == 0,
              fmt::format("1e6 draws each; {}; limit 3 standard errors", parts));
}

// 3. E{|W_K|} and E{|W_{K-1}|} for W_m = H_m^H diag(beta) H_m.
CriterionResult check_determinants(const ValidationOptions& opt) {
  constexpr std::size_t kDraws = 1000000;
  const std::array<std::pair<int, int>, 4> shapes{{{3, 1}, {4, 2}, {5, 3}, {6, 3}}};
  RngStream pick(opt.seed, StreamDomain::kValidation, 300);
  int failures = 0;
  std::string parts;
  for (std::size_t s = 0; s < shapes.size(); ++s) {
    const auto [P, K] = shapes[s];
    const auto betas = random_spectrum(pick, P, 0.2, 4.0);
    const EigenSpectrum spectrum(betas);
    const DeltaRatios dr = delta_ratios(spectrum, K);
    Eigen::VectorXd b(P);
    for (int p = 0; p < P; ++p) b(p) = betas[static_cast<std::size_t>(p)];
    RunningStats d1, d2;
    RngStream rng(opt.seed, StreamDomain::kValidation, 3000 + s);
    for (std::size_t d = 0; d < kDraws; ++d) {
      const Eigen::MatrixXcd H = random_h(rng, P, K);
      const Eigen::MatrixXcd W = H.adjoint() * b.asDiagonal() * H;
      d1.add(det_hermitian(W));
      if (K > 1) d2.add(det_hermitian(W.topLeftCorner(K - 1, K - 1)));
    }
    const double z1 = d1.z(dr.delta1);
    const double z2 = K > 1 ? d2.z(dr.delta2) : (dr.delta2 == 1.0 ? 0.0 : 1e9);
    failures += (z1 > kSigmaLimit) + (z2 > kSigmaLimit);
    parts += fmt::format("{}[P={} K={}: delta1 {:.5f} vs {:.5f} z={:.2f}; delta2 {:.5f} z={:.2f}]",
                         parts.empty() ? "" : " ", P, K, dr.delta1, d1.mean(), z1, dr.delta2, z2);
  }
  return make(3, "determinant suite", failures == 0,
              fmt::format("1e6 draws each; {}; limit 3 standard errors", parts));
}

// 4. Marginal eigenvalue density.
CriterionResult check_pdf(const ValidationOptions& opt) {
  using boost::math::quadrature::exp_sinh;
  using boost::math::quadrature::gauss_kronrod;
  RngStream pick(opt.seed, StreamDomain::kValidation, 400);
  const std::array<std::pair<int, int>, 4> shapes{{{4, 2}, {5, 3}, {3, 1}, {6, 6}}};
  double worst_norm = 0.0;
  for (const auto& [P, K] : shapes) {
    const EigenSpectrum spectrum(random_spectrum(pick, P, 0.1, 5.0));
    const EigenDensity f(spectrum, K);
    exp_sinh<double> integrator;
    const double integral = integrator.integrate([&](double x) { return f(x); }, 0.0,
                                                 std::numeric_limits<double>::infinity(), 1e-12);
    worst_norm = std::max(worst_norm, std::abs(integral - 1.0));
  }

  constexpr std::size_t kDraws = 1000000;
  constexpr int kBins = 200;
  const auto betas = random_spectrum(pick, 4, 0.5, 3.0);
  const EigenSpectrum spectrum(betas);
  const EigenDensity f(spectrum, 2);
  const double top = 4.0 * betas.back();
  const double w = top / kBins;
  std::vector<double> counts(kBins, 0.0);
  Eigen::VectorXd b(4);
  for (int p = 0; p < 4; ++p) b(p) = betas[static_cast<std::size_t>(p)];
  RngStream rng(opt.seed, StreamDomain::kValidation, 4000);
  for (std::size_t d = 0; d < kDraws; ++d) {
    const Eigen::MatrixXcd H = random_h(rng, 4, 2);
    const Eigen::Matrix2cd W = H.adjoint() * b.asDiagonal() * H;
    const double a = W(0, 0).real(), c = W(1, 1).real();
    const double r = std::sqrt(0.25 * (a - c) * (a - c) + std::norm(W(0, 1)));
    for (double lam : {0.5 * (a + c) - r, 0.5 * (a + c) + r}) {
      const auto bin = static_cast<long>(std::floor(lam / w));
      if (bin >= 0 && bin < kBins) counts[static_cast<std::size_t>(bin)] += 1.0;
    }
  }
  double mae = 0.0;
  double min_density = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kBins; ++i) {
    const double lo = i * w, hi = lo + w;
    const double mean_f =
        gauss_kronrod<double, 31>::integrate([&](double x) { return x > 0.0 ? f(x) : f(1e-300); }, lo, hi, 5,
                                              1e-12) /
        w;
    const double hist = counts[static_cast<std::size_t>(i)] / (2.0 * kDraws * w);
    mae += std::abs(hist - mean_f);
    min_density = std::min(min_density, f(lo + 0.5 * w));
  }
  mae /= kBins;
  const bool ok = worst_norm <= 1e-6 && mae <= 2e-3 && min_density >= -1e-12;
  return make(4, "pdf suite", ok,
              fmt::format("max |integral - 1| = {:.2e} (limit 1e-6) over 4 spectra; histogram MAE = {:.2e} "
                          "(limit 2e-3, P=4 K=2, 1e6 draws, 200 bins); min density on grid {:.2e}",
                          worst_norm, mae, min_density));
}

// 5. Algebraic identities.
CriterionResult check_identities(const ValidationOptions& opt) {
  RngStream pick(opt.seed, StreamDomain::kValidation, 500);

  double eq17 = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int M = uniform_int(pick, 2, 32);
    const int K = uniform_int(pick, 1, std::min(M, 8));
    const double p = std::pow(10.0, pick.uniform(-1.0, 2.0));
    const Eigen::MatrixXcd G = random_h(pick, M, K);
    eq17 = std::max(eq17, mmse_det_identity_check(G, p).max_relative_residual);
  }

  double tele = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int P = uniform_int(pick, 2, 8);
    const int K = uniform_int(pick, 1, P);
    const double p = std::pow(10.0, pick.uniform(-1.0, 2.0));
    const EigenSpectrum s(random_spectrum(pick, P, 0.1, 10.0));
    const double a = mmse_exact(s, K, p);
    const double b = mmse_exact_cumulative(s, K, p);
    tele = std::max(tele, std::abs(a - b) / std::abs(a));
  }

  // Double-precision cofactors are entrywise accurate, but the alternating
  // row sum loses about log10(sum|terms| / V) digits, which exceeds six
  // digits once P > 4 on this range. The extended-precision kernel that
  // the ratio evaluations run on is checked over the full P range.
  double laplace = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int P = uniform_int(pick, 2, 4);
    const EigenSpectrum s(random_spectrum(pick, P, 0.1, 10.0));
    const double v = std::exp(s.log_vandermonde());
    for (int l = 1; l <= P; ++l) {
      double sum = 0.0;
      for (int n = 1; n <= P; ++n) sum += std::pow(s[l - 1], n - 1) * cofactor_D(s, l, n);
      laplace = std::max(laplace, std::abs(sum - v) / v);
    }
  }
  double laplace_ext = 0.0;
  for (int t = 0; t < 50; ++t) {
    using T = mp::Float40;
    const int P = uniform_int(pick, 2, 12);
    const auto b = random_spectrum(pick, P, 0.1, 10.0);
    const auto inv = detail::inverse_vandermonde<T>(b);
    for (int l = 0; l < P; ++l) {
      // sum_n [D]_{l,n} D_{l,n} / V = 1
      T sum(0);
      T power(1);
      for (int n = 0; n < P; ++n) {
        sum += power * inv(static_cast<std::size_t>(n), static_cast<std::size_t>(l));
        power *= T(b[static_cast<std::size_t>(l)]);
      }
      laplace_ext = std::max(laplace_ext, static_cast<double>(abs(sum - T(1))));
    }
  }

  double ysum = 0.0;
  auto check_ysum = [&](const EigenSpectrum& s) {
    double logs = 0.0;
    for (double b : s.betas()) logs += std::log(b);
    const auto y = y_ratios(s);
    double total = 0.0;
    for (double v : y) total += v;
    ysum = std::max(ysum, std::abs(total - logs) / std::abs(logs));
  };
  for (int t = 0; t < 40; ++t) check_ysum(EigenSpectrum(random_spectrum(pick, uniform_int(pick, 1, 10), 1.5, 20.0)));
  for (int P : {8, 12}) {
    for (double d0 : {1.0, 2.0, 4.0}) {
      const auto st = build_steering_set(draw_doas(P, opt.seed + static_cast<std::uint64_t>(P)), 64, d0);
      check_ysum(prepare_spectrum(st.betas).spectrum);
    }
  }

  const bool ok = eq17 <= 1e-9 && tele <= 1e-10 && laplace <= 1e-10 && laplace_ext <= 1e-10 && ysum <= 1e-8;
  return make(5, "identity suite", ok,
              fmt::format("inverse/determinant residual {:.2e} (limit 1e-9, 200 channels); cumulative vs "
                          "single-term MMSE {:.2e} (limit 1e-10); Laplace expansion {:.2e} in double for P<=4 and "
                          "{:.2e} in extended precision for P<=12 (limit 1e-10); sum of y ratios vs sum ln beta "
                          "{:.2e} (limit 1e-8)",
                          eq17, tele, laplace, laplace_ext, ysum));
}

std::vector<CriterionResult> check_bounds_and_mmse(const ValidationOptions& opt) {
  constexpr std::size_t kTrials = 10000;
  int points = 0, sandwich_fail = 0, tight_fail = 0, general_fail = 0, mmse_fail = 0;
  double worst_tight = 0.0, worst_mmse_z = 0.0;
  std::string sandwich_note, mmse_note;
  const std::array<Receiver, 2> zf_mmse{Receiver::kZf, Receiver::kMmse};
  const std::array<Receiver, 1> zf_only{Receiver::kZf};
  for (int P : {8, 12}) {
    const auto doas = draw_doas(P, opt.seed);
    for (double d0 : {1.0, 4.0, 8.0}) {
      for (int M : {32, 100, 128}) {
        const SteeringSet steering = build_steering_set(doas, M, d0);
        for (int K : {2, 4, 6}) {
          for (double pdb : {0.0, 10.0}) {
            ++points;
            ScenarioConfig c;
            c.M = M;
            c.P = P;
            c.K = K;
            c.d0 = d0;
            c.p_u = db_to_linear(pdb);
            c.doas = doas;
            c.seed = opt.seed;
            const AnalyticEvaluator ev(steering.betas, M, K, c.p_u);
            const std::vector<double> ones(static_cast<std::size_t>(K), 1.0);
            const auto est = mc_sum_se(c, steering, zf_mmse, McOptions{kTrials, opt.workers});
            const auto lo = ev.zf_lower(ones);
            const auto up = ev.zf_upper(ones);
            const auto mm = ev.mmse_unit();
            const double zf = est[0].sum_se, zci = est[0].ci_halfwidth;
            const std::string where = fmt::format("P={} K={} d0={} M={} p_u_dB={}", P, K, d0, M, pdb);
            if (!lo || !up || *lo > zf + zci || *up < zf - zci) {
              ++sandwich_fail;
              if (sandwich_note.empty()) {
                sandwich_note = fmt::format(" first violation at {} (lower {:.4f}, upper {:.4f}, mc {:.4f}+-{:.4f})",
                                            where, lo.value_or(NAN), up.value_or(NAN), zf, zci);
              }
            }
            if (d0 >= 4.0 && lo) {
              const double rel = std::abs(*lo - zf) / zf;
              worst_tight = std::max(worst_tight, rel);
              if (rel > 0.05) ++tight_fail;
            }
            const double mse = est[1].sum_se, mci = est[1].ci_halfwidth;
            if (!mm || std::abs(*mm - mse) > mci) {
              ++mmse_fail;
              mmse_note += fmt::format(" [{}: exact {:.4f} mc {:.4f}+-{:.4f}]", where, mm.value_or(NAN), mse, mci);
            }
            if (mm) worst_mmse_z = std::max(worst_mmse_z, std::abs(*mm - mse) / (mci / 1.959963984540054));

            c.fading = FadingMode::kPathlossShadowing;
            const auto zetas = fixed_profile(c).zetas;
            const auto g = mc_sum_se(c, steering, zf_only, McOptions{kTrials, opt.workers});
            const auto glo = ev.zf_lower(zetas);
            const auto gup = ev.zf_upper(zetas);
            const double gz = g[0].sum_se, gci = g[0].ci_halfwidth;
            if (!glo || !gup || *glo > gz + gci || *gup < gz - gci) ++general_fail;
          }
        }
      }
    }
  }
  std::vector<CriterionResult> out;
  out.push_back(make(6, "bound suite", sandwich_fail == 0 && tight_fail == 0 && general_fail == 0,
                     fmt::format("{} grid points, 1e4 trials; unit-fading sandwich violations {}, general-fading "
                                 "sandwich violations {}; lower bound vs MC worst relative gap {:.4f} for d0>=4 "
                                 "(limit 0.05, {} over){}",
                                 points, sandwich_fail, general_fail, worst_tight, tight_fail, sandwich_note)));
  out.push_back(make(7, "MMSE exactness", mmse_fail == 0,
                     fmt::format("{} of {} unit-fading points outside the 95% CI (about {:.1f} expected from CI "
                                 "coverage alone); largest deviation {:.2f} standard errors{}",
                                 mmse_fail, points, 0.05 * points, worst_mmse_z, mmse_note)));
  return out;
}

namespace {

struct CurvePoint {
  double se = 0.0;
  double ci = 0.0;
};

CurvePoint simulate(const ScenarioConfig& c, Receiver r, const ValidationOptions& opt) {
  const auto e = mc_sum_se(c, r, 10000, opt.workers);
  return {e.sum_se, e.ci_halfwidth};
}

ScenarioConfig unit_scenario(int M, int P, int K, double d0, std::uint64_t seed) {
  ScenarioConfig c;
  c.M = M;
  c.P = P;
  c.K = K;
  c.d0 = d0;
  c.p_u = db_to_linear(10.0);
  c.doas = draw_doas(P, seed);
  c.seed = seed;
  return c;
}

}  // namespace

// 8. MRC approximation and saturation on the P=12, K=6 setup.
CriterionResult check_mrc_behavior(const ValidationOptions& opt) {
  constexpr std::array<double, 4> kApertures{1.0, 2.0, 3.0, 8.0};
  std::string close;
  bool close_ok = true;
  bool mono_ok = true;
  for (int M : {32, 128}) {
    double prev_mc = -1.0, prev_an = -1.0;
    for (double d0 : kApertures) {
      const auto c = unit_scenario(M, 12, 6, d0, opt.seed);
      const auto st = build_steering_set(c.doas, M, d0);
      const double an = mrc_approx(st.betas, std::vector<double>(6, 1.0), M, c.p_u);
      const auto mc = simulate(c, Receiver::kMrc, opt);
      const double rel = (an - mc.se) / mc.se;
      if (std::abs(rel) > 0.10) close_ok = false;
      close += fmt::format(" M={} d0={}: {:+.1f}%", M, d0, 100.0 * rel);
      if (mc.se <= prev_mc || an < prev_an) mono_ok = false;
      prev_mc = mc.se;
      prev_an = an;
    }
  }
  const auto s128 = simulate(unit_scenario(128, 12, 6, 1.0, opt.seed), Receiver::kMrc, opt);
  const auto s256 = simulate(unit_scenario(256, 12, 6, 1.0, opt.seed), Receiver::kMrc, opt);
  const bool sat_ok = s256.se - s128.se <= 0.05 * s128.se;
  return make(8, "MRC behavior", close_ok && sat_ok && mono_ok,
              fmt::format("approx vs MC (limit 10%):{}; saturation SE(256)-SE(128) = {:.4f} vs limit {:.4f}; "
                          "monotone in d0: {}",
                          close, s256.se - s128.se, 0.05 * s128.se, mono_ok ? "yes" : "no"));
}

// 9. Growth in M and d0 for ZF and MMSE.
CriterionResult check_growth(const ValidationOptions& opt) {
  std::vector<std::string> problems;
  std::string summary;
  for (Receiver r : {Receiver::kZf, Receiver::kMmse}) {
    CurvePoint prev{};
    int prev_m = 0;
    summary += fmt::format(" {} vs M:", to_string(r));
    for (int M : {32, 64, 128, 256}) {
      const auto p = simulate(unit_scenario(M, 12, 6, 4.0, opt.seed), r, opt);
      summary += fmt::format(" {:.3f}", p.se);
      if (prev_m && !(p.se - prev.se > p.ci + prev.ci)) {
        problems.push_back(fmt::format("{} M {}->{} step {:.4f} within CI", to_string(r), prev_m, M, p.se - prev.se));
      }
      prev = p;
      prev_m = M;
    }
  }
  constexpr std::array<double, 4> kApertures{1.0, 2.0, 4.0, 8.0};
  std::array<std::array<double, 4>, 2> zf{};
  for (int ki = 0; ki < 2; ++ki) {
    const int K = ki == 0 ? 4 : 6;
    summary += fmt::format(" ZF K={} vs d0:", K);
    for (std::size_t i = 0; i < kApertures.size(); ++i) {
      zf[ki][i] = simulate(unit_scenario(100, 12, K, kApertures[i], opt.seed), Receiver::kZf, opt).se;
      summary += fmt::format(" {:.3f}", zf[ki][i]);
      if (i > 0 && !(zf[ki][i] > zf[ki][i - 1])) {
        problems.push_back(fmt::format("ZF K={} not increasing at d0={}", K, kApertures[i]));
      }
    }
  }
  for (std::size_t i = 0; i < kApertures.size(); ++i) {
    if (!(zf[1][i] > zf[0][i])) problems.push_back(fmt::format("ZF K=6 not above K=4 at d0={}", kApertures[i]));
  }
  std::array<std::array<double, 4>, 2> mm{};
  for (int mi = 0; mi < 2; ++mi) {
    const int M = mi == 0 ? 64 : 100;
    summary += fmt::format(" MMSE M={} vs d0:", M);
    for (std::size_t i = 0; i < kApertures.size(); ++i) {
      mm[mi][i] = simulate(unit_scenario(M, 8, 4, kApertures[i], opt.seed), Receiver::kMmse, opt).se;
      summary += fmt::format(" {:.3f}", mm[mi][i]);
      if (i > 0 && !(mm[mi][i] > mm[mi][i - 1])) {
        problems.push_back(fmt::format("MMSE M={} not increasing at d0={}", M, kApertures[i]));
      }
    }
  }
  for (std::size_t i = 0; i < kApertures.size(); ++i) {
    if (!(mm[1][i] > mm[0][i])) problems.push_back(fmt::format("MMSE M=100 not above M=64 at d0={}", kApertures[i]));
  }
  std::string detail = summary.substr(1);
  for (const auto& p : problems) detail += "; " + p;
  return make(9, "growth checks", problems.empty(), detail);
}

// 10. Byte-identical CSV across runs and worker counts.
CriterionResult check_determinism(const ValidationOptions& opt) {
  auto make_spec = [&](FadingMode fading, ProfileMode mode) {
    SweepSpec spec;
    spec.base.M = 16;
    spec.base.K = 2;
    spec.base.P = 4;
    spec.base.d0 = 2.0;
    spec.base.fading = fading;
    spec.base.profile_mode = mode;
    spec.base.seed = opt.seed;
    spec.p_u_db = 10.0;
    spec.axis = SweepAxis::kM;
    spec.values = {8, 16, 32};
    spec.trials = 1000;
    return spec;
  };
  bool ok = true;
  int compared = 0;
  for (const auto& spec : {make_spec(FadingMode::kUnit, ProfileMode::kFixed),
                           make_spec(FadingMode::kPathlossShadowing, ProfileMode::kPerTrial)}) {
    std::string reference;
    for (unsigned workers : {1u, 1u, 3u, 0u}) {
      SweepSpec s = spec;
      s.workers = workers;
      const std::string csv = format_csv(run_sweep(s));
      if (reference.empty()) {
        reference = csv;
      } else {
        ++compared;
        ok = ok && csv == reference;
      }
    }
  }
  return make(10, "determinism", ok,
              fmt::format("{} repeated sweeps (workers 1, 1, 3, hardware) compared byte-for-byte: {}", compared,
                          ok ? "identical" : "differ"));
}

// 11. Digamma and E_n against independent references.
CriterionResult check_special_functions(const ValidationOptions& opt) {
  RngStream pick(opt.seed, StreamDomain::kValidation, 1100);
  double psi_err = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double x = std::pow(10.0, pick.uniform(-3.0, 6.0));
    psi_err = std::max(psi_err, std::abs(digamma(x) - boost::math::digamma(x)));
  }
  double en_err = 0.0, en_quad = 0.0;
  boost::math::quadrature::exp_sinh<double> integrator;
  for (int i = 0; i < 50; ++i) {
    const int n = uniform_int(pick, 1, 10);
    const double x = std::pow(10.0, pick.uniform(-3.0, 2.0));
    const double ours = exp_integral(n, x);
    const double series = boost::math::expint(n, x);
    // Scaled form e^x E_n(x) = int_0^inf e^{-x u} (1+u)^{-n} du keeps the
    // integrand O(1) for large x.
    const double quad = std::exp(-x) * integrator.integrate(
                                           [&](double u) { return std::exp(-x * u) * std::pow(1.0 + u, -n); },
                                           0.0, std::numeric_limits<double>::infinity(), 1e-14);
    en_err = std::max(en_err, std::abs(ours - series) / series);
    en_quad = std::max(en_quad, std::abs(ours - quad) / quad);
  }
  const bool ok = psi_err <= 1e-12 && en_err <= 1e-10 && en_quad <= 1e-10;
  return make(11, "special functions", ok,
              fmt::format("digamma max abs error {:.2e} (limit 1e-12, 50 points on [1e-3, 1e6]); E_n max rel error "
                          "{:.2e} vs series reference and {:.2e} vs quadrature (limit 1e-10, 50 points)",
                          psi_err, en_err, en_quad));
}

std::vector<std::string> suite_names() { return {"moments", "bounds", "pdf", "identities"}; }

std::vector<CriterionResult> run_suite(const std::string& suite, const ValidationOptions& opt) {
  if (suite == "moments") return {check_moments(opt), check_logdet(opt), check_determinants(opt)};
  if (suite == "pdf") return {check_pdf(opt)};
  if (suite == "identities") return {check_identities(opt), check_determinism(opt), check_special_functions(opt)};
  if (suite == "bounds") {
    auto out = check_bounds_and_mmse(opt);
    out.push_back(check_mrc_behavior(opt));
    out.push_back(check_growth(opt));
    return out;
  }
  throw InvalidArgument("unknown suite '" + suite + "' (moments, bounds, pdf, identities)");
}

}  // namespace scmimo
