#include "scmimo/model.hpp"

#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "scmimo/errors.hpp"
#include "scmimo/multiprecision.hpp"

namespace scmimo {

std::string to_string(FadingMode mode) {
  return mode == FadingMode::kUnit ? "unit" : "pathloss_shadowing";
}

std::string to_string(ProfileMode mode) {
  return mode == ProfileMode::kFixed ? "fixed" : "per_trial";
}

void ScenarioConfig::validate() const {
  if (M < 1 || K < 1 || P < 1) throw InvalidArgument("M, K and P must all be >= 1");
  if (K > P) {
    throw InvalidArgument("K <= P required (K=" + std::to_string(K) + ", P=" + std::to_string(P) + ")");
  }
  if (P > M) {
    throw InvalidArgument("P <= M required (P=" + std::to_string(P) + ", M=" + std::to_string(M) + ")");
  }
  if (!std::isfinite(d0) || d0 <= 0.0) throw InvalidArgument("d0 must be finite and > 0");
  if (!std::isfinite(p_u) || p_u <= 0.0) throw InvalidArgument("p_u must be finite and > 0");
  if (static_cast<int>(doas.size()) != P) {
    throw InvalidArgument("expected " + std::to_string(P) + " DOAs, got " + std::to_string(doas.size()));
  }
  for (double theta : doas) {
    if (!std::isfinite(theta) || std::abs(theta) > std::numbers::pi / 2 + 1e-12) {
      throw InvalidArgument("DOA " + std::to_string(theta) + " outside [-pi/2, pi/2]");
    }
  }
  if (fading == FadingMode::kPathlossShadowing) {
    if (!(cell.r_min_m > 0.0)) throw InvalidArgument("cell.r_min_m must be > 0");
    if (!(cell.radius_m > cell.r_min_m)) throw InvalidArgument("cell.radius_m must exceed cell.r_min_m");
    if (cell.r_min_m >= cell.radius_m * std::numbers::sqrt3 / 2) {
      throw InvalidArgument("cell.r_min_m must be below the hexagon inradius");
    }
    if (!(cell.pathloss_exponent >= 0.0)) throw InvalidArgument("cell.pathloss_exponent must be >= 0");
    if (!(cell.shadowing_sigma_db >= 0.0)) throw InvalidArgument("cell.shadowing_sigma_dB must be >= 0");
  }
}

std::vector<double> draw_doas(int P, std::uint64_t seed) {
  if (P < 1) throw InvalidArgument("draw_doas: P must be >= 1");
  RngStream rng(seed, StreamDomain::kDoa, 0);
  std::vector<double> doas(static_cast<std::size_t>(P));
  for (double& theta : doas) theta = rng.uniform(-std::numbers::pi / 2, std::numbers::pi / 2);
  return doas;
}

Eigen::VectorXcd steering_vector(double theta, int M, double spacing_ratio, int P) {
  if (!std::isfinite(theta)) throw InvalidArgument("steering_vector: non-finite theta");
  if (M < 1 || P < 1) throw InvalidArgument("steering_vector: M and P must be >= 1");
  if (!std::isfinite(spacing_ratio) || spacing_ratio <= 0.0) {
    throw InvalidArgument("steering_vector: spacing ratio must be > 0");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(P));
  const double phase_step = -2.0 * std::numbers::pi * spacing_ratio * std::sin(theta);
  Eigen::VectorXcd a(M);
  for (int m = 0; m < M; ++m) a(m) = std::polar(scale, phase_step * m);
  return a;
}

namespace {

// Eigenvalues of A^H A at working precision T. Entries use the Dirichlet
// kernel  sum_{m<M} e^{j m phi} = e^{j (M-1) phi / 2} sin(M phi / 2) / sin(phi / 2),
// and the Hermitian matrix X + jY is embedded as the real symmetric
// [[X, -Y], [Y, X]], whose spectrum is that of X + jY with every
// eigenvalue doubled.
template <class T>
std::vector<T> gram_eigenvalues(std::span<const double> doas, int M, double d0) {
  using std::abs;
  using std::cos;
  using std::sin;
  const std::size_t P = doas.size();
  const T two_pi = T(2) * boost::math::constants::pi<T>();
  const T spacing = T(d0) / T(M);
  const T inv_p = T(1) / T(static_cast<unsigned>(P));
  const T direct_threshold = pow(T(10), -static_cast<int>(mp::kDigits<T> / 2));
  std::vector<T> s(P);
  for (std::size_t p = 0; p < P; ++p) s[p] = sin(T(doas[p]));

  mp::SquareMatrix<T> embed(2 * P);
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t q = 0; q < P; ++q) {
      T re;
      T im;
      if (p == q) {
        re = T(M);
        im = T(0);
      } else {
        const T phi = two_pi * spacing * (s[p] - s[q]);
        const T half = sin(phi / T(2));
        if (abs(half) < direct_threshold) {
          re = T(0);
          im = T(0);
          for (int m = 0; m < M; ++m) {
            re += cos(T(m) * phi);
            im += sin(T(m) * phi);
          }
        } else {
          const T magnitude = sin(T(M) * phi / T(2)) / half;
          const T centre = T(M - 1) * phi / T(2);
          re = magnitude * cos(centre);
          im = magnitude * sin(centre);
        }
      }
      re *= inv_p;
      im *= inv_p;
      embed(p, q) = re;
      embed(p + P, q + P) = re;
      embed(p + P, q) = im;
      embed(p, q + P) = -im;
    }
  }
  const std::vector<T> doubled = mp::symmetric_eigenvalues(std::move(embed));
  std::vector<T> values(P);
  for (std::size_t i = 0; i < P; ++i) values[i] = (doubled[2 * i] + doubled[2 * i + 1]) / T(2);
  return values;
}

template <class T>
std::vector<double> to_doubles(const std::vector<T>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<double>(v[i]);
  return out;
}

struct SettledSpectrum {
  std::vector<double> betas;
  bool rank_deficient = false;
  unsigned digits = 0;
};

// Two precision levels agree on every eigenvalue, either to 1e-15
// relative or because both sit below the lower level's noise floor.
bool settle(const std::vector<double>& lo, const std::vector<double>& hi, double zero_tol,
            SettledSpectrum& out) {
  for (std::size_t i = 0; i < lo.size(); ++i) {
    const bool both_zero = std::abs(lo[i]) <= zero_tol && std::abs(hi[i]) <= zero_tol;
    if (!both_zero && !(std::abs(lo[i] - hi[i]) <= 1e-15 * std::abs(hi[i]))) return false;
  }
  out.betas = hi;
  for (double& b : out.betas) {
    if (std::abs(b) <= zero_tol) {
      b = 0.0;
      out.rank_deficient = true;
    }
  }
  return true;
}

SettledSpectrum settled_gram_spectrum(std::span<const double> doas, int M, double d0) {
  const auto noise_floor = [M](unsigned digits) {
    return M * std::pow(10.0, -static_cast<double>(digits) + 4.0);
  };
  SettledSpectrum out;
  auto lo = to_doubles(gram_eigenvalues<mp::Float40>(doas, M, d0));
  auto hi = to_doubles(gram_eigenvalues<mp::Float80>(doas, M, d0));
  if (settle(lo, hi, noise_floor(40), out)) {
    out.digits = 80;
    return out;
  }
  lo = std::move(hi);
  hi = to_doubles(gram_eigenvalues<mp::Float160>(doas, M, d0));
  if (settle(lo, hi, noise_floor(80), out)) {
    out.digits = 160;
    return out;
  }
  lo = std::move(hi);
  hi = to_doubles(gram_eigenvalues<mp::Float320>(doas, M, d0));
  if (settle(lo, hi, noise_floor(160), out)) {
    out.digits = 320;
    return out;
  }
  throw NumericalFailure("steering Gram spectrum did not settle at 320 digits");
}

}  // namespace

SteeringSet build_steering_set(std::span<const double> doas, int M, double d0) {
  const int P = static_cast<int>(doas.size());
  if (P < 1) throw InvalidArgument("build_steering_set: at least one DOA required");
  if (M < 1) throw InvalidArgument("build_steering_set: M must be >= 1");
  if (P > M) {
    throw InvalidArgument("build_steering_set: P <= M required (P=" + std::to_string(P) +
                          ", M=" + std::to_string(M) + ")");
  }
  if (!std::isfinite(d0) || d0 <= 0.0) throw InvalidArgument("build_steering_set: d0 must be > 0");

  SteeringSet set;
  set.A.resize(M, P);
  const double spacing = d0 / M;
  for (int p = 0; p < P; ++p) set.A.col(p) = steering_vector(doas[static_cast<std::size_t>(p)], M, spacing, P);
  set.gram = set.A.adjoint() * set.A;

  SettledSpectrum settled = settled_gram_spectrum(doas, M, d0);
  set.betas = std::move(settled.betas);
  set.rank_deficient = settled.rank_deficient;
  set.eigen_digits = settled.digits;
  for (std::size_t i = 1; i < set.betas.size(); ++i) {
    if (set.betas[i] > 0.0 && set.betas[i] == set.betas[i - 1]) set.repeated_eigenvalues = true;
  }
  return set;
}

double large_scale_gain(double distance_m, double shadow_db, const CellGeometry& cell) {
  const double shadow = std::pow(10.0, shadow_db / 10.0);
  return shadow * std::pow(distance_m / cell.r_min_m, -cell.pathloss_exponent);
}

double sample_user_distance(const CellGeometry& cell, RngStream& rng) {
  const double R = cell.radius_m;
  const double half_height = R * std::numbers::sqrt3 / 2;
  for (;;) {
    const double x = rng.uniform(-R, R);
    const double y = rng.uniform(-half_height, half_height);
    if (std::numbers::sqrt3 * std::abs(x) + std::abs(y) > std::numbers::sqrt3 * R) continue;
    const double r = std::hypot(x, y);
    if (r >= cell.r_min_m) return r;
  }
}

double sample_shadowing_db(double sigma_db, RngStream& rng) { return sigma_db * rng.normal(); }

LargeScaleProfile sample_large_scale(const ScenarioConfig& config, RngStream& rng) {
  LargeScaleProfile profile;
  const auto K = static_cast<std::size_t>(config.K);
  if (config.fading == FadingMode::kUnit) {
    profile.zetas.assign(K, 1.0);
    return profile;
  }
  const CellGeometry& cell = config.cell;
  if (!(cell.r_min_m > 0.0) || !(cell.radius_m > cell.r_min_m) ||
      cell.r_min_m >= cell.radius_m * std::numbers::sqrt3 / 2 || !(cell.pathloss_exponent >= 0.0) ||
      !(cell.shadowing_sigma_db >= 0.0)) {
    throw InvalidArgument("sample_large_scale: invalid cell geometry");
  }
  profile.zetas.resize(K);
  profile.distances.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double r = sample_user_distance(cell, rng);
    const double shadow_db = sample_shadowing_db(cell.shadowing_sigma_db, rng);
    profile.distances[k] = r;
    profile.zetas[k] = large_scale_gain(r, shadow_db, cell);
  }
  return profile;
}

ChannelRealization assemble_channel(const SteeringSet& steering, Eigen::MatrixXcd H,
                                    LargeScaleProfile profile) {
  if (H.rows() != steering.A.cols() || H.cols() != static_cast<Eigen::Index>(profile.zetas.size())) {
    throw InvalidArgument("assemble_channel: dimension mismatch between A, H and zeta");
  }
  ChannelRealization out;
  Eigen::VectorXd sqrt_zeta(H.cols());
  for (Eigen::Index k = 0; k < H.cols(); ++k) sqrt_zeta(k) = std::sqrt(profile.zetas[static_cast<std::size_t>(k)]);
  out.G = steering.A * H * sqrt_zeta.asDiagonal();
  out.H = std::move(H);
  out.profile = std::move(profile);
  return out;
}

ChannelRealization sample_channel(const SteeringSet& steering, const LargeScaleProfile& profile,
                                  RngStream& rng) {
  const Eigen::Index P = steering.A.cols();
  const auto K = static_cast<Eigen::Index>(profile.zetas.size());
  Eigen::MatrixXcd H(P, K);
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index p = 0; p < P; ++p) H(p, k) = rng.complex_normal();
  }
  return assemble_channel(steering, std::move(H), profile);
}

}  // namespace scmimo
