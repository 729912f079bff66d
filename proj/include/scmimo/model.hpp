#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scmimo/rng.hpp"

namespace scmimo {

enum class FadingMode { kUnit, kPathlossShadowing };

// Whether the large-scale gains are drawn once per scenario or redrawn
// in every Monte-Carlo trial.
enum class ProfileMode { kFixed, kPerTrial };

std::string to_string(FadingMode mode);
std::string to_string(ProfileMode mode);

struct CellGeometry {
  double radius_m = 1000.0;  // hexagon circumradius
  double r_min_m = 100.0;
  double pathloss_exponent = 3.8;
  double shadowing_sigma_db = 8.0;

  bool operator==(const CellGeometry&) const = default;
};

struct ScenarioConfig {
  int M = 64;
  int K = 4;
  int P = 8;
  double d0 = 4.0;
  double p_u = 10.0;  // linear transmit SNR
  std::vector<double> doas;  // P angles in radians
  FadingMode fading = FadingMode::kUnit;
  ProfileMode profile_mode = ProfileMode::kFixed;
  CellGeometry cell;
  std::uint64_t seed = 1;

  // d / lambda = d0 / M.
  double spacing_ratio() const { return d0 / M; }

  // Throws InvalidArgument on the first violated invariant.
  void validate() const;

  bool operator==(const ScenarioConfig&) const = default;
};

// P directions of arrival drawn uniformly on [-pi/2, pi/2] from the DOA
// substream of `seed`.
std::vector<double> draw_doas(int P, std::uint64_t seed);

// Length-M normalized steering vector; entry m is
// exp(-j 2 pi spacing_ratio m sin(theta)) / sqrt(P).
Eigen::VectorXcd steering_vector(double theta, int M, double spacing_ratio, int P);

struct SteeringSet {
  Eigen::MatrixXcd A;     // M x P
  Eigen::MatrixXcd gram;  // A^H A
  // Ascending eigenvalues of A^H A, computed in extended precision so
  // that eigenvalues far below double round-off of the largest one are
  // still resolved.
  std::vector<double> betas;
  // Some eigenvalues are zero to working precision (duplicate DOAs); they
  // are reported as exactly 0.
  bool rank_deficient = false;
  // Some eigenvalues coincide after rounding to double.
  bool repeated_eigenvalues = false;
  unsigned eigen_digits = 0;  // decimal digits the spectrum was settled at
};

// Throws InvalidArgument when P > M, d0 <= 0 or a DOA is non-finite.
SteeringSet build_steering_set(std::span<const double> doas, int M, double d0);

struct LargeScaleProfile {
  std::vector<double> zetas;      // K positive power gains
  std::vector<double> distances;  // metres; empty in unit mode
};

// zeta = s (r / r_min)^{-v} with 10 log10 s = shadow_db.
double large_scale_gain(double distance_m, double shadow_db, const CellGeometry& cell);

// Uniform position over the hexagon with the r_min disc removed; returns
// the distance to the centre.
double sample_user_distance(const CellGeometry& cell, RngStream& rng);

// 10 log10 s for one log-normal shadowing draw.
double sample_shadowing_db(double sigma_db, RngStream& rng);

// Unit mode returns all ones and consumes no randomness.
LargeScaleProfile sample_large_scale(const ScenarioConfig& config, RngStream& rng);

struct ChannelRealization {
  Eigen::MatrixXcd G;  // M x K, G = A H D^{1/2}
  Eigen::MatrixXcd H;  // P x K, i.i.d. CN(0, 1)
  LargeScaleProfile profile;
};

ChannelRealization sample_channel(const SteeringSet& steering, const LargeScaleProfile& profile,
                                  RngStream& rng);

// Assembles G from a given small-scale matrix H; sample_channel() draws H
// and calls this.
ChannelRealization assemble_channel(const SteeringSet& steering, Eigen::MatrixXcd H,
                                    LargeScaleProfile profile);

}  // namespace scmimo
