#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "scmimo/model.hpp"
#include "scmimo/monte_carlo.hpp"
#include "scmimo/receivers.hpp"

namespace scmimo {

enum class SweepAxis { kM, kD0, kK, kPuDb };

std::string to_string(SweepAxis axis);  // "M", "d0", "K", "p_u_dB"

struct AnalyticsSelection {
  bool mrc_approx = true;
  bool zf_lower = true;
  bool zf_upper = true;
  bool mmse_exact = true;

  bool operator==(const AnalyticsSelection&) const = default;
};

// A validated sweep. `base` holds the scenario before the axis value is
// applied; base.doas is empty when the DOAs are drawn from the seed.
struct SweepSpec {
  ScenarioConfig base;
  double p_u_db = 10.0;
  SweepAxis axis = SweepAxis::kM;
  std::vector<double> values;
  std::vector<Receiver> receivers{Receiver::kMrc, Receiver::kZf, Receiver::kMmse};
  AnalyticsSelection analytics;
  std::size_t trials = 10000;
  std::string output = "out";
  unsigned workers = 0;

  bool random_doas() const { return base.doas.empty(); }

  bool operator==(const SweepSpec&) const = default;
};

// Configuration document (YAML). Required: M, K, P, d0, p_u_dB, axis,
// values. Optional with defaults: trials (10000), receivers ([MRC, ZF,
// MMSE]), analytics (map of mrc_approx/zf_lower/zf_upper/mmse_exact, all
// true), fading (unit | pathloss_shadowing), zeta (fixed | per_trial), doas
// (random | list of P radians), seed (1), output ("out"), workers (0), cell
// (radius_m, r_min_m, pathloss_exponent, shadowing_sigma_dB).
//
// Unknown keys and every scenario invariant violation, for each axis
// value, raise ConfigError naming the offending key.
SweepSpec parse_config(std::istream& in);
SweepSpec parse_config_file(const std::string& path);
SweepSpec parse_config_string(const std::string& text);

// Full document with every key written explicitly; parsing it gives back
// an equal spec.
std::string serialize_config(const SweepSpec& spec);

// Scenario for one axis value (DOAs drawn from the seed if random).
ScenarioConfig scenario_at(const SweepSpec& spec, double value);

// Re-checks every derived scenario; parse_config calls this.
void validate_spec(const SweepSpec& spec);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace scmimo
