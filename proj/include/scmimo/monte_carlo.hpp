#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "scmimo/model.hpp"
#include "scmimo/parallel.hpp"
#include "scmimo/receivers.hpp"

namespace scmimo {

struct SEEstimate {
  double sum_se = 0.0;             // bits/s/Hz
  std::vector<double> per_user_se;  // K entries
  std::size_t trials = 0;
  double ci_halfwidth = 0.0;  // 95% normal-approximation half width
  std::uint64_t seed = 0;
  Receiver receiver = Receiver::kMrc;
  std::size_t resampled = 0;  // ZF trials redrawn after a singular channel
};

struct McOptions {
  std::size_t trials = 10000;
  unsigned workers = 0;  // 0 = hardware concurrency
};

inline constexpr std::size_t kMinTrials = 100;
// ZF runs abort once more than this fraction of trials was singular.
inline constexpr double kMaxSingularFraction = 0.01;

// Large-scale profile used by a scenario. In fixed mode it comes from the
// large-scale substream of the seed; in per-trial mode from the trial's
// own substream.
LargeScaleProfile fixed_profile(const ScenarioConfig& config);
LargeScaleProfile trial_profile(const ScenarioConfig& config, std::size_t trial);

// Ergodic sum SE by Monte Carlo. Trial t draws its channel from the
// substream (seed, t), so the estimate depends only on (config, trials).
// Per-trial values are reduced in trial order after the parallel section.
SEEstimate mc_sum_se(const ScenarioConfig& config, Receiver receiver, std::size_t trials,
                     unsigned workers = 0);

// Several receivers over the same channel draws. Each entry equals the
// single-receiver estimate for that receiver.
std::vector<SEEstimate> mc_sum_se(const ScenarioConfig& config, std::span<const Receiver> receivers,
                                  const McOptions& options);

// Same, with a precomputed steering set.
std::vector<SEEstimate> mc_sum_se(const ScenarioConfig& config, const SteeringSet& steering,
                                  std::span<const Receiver> receivers, const McOptions& options);

}  // namespace scmimo
