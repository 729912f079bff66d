#include "scmimo/monte_carlo.hpp"

#include <cmath>
#include <string>
#include <thread>

#include "scmimo/errors.hpp"

namespace scmimo {

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

LargeScaleProfile fixed_profile(const ScenarioConfig& config) {
  RngStream rng(config.seed, StreamDomain::kLargeScale, 0);
  return sample_large_scale(config, rng);
}

LargeScaleProfile trial_profile(const ScenarioConfig& config, std::size_t trial) {
  if (config.profile_mode == ProfileMode::kFixed || config.fading == FadingMode::kUnit) {
    return fixed_profile(config);
  }
  RngStream rng(config.seed, StreamDomain::kLargeScale, trial + 1);
  return sample_large_scale(config, rng);
}

namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr std::uint64_t kMaxResampleAttempts = 64;

struct TrialBuffer {
  std::vector<double> sum;       // per trial
  std::vector<double> per_user;  // trial-major, K per trial
  std::vector<std::uint8_t> resampled;
};

void accumulate_se(const Eigen::VectorXd& sinr, double* per_user, double& sum) {
  sum = 0.0;
  for (Eigen::Index k = 0; k < sinr.size(); ++k) {
    per_user[k] = std::log2(1.0 + sinr(k));
    sum += per_user[k];
  }
}

}  // namespace

std::vector<SEEstimate> mc_sum_se(const ScenarioConfig& config, const SteeringSet& steering,
                                  std::span<const Receiver> receivers, const McOptions& options) {
  config.validate();
  if (options.trials < kMinTrials) {
    throw InvalidArgument("mc_sum_se: at least " + std::to_string(kMinTrials) + " trials required");
  }
  const std::size_t trials = options.trials;
  const auto K = static_cast<std::size_t>(config.K);
  const bool fixed = config.profile_mode == ProfileMode::kFixed || config.fading == FadingMode::kUnit;
  const LargeScaleProfile shared_profile = fixed ? fixed_profile(config) : LargeScaleProfile{};

  std::vector<TrialBuffer> buffers(receivers.size());
  for (auto& b : buffers) {
    b.sum.assign(trials, 0.0);
    b.per_user.assign(trials * K, 0.0);
    b.resampled.assign(trials, 0);
  }

  parallel_chunks(trials, options.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      const LargeScaleProfile profile = fixed ? shared_profile : trial_profile(config, t);
      RngStream rng(config.seed, StreamDomain::kChannel, t, 0);
      const ChannelRealization channel = sample_channel(steering, profile, rng);
      for (std::size_t r = 0; r < receivers.size(); ++r) {
        TrialBuffer& buf = buffers[r];
        double* per_user = buf.per_user.data() + t * K;
        if (receivers[r] != Receiver::kZf) {
          accumulate_se(closed_form_sinr(channel.G, receivers[r], config.p_u), per_user, buf.sum[t]);
          continue;
        }
        try {
          accumulate_se(zf_sinr(channel.G, config.p_u), per_user, buf.sum[t]);
        } catch (const SingularChannel&) {
          buf.resampled[t] = 1;
          bool done = false;
          for (std::uint64_t attempt = 1; attempt <= kMaxResampleAttempts && !done; ++attempt) {
            RngStream retry(config.seed, StreamDomain::kChannel, t, attempt);
            const ChannelRealization redraw = sample_channel(steering, profile, retry);
            try {
              accumulate_se(zf_sinr(redraw.G, config.p_u), per_user, buf.sum[t]);
              done = true;
            } catch (const SingularChannel&) {
            }
          }
          if (!done) {
            throw NumericalFailure("ZF channel singular on every redraw of trial " + std::to_string(t));
          }
        }
      }
    }
  });

  std::vector<SEEstimate> out;
  out.reserve(receivers.size());
  for (std::size_t r = 0; r < receivers.size(); ++r) {
    const TrialBuffer& buf = buffers[r];
    SEEstimate est;
    est.receiver = receivers[r];
    est.trials = trials;
    est.seed = config.seed;
    est.per_user_se.assign(K, 0.0);
    double sum = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      sum += buf.sum[t];
      for (std::size_t k = 0; k < K; ++k) est.per_user_se[k] += buf.per_user[t * K + k];
      est.resampled += buf.resampled[t];
    }
    const double n = static_cast<double>(trials);
    const double mean = sum / n;
    double sq = 0.0;
    for (std::size_t t = 0; t < trials; ++t) sq += (buf.sum[t] - mean) * (buf.sum[t] - mean);
    est.sum_se = mean;
    for (double& v : est.per_user_se) v /= n;
    est.ci_halfwidth = kZ95 * std::sqrt(sq / (n - 1.0) / n);
    if (static_cast<double>(est.resampled) > kMaxSingularFraction * n) {
      throw NumericalFailure("ZF channel singular in " + std::to_string(est.resampled) + " of " +
                             std::to_string(trials) +
                             " trials; check that K <= P <= M and the DOAs are distinct");
    }
    out.push_back(std::move(est));
  }
  return out;
}

std::vector<SEEstimate> mc_sum_se(const ScenarioConfig& config, std::span<const Receiver> receivers,
                                  const McOptions& options) {
  config.validate();
  const SteeringSet steering = build_steering_set(config.doas, config.M, config.d0);
  return mc_sum_se(config, steering, receivers, options);
}

SEEstimate mc_sum_se(const ScenarioConfig& config, Receiver receiver, std::size_t trials,
                     unsigned workers) {
  const Receiver single[] = {receiver};
  return mc_sum_se(config, single, McOptions{trials, workers}).front();
}

}  // namespace scmimo
