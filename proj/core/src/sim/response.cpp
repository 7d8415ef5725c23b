#include "receptive/sim/response.hpp"

#include <algorithm>
#include <cmath>

namespace receptive::sim {

namespace {

// Late answers land within two days; anything slower is "no response".
constexpr std::int64_t kMaxLateDelay = 2 * 86400;

}  // namespace

OutcomeRecord simulate_response(const ParticipantProfile& profile,
                                const ContextSnapshot& context_at_delivery, int day,
                                std::int64_t delivery_ts, const ContextStream& stream, Rng& rng,
                                std::int64_t jit_window) {
  OutcomeRecord outcome;
  outcome.delivery_ts = delivery_ts;

  const double p_jit = true_receptive_prob(profile, context_at_delivery, day);
  if (rng.bernoulli(p_jit)) {
    const std::int64_t delay = rng.uniform_int(5, jit_window);
    const std::int64_t first = delivery_ts + delay;
    outcome.first_response_ts = first;
    outcome.reply_ts.push_back(first);
    if (rng.bernoulli(profile.engagement_prob)) {
      const std::int64_t extras = rng.uniform_int(1, 3);
      for (std::int64_t k = 0; k < extras; ++k) {
        outcome.reply_ts.push_back(delivery_ts + rng.uniform_int(delay, jit_window));
      }
      std::sort(outcome.reply_ts.begin(), outcome.reply_ts.end());
    }
    outcome.context_at_response = stream.at(first);
    return outcome;
  }

  if (rng.bernoulli(profile.late_response_prob)) {
    const double drawn =
        rng.lognormal(profile.late_delay_log_mean, profile.late_delay_log_sigma);
    const auto extra = static_cast<std::int64_t>(std::llround(drawn));
    const std::int64_t delay = jit_window + std::clamp<std::int64_t>(extra, 1, kMaxLateDelay);
    const std::int64_t first = delivery_ts + delay;
    outcome.first_response_ts = first;
    outcome.reply_ts.push_back(first);
    outcome.context_at_response = stream.at(first);
    return outcome;
  }

  return outcome;  // ignored prompt: no response, no labels beyond the delivery
}

}  // namespace receptive::sim
