#include "receptive/sim/population.hpp"

#include <cstdio>

#include "receptive/errors.hpp"
#include "receptive/models.hpp"
#include "receptive/rng.hpp"

namespace receptive::sim {

namespace {

// Per-feature spread of the participant perturbations (before the
// heterogeneity scale). Most of the person-to-person variation concentrates on
// the slowly-pinned dimensions -- time-of-day preference, battery/charging
// habits, and phone-handling style -- so a per-person learner has something
// real to recover from a few weeks of prompts. The weekend dimension is
// deliberately held at zero: the simulated world is day-of-week-stationary,
// so day-level series carry no weekly oscillation and their trends reflect
// habituation and learning alone.
const std::vector<double>& perturbation_sigma() {
  static const std::vector<double> sigma = [] {
    std::vector<double> s(kFeatureCount, 0.25);
    s[feature_index::kMorning] = 0.9;
    s[feature_index::kAfternoon] = 1.2;
    s[feature_index::kEvening] = 0.9;
    s[feature_index::kWeekend] = 0.0;
    s[feature_index::kCharging] = 0.35;
    s[feature_index::kFull] = 0.35;
    s[feature_index::kBatteryLevel] = 0.6;
    s[feature_index::kUnlocked] = 0.45;
    s[feature_index::kLockChange] = 0.7;
    s[feature_index::kWifiConnected] = 0.4;
    s[feature_index::kStill] = 0.4;
    s[feature_index::kOnFoot] = 0.45;
    s[feature_index::kOnBike] = 0.5;
    s[feature_index::kRunning] = 0.5;
    s[feature_index::kInVehicle] = 0.6;
    return s;
  }();
  return sigma;
}

}  // namespace

const std::vector<double>& base_truth_weights() {
  static const std::vector<double> weights = [] {
    std::vector<double> w(kFeatureCount, 0.0);
    w[feature_index::kWeekend] = 0.0;
    w[feature_index::kMorning] = 0.2;
    w[feature_index::kAfternoon] = 0.0;
    w[feature_index::kEvening] = 0.1;
    w[feature_index::kCharging] = 0.2;
    w[feature_index::kDischarging] = 0.0;
    w[feature_index::kFull] = 0.1;
    w[feature_index::kBatteryLevel] = 0.4;
    w[feature_index::kUnlocked] = 1.7;
    w[feature_index::kLockChange] = -1.3;  // low encoded value = recent change
    w[feature_index::kWifiConnected] = 0.5;
    w[feature_index::kStill] = 0.5;
    w[feature_index::kOnFoot] = 0.3;
    w[feature_index::kOnBike] = -0.8;
    w[feature_index::kRunning] = -0.9;
    w[feature_index::kInVehicle] = -1.5;
    return w;
  }();
  return weights;
}

double base_truth_bias() { return -1.9; }

std::vector<ParticipantProfile> generate_population(const ExperimentConfig& config,
                                                    std::uint64_t seed) {
  validate(config);
  std::vector<ParticipantProfile> population;
  population.reserve(static_cast<std::size_t>(config.n_participants));

  for (int i = 0; i < config.n_participants; ++i) {
    Rng rng(Rng::derive(seed, {static_cast<std::uint64_t>(i), 0x9091u}));
    ParticipantProfile p;
    char id[16];
    std::snprintf(id, sizeof(id), "p%03d", i);
    p.id = id;

    p.truth_weights = base_truth_weights();
    const auto& sigma = perturbation_sigma();
    for (std::size_t k = 0; k < p.truth_weights.size(); ++k) {
      p.truth_weights[k] += config.heterogeneity * sigma[k] * rng.normal();
    }
    p.truth_bias = base_truth_bias() + config.heterogeneity * 0.15 * rng.normal();
    if (config.misspecified_truth) {
      p.interaction_weight = 0.8 + config.heterogeneity * 0.2 * rng.normal();
    }

    p.habituation_per_day = config.habituation_per_day * rng.uniform(0.75, 1.25);
    p.late_response_prob = rng.uniform(0.25, 0.40);
    p.late_delay_log_mean = rng.uniform(6.2, 6.8);
    p.late_delay_log_sigma = rng.uniform(0.8, 1.2);
    p.engagement_prob = rng.uniform(0.80, 0.95);

    p.regime.away_prob = rng.uniform(0.45, 0.80);
    p.regime.mean_away_minutes = rng.uniform(30.0, 90.0);
    p.regime.mean_home_minutes = rng.uniform(20.0, 60.0);
    p.regime.mean_locked_minutes = rng.uniform(7.0, 12.0);
    p.regime.mean_unlocked_minutes = rng.uniform(4.0, 9.0);
    p.regime.evening_plug_prob = rng.uniform(0.30, 0.70);

    population.push_back(std::move(p));
  }
  return population;
}

double true_logit(const ParticipantProfile& profile, const ContextSnapshot& context, int day) {
  if (day < 1) throw DataError("study day must be >= 1, got " + std::to_string(day));
  const FeatureVector x = encode(context);
  double base = dot(profile.truth_weights, x) + profile.truth_bias;
  if (profile.interaction_weight != 0.0) {
    base += profile.interaction_weight * x[feature_index::kUnlocked] * x[feature_index::kStill];
  }
  // Prompt-history dynamics: repeated prompting at moments a participant is
  // not open to breeds fatigue, while prompts landing at genuinely good
  // moments reinforce the check-and-respond habit. Both effects accumulate
  // with study day and scale from one magnitude knob; alignment of the moment
  // with the participant's own receptivity profile decides which side
  // dominates. The fatigue curve is sharp (fourth power), so only clearly poor
  // moments carry the full penalty; reinforcement grows with the square of
  // alignment, so consistently well-chosen moments compound.
  const double alignment = sigmoid(base);
  const double misalignment = 1.0 - alignment;
  const double mis2 = misalignment * misalignment;
  const double fatigue = mis2 * mis2;
  const double reinforcement = 0.55 * alignment * alignment;
  return base + profile.habituation_per_day * static_cast<double>(day - 1) *
                    (fatigue - reinforcement);
}

double true_receptive_prob(const ParticipantProfile& profile, const ContextSnapshot& context,
                           int day) {
  return sigmoid(true_logit(profile, context, day));
}

}  // namespace receptive::sim
