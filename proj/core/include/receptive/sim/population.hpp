#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "receptive/features.hpp"
#include "receptive/sim/config.hpp"

namespace receptive::sim {

// How one participant's phone-context day is shaped: home/away habits, how
// long activity and lock states persist, evening charging habit. Dwell means
// are minutes.
struct ContextRegime {
  double away_prob = 0.65;  // chance the day contains away-from-home time
  double mean_away_minutes = 260.0;
  double mean_home_minutes = 150.0;
  double mean_locked_minutes = 25.0;
  double mean_unlocked_minutes = 6.0;
  double evening_plug_prob = 0.5;  // plugs the phone in at night
};

// Ground truth for one synthetic participant: a linear logit over the encoded
// context decides how likely they are to respond right away, drifting down by
// habituation_per_day for every elapsed study day.
struct ParticipantProfile {
  std::string id;
  std::vector<double> truth_weights;  // length 16, matches the feature layout
  double truth_bias = 0.0;
  double interaction_weight = 0.0;  // unlocked-and-still extra term, usually 0
  double habituation_per_day = 0.0;
  double late_response_prob = 0.5;   // answer late when the moment was bad
  double late_delay_log_mean = 7.2;  // log-seconds of the extra late delay
  double late_delay_log_sigma = 1.0;
  double engagement_prob = 0.9;  // keep chatting after a prompt response
  ContextRegime regime;
};

// The population-level receptivity weights every participant varies around.
const std::vector<double>& base_truth_weights();
double base_truth_bias();

// Seeded population draw: shared base weights plus per-participant Gaussian
// spread scaled by config.heterogeneity (0 -> identical profiles).
std::vector<ParticipantProfile> generate_population(const ExperimentConfig& config,
                                                    std::uint64_t seed);

// True receptivity logit of this participant in this context on this day.
double true_logit(const ParticipantProfile& profile, const ContextSnapshot& context, int day);
double true_receptive_prob(const ParticipantProfile& profile, const ContextSnapshot& context,
                           int day);

}  // namespace receptive::sim
