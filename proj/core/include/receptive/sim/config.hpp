#pragma once

#include <cstdint>
#include <string>

namespace receptive::sim {

// Shape of one synthetic field study. Parsed from a JSON config file whose key
// set must match these fields exactly (unknown keys are rejected by name).
struct ExperimentConfig {
  int n_participants = 83;
  int study_days = 21;
  int warm_up_days = 7;
  std::uint64_t seed = 1;
  double heterogeneity = 1.0;  // scale of per-participant ground-truth spread
  int replicates = 1;
  double habituation_per_day = -0.05;  // additive logit drift per elapsed day
  bool exact_half_self_monitoring = false;  // exact 50% cohort instead of coins
  bool misspecified_truth = false;  // add an interaction term the models lack
  double dropout_hazard_per_day = 0.0;
  std::string static_model;  // path to the frozen population classifier
  std::string p1_model;      // path to the frozen population half of the dual model
};

// Throws DataError when counts or probabilities are out of range.
void validate(const ExperimentConfig& config);

// Strict parse: every key must be known and well-typed; file paths may stay
// empty here (the caller decides whether models are required).
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig read_config_file(const std::string& path, std::string* raw_bytes = nullptr);

std::string to_json(const ExperimentConfig& config);

}  // namespace receptive::sim
