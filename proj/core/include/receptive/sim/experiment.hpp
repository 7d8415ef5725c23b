#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "receptive/models.hpp"
#include "receptive/sim/config.hpp"

namespace receptive::sim {

// The two frozen population models every participant shares: the static
// classifier and the population half of the per-participant dual model.
struct StudyModels {
  LinearModel static_svm;
  LinearModel p1;
};

struct ReplicateStats {
  int replicate = 0;
  std::uint64_t seed = 0;
  std::size_t triggers = 0;
  std::size_t deliveries = 0;
  std::size_t outcomes = 0;
  std::size_t labels = 0;
  int dropouts = 0;  // participants who left before the last day
};

// Training setup for every participant's personal model. Stronger shrinkage
// than the population default: personal datasets are tiny, and an overconfident
// personal model would thrash the blended decision.
LogisticConfig personal_model_config(const LinearModel& population_model);

std::uint64_t replicate_seed(const ExperimentConfig& config, int replicate_index);

// Runs one full study replicate and streams its event log. Deterministic given
// (config, replicate_index): participants run in order, and each participant's
// events appear in simulation-time order.
ReplicateStats run_experiment(const ExperimentConfig& config, const StudyModels& models,
                              int replicate_index, std::ostream& log_out);

// Runs config.replicates studies, one JSONL file each (replicate_000.jsonl,
// ...), spreading replicates over up to `jobs` worker threads. File contents
// depend only on (config, replicate index), never on the job count.
std::vector<ReplicateStats> run_replicates(const ExperimentConfig& config,
                                           const StudyModels& models, const std::string& out_dir,
                                           int jobs);

}  // namespace receptive::sim
