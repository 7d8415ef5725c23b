#pragma once

#include <cstdint>

#include "receptive/dataset.hpp"

namespace receptive::sim {

// Shape of a synthetic labeled training table with a linear ground truth:
// per-instance contexts are drawn independently, scored by the population
// truth weights (plus per-participant spread), thresholded so the positive
// share lands at `positive_prevalence` after `label_noise` flips.
struct DatasetSpec {
  int n_participants = 100;
  int instances_per_participant = 40;
  double positive_prevalence = 0.3;
  double label_noise = 0.15;  // symmetric flip probability
  double heterogeneity = 0.0;
  std::uint64_t seed = 1;
};

void validate(const DatasetSpec& spec);

std::vector<DatasetRow> generate_dataset(const DatasetSpec& spec);

}  // namespace receptive::sim
