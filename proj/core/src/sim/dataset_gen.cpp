#include "receptive/sim/dataset_gen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "receptive/errors.hpp"
#include "receptive/models.hpp"
#include "receptive/rng.hpp"
#include "receptive/sim/population.hpp"

namespace receptive::sim {

namespace {

ContextSnapshot draw_context(Rng& rng) {
  ContextSnapshot c;
  c.day_type = rng.bernoulli(2.0 / 7.0) ? DayType::Weekend : DayType::Weekday;
  const double tod = rng.uniform();
  c.time_of_day =
      tod < 0.35 ? TimeOfDay::Morning : (tod < 0.70 ? TimeOfDay::Afternoon : TimeOfDay::Evening);
  const double batt = rng.uniform();
  c.battery_status = batt < 0.15 ? BatteryStatus::Charging
                                 : (batt < 0.90 ? BatteryStatus::Discharging : BatteryStatus::Full);
  c.battery_level = static_cast<int>(rng.uniform_int(20, 100));
  c.lock_state = rng.bernoulli(0.35) ? LockState::Unlocked : LockState::Locked;
  c.lock_change_time = rng.uniform_int(0, 7200);
  c.wifi = rng.bernoulli(0.6) ? WifiState::Connected : WifiState::Disconnected;
  const double act = rng.uniform();
  if (act < 0.50) {
    c.activity = Activity::Still;
  } else if (act < 0.70) {
    c.activity = Activity::OnFoot;
  } else if (act < 0.80) {
    c.activity = Activity::OnBike;
  } else if (act < 0.90) {
    c.activity = Activity::Running;
  } else {
    c.activity = Activity::InVehicle;
  }
  return c;
}

}  // namespace

void validate(const DatasetSpec& spec) {
  if (spec.n_participants < 1) throw DataError("n_participants must be >= 1");
  if (spec.instances_per_participant < 1) {
    throw DataError("instances_per_participant must be >= 1");
  }
  if (spec.positive_prevalence <= 0.0 || spec.positive_prevalence >= 1.0) {
    throw DataError("positive_prevalence must be inside (0, 1)");
  }
  if (spec.label_noise < 0.0 || spec.label_noise >= 0.5) {
    throw DataError("label_noise must be in [0, 0.5)");
  }
  if (spec.label_noise >= spec.positive_prevalence) {
    throw DataError("label_noise must be below positive_prevalence");
  }
  if (spec.heterogeneity < 0.0) throw DataError("heterogeneity must be >= 0");
}

std::vector<DatasetRow> generate_dataset(const DatasetSpec& spec) {
  validate(spec);

  // Per-participant truth: the population base plus heterogeneity-scaled
  // spread, reusing the study population machinery at habituation 0.
  ExperimentConfig pop_config;
  pop_config.n_participants = spec.n_participants;
  pop_config.heterogeneity = spec.heterogeneity;
  pop_config.habituation_per_day = 0.0;
  const auto population = generate_population(pop_config, Rng::derive(spec.seed, {0xda7au}));

  const std::size_t total = static_cast<std::size_t>(spec.n_participants) *
                            static_cast<std::size_t>(spec.instances_per_participant);
  std::vector<DatasetRow> rows;
  rows.reserve(total);
  std::vector<double> logits;
  logits.reserve(total);

  for (int p = 0; p < spec.n_participants; ++p) {
    Rng rng(Rng::derive(spec.seed, {static_cast<std::uint64_t>(p), 0xd474u}));
    for (int k = 0; k < spec.instances_per_participant; ++k) {
      DatasetRow row;
      row.participant = population[static_cast<std::size_t>(p)].id;
      row.context = draw_context(rng);
      validate(row.context);
      rows.push_back(std::move(row));
      logits.push_back(true_logit(population[static_cast<std::size_t>(p)],
                                  rows.back().context, 1));
    }
  }

  // Threshold the pooled logits so that, before flips, the positive share is
  // p0 = (prevalence - noise) / (1 - 2*noise); symmetric flips then land the
  // final share at the requested prevalence in expectation.
  const double p0 =
      (spec.positive_prevalence - spec.label_noise) / (1.0 - 2.0 * spec.label_noise);
  std::vector<double> sorted = logits;
  std::sort(sorted.begin(), sorted.end());
  const auto cut = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(sorted.size()) - 1.0,
                       std::floor((1.0 - p0) * static_cast<double>(sorted.size()))));
  const double threshold = sorted[cut];

  Rng flip_rng(Rng::derive(spec.seed, {0xf11Fu}));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    int label = logits[i] > threshold ? 1 : 0;
    if (flip_rng.bernoulli(spec.label_noise)) label = 1 - label;
    rows[i].label = label;
  }
  return rows;
}

}  // namespace receptive::sim
