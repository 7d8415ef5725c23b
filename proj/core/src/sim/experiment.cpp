#include "receptive/sim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <deque>
#include <numeric>
#include <optional>
#include <thread>

#include "receptive/delivery.hpp"
#include "receptive/errors.hpp"
#include "receptive/labeling.hpp"
#include "receptive/rng.hpp"
#include "receptive/scheduler.hpp"
#include "receptive/sim/context_stream.hpp"
#include "receptive/sim/events.hpp"
#include "receptive/sim/population.hpp"
#include "receptive/sim/response.hpp"

namespace receptive::sim {

namespace {

void require_model(const LinearModel& model, const char* what) {
  if (model.weights.size() != kFeatureCount) {
    throw DataError(std::string(what) + " has " + std::to_string(model.weights.size()) +
                    " weights, expected " + std::to_string(kFeatureCount));
  }
}

// Which participants get the daytime prompt on each day when the exact-half
// cohort mode is on: a seeded shuffle, first floor(n/2) win.
std::vector<std::vector<bool>> exact_half_cohorts(int n_participants, int study_days,
                                                  std::uint64_t seed) {
  std::vector<std::vector<bool>> in_cohort(
      static_cast<std::size_t>(study_days) + 1,
      std::vector<bool>(static_cast<std::size_t>(n_participants), false));
  for (int day = 1; day <= study_days; ++day) {
    Rng rng(Rng::derive(seed, {static_cast<std::uint64_t>(day), 0x5e1fu}));
    std::vector<int> order(static_cast<std::size_t>(n_participants));
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
      std::swap(order[i], order[j]);
    }
    for (int k = 0; k < n_participants / 2; ++k) {
      in_cohort[static_cast<std::size_t>(day)][static_cast<std::size_t>(order[k])] = true;
    }
  }
  return in_cohort;
}

}  // namespace

LogisticConfig personal_model_config(const LinearModel& population_model) {
  LogisticConfig config;
  config.l2 = 0.05;
  config.iterations = 300;
  config.learning_rate = 0.5;
  // The personal model starts from the population model and is shrunk toward
  // it, so with little data it behaves like the population model and drifts
  // toward the participant's own profile as labeled prompts accrue.
  config.center_weights = population_model.weights;
  config.center_bias = population_model.bias;
  return config;
}

std::uint64_t replicate_seed(const ExperimentConfig& config, int replicate_index) {
  return Rng::derive(config.seed, {static_cast<std::uint64_t>(replicate_index), 0x5eedu});
}

ReplicateStats run_experiment(const ExperimentConfig& config, const StudyModels& models,
                              int replicate_index, std::ostream& log_out) {
  validate(config);
  require_model(models.static_svm, "static model");
  require_model(models.p1, "population model");

  ReplicateStats stats;
  stats.replicate = replicate_index;
  stats.seed = replicate_seed(config, replicate_index);

  const auto population = generate_population(config, Rng::derive(stats.seed, {0x909u}));

  DeliveryPolicy policy;
  policy.warm_up_days = config.warm_up_days;

  std::vector<std::vector<bool>> cohorts;
  if (config.exact_half_self_monitoring) {
    cohorts = exact_half_cohorts(config.n_participants, config.study_days,
                                 Rng::derive(stats.seed, {0xc047u}));
  }

  EventWriter writer(log_out);

  for (int i = 0; i < config.n_participants; ++i) {
    const ParticipantProfile& profile = population[static_cast<std::size_t>(i)];
    const ContextStream stream(profile,
                               Rng::derive(stats.seed, {static_cast<std::uint64_t>(i), 0xc74Bu}));

    AdaptiveModel adaptive;
    adaptive.p1 = models.p1;
    adaptive.p2_config = personal_model_config(models.p1);

    // Rolling window of recent response outcomes; disengaged participants
    // (mostly unanswered prompts lately) are the likeliest to quit.
    std::deque<bool> recent_responses;

    bool dropped = false;
    for (int day = 1; day <= config.study_days && !dropped; ++day) {
      Rng day_rng(
          Rng::derive(stats.seed, {static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(day),
                                   0xdaf7u}));
      if (config.dropout_hazard_per_day > 0.0 && day > 1) {
        double responded = 0.0;
        for (const bool r : recent_responses) responded += r ? 1.0 : 0.0;
        const double rate =
            recent_responses.empty() ? 1.0 : responded / static_cast<double>(recent_responses.size());
        const double hazard = config.dropout_hazard_per_day * 2.0 * (1.0 - rate);
        if (day_rng.bernoulli(std::min(hazard, 1.0))) {
          dropped = true;
          ++stats.dropouts;
          break;
        }
      }

      std::optional<bool> forced_cohort;
      if (config.exact_half_self_monitoring) {
        forced_cohort =
            cohorts[static_cast<std::size_t>(day)][static_cast<std::size_t>(i)];
      }
      const DayPlan plan = plan_day(day_rng, forced_cohort);

      for (const Trigger& trigger : plan.triggers) {
        const std::int64_t trigger_ts =
            (static_cast<std::int64_t>(day) - 1) * 86400 + static_cast<std::int64_t>(trigger.minute) * 60;
        writer.write(TriggerEvent{profile.id, day, trigger.kind, trigger_ts});
        ++stats.triggers;

        const ModelArm arm = select_model(day, day_rng, policy);
        ReceptivityFn receptive_fn;
        switch (arm) {
          case ModelArm::Control:
            receptive_fn = [](const ContextSnapshot&) { return true; };  // never polled
            break;
          case ModelArm::Static:
            receptive_fn = [&models](const ContextSnapshot& ctx) {
              return svm_receptive(models.static_svm, encode(ctx));
            };
            break;
          case ModelArm::Adaptive:
            receptive_fn = [&adaptive](const ContextSnapshot& ctx) {
              return adaptive_predict(adaptive, encode(ctx)).first;
            };
            break;
        }

        const DeliveryRecord record =
            run_delivery(trigger_ts, arm, stream.as_fn(), receptive_fn, policy);
        writer.write(DeliveryEvent{profile.id, day, record});
        ++stats.deliveries;

        const OutcomeRecord outcome = simulate_response(
            profile, record.context, day, record.delivery_ts, stream, day_rng, policy.jit_window);
        writer.write(OutcomeEvent{profile.id, day, outcome});
        ++stats.outcomes;

        recent_responses.push_back(outcome.first_response_ts.has_value());
        while (recent_responses.size() > 10) recent_responses.pop_front();

        std::vector<LabeledInstance> instances;
        for (const LabeledContext& lc : label_outcome(record, outcome, policy.jit_window)) {
          writer.write(LabelEvent{profile.id, lc});
          ++stats.labels;
          instances.push_back(to_instance(lc));
        }
        adaptive_ingest(adaptive, instances);
      }
    }
  }
  return stats;
}

std::vector<ReplicateStats> run_replicates(const ExperimentConfig& config,
                                           const StudyModels& models, const std::string& out_dir,
                                           int jobs) {
  validate(config);
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create output directory " + out_dir + ": " + ec.message());

  const int workers = std::clamp(jobs, 1, config.replicates);
  std::vector<ReplicateStats> stats(static_cast<std::size_t>(config.replicates));
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));

  const auto worker = [&](int slot) {
    try {
      while (true) {
        const int r = next.fetch_add(1);
        if (r >= config.replicates) return;
        char name[32];
        std::snprintf(name, sizeof(name), "replicate_%03d.jsonl", r);
        const fs::path path = fs::path(out_dir) / name;
        std::ofstream out(path);
        if (!out) throw DataError("cannot open event log for writing: " + path.string());
        stats[static_cast<std::size_t>(r)] = run_experiment(config, models, r, out);
        if (!out) throw DataError("failed writing event log: " + path.string());
      }
    } catch (...) {
      errors[static_cast<std::size_t>(slot)] = std::current_exception();
    }
  };

  if (workers == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return stats;
}

}  // namespace receptive::sim
