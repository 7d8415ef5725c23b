// Microbenchmarks for the hot paths: context encoding, model scoring and
// training, the per-prompt delivery loop, one study replicate, and the
// bootstrap comparison machinery.

#include <benchmark/benchmark.h>

#include <sstream>
#include <vector>

#include "receptive/dataset.hpp"
#include "receptive/delivery.hpp"
#include "receptive/eval.hpp"
#include "receptive/features.hpp"
#include "receptive/models.hpp"
#include "receptive/rng.hpp"
#include "receptive/sim/dataset_gen.hpp"
#include "receptive/sim/experiment.hpp"

using namespace receptive;

namespace {

ContextSnapshot sample_snapshot(Rng& rng) {
  ContextSnapshot ctx;
  ctx.day_type = rng.bernoulli(2.0 / 7.0) ? DayType::Weekend : DayType::Weekday;
  ctx.time_of_day = static_cast<TimeOfDay>(rng.uniform_int(0, 2));
  ctx.battery_status = static_cast<BatteryStatus>(rng.uniform_int(0, 2));
  ctx.battery_level = static_cast<int>(rng.uniform_int(1, 100));
  ctx.lock_state = rng.bernoulli(0.4) ? LockState::Unlocked : LockState::Locked;
  ctx.lock_change_time = rng.uniform_int(0, 7200);
  ctx.wifi = rng.bernoulli(0.7) ? WifiState::Connected : WifiState::Disconnected;
  ctx.activity = static_cast<Activity>(rng.uniform_int(0, 4));
  return ctx;
}

TrainingSet benchmark_training_set(std::size_t n) {
  sim::DatasetSpec spec;
  spec.n_participants = static_cast<int>(n / 40);
  spec.instances_per_participant = 40;
  spec.seed = 17;
  return to_training_set(sim::generate_dataset(spec));
}

void bench_encode(benchmark::State& state) {
  Rng rng(1);
  std::vector<ContextSnapshot> snapshots;
  for (int i = 0; i < 1024; ++i) snapshots.push_back(sample_snapshot(rng));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(encode(snapshots[i++ & 1023]));
  }
}
BENCHMARK(bench_encode);

void bench_predict(benchmark::State& state) {
  const TrainingSet data = benchmark_training_set(2000);
  const LinearModel model = train_logistic(data);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict_proba(model, data.instances[i % data.size()].features));
    ++i;
  }
}
BENCHMARK(bench_predict);

void bench_train_logistic(benchmark::State& state) {
  const TrainingSet data = benchmark_training_set(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_logistic(data));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bench_train_logistic)->Arg(400)->Arg(4000);

void bench_train_svm(benchmark::State& state) {
  const TrainingSet data = benchmark_training_set(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_linear_svm(data));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bench_train_svm)->Arg(400)->Arg(4000);

void bench_undersample(benchmark::State& state) {
  const TrainingSet data = benchmark_training_set(4000);
  for (auto _ : state) {
    benchmark::DoNotOptimize(iht_undersample(data, 5, 3));
  }
}
BENCHMARK(bench_undersample);

void bench_delivery_loop(benchmark::State& state) {
  const TrainingSet data = benchmark_training_set(2000);
  const LinearModel model = train_linear_svm(data);
  Rng rng(5);
  std::vector<ContextSnapshot> snapshots;
  for (int i = 0; i < 64; ++i) snapshots.push_back(sample_snapshot(rng));
  const ContextFn context = [&snapshots](std::int64_t ts) {
    return snapshots[static_cast<std::size_t>(ts / 300) & 63];
  };
  const ReceptivityFn receptive = [&model](const ContextSnapshot& ctx) {
    return svm_receptive(model, encode(ctx));
  };
  std::int64_t trigger = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_delivery(trigger, ModelArm::Static, context, receptive));
    trigger += 3600;
  }
}
BENCHMARK(bench_delivery_loop);

void bench_replicate(benchmark::State& state) {
  const TrainingSet data = benchmark_training_set(4000);
  sim::StudyModels models;
  models.static_svm = train_linear_svm(data);
  models.p1 = train_logistic(iht_undersample(data, 5, 1));
  sim::ExperimentConfig config;
  config.n_participants = static_cast<int>(state.range(0));
  config.study_days = 14;
  config.seed = 9;
  for (auto _ : state) {
    std::ostringstream sink;
    benchmark::DoNotOptimize(sim::run_experiment(config, models, 0, sink));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bench_replicate)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

void bench_bootstrap_comparison(benchmark::State& state) {
  std::vector<MessageRecord> messages;
  Rng rng(11);
  for (int i = 0; i < 4000; ++i) {
    MessageRecord m;
    m.participant = "p" + std::to_string(i % 80);
    m.day = 1 + i % 21;
    m.arm = i % 2 == 0 ? ModelArm::Control : ModelArm::Static;
    m.delivery_ts = i * 100;
    if (rng.bernoulli(m.arm == ModelArm::Static ? 0.45 : 0.3)) {
      m.first_response_ts = m.delivery_ts + rng.uniform_int(1, 1200);
      m.reply_ts = {*m.first_response_ts};
    }
    messages.push_back(std::move(m));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(compare_rates(messages, Metric::JitResponse,
                                           ResampleMode::Messages, 500, 3));
  }
}
BENCHMARK(bench_bootstrap_comparison)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
