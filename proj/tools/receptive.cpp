// Command-line front end: dataset generation, model training, cross-validated
// model comparison, study simulation, and report emission.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "receptive/dataset.hpp"
#include "receptive/errors.hpp"
#include "receptive/eval.hpp"
#include "receptive/log.hpp"
#include "receptive/manifest.hpp"
#include "receptive/metrics.hpp"
#include "receptive/models.hpp"
#include "receptive/rng.hpp"
#include "receptive/sim/config.hpp"
#include "receptive/sim/dataset_gen.hpp"
#include "receptive/sim/events.hpp"
#include "receptive/sim/experiment.hpp"

namespace {

using namespace receptive;

namespace fs = std::filesystem;

// Collects (stage, seconds) pairs for the run manifest.
class StageClock {
 public:
  template <typename Fn>
  auto time(const std::string& name, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      record(name, start);
    } else {
      auto result = fn();
      record(name, start);
      return result;
    }
  }

  std::vector<std::pair<std::string, double>> stages;

 private:
  void record(const std::string& name, std::chrono::steady_clock::time_point start) {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    stages.emplace_back(name, elapsed.count());
  }
};

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunManifest base_manifest(const std::string& command, std::uint64_t seed,
                          const std::string& hashed_bytes) {
  RunManifest manifest;
  manifest.command = command;
  manifest.tool_version = RECEPTIVE_VERSION;
  manifest.config_hash = hex64(fnv1a64(hashed_bytes));
  manifest.seed = seed;
  return manifest;
}

// ---------------------------------------------------------------------------
// gen-dataset

struct GenDatasetArgs {
  std::string out;
  sim::DatasetSpec spec;
};

int cmd_gen_dataset(const GenDatasetArgs& args) {
  StageClock clock;
  const auto rows = clock.time("generate", [&] { return sim::generate_dataset(args.spec); });
  clock.time("write", [&] { write_dataset_csv_file(rows, args.out); });

  std::ostringstream params;
  params << args.spec.n_participants << ',' << args.spec.instances_per_participant << ','
         << args.spec.positive_prevalence << ',' << args.spec.label_noise << ','
         << args.spec.heterogeneity << ',' << args.spec.seed;
  RunManifest manifest = base_manifest("gen-dataset", args.spec.seed, params.str());
  manifest.stage_seconds = clock.stages;
  manifest.outputs = {args.out};
  write_manifest_file(manifest, args.out + ".manifest.json");

  std::size_t positives = 0;
  for (const auto& row : rows) positives += row.label == 1;
  std::cout << "wrote " << rows.size() << " rows (" << positives << " receptive) to " << args.out
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train-static

struct TrainStaticArgs {
  std::string dataset;
  std::string out;
  double positive_class_weight = SvmConfig{}.positive_class_weight;
};

int cmd_train_static(const TrainStaticArgs& args) {
  StageClock clock;
  const std::string bytes = read_bytes(args.dataset);
  const auto rows = clock.time("parse", [&] { return read_dataset_csv_file(args.dataset); });
  const TrainingSet data = to_training_set(rows);
  SvmConfig config;
  config.positive_class_weight = args.positive_class_weight;
  const LinearModel model = clock.time("train", [&] { return train_linear_svm(data, config); });
  clock.time("write", [&] { save_model_file(model, "svm", args.out); });

  RunManifest manifest = base_manifest("train-static", 0, bytes);
  manifest.stage_seconds = clock.stages;
  manifest.outputs = {args.out};
  write_manifest_file(manifest, args.out + ".manifest.json");

  std::cout << "trained recall-weighted linear classifier on " << data.size() << " instances -> "
            << args.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// cv

struct CvArgs {
  std::string dataset;
  int groups = 5;
  std::uint64_t seed = 1;
  int iht_folds = 5;
  std::string out;  // optional CSV destination
};

// Online replay of the dual adaptive model over one held-out participant's
// instances, in order: predict first, then reveal the label.
PrfScores replay_adaptive(const LinearModel& p1, const TrainingSet& test) {
  std::map<std::string, AdaptiveModel> personal;
  std::vector<int> preds;
  std::vector<int> labels;
  preds.reserve(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    const std::string& who = test.group_ids[i];
    auto [it, fresh] = personal.try_emplace(who);
    if (fresh) {
      it->second.p1 = p1;
      it->second.p2_config = sim::personal_model_config(p1);
    }
    const auto [receptive, probability] = adaptive_predict(it->second, test.instances[i].features);
    (void)probability;
    preds.push_back(receptive ? 1 : 0);
    labels.push_back(test.instances[i].label);
    adaptive_ingest(it->second, {test.instances[i]});
  }
  return prf(preds, labels);
}

int cmd_cv(const CvArgs& args) {
  StageClock clock;
  const std::string bytes = read_bytes(args.dataset);
  const auto rows = clock.time("parse", [&] { return read_dataset_csv_file(args.dataset); });
  const TrainingSet data = to_training_set(rows);

  // All four models are scored on the same seeded participant partition.
  const TrainerFn svm_trainer = [](const TrainingSet& train, std::uint64_t) {
    const LinearModel model = train_linear_svm(train);
    return PredictorFn(
        [model](const FeatureVector& x) { return svm_receptive(model, x); });
  };
  const int iht_folds = args.iht_folds;
  const TrainerFn lr_trainer = [iht_folds](const TrainingSet& train, std::uint64_t fold_seed) {
    const TrainingSet balanced = iht_undersample(train, iht_folds, fold_seed);
    const LinearModel model = train_logistic(balanced);
    return PredictorFn(
        [model](const FeatureVector& x) { return predict_proba(model, x) > 0.5; });
  };

  struct NamedReport {
    std::string name;
    ClassifierReport report;
  };
  std::vector<NamedReport> reports;
  clock.time("cv", [&] {
    reports.push_back({"biased_random", logo_cv(data, args.groups, biased_random_trainer(),
                                                args.seed)});
    reports.push_back({"static_svm", logo_cv(data, args.groups, svm_trainer, args.seed)});
    reports.push_back({"p1_lr", logo_cv(data, args.groups, lr_trainer, args.seed)});

    // The adaptive row replays the dual model online over the held-out
    // participants, with the population half trained on the training folds.
    const auto groups = partition_groups(data, args.groups, args.seed);
    ClassifierReport adaptive;
    for (int f = 0; f < args.groups; ++f) {
      TrainingSet train;
      TrainingSet test;
      for (std::size_t i = 0; i < data.size(); ++i) {
        const bool held_out = std::find(groups[static_cast<std::size_t>(f)].begin(),
                                        groups[static_cast<std::size_t>(f)].end(),
                                        data.group_ids[i]) != groups[static_cast<std::size_t>(f)].end();
        auto& dst = held_out ? test : train;
        dst.instances.push_back(data.instances[i]);
        dst.group_ids.push_back(data.group_ids[i]);
      }
      const std::uint64_t fold_seed =
          Rng::derive(args.seed, {static_cast<std::uint64_t>(f), 0xf01du});
      const LinearModel p1 = train_logistic(iht_undersample(train, iht_folds, fold_seed));
      adaptive.folds.push_back(replay_adaptive(p1, test));
    }
    for (const auto& s : adaptive.folds) {
      adaptive.mean.precision += s.precision;
      adaptive.mean.recall += s.recall;
      adaptive.mean.f1 += s.f1;
    }
    const double k = static_cast<double>(adaptive.folds.size());
    adaptive.mean.precision /= k;
    adaptive.mean.recall /= k;
    adaptive.mean.f1 /= k;
    reports.push_back({"adaptive", std::move(adaptive)});
  });

  std::ostringstream csv;
  csv << "model,fold,precision,recall,f1\n";
  for (const auto& [name, report] : reports) {
    for (std::size_t f = 0; f < report.folds.size(); ++f) {
      const auto& s = report.folds[f];
      csv << name << ',' << f + 1 << ',' << s.precision << ',' << s.recall << ',' << s.f1 << '\n';
    }
    csv << name << ",mean," << report.mean.precision << ',' << report.mean.recall << ','
        << report.mean.f1 << '\n';
  }
  std::cout << csv.str();

  if (!args.out.empty()) {
    std::ofstream out(args.out);
    if (!out) throw DataError("cannot open report for writing: " + args.out);
    out << csv.str();
    RunManifest manifest = base_manifest("cv", args.seed, bytes);
    manifest.stage_seconds = clock.stages;
    manifest.outputs = {args.out};
    write_manifest_file(manifest, args.out + ".manifest.json");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string config_path;
  std::string out_dir;
  std::string train_static_from;
  int jobs = 0;  // 0 = hardware concurrency
  std::int64_t seed_override = -1;
};

int cmd_simulate(const SimulateArgs& args) {
  StageClock clock;
  std::string config_bytes;
  sim::ExperimentConfig config = sim::read_config_file(args.config_path, &config_bytes);
  if (args.seed_override >= 0) config.seed = static_cast<std::uint64_t>(args.seed_override);

  fs::create_directories(args.out_dir);
  std::vector<std::string> outputs;

  sim::StudyModels models;
  if (!args.train_static_from.empty()) {
    const auto rows =
        clock.time("parse", [&] { return read_dataset_csv_file(args.train_static_from); });
    const TrainingSet data = to_training_set(rows);
    clock.time("train", [&] {
      models.static_svm = train_linear_svm(data);
      models.p1 = train_logistic(iht_undersample(data, 5, config.seed));
    });
    const std::string svm_path = (fs::path(args.out_dir) / "static.model").string();
    const std::string p1_path = (fs::path(args.out_dir) / "p1.model").string();
    save_model_file(models.static_svm, "svm", svm_path);
    save_model_file(models.p1, "lr", p1_path);
    outputs.push_back(svm_path);
    outputs.push_back(p1_path);
  } else {
    if (config.static_model.empty() || config.p1_model.empty()) {
      throw DataError(
          "no models to run with: set static_model and p1_model in the config, or pass "
          "--train-static-from <dataset.csv>");
    }
    clock.time("load", [&] {
      const LoadedModel svm = load_model_file(config.static_model);
      if (svm.kind != "svm") {
        throw DataError("static_model must hold an svm record, got " + svm.kind);
      }
      const LoadedModel p1 = load_model_file(config.p1_model);
      if (p1.kind != "lr") {
        throw DataError("p1_model must hold an lr record, got " + p1.kind);
      }
      models.static_svm = svm.model;
      models.p1 = p1.model;
    });
  }

  const int jobs = args.jobs > 0 ? args.jobs
                                 : std::max(1u, std::thread::hardware_concurrency());
  const auto stats = clock.time("simulate", [&] {
    return sim::run_replicates(config, models, args.out_dir, jobs);
  });

  std::size_t triggers = 0;
  for (const auto& s : stats) {
    char name[32];
    std::snprintf(name, sizeof(name), "replicate_%03d.jsonl", s.replicate);
    outputs.push_back((fs::path(args.out_dir) / name).string());
    triggers += s.triggers;
    std::cout << "replicate " << s.replicate << ": triggers=" << s.triggers
              << " deliveries=" << s.deliveries << " labels=" << s.labels
              << " dropouts=" << s.dropouts << "\n";
  }
  std::cout << "total triggers across " << stats.size() << " replicate(s): " << triggers << "\n";

  RunManifest manifest = base_manifest("simulate", config.seed, config_bytes);
  manifest.stage_seconds = clock.stages;
  manifest.outputs = outputs;
  write_manifest_file(manifest, (fs::path(args.out_dir) / "run_manifest.json").string());
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string log_dir;
  std::string out_dir;
  std::uint64_t seed = 1;
  int resamples = 10000;
  int warm_up_days = 7;
};

int cmd_evaluate(const EvaluateArgs& args) {
  StageClock clock;

  if (!fs::is_directory(args.log_dir)) {
    throw DataError("log directory not found: " + args.log_dir);
  }

  // Fingerprint the logs we are about to analyze.
  std::vector<fs::path> log_files;
  for (const auto& entry : fs::directory_iterator(args.log_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      log_files.push_back(entry.path());
    }
  }
  std::sort(log_files.begin(), log_files.end());
  std::string log_bytes;
  for (const auto& path : log_files) log_bytes += read_bytes(path.string());

  const sim::EventLog log = clock.time("parse", [&] { return sim::read_events_dir(args.log_dir); });
  const std::vector<MessageRecord> messages = sim::pair_messages(log);
  if (messages.empty()) throw DataError("no events to evaluate in " + args.log_dir);

  const auto by_arm = split_by_arm(messages);
  for (ModelArm arm : {ModelArm::Control, ModelArm::Static, ModelArm::Adaptive}) {
    const auto it = by_arm.find(arm);
    if (it == by_arm.end() || it->second.empty()) {
      throw DataError("no messages attributed to the " + to_string(arm) +
                      " arm; cannot compare groups");
    }
  }

  fs::create_directories(args.out_dir);
  std::vector<std::string> outputs;
  const auto write_file = [&outputs](const std::string& path, const auto& writer) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open report for writing: " + path);
    writer(out);
    outputs.push_back(path);
  };

  // Per-message comparisons (every prompt counts once).
  const auto table2 = clock.time("per_message", [&] {
    return comparison_table(messages, ResampleMode::Messages, args.resamples,
                            Rng::derive(args.seed, {1}));
  });
  write_file((fs::path(args.out_dir) / "table2.csv").string(),
             [&](std::ostream& out) { write_comparison_csv(table2, out); });

  // Participant-cluster comparisons (within-person correlation respected).
  const auto table3 = clock.time("per_participant", [&] {
    return comparison_table(messages, ResampleMode::Participants, args.resamples,
                            Rng::derive(args.seed, {2}));
  });
  write_file((fs::path(args.out_dir) / "table3.csv").string(),
             [&](std::ostream& out) { write_comparison_csv(table3, out); });

  // Day-by-day series and their trends.
  clock.time("trends", [&] {
    std::ostringstream trends;
    trends << "metric,model,days_used,slope,intercept,p_value\n";
    for (Metric metric : all_metrics()) {
      const auto series = daily_series(messages, metric);
      write_file((fs::path(args.out_dir) / ("fig4_" + to_string(metric) + ".csv")).string(),
                 [&](std::ostream& out) { write_daily_series_csv(series, out); });
      for (const auto& [arm, points] : series) {
        try {
          const TrendResult trend =
              trend_slope(points, Rng::derive(args.seed, {3, static_cast<std::uint64_t>(metric)}));
          trends << to_string(metric) << ',' << to_string(arm) << ',' << trend.days << ','
                 << trend.slope << ',' << trend.intercept << ',' << trend.p_value << '\n';
        } catch (const DataError&) {
          // Too few active days for a slope (e.g. a short run): skip the row.
        }
      }
    }
    write_file((fs::path(args.out_dir) / "trends.csv").string(),
               [&](std::ostream& out) { out << trends.str(); });
  });

  // Plain rate summaries, whole study and post-warm-up.
  write_file((fs::path(args.out_dir) / "summary.csv").string(), [&](std::ostream& out) {
    out << summary_csv_header() << '\n';
    for (const auto& [arm, msgs] : by_arm) {
      out << to_csv_row("all", arm, summarize(msgs)) << '\n';
    }
    for (const auto& [arm, msgs] : by_arm) {
      std::vector<MessageRecord> post;
      for (const auto& m : msgs) {
        if (m.day > args.warm_up_days) post.push_back(m);
      }
      out << to_csv_row("post_warmup", arm, summarize(post)) << '\n';
    }
  });

  for (const auto& row : table2) {
    if (!row.mean_difference) {
      std::cout << row.metric << " " << row.comparison << ": undefined (empty group)\n";
      continue;
    }
    std::cout << row.metric << " " << row.comparison << ": "
              << format_difference(*row.mean_difference, row.percent_change.value_or(0.0));
    if (row.ci_low && row.ci_high) {
      std::cout << "  ci95=[" << *row.ci_low << ", " << *row.ci_high << "]";
    }
    if (row.p_value) std::cout << "  p=" << *row.p_value;
    if (row.p_adjusted) std::cout << "  p_adj=" << *row.p_adjusted;
    std::cout << "\n";
  }

  RunManifest manifest = base_manifest("evaluate", args.seed, log_bytes);
  manifest.stage_seconds = clock.stages;
  manifest.outputs = outputs;
  write_manifest_file(manifest, (fs::path(args.out_dir) / "run_manifest.json").string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Receptivity-aware prompt delivery engine and field-study simulator"};
  app.set_version_flag("--version", RECEPTIVE_VERSION);
  app.require_subcommand(1);

  GenDatasetArgs gen_args;
  CLI::App* gen = app.add_subcommand(
      "gen-dataset", "Generate a synthetic labeled context table with linear ground truth");
  gen->add_option("--out", gen_args.out, "Destination CSV")->required();
  gen->add_option("--participants", gen_args.spec.n_participants, "Distinct participants");
  gen->add_option("--per-participant", gen_args.spec.instances_per_participant,
                  "Instances per participant");
  gen->add_option("--prevalence", gen_args.spec.positive_prevalence,
                  "Final share of receptive labels");
  gen->add_option("--noise", gen_args.spec.label_noise, "Symmetric label flip probability");
  gen->add_option("--heterogeneity", gen_args.spec.heterogeneity,
                  "Per-participant ground-truth spread");
  gen->add_option("--seed", gen_args.spec.seed, "Generator seed");

  TrainStaticArgs train_args;
  CLI::App* train = app.add_subcommand(
      "train-static", "Train the recall-weighted linear classifier on a labeled table");
  train->add_option("dataset", train_args.dataset, "Labeled context CSV")->required();
  train->add_option("--out", train_args.out, "Destination model file")->required();
  train->add_option("--positive-class-weight", train_args.positive_class_weight,
                    "Loss weight on receptive instances");

  CvArgs cv_args;
  CLI::App* cv = app.add_subcommand(
      "cv", "Group-wise cross-validated comparison of baseline and learned models");
  cv->add_option("dataset", cv_args.dataset, "Labeled context CSV")->required();
  cv->add_option("--groups", cv_args.groups, "Participant folds")->check(CLI::Range(2, 1000));
  cv->add_option("--seed", cv_args.seed, "Partition seed");
  cv->add_option("--iht-folds", cv_args.iht_folds, "Folds inside the undersampling estimator");
  cv->add_option("--out", cv_args.out, "Also write the report CSV here");

  SimulateArgs sim_args;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Run the synthetic field study and write event logs");
  simulate->add_option("--config", sim_args.config_path, "Experiment config JSON")->required();
  simulate->add_option("--out", sim_args.out_dir, "Output directory")->required();
  simulate->add_option("--train-static-from", sim_args.train_static_from,
                       "Train the frozen models from this labeled CSV instead of loading them");
  simulate->add_option("--jobs", sim_args.jobs, "Parallel replicate workers (0 = all cores)");
  simulate->add_option("--seed", sim_args.seed_override, "Override the config seed");

  EvaluateArgs eval_args;
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Analyze event logs into comparison and trend reports");
  evaluate->add_option("logs", eval_args.log_dir, "Directory of *.jsonl event logs")->required();
  evaluate->add_option("--out", eval_args.out_dir, "Output directory")->required();
  evaluate->add_option("--seed", eval_args.seed, "Resampling seed");
  evaluate->add_option("--resamples", eval_args.resamples, "Bootstrap resamples")
      ->check(CLI::Range(1, 1000000));
  evaluate->add_option("--warmup-days", eval_args.warm_up_days,
                       "Days excluded from the post-warm-up summary rows");

  try {
    app.parse(argc, argv);
    if (gen->parsed()) return cmd_gen_dataset(gen_args);
    if (train->parsed()) return cmd_train_static(train_args);
    if (cv->parsed()) return cmd_cv(cv_args);
    if (simulate->parsed()) return cmd_simulate(sim_args);
    if (evaluate->parsed()) return cmd_evaluate(eval_args);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
