#include "receptive/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>

#include "receptive/errors.hpp"
#include "receptive/rng.hpp"

namespace receptive {

namespace {

void require_dims(const TrainingSet& data) {
  if (data.empty()) throw DataError("empty training set");
  const std::size_t d = data.instances.front().features.size();
  for (const auto& inst : data.instances) {
    if (inst.features.size() != d) {
      throw DataError("inconsistent feature dimensions in training set");
    }
    if (inst.label != 0 && inst.label != 1) {
      throw DataError("label must be 0 or 1, got " + std::to_string(inst.label));
    }
  }
}

void require_both_classes(const TrainingSet& data) {
  bool has_pos = false;
  bool has_neg = false;
  for (const auto& inst : data.instances) {
    (inst.label == 1 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) {
    throw DataError("degenerate training set: only one class present");
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double dot(const std::vector<double>& w, const FeatureVector& x) {
  if (w.size() != x.size()) {
    throw DataError("dimension mismatch: model has " + std::to_string(w.size()) +
                    " weights, input has " + std::to_string(x.size()));
  }
  return std::inner_product(w.begin(), w.end(), x.begin(), 0.0);
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double predict_logit(const LinearModel& model, const FeatureVector& x) {
  return dot(model.weights, x) + model.bias;
}

double predict_proba(const LinearModel& model, const FeatureVector& x) {
  return sigmoid(predict_logit(model, x));
}

bool svm_receptive(const LinearModel& model, const FeatureVector& x) {
  return predict_logit(model, x) > 0.0;
}

double logistic_loss(const TrainingSet& data, const LinearModel& model, double l2) {
  double loss = 0.0;
  for (const auto& inst : data.instances) {
    const double z = predict_logit(model, inst.features);
    // max(z,0) - z*y + log1p(exp(-|z|)), the overflow-safe log-loss
    loss += std::max(z, 0.0) - z * inst.label + std::log1p(std::exp(-std::abs(z)));
  }
  loss /= static_cast<double>(data.size());
  double reg = 0.0;
  for (double w : model.weights) reg += w * w;
  return loss + 0.5 * l2 * reg;
}

LinearModel logistic_gradient(const TrainingSet& data, const LinearModel& model, double l2) {
  LinearModel grad;
  grad.weights.assign(model.weights.size(), 0.0);
  grad.bias = 0.0;
  for (const auto& inst : data.instances) {
    const double err = sigmoid(predict_logit(model, inst.features)) - inst.label;
    for (std::size_t j = 0; j < grad.weights.size(); ++j) {
      grad.weights[j] += err * inst.features[j];
    }
    grad.bias += err;
  }
  const double n = static_cast<double>(data.size());
  for (std::size_t j = 0; j < grad.weights.size(); ++j) {
    grad.weights[j] = grad.weights[j] / n + l2 * model.weights[j];
  }
  grad.bias /= n;
  return grad;
}

LinearModel train_logistic(const TrainingSet& data, const LogisticConfig& config) {
  require_dims(data);
  require_both_classes(data);
  const std::size_t dims = data.instances.front().features.size();
  const bool centered = !config.center_weights.empty();
  if (centered && config.center_weights.size() != dims) {
    throw DataError("shrinkage center has " + std::to_string(config.center_weights.size()) +
                    " weights, expected " + std::to_string(dims));
  }
  LinearModel model;
  if (centered) {
    model.weights = config.center_weights;
    model.bias = config.center_bias;
  } else {
    model.weights.assign(dims, 0.0);
  }
  for (int it = 0; it < config.iterations; ++it) {
    const LinearModel grad = logistic_gradient(data, model, 0.0);
    for (std::size_t j = 0; j < model.weights.size(); ++j) {
      const double center = centered ? config.center_weights[j] : 0.0;
      model.weights[j] -=
          config.learning_rate * (grad.weights[j] + config.l2 * (model.weights[j] - center));
    }
    model.bias -= config.learning_rate * grad.bias;
  }
  for (double w : model.weights) {
    if (!std::isfinite(w)) throw InternalError("non-finite weight after logistic training");
  }
  return model;
}

LinearModel train_linear_svm(const TrainingSet& data, const SvmConfig& config) {
  require_dims(data);
  require_both_classes(data);
  const std::size_t d = data.instances.front().features.size();
  const double n = static_cast<double>(data.size());
  LinearModel model;
  model.weights.assign(d, 0.0);
  for (int it = 0; it < config.iterations; ++it) {
    std::vector<double> gw(d, 0.0);
    double gb = 0.0;
    for (const auto& inst : data.instances) {
      const double y = inst.label == 1 ? 1.0 : -1.0;
      const double c = inst.label == 1 ? config.positive_class_weight : 1.0;
      const double z = dot(model.weights, inst.features) + model.bias;
      if (y * z < 1.0) {
        for (std::size_t j = 0; j < d; ++j) gw[j] -= c * y * inst.features[j];
        gb -= c * y;
      }
    }
    const double step = config.learning_rate / (1.0 + 0.01 * it);
    for (std::size_t j = 0; j < d; ++j) {
      model.weights[j] -= step * (gw[j] / n + config.l2 * model.weights[j]);
    }
    model.bias -= step * gb / n;
  }
  for (double w : model.weights) {
    if (!std::isfinite(w)) throw InternalError("non-finite weight after SVM training");
  }
  return model;
}

TrainingSet iht_undersample(const TrainingSet& data, int folds, std::uint64_t seed) {
  require_dims(data);
  require_both_classes(data);
  if (folds < 2) throw DataError("iht_undersample requires folds >= 2");

  const std::size_t n = data.size();
  std::size_t n_pos = 0;
  for (const auto& inst : data.instances) n_pos += inst.label == 1;
  const std::size_t n_neg = n - n_pos;
  const std::size_t minority = std::min(n_pos, n_neg);
  if (static_cast<std::size_t>(folds) > minority) {
    throw DataError("iht_undersample: folds exceeds smaller class size");
  }
  if (n_pos == n_neg) return data;
  const int majority_label = n_pos > n_neg ? 1 : 0;

  // Fold assignment: seeded shuffle, near-equal chunks. A draw is degenerate
  // when some training complement ends up single-class, i.e. one fold holds an
  // entire class; re-draw up to 10 times.
  std::vector<int> fold_of(n, 0);
  bool ok = false;
  for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
    Rng rng(Rng::derive(seed, {static_cast<std::uint64_t>(attempt), 0x1487u}));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = n - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
      std::swap(order[i], order[j]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      fold_of[order[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
    }
    ok = true;
    for (int f = 0; f < folds && ok; ++f) {
      std::size_t pos_out = 0;
      std::size_t neg_out = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (fold_of[i] == f) continue;
        (data.instances[i].label == 1 ? pos_out : neg_out) += 1;
      }
      ok = pos_out > 0 && neg_out > 0;
    }
  }
  if (!ok) {
    throw DataError("iht_undersample: could not draw non-degenerate folds after 10 attempts");
  }

  // Cross-validated hardness: 1 - predicted probability of the true label.
  std::vector<double> hardness(n, 0.0);
  for (int f = 0; f < folds; ++f) {
    TrainingSet train;
    for (std::size_t i = 0; i < n; ++i) {
      if (fold_of[i] != f) train.instances.push_back(data.instances[i]);
    }
    const LinearModel estimator = train_logistic(train);
    for (std::size_t i = 0; i < n; ++i) {
      if (fold_of[i] != f) continue;
      const double p = predict_proba(estimator, data.instances[i].features);
      hardness[i] = 1.0 - (data.instances[i].label == 1 ? p : 1.0 - p);
    }
  }

  const std::size_t to_remove = std::max(n_pos, n_neg) - minority;
  std::vector<std::size_t> majority_idx;
  for (std::size_t i = 0; i < n; ++i) {
    if (data.instances[i].label == majority_label) majority_idx.push_back(i);
  }
  std::stable_sort(majority_idx.begin(), majority_idx.end(),
                   [&](std::size_t a, std::size_t b) { return hardness[a] > hardness[b]; });

  std::vector<char> removed(n, 0);
  for (std::size_t k = 0; k < to_remove; ++k) removed[majority_idx[k]] = 1;

  TrainingSet out;
  for (std::size_t i = 0; i < n; ++i) {
    if (removed[i]) continue;
    out.instances.push_back(data.instances[i]);
    if (!data.group_ids.empty()) out.group_ids.push_back(data.group_ids[i]);
  }
  return out;
}

PrfScores prf(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.size() != labels.size()) {
    throw DataError("prf: predictions and labels differ in length");
  }
  if (predictions.empty()) throw DataError("prf: empty input");
  long tp = 0;
  long fp = 0;
  long fn = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == 1 && labels[i] == 1) ++tp;
    if (predictions[i] == 1 && labels[i] == 0) ++fp;
    if (predictions[i] == 0 && labels[i] == 1) ++fn;
  }
  PrfScores s;
  s.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  s.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                                      : 0.0;
  return s;
}

std::vector<std::vector<std::string>> partition_groups(const TrainingSet& data, int n_groups,
                                                       std::uint64_t seed) {
  if (data.group_ids.size() != data.instances.size()) {
    throw DataError("group-wise CV requires a group id per instance");
  }
  std::vector<std::string> ids = data.group_ids;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (static_cast<int>(ids.size()) < n_groups) {
    throw DataError("fewer distinct groups (" + std::to_string(ids.size()) + ") than requested (" +
                    std::to_string(n_groups) + ")");
  }
  Rng rng(Rng::derive(seed, {0x9a57u}));
  for (std::size_t i = ids.size() - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
    std::swap(ids[i], ids[j]);
  }
  std::vector<std::vector<std::string>> groups(n_groups);
  const std::size_t base = ids.size() / static_cast<std::size_t>(n_groups);
  const std::size_t extra = ids.size() % static_cast<std::size_t>(n_groups);
  std::size_t pos = 0;
  for (int g = 0; g < n_groups; ++g) {
    const std::size_t take = base + (static_cast<std::size_t>(g) < extra ? 1 : 0);
    groups[g].assign(ids.begin() + pos, ids.begin() + pos + take);
    pos += take;
  }
  return groups;
}

ClassifierReport logo_cv(const TrainingSet& data, int n_groups, const TrainerFn& trainer,
                         std::uint64_t seed) {
  require_dims(data);
  const auto groups = partition_groups(data, n_groups, seed);

  ClassifierReport report;
  for (int f = 0; f < n_groups; ++f) {
    const auto in_fold = [&](const std::string& id) {
      return std::find(groups[f].begin(), groups[f].end(), id) != groups[f].end();
    };
    TrainingSet train;
    TrainingSet test;
    for (std::size_t i = 0; i < data.size(); ++i) {
      auto& dst = in_fold(data.group_ids[i]) ? test : train;
      dst.instances.push_back(data.instances[i]);
      dst.group_ids.push_back(data.group_ids[i]);
    }
    for (const auto& gid : test.group_ids) {
      if (std::find(train.group_ids.begin(), train.group_ids.end(), gid) != train.group_ids.end()) {
        throw InternalError("logo_cv: group leaked across the fold split");
      }
    }
    const std::uint64_t fold_seed = Rng::derive(seed, {static_cast<std::uint64_t>(f), 0xf01du});
    const PredictorFn predictor = trainer(train, fold_seed);
    std::vector<int> preds;
    std::vector<int> labels;
    preds.reserve(test.size());
    for (const auto& inst : test.instances) {
      preds.push_back(predictor(inst.features) ? 1 : 0);
      labels.push_back(inst.label);
    }
    report.folds.push_back(prf(preds, labels));
  }
  for (const auto& s : report.folds) {
    report.mean.precision += s.precision;
    report.mean.recall += s.recall;
    report.mean.f1 += s.f1;
  }
  const double k = static_cast<double>(report.folds.size());
  report.mean.precision /= k;
  report.mean.recall /= k;
  report.mean.f1 /= k;
  return report;
}

PredictorFn biased_random_baseline(double prevalence, std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  return [rng, prevalence](const FeatureVector&) { return rng->bernoulli(prevalence); };
}

TrainerFn biased_random_trainer() {
  return [](const TrainingSet& train, std::uint64_t fold_seed) {
    double prevalence = 0.0;
    for (const auto& inst : train.instances) prevalence += inst.label;
    prevalence /= static_cast<double>(train.size());
    return biased_random_baseline(prevalence, fold_seed);
  };
}

namespace {

bool has_both_classes(const TrainingSet& data) {
  bool pos = false;
  bool neg = false;
  for (const auto& inst : data.instances) (inst.label == 1 ? pos : neg) = true;
  return pos && neg;
}

}  // namespace

std::pair<bool, double> adaptive_predict(AdaptiveModel& model, const FeatureVector& x) {
  if (model.dirty && has_both_classes(model.personal_data)) {
    model.p2 = train_logistic(model.personal_data, model.p2_config);
    model.dirty = false;
  }
  double probability = predict_proba(model.p1, x);
  if (model.p2.has_value()) {
    probability = 0.5 * probability + 0.5 * predict_proba(*model.p2, x);
  }
  return {probability > 0.50, probability};
}

void adaptive_ingest(AdaptiveModel& model, const std::vector<LabeledInstance>& instances) {
  if (instances.empty()) return;
  for (const auto& inst : instances) model.personal_data.instances.push_back(inst);
  model.dirty = true;
}

void save_model(const LinearModel& model, std::string_view kind, std::ostream& out) {
  if (kind != "lr" && kind != "svm") throw DataError("model kind must be 'lr' or 'svm'");
  out << "1," << kind << ',' << format_double(model.bias);
  for (double w : model.weights) out << ',' << format_double(w);
  out << '\n';
}

void save_model_file(const LinearModel& model, std::string_view kind, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open model file for writing: " + path);
  save_model(model, kind, out);
}

LoadedModel load_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw DataError("empty model record");
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  if (fields.size() < 4) throw DataError("model record too short");
  if (fields[0] != "1") throw DataError("unsupported model record version: " + fields[0]);
  if (fields[1] != "lr" && fields[1] != "svm") {
    throw DataError("unknown model kind: " + fields[1]);
  }
  LoadedModel loaded;
  loaded.kind = fields[1];
  try {
    loaded.model.bias = std::stod(fields[2]);
    for (std::size_t i = 3; i < fields.size(); ++i) {
      loaded.model.weights.push_back(std::stod(fields[i]));
    }
  } catch (const std::exception&) {
    throw DataError("malformed numeric field in model record");
  }
  return loaded;
}

LoadedModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path);
  return load_model(in);
}

}  // namespace receptive
