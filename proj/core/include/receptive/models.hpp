#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "receptive/features.hpp"

namespace receptive {

// Weights + bias shared by the logistic and linear-SVM models. Dimension is
// kFeatureCount everywhere in the running system; training accepts any
// consistent dimension so tests can use low-dimensional sets.
struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
};

// Encoded feature vector plus receptive (1) / non-receptive (0) label.
struct LabeledInstance {
  FeatureVector features;
  int label = 0;
};

struct TrainingSet {
  std::vector<LabeledInstance> instances;
  // Participant identifier per instance; required for group-wise CV, may be
  // empty otherwise.
  std::vector<std::string> group_ids;

  std::size_t size() const { return instances.size(); }
  bool empty() const { return instances.empty(); }
};

struct LogisticConfig {
  double l2 = 1e-3;
  int iterations = 300;
  double learning_rate = 0.5;
  // Optional shrinkage center. When non-empty, training starts from this
  // model and the l2 penalty pulls the weights toward it instead of toward
  // zero, so a small sample refines an established model rather than fighting
  // the regularizer from scratch. Empty means the usual zero center.
  std::vector<double> center_weights;
  double center_bias = 0.0;
};

struct SvmConfig {
  double positive_class_weight = 3.0;
  double l2 = 1e-3;
  int iterations = 500;
  double learning_rate = 0.5;
};

double dot(const std::vector<double>& w, const FeatureVector& x);
double sigmoid(double z);

double predict_logit(const LinearModel& model, const FeatureVector& x);
// sigmoid(w.x + b); throws DataError on dimension mismatch.
double predict_proba(const LinearModel& model, const FeatureVector& x);
// Linear-SVM decision rule: receptive iff w.x + b > 0 strictly.
bool svm_receptive(const LinearModel& model, const FeatureVector& x);

// Mean L2-regularized log-loss and its analytic gradient (bias unregularized).
double logistic_loss(const TrainingSet& data, const LinearModel& model, double l2);
LinearModel logistic_gradient(const TrainingSet& data, const LinearModel& model, double l2);

// Deterministic full-batch gradient descent from zero initialization.
// Throws DataError when the set is empty or single-class.
LinearModel train_logistic(const TrainingSet& data, const LogisticConfig& config = {});

// Deterministic full-batch subgradient descent on class-weighted hinge loss;
// positive-class margin violations are penalized positive_class_weight times
// as heavily, which is the recall-tuning lever.
LinearModel train_linear_svm(const TrainingSet& data, const SvmConfig& config = {});

// Instance-hardness-threshold undersampling: hardness is one minus the
// cross-validated predicted probability of the instance's true label (k-fold,
// estimator train_logistic with defaults). Majority instances are dropped in
// descending hardness order until the classes balance; the minority class and
// the input order of survivors are untouched.
TrainingSet iht_undersample(const TrainingSet& data, int folds, std::uint64_t seed);

struct PrfScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

PrfScores prf(const std::vector<int>& predictions, const std::vector<int>& labels);

struct ClassifierReport {
  std::vector<PrfScores> folds;
  PrfScores mean;
};

using PredictorFn = std::function<bool(const FeatureVector&)>;
// Builds a predictor from one training fold; fold_seed is derived from the CV
// seed so stochastic predictors stay reproducible.
using TrainerFn = std::function<PredictorFn(const TrainingSet& train_fold, std::uint64_t fold_seed)>;

// Seeded partition of distinct group ids into n_groups near-equal groups.
std::vector<std::vector<std::string>> partition_groups(const TrainingSet& data, int n_groups,
                                                       std::uint64_t seed);

// Leave-one-group-out CV over participants: no group's instances ever appear
// in both train and test of a fold.
ClassifierReport logo_cv(const TrainingSet& data, int n_groups, const TrainerFn& trainer,
                         std::uint64_t seed);

// Predicts receptive with probability equal to the given prevalence,
// independently per instance.
PredictorFn biased_random_baseline(double prevalence, std::uint64_t seed);
// Trainer wrapper taking the prevalence from the training fold.
TrainerFn biased_random_trainer();

// Dual-model adaptive predictor: frozen population model P1 plus a personal
// model P2 retrained lazily from personal_data.
struct AdaptiveModel {
  LinearModel p1;
  TrainingSet personal_data;
  std::optional<LinearModel> p2;
  bool dirty = false;
  LogisticConfig p2_config;
};

// Retrains P2 first when personal data changed and holds both classes;
// probability is the equal-weight average of P1 and P2 (P1 alone before P2
// exists); receptive iff probability > 0.50 strictly.
std::pair<bool, double> adaptive_predict(AdaptiveModel& model, const FeatureVector& x);

void adaptive_ingest(AdaptiveModel& model, const std::vector<LabeledInstance>& instances);

// Flat text record: "1,<kind>,<bias>,<w0>,...,<wN>" with full decimal
// precision; round-trips bit-exactly.
void save_model(const LinearModel& model, std::string_view kind, std::ostream& out);
void save_model_file(const LinearModel& model, std::string_view kind, const std::string& path);

struct LoadedModel {
  LinearModel model;
  std::string kind;  // "lr" | "svm"
};

LoadedModel load_model(std::istream& in);
LoadedModel load_model_file(const std::string& path);

}  // namespace receptive
