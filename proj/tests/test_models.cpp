#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "receptive/errors.hpp"
#include "receptive/models.hpp"
#include "receptive/rng.hpp"

using namespace receptive;

namespace {

// Six two-dimensional points, linearly separable-ish across the x2 axis.
TrainingSet toy_set() {
  TrainingSet data;
  const std::vector<std::pair<FeatureVector, int>> rows = {
      {{0.0, 0.1}, 0}, {{0.2, 0.9}, 1}, {{1.0, 0.8}, 1},
      {{0.9, 0.2}, 0}, {{0.4, 0.5}, 0}, {{0.8, 0.9}, 1},
  };
  for (const auto& [x, y] : rows) data.instances.push_back({x, y});
  return data;
}

TrainingSet random_set(Rng& rng, std::size_t n, std::size_t dims) {
  TrainingSet data;
  for (std::size_t i = 0; i < n; ++i) {
    FeatureVector x(dims);
    for (auto& c : x) c = rng.uniform();
    data.instances.push_back({x, rng.bernoulli(0.5) ? 1 : 0});
  }
  // keep both classes present
  data.instances[0].label = 0;
  data.instances[1].label = 1;
  return data;
}

}  // namespace

TEST_CASE("logistic training reproduces its reference fit on the toy set") {
  // Reference values from an independent line-by-line reimplementation of the
  // documented update rule (zero init, 300 iterations, rate 0.5, l2 1e-3,
  // bias unregularized).
  const LinearModel m = train_logistic(toy_set());
  REQUIRE(m.weights.size() == 2);
  CHECK(m.weights[0] == doctest::Approx(0.8067212203593264).epsilon(1e-12));
  CHECK(m.weights[1] == doctest::Approx(6.351980038888218).epsilon(1e-12));
  CHECK(m.bias == doctest::Approx(-4.141699220358619).epsilon(1e-12));
  CHECK(logistic_loss(toy_set(), m, 1e-3) ==
        doctest::Approx(0.18528749638883782).epsilon(1e-12));
}

TEST_CASE("svm training reproduces its reference fit on the toy set") {
  // Same idea: the class-weighted hinge subgradient descent (weight 3, 500
  // iterations, decaying step 0.5/(1+0.01t)) recomputed independently.
  const LinearModel m = train_linear_svm(toy_set());
  REQUIRE(m.weights.size() == 2);
  CHECK(m.weights[0] == doctest::Approx(0.6744950555394904).epsilon(1e-10));
  CHECK(m.weights[1] == doctest::Approx(5.402286824851185).epsilon(1e-10));
  CHECK(m.bias == doctest::Approx(-3.989963967464478).epsilon(1e-10));
}

TEST_CASE("fitted toy models separate the toy points") {
  const LinearModel lr = train_logistic(toy_set());
  const LinearModel svm = train_linear_svm(toy_set());
  for (const auto& inst : toy_set().instances) {
    CHECK((predict_proba(lr, inst.features) > 0.5) == (inst.label == 1));
    CHECK(svm_receptive(svm, inst.features) == (inst.label == 1));
  }
}

TEST_CASE("training rejects empty and single-class sets") {
  TrainingSet empty;
  CHECK_THROWS_AS(train_logistic(empty), DataError);
  CHECK_THROWS_AS(train_linear_svm(empty), DataError);
  TrainingSet single;
  single.instances.push_back({{0.5, 0.5}, 1});
  single.instances.push_back({{0.1, 0.9}, 1});
  CHECK_THROWS_AS(train_logistic(single), DataError);
  CHECK_THROWS_AS(train_linear_svm(single), DataError);
}

TEST_CASE("analytic gradient matches central finite differences") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dims = static_cast<std::size_t>(rng.uniform_int(1, 6));
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(4, 30));
    TrainingSet data = random_set(rng, n, dims);
    LinearModel at;
    at.weights.resize(dims);
    for (auto& w : at.weights) w = rng.uniform(-2.0, 2.0);
    at.bias = rng.uniform(-2.0, 2.0);
    const double l2 = rng.uniform(0.0, 0.1);

    const LinearModel grad = logistic_gradient(data, at, l2);
    const double h = 1e-6;
    for (std::size_t j = 0; j <= dims; ++j) {
      LinearModel plus = at;
      LinearModel minus = at;
      if (j < dims) {
        plus.weights[j] += h;
        minus.weights[j] -= h;
      } else {
        plus.bias += h;
        minus.bias -= h;
      }
      const double fd = (logistic_loss(data, plus, l2) - logistic_loss(data, minus, l2)) / (2 * h);
      const double an = j < dims ? grad.weights[j] : grad.bias;
      const double scale = std::max({std::abs(fd), std::abs(an), 1e-8});
      CHECK(std::abs(fd - an) / scale < 1e-4);
    }
  }
}

TEST_CASE("centered shrinkage pulls an unidentified weight toward its center") {
  // Instances that never vary along dimension 1: the data cannot identify
  // that weight, so the regularizer decides. With a zero center it dies to
  // zero; with a center it stays there.
  TrainingSet data;
  data.instances.push_back({{0.0, 0.5}, 0});
  data.instances.push_back({{1.0, 0.5}, 1});
  data.instances.push_back({{0.1, 0.5}, 0});
  data.instances.push_back({{0.9, 0.5}, 1});

  LogisticConfig plain;
  plain.l2 = 0.5;
  const LinearModel to_zero = train_logistic(data, plain);

  LogisticConfig centered = plain;
  centered.center_weights = {to_zero.weights[0], 3.0};
  centered.center_bias = to_zero.bias;
  const LinearModel held = train_logistic(data, centered);

  CHECK(std::abs(to_zero.weights[1]) < 0.2);
  CHECK(held.weights[1] == doctest::Approx(3.0).epsilon(1e-6));
  CHECK_THROWS_AS((void)train_logistic(data, [] {
                    LogisticConfig bad;
                    bad.center_weights = {1.0};  // wrong dimension
                    return bad;
                  }()),
                  DataError);
}

TEST_CASE("precision, recall and f1 come out exactly on a counted example") {
  // 3 true positives, 1 false positive, 1 false negative:
  // precision 0.75, recall 0.75, f1 0.75.
  const std::vector<int> preds = {1, 1, 1, 1, 0, 0};
  const std::vector<int> labels = {1, 1, 1, 0, 1, 0};
  const PrfScores s = prf(preds, labels);
  CHECK(s.precision == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(s.recall == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(s.f1 == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("prf handles degenerate prediction patterns") {
  const PrfScores none = prf({0, 0, 0}, {1, 1, 0});
  CHECK(none.precision == 0.0);
  CHECK(none.recall == 0.0);
  CHECK(none.f1 == 0.0);
  CHECK_THROWS_AS(prf({1, 0}, {1}), DataError);
  CHECK_THROWS_AS(prf({}, {}), DataError);
}

TEST_CASE("undersampling balances every imbalanced draw exactly") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(30, 120));
    TrainingSet data;
    const double pos_share = rng.uniform(0.15, 0.45);
    for (std::size_t i = 0; i < n; ++i) {
      FeatureVector x = {rng.uniform(), rng.uniform(), rng.uniform()};
      const int label = rng.bernoulli(pos_share) ? 1 : 0;
      data.instances.push_back({x, label});
    }
    std::size_t pos = 0;
    for (const auto& inst : data.instances) pos += inst.label == 1;
    if (pos < 5 || n - pos < 5) continue;  // keep folds drawable

    const TrainingSet balanced = iht_undersample(data, 5, 1000 + trial);
    std::size_t bpos = 0;
    for (const auto& inst : balanced.instances) bpos += inst.label == 1;
    CHECK(bpos == balanced.size() - bpos);
    CHECK(std::min(pos, n - pos) == bpos);

    // Every survivor is one of the original instances, minority untouched.
    std::size_t surviving_minority = 0;
    for (const auto& inst : balanced.instances) {
      surviving_minority += inst.label == (pos < n - pos ? 1 : 0);
    }
    CHECK(surviving_minority == std::min(pos, n - pos));
  }
}

TEST_CASE("undersampling keeps survivor order and is deterministic in the seed") {
  Rng rng(5);
  TrainingSet data = random_set(rng, 60, 3);
  for (std::size_t i = 0; i < data.instances.size(); ++i) {
    data.instances[i].label = i % 4 == 0 ? 1 : 0;  // 15 positive, 45 negative
    data.instances[i].features[0] = static_cast<double>(i);  // identity tag
  }
  const TrainingSet a = iht_undersample(data, 5, 99);
  const TrainingSet b = iht_undersample(data, 5, 99);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.instances[i].features[0] == b.instances[i].features[0]);
  }
  // input order preserved: the identity tags must be strictly increasing
  for (std::size_t i = 1; i < a.size(); ++i) {
    CHECK(a.instances[i].features[0] > a.instances[i - 1].features[0]);
  }
  // already-balanced input passes through untouched
  TrainingSet even;
  for (int i = 0; i < 20; ++i) even.instances.push_back({{rng.uniform()}, i % 2});
  const TrainingSet same = iht_undersample(even, 5, 1);
  CHECK(same.size() == even.size());
}

TEST_CASE("grouped cross-validation never leaks a group into its own fold") {
  Rng rng(11);
  TrainingSet data;
  for (int p = 0; p < 12; ++p) {
    for (int i = 0; i < 8; ++i) {
      data.instances.push_back({{rng.uniform(), rng.uniform()}, rng.bernoulli(0.5) ? 1 : 0});
      data.group_ids.push_back("p" + std::to_string(p));
    }
  }
  data.instances[0].label = 1;
  data.instances[1].label = 0;

  // A trainer that records its training groups and flags any test instance
  // whose group it saw during training.
  std::vector<std::set<std::string>> train_groups_per_fold;
  TrainerFn trainer = [&](const TrainingSet& train, std::uint64_t) -> PredictorFn {
    std::set<std::string> groups(train.group_ids.begin(), train.group_ids.end());
    train_groups_per_fold.push_back(groups);
    return [](const FeatureVector&) { return true; };
  };
  const ClassifierReport report = logo_cv(data, 4, trainer, 17);
  CHECK(report.folds.size() == 4);
  REQUIRE(train_groups_per_fold.size() == 4);

  // Reconstruct fold membership: each group must appear in exactly 3 of the 4
  // training sides (absent only from its own fold).
  for (int p = 0; p < 12; ++p) {
    const std::string who = "p" + std::to_string(p);
    int appearances = 0;
    for (const auto& groups : train_groups_per_fold) appearances += groups.count(who);
    CHECK(appearances == 3);
  }
}

TEST_CASE("group partition is deterministic, disjoint and near-even") {
  TrainingSet data;
  Rng rng(3);
  for (int p = 0; p < 13; ++p) {
    data.instances.push_back({{rng.uniform()}, 0});
    data.group_ids.push_back("u" + std::to_string(p));
  }
  const auto parts = partition_groups(data, 5, 21);
  const auto parts2 = partition_groups(data, 5, 21);
  REQUIRE(parts.size() == 5);
  std::set<std::string> seen;
  for (const auto& g : parts) {
    CHECK(g.size() >= 2);
    CHECK(g.size() <= 3);
    for (const auto& id : g) CHECK(seen.insert(id).second);
  }
  CHECK(seen.size() == 13);
  CHECK(parts == parts2);
}

TEST_CASE("biased random baseline hits its prevalence and respects its seed") {
  const PredictorFn a = biased_random_baseline(0.3, 5);
  const PredictorFn b = biased_random_baseline(0.3, 5);
  const PredictorFn c = biased_random_baseline(0.3, 6);
  const FeatureVector x = {0.5};
  int hits = 0;
  bool all_same_ab = true;
  bool any_diff_ac = false;
  for (int i = 0; i < 10000; ++i) {
    const bool ra = a(x);
    all_same_ab &= ra == b(x);
    any_diff_ac |= ra != c(x);
    hits += ra;
  }
  CHECK(all_same_ab);
  CHECK(any_diff_ac);
  CHECK(hits > 2800);
  CHECK(hits < 3200);
}

TEST_CASE("adaptive prediction with no personal data equals the population model") {
  Rng rng(13);
  for (int trial = 0; trial < 1000; ++trial) {
    AdaptiveModel m;
    m.p1.weights = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    m.p1.bias = rng.uniform(-2, 2);
    const FeatureVector x = {rng.uniform(), rng.uniform(), rng.uniform()};
    const auto [receptive, prob] = adaptive_predict(m, x);
    CHECK(prob == predict_proba(m.p1, x));
    CHECK(receptive == (prob > 0.50));
  }
}

TEST_CASE("adaptive probability is the equal-weight average once a personal model exists") {
  AdaptiveModel m;
  m.p1.weights = {2.0, -1.0};
  m.p1.bias = 0.3;
  m.p2_config.iterations = 200;
  for (int i = 0; i < 10; ++i) {
    const double v = i / 10.0;
    adaptive_ingest(m, {{{v, 1.0 - v}, i % 2}});
  }
  const FeatureVector x = {0.4, 0.6};
  const auto [receptive, prob] = adaptive_predict(m, x);
  REQUIRE(m.p2.has_value());
  const double expected = 0.5 * predict_proba(m.p1, x) + 0.5 * predict_proba(*m.p2, x);
  CHECK(prob == doctest::Approx(expected).epsilon(1e-15));
  CHECK(receptive == (prob > 0.50));
}

TEST_CASE("the receptive decision is strict at one half") {
  // P1 and P2 cancel to exactly 0.5 by symmetry: zero weights, zero bias give
  // probability 0.5 from both halves; strictly-greater means not receptive.
  AdaptiveModel m;
  m.p1.weights = {0.0};
  m.p1.bias = 0.0;
  const auto [receptive, prob] = adaptive_predict(m, {0.7});
  CHECK(prob == 0.5);
  CHECK_FALSE(receptive);
}

TEST_CASE("personal retraining is lazy and only fires with both classes present") {
  AdaptiveModel m;
  m.p1.weights = {1.0};
  m.p1.bias = 0.0;
  adaptive_ingest(m, {{{0.2}, 1}, {{0.4}, 1}});
  (void)adaptive_predict(m, {0.5});
  CHECK_FALSE(m.p2.has_value());  // single-class data: no personal model yet
  adaptive_ingest(m, {{{0.8}, 0}});
  CHECK(m.dirty);
  (void)adaptive_predict(m, {0.5});
  CHECK(m.p2.has_value());
  CHECK_FALSE(m.dirty);

  // Prediction without new data must not retrain: perturb the stored personal
  // model and check the perturbation survives another predict.
  m.p2->bias += 100.0;
  const auto [_, prob] = adaptive_predict(m, {0.5});
  CHECK(prob > 0.49);  // the +100 bias pushed P2's half to ~0.5
  CHECK(m.p2->bias > 99.0);
}

TEST_CASE("incremental ingestion reaches the same personal model as one batch") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<LabeledInstance> stream;
    const int n = static_cast<int>(rng.uniform_int(10, 50));
    for (int i = 0; i < n; ++i) {
      stream.push_back({{rng.uniform(), rng.uniform()}, rng.bernoulli(0.4) ? 1 : 0});
    }
    stream[0].label = 1;
    stream[1].label = 0;

    AdaptiveModel one;
    one.p1.weights = {0.5, -0.5};
    AdaptiveModel many = one;
    adaptive_ingest(one, stream);
    for (const auto& inst : stream) adaptive_ingest(many, {inst});
    const FeatureVector x = {rng.uniform(), rng.uniform()};
    const auto [ra, pa] = adaptive_predict(one, x);
    const auto [rb, pb] = adaptive_predict(many, x);
    CHECK(pa == pb);
    CHECK(ra == rb);
  }
}

TEST_CASE("model records round-trip bit-exactly through save and load") {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    LinearModel m;
    const std::size_t dims = static_cast<std::size_t>(rng.uniform_int(1, 20));
    m.weights.resize(dims);
    for (auto& w : m.weights) w = rng.uniform(-10, 10) * std::pow(10.0, rng.uniform(-8, 8));
    m.bias = rng.uniform(-5, 5);
    const std::string kind = trial % 2 == 0 ? "lr" : "svm";

    std::ostringstream out;
    save_model(m, kind, out);
    std::istringstream in(out.str());
    const LoadedModel back = load_model(in);
    CHECK(back.kind == kind);
    CHECK(back.model.bias == m.bias);
    REQUIRE(back.model.weights.size() == dims);
    for (std::size_t j = 0; j < dims; ++j) CHECK(back.model.weights[j] == m.weights[j]);
  }
}

TEST_CASE("model io rejects unknown kinds and malformed records") {
  LinearModel m;
  m.weights = {1.0};
  std::ostringstream out;
  CHECK_THROWS_AS(save_model(m, "forest", out), DataError);
  std::istringstream bad1("2,lr,0.0,1.0");
  CHECK_THROWS_AS(load_model(bad1), DataError);
  std::istringstream bad2("1,lr,not_a_number");
  CHECK_THROWS_AS(load_model(bad2), DataError);
  std::istringstream bad3("");
  CHECK_THROWS_AS(load_model(bad3), DataError);
}

TEST_CASE("prediction rejects dimension mismatches") {
  LinearModel m;
  m.weights = {1.0, 2.0};
  CHECK_THROWS_AS(predict_proba(m, {0.5}), DataError);
  CHECK_THROWS_AS((void)svm_receptive(m, {0.5, 0.5, 0.5}), DataError);
}
