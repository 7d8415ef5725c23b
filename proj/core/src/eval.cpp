#include "receptive/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "receptive/errors.hpp"
#include "receptive/rng.hpp"

namespace receptive {

namespace {

// Mean of the defined values among `values` at the given indices.
std::optional<double> mean_at(const std::vector<std::optional<double>>& values,
                              const std::vector<std::size_t>& indices) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i : indices) {
    if (values[i]) {
      sum += *values[i];
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::optional<double> mean_all(const std::vector<std::optional<double>>& values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  return mean_at(values, idx);
}

// Type-7 (linear interpolation) quantile of a sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw InternalError("quantile of empty sample");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

struct GroupValues {
  std::vector<std::optional<double>> values;           // per message
  std::vector<std::string> participants;               // parallel to values
};

// Bootstrap distribution of (treatment mean - baseline mean).
std::vector<double> bootstrap_diffs(const GroupValues& base, const GroupValues& treat,
                                    ResampleMode mode, int resamples, std::uint64_t seed) {
  std::vector<double> diffs;
  diffs.reserve(static_cast<std::size_t>(resamples));

  if (mode == ResampleMode::Messages) {
    for (int b = 0; b < resamples; ++b) {
      Rng rng(Rng::derive(seed, {static_cast<std::uint64_t>(b), 0xb001u}));
      const auto draw = [&rng](std::size_t n) {
        std::vector<std::size_t> idx(n);
        for (auto& i : idx) {
          i = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
        }
        return idx;
      };
      const auto b_mean = mean_at(base.values, draw(base.values.size()));
      const auto t_mean = mean_at(treat.values, draw(treat.values.size()));
      if (b_mean && t_mean) diffs.push_back(*t_mean - *b_mean);
    }
    return diffs;
  }

  // Participant clusters: resample participants, keeping each one's messages
  // in both groups together.
  std::vector<std::string> participants;
  for (const auto& p : base.participants) participants.push_back(p);
  for (const auto& p : treat.participants) participants.push_back(p);
  std::sort(participants.begin(), participants.end());
  participants.erase(std::unique(participants.begin(), participants.end()), participants.end());

  std::map<std::string, std::vector<std::size_t>> base_of;
  std::map<std::string, std::vector<std::size_t>> treat_of;
  for (std::size_t i = 0; i < base.participants.size(); ++i) {
    base_of[base.participants[i]].push_back(i);
  }
  for (std::size_t i = 0; i < treat.participants.size(); ++i) {
    treat_of[treat.participants[i]].push_back(i);
  }

  const std::size_t n_clusters = participants.size();
  for (int b = 0; b < resamples; ++b) {
    Rng rng(Rng::derive(seed, {static_cast<std::uint64_t>(b), 0xb002u}));
    std::vector<std::size_t> base_idx;
    std::vector<std::size_t> treat_idx;
    for (std::size_t k = 0; k < n_clusters; ++k) {
      const auto& who = participants[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(n_clusters) - 1))];
      if (const auto it = base_of.find(who); it != base_of.end()) {
        base_idx.insert(base_idx.end(), it->second.begin(), it->second.end());
      }
      if (const auto it = treat_of.find(who); it != treat_of.end()) {
        treat_idx.insert(treat_idx.end(), it->second.begin(), it->second.end());
      }
    }
    if (base_idx.empty() || treat_idx.empty()) continue;
    const auto b_mean = mean_at(base.values, base_idx);
    const auto t_mean = mean_at(treat.values, treat_idx);
    if (b_mean && t_mean) diffs.push_back(*t_mean - *b_mean);
  }
  return diffs;
}

ComparisonRow compare_pair(const std::vector<MessageRecord>& records, Metric metric,
                           ModelArm baseline, ModelArm treatment, ResampleMode mode, int resamples,
                           std::uint64_t seed) {
  ComparisonRow row;
  row.metric = to_string(metric);
  row.comparison = to_string(treatment) + " - " + to_string(baseline);

  GroupValues base;
  GroupValues treat;
  if (mode == ResampleMode::Participants) {
    // Keep only participants observed in both arms so every cluster resample
    // contributes to both sides of the difference.
    std::map<std::string, std::pair<bool, bool>> seen;
    for (const auto& m : records) {
      if (m.arm == baseline) seen[m.participant].first = true;
      if (m.arm == treatment) seen[m.participant].second = true;
    }
    for (const auto& m : records) {
      const auto it = seen.find(m.participant);
      if (it == seen.end() || !it->second.first || !it->second.second) continue;
      if (m.arm == baseline) {
        base.values.push_back(metric_value(m, metric));
        base.participants.push_back(m.participant);
      } else if (m.arm == treatment) {
        treat.values.push_back(metric_value(m, metric));
        treat.participants.push_back(m.participant);
      }
    }
  } else {
    for (const auto& m : records) {
      if (m.arm == baseline) {
        base.values.push_back(metric_value(m, metric));
        base.participants.push_back(m.participant);
      } else if (m.arm == treatment) {
        treat.values.push_back(metric_value(m, metric));
        treat.participants.push_back(m.participant);
      }
    }
  }

  row.n_baseline = base.values.size();
  row.n_treatment = treat.values.size();
  row.baseline_value = mean_all(base.values);
  row.treatment_value = mean_all(treat.values);
  if (!row.baseline_value || !row.treatment_value) return row;  // undefined row

  row.mean_difference = *row.treatment_value - *row.baseline_value;
  if (*row.baseline_value != 0.0) {
    row.percent_change = 100.0 * *row.mean_difference / *row.baseline_value;
  }

  std::vector<double> diffs = bootstrap_diffs(base, treat, mode, resamples, seed);
  if (diffs.empty()) return row;

  std::size_t le = 0;
  std::size_t ge = 0;
  for (double d : diffs) {
    if (d <= 0.0) ++le;
    if (d >= 0.0) ++ge;
  }
  const double b1 = static_cast<double>(diffs.size()) + 1.0;
  row.p_value = std::min(
      1.0, 2.0 * std::min((static_cast<double>(le) + 1.0) / b1, (static_cast<double>(ge) + 1.0) / b1));
  std::sort(diffs.begin(), diffs.end());
  row.ci_low = quantile_sorted(diffs, 0.025);
  row.ci_high = quantile_sorted(diffs, 0.975);
  return row;
}

void csv_cell(std::ostream& out, const std::optional<double>& v) {
  if (v) out << *v;
}

}  // namespace

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::JitResponse: return "jit_response";
    case Metric::OverallResponse: return "overall_response";
    case Metric::ConversationEngagement: return "conversation_engagement";
    case Metric::ResponseDelay: return "response_delay";
  }
  throw InternalError("unhandled metric");
}

Metric metric_from_string(std::string_view s) {
  if (s == "jit_response") return Metric::JitResponse;
  if (s == "overall_response") return Metric::OverallResponse;
  if (s == "conversation_engagement") return Metric::ConversationEngagement;
  if (s == "response_delay") return Metric::ResponseDelay;
  throw DataError("unknown metric: " + std::string(s));
}

const std::vector<Metric>& all_metrics() {
  static const std::vector<Metric> metrics = {Metric::JitResponse, Metric::OverallResponse,
                                              Metric::ConversationEngagement,
                                              Metric::ResponseDelay};
  return metrics;
}

std::optional<double> metric_value(const MessageRecord& m, Metric metric) {
  switch (metric) {
    case Metric::JitResponse: return jit_response(m) ? 1.0 : 0.0;
    case Metric::OverallResponse: return overall_response(m) ? 1.0 : 0.0;
    case Metric::ConversationEngagement: return conversation_engagement(m) ? 1.0 : 0.0;
    case Metric::ResponseDelay: {
      const auto d = response_delay(m);
      if (!d) return std::nullopt;
      return static_cast<double>(*d);
    }
  }
  throw InternalError("unhandled metric");
}

std::vector<ComparisonRow> compare_rates(const std::vector<MessageRecord>& records, Metric metric,
                                         ResampleMode mode, int resamples, std::uint64_t seed,
                                         ModelArm baseline) {
  if (resamples < 1) throw DataError("resamples must be >= 1");
  std::vector<ComparisonRow> rows;
  std::uint64_t k = 0;
  for (ModelArm treatment : {ModelArm::Static, ModelArm::Adaptive}) {
    if (treatment == baseline) continue;
    rows.push_back(compare_pair(records, metric, baseline, treatment, mode, resamples,
                                Rng::derive(seed, {k++, 0xc0a7u})));
  }
  return rows;
}

std::vector<ComparisonRow> comparison_table(const std::vector<MessageRecord>& records,
                                            ResampleMode mode, int resamples, std::uint64_t seed) {
  std::vector<ComparisonRow> rows;
  std::uint64_t k = 0;
  for (Metric metric : all_metrics()) {
    auto part = compare_rates(records, metric, mode, resamples, Rng::derive(seed, {k++, 0x7ab1u}));
    rows.insert(rows.end(), part.begin(), part.end());
  }
  std::vector<double> ps;
  for (const auto& row : rows) {
    if (row.p_value) ps.push_back(*row.p_value);
  }
  const std::vector<double> adj = bh_adjust(ps);
  std::size_t j = 0;
  for (auto& row : rows) {
    if (row.p_value) row.p_adjusted = adj[j++];
  }
  return rows;
}

std::vector<double> bh_adjust(const std::vector<double>& p_values) {
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DataError("p value out of [0,1]: " + std::to_string(p));
    }
  }
  const std::size_t m = p_values.size();
  if (m == 0) return {};
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  // raw(j) = min(1, p(j) * m / j) in sorted order, then a suffix minimum
  // realizes the step-up rule adj(i) = min_{j >= i} raw(j).
  std::vector<double> adj_sorted(m);
  for (std::size_t j = 0; j < m; ++j) {
    adj_sorted[j] = std::min(
        1.0, p_values[order[j]] * static_cast<double>(m) / static_cast<double>(j + 1));
  }
  for (std::size_t j = m - 1; j-- > 0;) {
    adj_sorted[j] = std::min(adj_sorted[j], adj_sorted[j + 1]);
  }
  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) out[order[j]] = adj_sorted[j];
  return out;
}

std::string format_difference(double difference, double percent_change) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%+.3f (%+.2f%%)", difference, percent_change);
  return buf;
}

std::map<ModelArm, std::vector<DayPoint>> daily_series(const std::vector<MessageRecord>& records,
                                                       Metric metric) {
  if (records.empty()) throw DataError("no messages to build a daily series from");
  int max_day = 0;
  for (const auto& m : records) max_day = std::max(max_day, m.day);

  std::map<ModelArm, std::vector<DayPoint>> series;
  for (ModelArm arm : {ModelArm::Control, ModelArm::Static, ModelArm::Adaptive}) {
    std::vector<DayPoint> points;
    points.reserve(static_cast<std::size_t>(max_day));
    for (int day = 1; day <= max_day; ++day) {
      DayPoint pt;
      pt.day = day;
      double sum = 0.0;
      for (const auto& m : records) {
        if (m.arm != arm || m.day != day) continue;
        if (const auto v = metric_value(m, metric)) {
          sum += *v;
          ++pt.n;
        }
      }
      if (pt.n > 0) pt.rate = sum / static_cast<double>(pt.n);
      points.push_back(pt);
    }
    series[arm] = std::move(points);
  }
  return series;
}

TrendResult trend_slope(const std::vector<DayPoint>& series, std::uint64_t seed, int permutations) {
  if (permutations < 1) throw DataError("permutations must be >= 1");
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> w;
  for (const auto& pt : series) {
    if (pt.n == 0 || !pt.rate) continue;
    x.push_back(static_cast<double>(pt.day));
    y.push_back(*pt.rate);
    w.push_back(static_cast<double>(pt.n));
  }
  if (x.size() < 3) {
    throw DataError("trend needs at least 3 days with data, got " + std::to_string(x.size()));
  }

  const auto wols_slope = [&x, &w](const std::vector<double>& yy) {
    double sw = 0.0;
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sw += w[i];
      sx += w[i] * x[i];
      sy += w[i] * yy[i];
    }
    const double xbar = sx / sw;
    const double ybar = sy / sw;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      num += w[i] * (x[i] - xbar) * (yy[i] - ybar);
      den += w[i] * (x[i] - xbar) * (x[i] - xbar);
    }
    return std::pair<double, double>{num / den, ybar - (num / den) * xbar};
  };

  TrendResult result;
  result.days = static_cast<int>(x.size());
  const auto [slope, intercept] = wols_slope(y);
  result.slope = slope;
  result.intercept = intercept;

  // Permutation test: shuffle which day each (rate, n) pair sits on. The pair
  // travels together, so the weights follow their rates.
  Rng rng(Rng::derive(seed, {0x7e57u}));
  std::size_t at_least = 0;
  std::vector<std::size_t> perm(x.size());
  std::iota(perm.begin(), perm.end(), 0);
  for (int p = 0; p < permutations; ++p) {
    for (std::size_t i = perm.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
      std::swap(perm[i], perm[j]);
    }
    std::vector<double> yp(x.size());
    std::vector<double> wp(x.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      yp[i] = y[perm[i]];
      wp[i] = w[perm[i]];
    }
    // Recompute with permuted pairs: reuse the closure by swapping w in place.
    std::swap(w, wp);
    const double s = wols_slope(yp).first;
    std::swap(w, wp);
    if (std::abs(s) >= std::abs(result.slope)) ++at_least;
  }
  result.p_value =
      (static_cast<double>(at_least) + 1.0) / (static_cast<double>(permutations) + 1.0);
  return result;
}

void write_comparison_csv(const std::vector<ComparisonRow>& rows, std::ostream& out) {
  out << "metric,comparison,n_baseline,n_treatment,baseline,treatment,difference,"
         "percent_change,ci_low,ci_high,p_value,p_adjusted,formatted\n";
  for (const auto& row : rows) {
    out << row.metric << ',' << row.comparison << ',' << row.n_baseline << ',' << row.n_treatment
        << ',';
    csv_cell(out, row.baseline_value);
    out << ',';
    csv_cell(out, row.treatment_value);
    out << ',';
    csv_cell(out, row.mean_difference);
    out << ',';
    csv_cell(out, row.percent_change);
    out << ',';
    csv_cell(out, row.ci_low);
    out << ',';
    csv_cell(out, row.ci_high);
    out << ',';
    csv_cell(out, row.p_value);
    out << ',';
    csv_cell(out, row.p_adjusted);
    out << ',';
    if (row.mean_difference && row.percent_change) {
      out << '"' << format_difference(*row.mean_difference, *row.percent_change) << '"';
    }
    out << '\n';
  }
}

void write_daily_series_csv(const std::map<ModelArm, std::vector<DayPoint>>& series,
                            std::ostream& out) {
  out << "day,model,n,rate\n";
  int max_day = 0;
  for (const auto& [arm, points] : series) {
    for (const auto& pt : points) max_day = std::max(max_day, pt.day);
  }
  for (int day = 1; day <= max_day; ++day) {
    for (const auto& [arm, points] : series) {
      const auto it = std::find_if(points.begin(), points.end(),
                                   [day](const DayPoint& pt) { return pt.day == day; });
      if (it == points.end()) continue;
      out << day << ',' << to_string(arm) << ',' << it->n << ',';
      csv_cell(out, it->rate);
      out << '\n';
    }
  }
}

}  // namespace receptive
