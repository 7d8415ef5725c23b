#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "receptive/metrics.hpp"

namespace receptive {

// The four per-message engagement metrics the reports compare.
enum class Metric { JitResponse, OverallResponse, ConversationEngagement, ResponseDelay };

std::string to_string(Metric metric);
Metric metric_from_string(std::string_view s);
const std::vector<Metric>& all_metrics();

// Per-message value: 0/1 for the rate metrics, seconds for the delay metric
// (absent when the prompt was never answered).
std::optional<double> metric_value(const MessageRecord& m, Metric metric);

// What a bootstrap resample draws: individual messages, or whole participants
// with their message clusters (respects within-participant correlation).
enum class ResampleMode { Messages, Participants };

// One treatment-vs-baseline line of a comparison table. Values are absent when
// a compared group is empty (the row is reported, marked undefined).
struct ComparisonRow {
  std::string metric;
  std::string comparison;  // e.g. "static - control"
  std::size_t n_baseline = 0;
  std::size_t n_treatment = 0;
  std::optional<double> baseline_value;
  std::optional<double> treatment_value;
  std::optional<double> mean_difference;
  std::optional<double> percent_change;  // 100 * difference / baseline
  std::optional<double> ci_low;          // percentile bootstrap, 95%
  std::optional<double> ci_high;
  std::optional<double> p_value;  // two-sided bootstrap inversion
  std::optional<double> p_adjusted;
};

// Difference rows for one metric: static - baseline and adaptive - baseline.
std::vector<ComparisonRow> compare_rates(const std::vector<MessageRecord>& records, Metric metric,
                                         ResampleMode mode, int resamples, std::uint64_t seed,
                                         ModelArm baseline = ModelArm::Control);

// All four metrics x two comparisons, with p values adjusted jointly.
std::vector<ComparisonRow> comparison_table(const std::vector<MessageRecord>& records,
                                            ResampleMode mode, int resamples, std::uint64_t seed);

// Benjamini-Hochberg step-up adjustment, returned in the input order.
std::vector<double> bh_adjust(const std::vector<double>& p_values);

// "+0.108 (+38.02%)" — difference plus percent change, signed.
std::string format_difference(double difference, double percent_change);

// Per-day metric value for one arm. n counts the messages the value is over
// (responded messages only for the delay metric).
struct DayPoint {
  int day = 0;
  std::size_t n = 0;
  std::optional<double> rate;
};

// For every attributed arm, the day-by-day series over days 1..max(day).
std::map<ModelArm, std::vector<DayPoint>> daily_series(const std::vector<MessageRecord>& records,
                                                       Metric metric);

// Weighted OLS slope of rate on day plus a permutation test that shuffles the
// day labels. Needs >= 3 days with data.
struct TrendResult {
  double slope = 0.0;
  double intercept = 0.0;
  double p_value = 1.0;
  int days = 0;  // points the fit used
};

TrendResult trend_slope(const std::vector<DayPoint>& series, std::uint64_t seed,
                        int permutations = 2000);

// CSV emission for the report files.
void write_comparison_csv(const std::vector<ComparisonRow>& rows, std::ostream& out);
void write_daily_series_csv(const std::map<ModelArm, std::vector<DayPoint>>& series,
                            std::ostream& out);

}  // namespace receptive
