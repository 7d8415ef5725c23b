#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "receptive/delivery.hpp"

namespace receptive {

// One delivered prompt together with everything the participant did with it.
struct MessageRecord {
  std::string participant;
  int day = 0;                   // 1-based study day
  ModelArm arm = ModelArm::Control;  // arm the delivery is charged to
  std::int64_t delivery_ts = 0;
  std::optional<std::int64_t> first_response_ts;
  std::vector<std::int64_t> reply_ts;  // every reply, first response included
};

// Per-message engagement outcomes. A response that precedes its delivery is a
// data error.
bool jit_response(const MessageRecord& m, std::int64_t window = 600);
bool overall_response(const MessageRecord& m);
// At least two replies landing in (delivery_ts, delivery_ts + window].
bool conversation_engagement(const MessageRecord& m, std::int64_t window = 600);
// Seconds from delivery to first response; empty when the prompt was ignored.
std::optional<std::int64_t> response_delay(const MessageRecord& m);

// Rates over a set of messages. Rates are empty when there are no messages;
// the delay aggregates are empty when no message was answered.
struct MetricSummary {
  std::size_t messages = 0;
  std::size_t responded = 0;
  std::optional<double> jit_rate;
  std::optional<double> response_rate;
  std::optional<double> engagement_rate;
  std::optional<double> mean_delay;
  std::optional<double> median_delay;
};

MetricSummary summarize(const std::vector<MessageRecord>& messages, std::int64_t window = 600);

// One summary as a CSV row: period, model, n, jit_rate, response_rate,
// conversation_rate, avg_delay_s. Undefined values render as empty cells.
std::string summary_csv_header();
std::string to_csv_row(const std::string& period, ModelArm arm, const MetricSummary& s);

std::map<ModelArm, std::vector<MessageRecord>> split_by_arm(
    const std::vector<MessageRecord>& messages);
std::map<int, std::vector<MessageRecord>> split_by_day(const std::vector<MessageRecord>& messages);

// CSV round-trip for message tables. Replies are ';'-joined inside one cell.
std::string message_csv_header();
std::string to_csv_row(const MessageRecord& m);
void write_messages_csv(const std::vector<MessageRecord>& messages, std::ostream& out);
std::vector<MessageRecord> read_messages_csv(std::istream& in);
std::vector<MessageRecord> read_messages_csv_file(const std::string& path);

}  // namespace receptive
