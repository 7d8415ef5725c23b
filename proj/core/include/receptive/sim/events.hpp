#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "receptive/delivery.hpp"
#include "receptive/labeling.hpp"
#include "receptive/metrics.hpp"
#include "receptive/scheduler.hpp"

namespace receptive::sim {

// The four event kinds a study emits, in the order they happen per prompt.
struct TriggerEvent {
  std::string participant;
  int day = 0;
  TriggerKind kind = TriggerKind::GoalSetting;
  std::int64_t ts = 0;
};

struct DeliveryEvent {
  std::string participant;
  int day = 0;
  DeliveryRecord record;
};

struct OutcomeEvent {
  std::string participant;
  int day = 0;
  OutcomeRecord outcome;
};

struct LabelEvent {
  std::string participant;
  LabeledContext labeled;
};

// Streams events as JSON Lines with a fixed key order, so identical runs
// produce byte-identical logs.
class EventWriter {
 public:
  explicit EventWriter(std::ostream& out) : out_(out) {}

  void write(const TriggerEvent& e);
  void write(const DeliveryEvent& e);
  void write(const OutcomeEvent& e);
  void write(const LabelEvent& e);

 private:
  std::ostream& out_;
};

struct EventLog {
  std::vector<TriggerEvent> triggers;
  std::vector<DeliveryEvent> deliveries;
  std::vector<OutcomeEvent> outcomes;
  std::vector<LabelEvent> labels;

  std::size_t size() const {
    return triggers.size() + deliveries.size() + outcomes.size() + labels.size();
  }
};

// Parse errors carry "<name>:<line>: reason".
EventLog read_events(std::istream& in, const std::string& name);
EventLog read_events_file(const std::string& path);
// Reads every *.jsonl in the directory (sorted by filename) into one log.
EventLog read_events_dir(const std::string& dir);

// Joins each delivery with its outcome (same participant and delivery time)
// into the message records the reports run on. The arm charged is the
// attributed one. A delivery without an outcome is a data error.
std::vector<MessageRecord> pair_messages(const EventLog& log);

}  // namespace receptive::sim
