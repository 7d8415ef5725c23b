#include "receptive/sim/events.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "receptive/errors.hpp"

namespace receptive::sim {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json context_json(const ContextSnapshot& c) {
  ordered_json j;
  j["day_type"] = std::string(to_string(c.day_type));
  j["time_of_day"] = std::string(to_string(c.time_of_day));
  j["battery_status"] = std::string(to_string(c.battery_status));
  j["battery_level"] = c.battery_level;
  j["lock_state"] = std::string(to_string(c.lock_state));
  j["lock_change_time"] = c.lock_change_time;
  j["wifi"] = std::string(to_string(c.wifi));
  j["activity"] = std::string(to_string(c.activity));
  return j;
}

ContextSnapshot context_from_json(const json& j) {
  if (!j.is_object()) throw DataError("context must be an object");
  ContextSnapshot c;
  c.day_type = day_type_from_string(j.at("day_type").get<std::string>());
  c.time_of_day = time_of_day_from_string(j.at("time_of_day").get<std::string>());
  c.battery_status = battery_status_from_string(j.at("battery_status").get<std::string>());
  c.battery_level = j.at("battery_level").get<int>();
  c.lock_state = lock_state_from_string(j.at("lock_state").get<std::string>());
  c.lock_change_time = j.at("lock_change_time").get<std::int64_t>();
  c.wifi = wifi_from_string(j.at("wifi").get<std::string>());
  c.activity = activity_from_string(j.at("activity").get<std::string>());
  validate(c);
  return c;
}

}  // namespace

void EventWriter::write(const TriggerEvent& e) {
  ordered_json j;
  j["event"] = "trigger";
  j["participant"] = e.participant;
  j["day"] = e.day;
  j["kind"] = to_string(e.kind);
  j["ts"] = e.ts;
  out_ << j.dump() << '\n';
}

void EventWriter::write(const DeliveryEvent& e) {
  ordered_json j;
  j["event"] = "delivery";
  j["participant"] = e.participant;
  j["day"] = e.day;
  j["trigger_ts"] = e.record.trigger_ts;
  j["model_selected"] = to_string(e.record.model_selected);
  j["model_attributed"] = to_string(e.record.model_attributed);
  j["delivery_ts"] = e.record.delivery_ts;
  j["attempts"] = e.record.attempts;
  j["fallback"] = e.record.fallback;
  j["context"] = context_json(e.record.context);
  out_ << j.dump() << '\n';
}

void EventWriter::write(const OutcomeEvent& e) {
  ordered_json j;
  j["event"] = "outcome";
  j["participant"] = e.participant;
  j["day"] = e.day;
  j["delivery_ts"] = e.outcome.delivery_ts;
  if (e.outcome.first_response_ts) {
    j["first_response_ts"] = *e.outcome.first_response_ts;
  } else {
    j["first_response_ts"] = nullptr;
  }
  j["reply_ts"] = e.outcome.reply_ts;
  if (e.outcome.context_at_response) {
    j["context_at_response"] = context_json(*e.outcome.context_at_response);
  } else {
    j["context_at_response"] = nullptr;
  }
  out_ << j.dump() << '\n';
}

void EventWriter::write(const LabelEvent& e) {
  ordered_json j;
  j["event"] = "label";
  j["participant"] = e.participant;
  j["ts"] = e.labeled.ts;
  j["label"] = e.labeled.label;
  j["context"] = context_json(e.labeled.context);
  out_ << j.dump() << '\n';
}

EventLog read_events(std::istream& in, const std::string& name) {
  EventLog log;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = name + ":" + std::to_string(line_no) + ": ";
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(where + "bad JSON: " + e.what());
    }
    try {
      const auto kind = j.at("event").get<std::string>();
      if (kind == "trigger") {
        TriggerEvent e;
        e.participant = j.at("participant").get<std::string>();
        e.day = j.at("day").get<int>();
        e.kind = trigger_kind_from_string(j.at("kind").get<std::string>());
        e.ts = j.at("ts").get<std::int64_t>();
        log.triggers.push_back(std::move(e));
      } else if (kind == "delivery") {
        DeliveryEvent e;
        e.participant = j.at("participant").get<std::string>();
        e.day = j.at("day").get<int>();
        e.record.trigger_ts = j.at("trigger_ts").get<std::int64_t>();
        e.record.model_selected = arm_from_string(j.at("model_selected").get<std::string>());
        e.record.model_attributed = arm_from_string(j.at("model_attributed").get<std::string>());
        e.record.delivery_ts = j.at("delivery_ts").get<std::int64_t>();
        e.record.attempts = j.at("attempts").get<int>();
        e.record.fallback = j.at("fallback").get<bool>();
        e.record.context = context_from_json(j.at("context"));
        log.deliveries.push_back(std::move(e));
      } else if (kind == "outcome") {
        OutcomeEvent e;
        e.participant = j.at("participant").get<std::string>();
        e.day = j.at("day").get<int>();
        e.outcome.delivery_ts = j.at("delivery_ts").get<std::int64_t>();
        if (!j.at("first_response_ts").is_null()) {
          e.outcome.first_response_ts = j.at("first_response_ts").get<std::int64_t>();
        }
        e.outcome.reply_ts = j.at("reply_ts").get<std::vector<std::int64_t>>();
        if (!j.at("context_at_response").is_null()) {
          e.outcome.context_at_response = context_from_json(j.at("context_at_response"));
        }
        validate(e.outcome);
        log.outcomes.push_back(std::move(e));
      } else if (kind == "label") {
        LabelEvent e;
        e.participant = j.at("participant").get<std::string>();
        e.labeled.ts = j.at("ts").get<std::int64_t>();
        e.labeled.label = j.at("label").get<int>();
        if (e.labeled.label != 0 && e.labeled.label != 1) {
          throw DataError("label must be 0 or 1");
        }
        e.labeled.context = context_from_json(j.at("context"));
        log.labels.push_back(std::move(e));
      } else {
        throw DataError("unknown event kind: " + kind);
      }
    } catch (const json::exception& e) {
      throw DataError(where + e.what());
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
  }
  return log;
}

EventLog read_events_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open event log: " + path);
  return read_events(in, std::filesystem::path(path).filename().string());
}

EventLog read_events_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) throw DataError("no event logs (*.jsonl) in " + dir);
  std::sort(files.begin(), files.end());

  EventLog merged;
  for (const auto& path : files) {
    EventLog part = read_events_file(path.string());
    std::move(part.triggers.begin(), part.triggers.end(), std::back_inserter(merged.triggers));
    std::move(part.deliveries.begin(), part.deliveries.end(),
              std::back_inserter(merged.deliveries));
    std::move(part.outcomes.begin(), part.outcomes.end(), std::back_inserter(merged.outcomes));
    std::move(part.labels.begin(), part.labels.end(), std::back_inserter(merged.labels));
  }
  return merged;
}

std::vector<MessageRecord> pair_messages(const EventLog& log) {
  if (log.deliveries.size() != log.outcomes.size()) {
    throw DataError("event log has " + std::to_string(log.deliveries.size()) + " deliveries but " +
                    std::to_string(log.outcomes.size()) + " outcomes");
  }
  std::vector<MessageRecord> messages;
  messages.reserve(log.deliveries.size());
  for (std::size_t i = 0; i < log.deliveries.size(); ++i) {
    const DeliveryEvent& d = log.deliveries[i];
    const OutcomeEvent& o = log.outcomes[i];
    if (d.participant != o.participant || d.record.delivery_ts != o.outcome.delivery_ts) {
      throw DataError("delivery/outcome mismatch at index " + std::to_string(i) + " (" +
                      d.participant + " vs " + o.participant + ")");
    }
    MessageRecord m;
    m.participant = d.participant;
    m.day = d.day;
    m.arm = d.record.model_attributed;
    m.delivery_ts = d.record.delivery_ts;
    m.first_response_ts = o.outcome.first_response_ts;
    m.reply_ts = o.outcome.reply_ts;
    messages.push_back(std::move(m));
  }
  return messages;
}

}  // namespace receptive::sim
