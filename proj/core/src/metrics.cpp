#include "receptive/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "receptive/errors.hpp"

namespace receptive {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::int64_t parse_i64(const std::string& s, int line_no, const char* what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
  }
}

}  // namespace

namespace {

void require_ordered(const MessageRecord& m) {
  if (m.first_response_ts.has_value() && *m.first_response_ts < m.delivery_ts) {
    throw DataError("response at " + std::to_string(*m.first_response_ts) +
                    " precedes delivery at " + std::to_string(m.delivery_ts));
  }
}

}  // namespace

bool jit_response(const MessageRecord& m, std::int64_t window) {
  require_ordered(m);
  return m.first_response_ts.has_value() && *m.first_response_ts - m.delivery_ts <= window;
}

bool overall_response(const MessageRecord& m) { return m.first_response_ts.has_value(); }

bool conversation_engagement(const MessageRecord& m, std::int64_t window) {
  int in_window = 0;
  for (std::int64_t ts : m.reply_ts) {
    if (ts > m.delivery_ts && ts <= m.delivery_ts + window) ++in_window;
  }
  return in_window >= 2;
}

std::optional<std::int64_t> response_delay(const MessageRecord& m) {
  require_ordered(m);
  if (!m.first_response_ts.has_value()) return std::nullopt;
  return *m.first_response_ts - m.delivery_ts;
}

MetricSummary summarize(const std::vector<MessageRecord>& messages, std::int64_t window) {
  MetricSummary s;
  s.messages = messages.size();
  if (messages.empty()) return s;

  double jit = 0.0;
  double any = 0.0;
  double conv = 0.0;
  std::vector<double> delays;
  for (const auto& m : messages) {
    jit += jit_response(m, window);
    any += overall_response(m);
    conv += conversation_engagement(m, window);
    if (const auto d = response_delay(m)) delays.push_back(static_cast<double>(*d));
  }
  const double n = static_cast<double>(messages.size());
  s.responded = delays.size();
  s.jit_rate = jit / n;
  s.response_rate = any / n;
  s.engagement_rate = conv / n;
  if (!delays.empty()) {
    double total = 0.0;
    for (double d : delays) total += d;
    s.mean_delay = total / static_cast<double>(delays.size());
    std::sort(delays.begin(), delays.end());
    const std::size_t mid = delays.size() / 2;
    s.median_delay = delays.size() % 2 == 1 ? delays[mid] : 0.5 * (delays[mid - 1] + delays[mid]);
  }
  return s;
}

std::map<ModelArm, std::vector<MessageRecord>> split_by_arm(
    const std::vector<MessageRecord>& messages) {
  std::map<ModelArm, std::vector<MessageRecord>> out;
  for (const auto& m : messages) out[m.arm].push_back(m);
  return out;
}

std::map<int, std::vector<MessageRecord>> split_by_day(const std::vector<MessageRecord>& messages) {
  std::map<int, std::vector<MessageRecord>> out;
  for (const auto& m : messages) out[m.day].push_back(m);
  return out;
}

std::string summary_csv_header() {
  return "period,model,n,jit_rate,response_rate,conversation_rate,avg_delay_s";
}

std::string to_csv_row(const std::string& period, ModelArm arm, const MetricSummary& s) {
  std::ostringstream row;
  row << period << ',' << to_string(arm) << ',' << s.messages << ',';
  const auto cell = [&row](const std::optional<double>& v) {
    if (v) row << *v;
  };
  cell(s.jit_rate);
  row << ',';
  cell(s.response_rate);
  row << ',';
  cell(s.engagement_rate);
  row << ',';
  cell(s.mean_delay);
  return row.str();
}

std::string message_csv_header() {
  return "participant,day,model,delivery_ts,first_response_ts,replies";
}

std::string to_csv_row(const MessageRecord& m) {
  if (m.participant.find(',') != std::string::npos ||
      m.participant.find(';') != std::string::npos) {
    throw DataError("participant id may not contain ',' or ';': " + m.participant);
  }
  std::ostringstream row;
  row << m.participant << ',' << m.day << ',' << to_string(m.arm) << ',' << m.delivery_ts << ',';
  if (m.first_response_ts) row << *m.first_response_ts;
  row << ',';
  for (std::size_t i = 0; i < m.reply_ts.size(); ++i) {
    if (i > 0) row << ';';
    row << m.reply_ts[i];
  }
  return row.str();
}

void write_messages_csv(const std::vector<MessageRecord>& messages, std::ostream& out) {
  out << message_csv_header() << '\n';
  for (const auto& m : messages) out << to_csv_row(m) << '\n';
}

std::vector<MessageRecord> read_messages_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("message table is empty");
  if (line != message_csv_header()) {
    throw DataError("line 1: unexpected message table header '" + line + "'");
  }
  std::vector<MessageRecord> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 6) {
      throw DataError("line " + std::to_string(line_no) + ": expected 6 fields, got " +
                      std::to_string(fields.size()));
    }
    MessageRecord m;
    m.participant = fields[0];
    if (m.participant.empty()) {
      throw DataError("line " + std::to_string(line_no) + ": empty participant id");
    }
    m.day = static_cast<int>(parse_i64(fields[1], line_no, "day"));
    if (m.day < 1) throw DataError("line " + std::to_string(line_no) + ": day must be >= 1");
    m.arm = arm_from_string(fields[2]);
    m.delivery_ts = parse_i64(fields[3], line_no, "delivery_ts");
    if (!fields[4].empty()) m.first_response_ts = parse_i64(fields[4], line_no, "first_response_ts");
    if (!fields[5].empty()) {
      for (const auto& part : split(fields[5], ';')) {
        m.reply_ts.push_back(parse_i64(part, line_no, "reply ts"));
      }
    }
    if (m.first_response_ts && *m.first_response_ts < m.delivery_ts) {
      throw DataError("line " + std::to_string(line_no) + ": response precedes delivery");
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<MessageRecord> read_messages_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open message table: " + path);
  return read_messages_csv(in);
}

}  // namespace receptive
