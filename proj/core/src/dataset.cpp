#include "receptive/dataset.hpp"

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

[[noreturn]] void fail(int line_no, const std::string& what) {
  throw DataError("line " + std::to_string(line_no) + ": " + what);
}

long parse_long(const std::string& s, int line_no, const char* what) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(line_no, std::string("bad ") + what + " '" + s + "'");
  }
}

}  // namespace

std::string dataset_csv_header() {
  return "participant,day_type,time_of_day,battery_status,battery_level,lock_state,"
         "lock_change_time,wifi,activity,label";
}

std::vector<DatasetRow> read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("training table is empty");
  if (line != dataset_csv_header()) {
    throw DataError("line 1: unexpected training table header '" + line + "'");
  }
  std::vector<DatasetRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 10) {
      fail(line_no, "expected 10 fields, got " + std::to_string(fields.size()));
    }
    DatasetRow row;
    row.participant = fields[0];
    if (row.participant.empty()) fail(line_no, "empty participant id");
    try {
      row.context.day_type = day_type_from_string(fields[1]);
      row.context.time_of_day = time_of_day_from_string(fields[2]);
      row.context.battery_status = battery_status_from_string(fields[3]);
      row.context.battery_level = static_cast<int>(parse_long(fields[4], line_no, "battery_level"));
      row.context.lock_state = lock_state_from_string(fields[5]);
      row.context.lock_change_time = parse_long(fields[6], line_no, "lock_change_time");
      row.context.wifi = wifi_from_string(fields[7]);
      row.context.activity = activity_from_string(fields[8]);
      validate(row.context);
    } catch (const DataError& e) {
      fail(line_no, e.what());
    }
    const long label = parse_long(fields[9], line_no, "label");
    if (label != 0 && label != 1) fail(line_no, "label must be 0 or 1");
    row.label = static_cast<int>(label);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("training table has a header but no rows");
  return rows;
}

std::vector<DatasetRow> read_dataset_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open training table: " + path);
  return read_dataset_csv(in);
}

void write_dataset_csv(const std::vector<DatasetRow>& rows, std::ostream& out) {
  out << dataset_csv_header() << '\n';
  for (const auto& row : rows) {
    if (row.participant.find(',') != std::string::npos) {
      throw DataError("participant id may not contain ',': " + row.participant);
    }
    out << row.participant << ',' << to_string(row.context.day_type) << ','
        << to_string(row.context.time_of_day) << ',' << to_string(row.context.battery_status)
        << ',' << row.context.battery_level << ',' << to_string(row.context.lock_state) << ','
        << row.context.lock_change_time << ',' << to_string(row.context.wifi) << ','
        << to_string(row.context.activity) << ',' << row.label << '\n';
  }
}

void write_dataset_csv_file(const std::vector<DatasetRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open training table for writing: " + path);
  write_dataset_csv(rows, out);
}

TrainingSet to_training_set(const std::vector<DatasetRow>& rows) {
  TrainingSet data;
  data.instances.reserve(rows.size());
  data.group_ids.reserve(rows.size());
  for (const auto& row : rows) {
    data.instances.push_back({encode(row.context), row.label});
    data.group_ids.push_back(row.participant);
  }
  return data;
}

}  // namespace receptive
