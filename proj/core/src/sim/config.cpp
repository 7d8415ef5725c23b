#include "receptive/sim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "receptive/errors.hpp"

namespace receptive::sim {

void validate(const ExperimentConfig& config) {
  if (config.n_participants < 1) throw DataError("n_participants must be >= 1");
  if (config.study_days < 1) throw DataError("study_days must be >= 1");
  if (config.warm_up_days < 0) throw DataError("warm_up_days must be >= 0");
  if (config.warm_up_days >= config.study_days) {
    throw DataError("warm_up_days must be smaller than study_days");
  }
  if (config.replicates < 1) throw DataError("replicates must be >= 1");
  if (config.heterogeneity < 0.0) throw DataError("heterogeneity must be >= 0");
  if (config.habituation_per_day > 0.0) {
    throw DataError("habituation_per_day must be <= 0 (it models decline)");
  }
  if (config.dropout_hazard_per_day < 0.0 || config.dropout_hazard_per_day >= 1.0) {
    throw DataError("dropout_hazard_per_day must be in [0, 1)");
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("config must be a JSON object");

  static const std::set<std::string> known = {
      "n_participants",     "study_days",
      "warm_up_days",       "seed",
      "heterogeneity",      "replicates",
      "habituation_per_day", "exact_half_self_monitoring",
      "misspecified_truth", "dropout_hazard_per_day",
      "static_model",       "p1_model"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw DataError("unknown config key: " + key);
  }

  ExperimentConfig config;
  const auto get_int = [&j](const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) throw DataError(std::string(key) + " must be an integer");
    return j[key].get<int>();
  };
  const auto get_double = [&j](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw DataError(std::string(key) + " must be a number");
    return j[key].get<double>();
  };
  const auto get_bool = [&j](const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_boolean()) throw DataError(std::string(key) + " must be true or false");
    return j[key].get<bool>();
  };
  const auto get_string = [&j](const char* key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string()) throw DataError(std::string(key) + " must be a string");
    return j[key].get<std::string>();
  };

  config.n_participants = get_int("n_participants", config.n_participants);
  config.study_days = get_int("study_days", config.study_days);
  config.warm_up_days = get_int("warm_up_days", config.warm_up_days);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
      throw DataError("seed must be a nonnegative integer");
    }
    const auto s = j["seed"].get<std::int64_t>();
    if (s < 0) throw DataError("seed must be a nonnegative integer");
    config.seed = static_cast<std::uint64_t>(s);
  }
  config.heterogeneity = get_double("heterogeneity", config.heterogeneity);
  config.replicates = get_int("replicates", config.replicates);
  config.habituation_per_day = get_double("habituation_per_day", config.habituation_per_day);
  config.exact_half_self_monitoring =
      get_bool("exact_half_self_monitoring", config.exact_half_self_monitoring);
  config.misspecified_truth = get_bool("misspecified_truth", config.misspecified_truth);
  config.dropout_hazard_per_day =
      get_double("dropout_hazard_per_day", config.dropout_hazard_per_day);
  config.static_model = get_string("static_model", config.static_model);
  config.p1_model = get_string("p1_model", config.p1_model);

  validate(config);
  return config;
}

ExperimentConfig read_config_file(const std::string& path, std::string* raw_bytes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (raw_bytes != nullptr) *raw_bytes = buf.str();
  return parse_config(buf.str());
}

std::string to_json(const ExperimentConfig& config) {
  nlohmann::ordered_json j;
  j["n_participants"] = config.n_participants;
  j["study_days"] = config.study_days;
  j["warm_up_days"] = config.warm_up_days;
  j["seed"] = config.seed;
  j["heterogeneity"] = config.heterogeneity;
  j["replicates"] = config.replicates;
  j["habituation_per_day"] = config.habituation_per_day;
  j["exact_half_self_monitoring"] = config.exact_half_self_monitoring;
  j["misspecified_truth"] = config.misspecified_truth;
  j["dropout_hazard_per_day"] = config.dropout_hazard_per_day;
  j["static_model"] = config.static_model;
  j["p1_model"] = config.p1_model;
  return j.dump(2) + "\n";
}

}  // namespace receptive::sim
