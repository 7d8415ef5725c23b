#include "receptive/manifest.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "receptive/errors.hpp"

namespace receptive {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string to_json(const RunManifest& manifest) {
  nlohmann::ordered_json j;
  j["command"] = manifest.command;
  j["tool_version"] = manifest.tool_version;
  j["config_hash"] = manifest.config_hash;
  j["seed"] = manifest.seed;
  nlohmann::ordered_json stages = nlohmann::ordered_json::object();
  for (const auto& [name, seconds] : manifest.stage_seconds) stages[name] = seconds;
  j["stage_seconds"] = stages;
  j["outputs"] = manifest.outputs;
  return j.dump(2) + "\n";
}

void write_manifest_file(const RunManifest& manifest, const std::string& path) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw DataError("cannot open manifest for writing: " + tmp.string());
    out << to_json(manifest);
    if (!out) throw DataError("failed writing manifest: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw DataError("cannot move manifest into place: " + ec.message());
}

}  // namespace receptive
