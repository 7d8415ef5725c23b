#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace receptive {

// 64-bit FNV-1a over raw bytes; stable fingerprint for config files.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

// Provenance record written next to every command's outputs.
struct RunManifest {
  std::string command;
  std::string tool_version;
  std::string config_hash;  // fnv1a64 of the primary input bytes, hex
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> stage_seconds;  // ordered timings
  std::vector<std::string> outputs;                           // files this run wrote
};

std::string to_json(const RunManifest& manifest);

// Writes via a temp file in the same directory plus an atomic rename, so a
// crash never leaves a half-written manifest behind.
void write_manifest_file(const RunManifest& manifest, const std::string& path);

}  // namespace receptive
