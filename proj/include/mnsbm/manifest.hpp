#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

namespace mnsbm {

// Everything needed to rerun a command: resolved parameters, software
// version and per-phase wall-clock timings (seconds).
struct RunManifest {
  std::string command;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::string version;
  std::map<std::string, double> timings;

  nlohmann::ordered_json to_json() const;
  static RunManifest from_json(const nlohmann::ordered_json& j);
};

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace mnsbm
