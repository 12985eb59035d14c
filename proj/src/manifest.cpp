#include "mnsbm/manifest.hpp"

#include <fstream>

#include "mnsbm/errors.hpp"

namespace mnsbm {

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["version"] = version;
  j["parameters"] = parameters;
  j["timings"] = timings;
  return j;
}

RunManifest RunManifest::from_json(const nlohmann::ordered_json& j) {
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.version = j.value("version", "");
  m.parameters = j.value("parameters", nlohmann::ordered_json::object());
  if (j.contains("timings")) m.timings = j.at("timings").get<std::map<std::string, double>>();
  return m;
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << manifest.to_json().dump(2) << '\n';
  if (!out) throw IoError("error writing manifest " + path.string());
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  try {
    return RunManifest::from_json(nlohmann::ordered_json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError("malformed manifest " + path.string() + ": " + e.what());
  }
}

}  // namespace mnsbm
