#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "digest.hpp"
#include "io_util.hpp"
#include "version.hpp"

namespace skna {

// Provenance record written next to command outputs. The digest covers the
// canonicalized effective configuration (defaults materialized, keys sorted),
// so it changes exactly when a parameter changes — not when whitespace in a
// config file does. Deliberately excludes timestamps and hostnames.
struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::string output_dir;
  nlohmann::json config;  // effective configuration, object-valued

  std::string config_digest() const { return sha256_hex(config.dump()); }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["tool_version"] = kVersion;
    j["inputs"] = inputs;
    j["output_dir"] = output_dir;
    j["config"] = config;
    j["config_digest"] = config_digest();
    return j;
  }

  void write(const std::string& path) const { write_file_atomic(path, to_json().dump(2) + "\n"); }
};

inline RunManifest load_manifest(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest: " + std::string(e.what()));
  }
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.inputs = j.at("inputs").get<std::vector<std::string>>();
    m.output_dir = j.at("output_dir").get<std::string>();
    m.config = j.at("config");
    if (j.at("config_digest").get<std::string>() != m.config_digest()) {
      throw FormatError("manifest: digest does not match config");
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest: " + std::string(e.what()));
  }
  return m;
}

}  // namespace skna
