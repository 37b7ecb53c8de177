#pragma once
#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace raman {

inline constexpr const char* tool_version = "0.1.0";

// Written next to every output file. Re-running the recorded command from
// the embedded resolved config reproduces the outputs byte for byte; the
// timestamp is metadata and takes no part in that.
struct RunManifest {
  std::string tool = "raman";
  std::string version = tool_version;
  std::string created;  // ISO 8601 UTC
  std::string command;  // subcommand
  nlohmann::json resolved_config;
  std::map<std::string, std::string> input_hashes; // path -> sha256:<hex>
  std::vector<std::string> outputs;
  int threads = 1;
  double tolerance = 1e-3;
};

std::string iso8601_utc_now();

void write_manifest(const RunManifest& m, const std::string& path);
RunManifest read_manifest(const std::string& path);

} // namespace raman
