#include "raman/manifest.hpp"

#include <ctime>
#include <fstream>
#include <stdexcept>

namespace raman {

using nlohmann::json;

std::string iso8601_utc_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const RunManifest& m, const std::string& path) {
  json doc;
  doc["tool"] = m.tool;
  doc["version"] = m.version;
  doc["created"] = m.created.empty() ? iso8601_utc_now() : m.created;
  doc["command"] = m.command;
  doc["resolved_config"] = m.resolved_config;
  doc["input_hashes"] = m.input_hashes;
  doc["outputs"] = m.outputs;
  doc["threads"] = m.threads;
  doc["tolerance"] = m.tolerance;
  std::ofstream f(path);
  if (!f)
    throw std::runtime_error("cannot open " + path + " for writing");
  f << doc.dump(2) << '\n';
  if (!f)
    throw std::runtime_error("write failed for " + path);
}

RunManifest read_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f)
    throw std::runtime_error("cannot open manifest " + path);
  json doc;
  try {
    f >> doc;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  RunManifest m;
  m.tool = doc.value("tool", "raman");
  m.version = doc.value("version", "");
  m.created = doc.value("created", "");
  m.command = doc.value("command", "");
  if (!doc.contains("resolved_config"))
    throw std::invalid_argument(path + ": resolved_config: missing");
  m.resolved_config = doc["resolved_config"];
  if (doc.contains("input_hashes"))
    m.input_hashes = doc["input_hashes"].get<std::map<std::string, std::string>>();
  if (doc.contains("outputs"))
    m.outputs = doc["outputs"].get<std::vector<std::string>>();
  m.threads = doc.value("threads", 1);
  m.tolerance = doc.value("tolerance", 1e-3);
  return m;
}

} // namespace raman
