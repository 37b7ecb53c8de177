#pragma once
#include "raman/experiments.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace raman {

// A fully resolved run description. Every physical quantity in the source
// document carries a unit tag ("7 nm", "8 mm", "30 deg"); plain numbers are
// accepted only for dimensionless fields. Parse errors throw
// std::invalid_argument with the dotted field path ("geometry.pump_waist: ...").
struct RunConfig {
  Medium medium;
  std::string medium_source; // file path or "<inline>"
  PumpSpec pump;
  GeometrySpec geom;
  QuadratureGrid grid;
  double tolerance = 1e-3;
  int refine_budget = 2;
  int threads = 1;
  std::string purity_kind = "total"; // total | energy | momentum

  bool has_sweep = false;
  SweepKind sweep_kind = SweepKind::Bandwidth;
  std::vector<double> sweep_axis; // SI / dimensionless

  bool has_ji = false;
  std::string ji_kind = "both"; // energy | momentum | both
  int ji_rows = 201;
  int ji_cols = 201;

  SweepSpec sweep_spec() const;
};

RunConfig load_run_config(const std::string& path);

// base_dir resolves relative medium paths; bundled configs are the fallback.
RunConfig run_config_from_json(const nlohmann::json& doc, const std::string& base_dir);

// Self-contained document (medium inlined, waists concrete, SI unit tags)
// that parses back to the same RunConfig. Embedded in run manifests.
nlohmann::json resolved_config_json(const RunConfig& cfg);

// Directory holding the configs shipped with the tool.
std::string bundled_config_dir();

} // namespace raman
