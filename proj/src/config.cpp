#include "raman/config.hpp"
#include "raman/constants.hpp"
#include "raman/units.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <stdexcept>

#ifndef RAMAN_CONFIG_DIR
#define RAMAN_CONFIG_DIR "configs"
#endif

namespace raman {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using units::Kind;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw std::invalid_argument(path + ": " + msg);
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string tag(double v, const char* unit) {
  return fmt_double(v) + std::string(" ") + unit;
}

double quantity(const json& v, const std::string& path, Kind k) {
  if (v.is_number())
    fail(path, "needs a unit tag, e.g. \"7 nm\"; bare numbers are reserved for "
               "dimensionless fields");
  if (!v.is_string())
    fail(path, "expected a quantity string with a unit tag");
  try {
    return units::to_si(v.get<std::string>(), k);
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

double positive_quantity(const json& v, const std::string& path, Kind k) {
  double x = quantity(v, path, k);
  if (!(x > 0.0))
    fail(path, "must be positive");
  return x;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number())
    fail(path, "expected a plain (dimensionless) number");
  return v.get<double>();
}

int integer(const json& v, const std::string& path, int min_value) {
  if (!v.is_number_integer())
    fail(path, "expected an integer");
  int x = v.get<int>();
  if (x < min_value)
    fail(path, "must be at least " + std::to_string(min_value));
  return x;
}

bool boolean(const json& v, const std::string& path) {
  if (!v.is_boolean())
    fail(path, "expected true or false");
  return v.get<bool>();
}

std::string string_value(const json& v, const std::string& path) {
  if (!v.is_string())
    fail(path, "expected a string");
  return v.get<std::string>();
}

void check_keys(const json& obj, const std::string& prefix,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        known = true;
        break;
      }
    if (!known)
      fail(prefix.empty() ? it.key() : prefix + "." + it.key(), "unknown key");
  }
}

const json& require(const json& obj, const char* key, const std::string& prefix) {
  auto it = obj.find(key);
  if (it == obj.end())
    fail(prefix.empty() ? key : prefix + "." + key, "missing");
  return *it;
}

} // namespace

std::string bundled_config_dir() { return RAMAN_CONFIG_DIR; }

SweepSpec RunConfig::sweep_spec() const {
  SweepSpec s;
  s.kind = sweep_kind;
  s.axis = sweep_axis;
  s.medium = medium;
  s.pump = pump;
  s.geom = geom;
  s.grid = grid;
  s.tolerance = tolerance;
  s.refine_budget = refine_budget;
  s.threads = threads;
  return s;
}

RunConfig run_config_from_json(const json& doc, const std::string& base_dir) {
  if (!doc.is_object())
    fail("config", "top-level document must be an object");
  check_keys(doc, "", {"name", "comment", "medium", "pump", "geometry", "grid",
                       "tolerance", "refine_budget", "threads", "purity_kind", "sweep",
                       "ji"});
  RunConfig cfg;

  const json& jm = require(doc, "medium", "");
  if (jm.is_string()) {
    std::string rel = jm.get<std::string>();
    fs::path p(rel);
    if (p.is_absolute()) {
      if (!fs::exists(p))
        fail("medium", "file not found: " + p.string());
    } else {
      fs::path local = fs::path(base_dir) / rel;
      fs::path bundled = fs::path(bundled_config_dir()) / rel;
      if (fs::exists(local))
        p = local;
      else if (fs::exists(bundled))
        p = bundled;
      else
        fail("medium",
             "file not found; tried " + local.string() + " and " + bundled.string());
    }
    try {
      cfg.medium = load_medium(p.string());
    } catch (const std::exception& e) {
      fail("medium", e.what());
    }
    cfg.medium_source = p.string();
  } else if (jm.is_object()) {
    try {
      cfg.medium = medium_from_json_text(jm.dump(), "<inline>");
    } catch (const std::exception& e) {
      fail("medium", e.what());
    }
    cfg.medium_source = "<inline>";
  } else {
    fail("medium", "expected a medium file path or an inline medium object");
  }

  const json& jp = require(doc, "pump", "");
  if (!jp.is_object())
    fail("pump", "expected an object");
  check_keys(jp, "pump", {"center_wavelength", "intensity_fwhm"});
  cfg.pump.center_wavelength = positive_quantity(
      require(jp, "center_wavelength", "pump"), "pump.center_wavelength", Kind::Length);
  {
    // the spectral width is taken either as a wavelength span ("7 nm"),
    // converted at the carrier, or directly as an angular width ("1e13 rad/s",
    // what resolved configs emit); stored in rad/s either way
    const json& jf = require(jp, "intensity_fwhm", "pump");
    if (jf.is_number())
      fail("pump.intensity_fwhm", "needs a unit tag, e.g. \"7 nm\"");
    if (!jf.is_string())
      fail("pump.intensity_fwhm", "expected a quantity string with a unit tag");
    std::string sv = jf.get<std::string>();
    double val = 0.0;
    bool parsed = false, as_length = false;
    try {
      val = units::to_si(sv, Kind::Length);
      parsed = as_length = true;
    } catch (const std::invalid_argument&) {
    }
    if (!parsed) {
      try {
        val = units::to_si(sv, Kind::AngularFrequency);
        parsed = true;
      } catch (const std::invalid_argument&) {
      }
    }
    if (!parsed)
      fail("pump.intensity_fwhm", "expected a wavelength span (\"7 nm\") or an "
                                  "angular width (\"1e13 rad/s\")");
    if (!(val > 0.0))
      fail("pump.intensity_fwhm", "must be positive");
    cfg.pump.intensity_fwhm =
        as_length ? pump_sigma_from_fwhm(cfg.pump.center_wavelength, val) * fwhm_sigma
                  : val;
  }

  const json& jg = require(doc, "geometry", "");
  if (!jg.is_object())
    fail("geometry", "expected an object");
  check_keys(jg, "geometry",
             {"mode", "length", "angle", "fresnel_number", "pump_waist",
              "collection_waist"});
  try {
    cfg.geom.mode =
        geometry_mode_from_name(string_value(require(jg, "mode", "geometry"), "geometry.mode"));
  } catch (const std::invalid_argument& e) {
    fail("geometry.mode", e.what());
  }
  cfg.geom.length = positive_quantity(require(jg, "length", "geometry"),
                                      "geometry.length", Kind::Length);
  if (jg.contains("angle")) {
    if (cfg.geom.mode != GeometryMode::ThreeD_OffAxis)
      fail("geometry.angle", "only applies to the offaxis-3d mode");
    cfg.geom.angle_phi = quantity(jg["angle"], "geometry.angle", Kind::Angle);
    if (cfg.geom.angle_phi < 0.0 || cfg.geom.angle_phi > pi)
      fail("geometry.angle", "must lie in [0, pi]");
  }

  bool has_fresnel = jg.contains("fresnel_number");
  bool has_wp = jg.contains("pump_waist");
  bool has_wf = jg.contains("collection_waist");
  if (cfg.geom.is_3d()) {
    if (has_fresnel && (has_wp || has_wf))
      fail("geometry.fresnel_number",
           "conflicts with explicit waists; give one or the other");
    if (has_fresnel) {
      double fres = number(jg["fresnel_number"], "geometry.fresnel_number");
      if (!(fres > 0.0))
        fail("geometry.fresnel_number", "must be positive");
      double wp0 = cfg.pump.omega0();
      double ws0 = wp0 - cfg.medium.raman_shift;
      cfg.geom = geometry_from_fresnel(cfg.geom.mode, cfg.geom.length, cfg.geom.angle_phi,
                                       fres, wavevector(cfg.medium, wp0),
                                       wavevector(cfg.medium, ws0));
    } else {
      if (!has_wp)
        fail("geometry.pump_waist",
             "missing; 3d geometries need pump_waist and collection_waist, or "
             "fresnel_number");
      if (!has_wf)
        fail("geometry.collection_waist",
             "missing; 3d geometries need pump_waist and collection_waist, or "
             "fresnel_number");
      cfg.geom.waist_wp =
          positive_quantity(jg["pump_waist"], "geometry.pump_waist", Kind::Length);
      cfg.geom.waist_wf = positive_quantity(jg["collection_waist"],
                                            "geometry.collection_waist", Kind::Length);
    }
  } else {
    for (const char* k : {"fresnel_number", "pump_waist", "collection_waist"})
      if (jg.contains(k))
        fail(std::string("geometry.") + k, "only applies to 3d geometries");
  }
  validate_geometry(cfg.geom);

  if (doc.contains("grid")) {
    const json& jq = doc["grid"];
    if (!jq.is_object())
      fail("grid", "expected an object");
    check_keys(jq, "grid",
               {"n_nu", "n_delta", "n_z", "n_kappa", "n_u", "window_factor",
                "n_z_spectrum", "delta_tan_map"});
    if (jq.contains("n_nu"))
      cfg.grid.n_nu = integer(jq["n_nu"], "grid.n_nu", 2);
    if (jq.contains("n_delta"))
      cfg.grid.n_delta = integer(jq["n_delta"], "grid.n_delta", 2);
    if (jq.contains("n_z"))
      cfg.grid.n_z = integer(jq["n_z"], "grid.n_z", 1);
    if (jq.contains("n_kappa"))
      cfg.grid.n_kappa = integer(jq["n_kappa"], "grid.n_kappa", 2);
    if (jq.contains("n_u"))
      cfg.grid.n_u = integer(jq["n_u"], "grid.n_u", 3);
    if (jq.contains("window_factor")) {
      cfg.grid.window_factor = number(jq["window_factor"], "grid.window_factor");
      if (!(cfg.grid.window_factor > 0.0))
        fail("grid.window_factor", "must be positive");
    }
    if (jq.contains("n_z_spectrum"))
      cfg.grid.n_z_spectrum = integer(jq["n_z_spectrum"], "grid.n_z_spectrum", 16);
    if (jq.contains("delta_tan_map"))
      cfg.grid.delta_tan_map = boolean(jq["delta_tan_map"], "grid.delta_tan_map");
  }

  if (doc.contains("tolerance")) {
    cfg.tolerance = number(doc["tolerance"], "tolerance");
    if (!(cfg.tolerance > 0.0))
      fail("tolerance", "must be positive");
  }
  if (doc.contains("refine_budget"))
    cfg.refine_budget = integer(doc["refine_budget"], "refine_budget", 0);
  if (doc.contains("threads"))
    cfg.threads = integer(doc["threads"], "threads", 1);
  if (doc.contains("purity_kind")) {
    cfg.purity_kind = string_value(doc["purity_kind"], "purity_kind");
    if (cfg.purity_kind != "total" && cfg.purity_kind != "energy" &&
        cfg.purity_kind != "momentum")
      fail("purity_kind", "expected one of total, energy, momentum");
  }

  if (doc.contains("sweep")) {
    const json& js = doc["sweep"];
    if (!js.is_object())
      fail("sweep", "expected an object");
    check_keys(js, "sweep", {"kind", "axis"});
    try {
      cfg.sweep_kind =
          sweep_kind_from_name(string_value(require(js, "kind", "sweep"), "sweep.kind"));
    } catch (const std::invalid_argument& e) {
      fail("sweep.kind", e.what());
    }
    if (cfg.sweep_kind == SweepKind::JointIntensityGrid)
      fail("sweep.kind", "joint-intensity grids use the ji section, not a sweep");
    const json& ja = require(js, "axis", "sweep");
    if (!ja.is_array())
      fail("sweep.axis", "expected an array");
    for (size_t i = 0; i < ja.size(); ++i) {
      std::string p = "sweep.axis[" + std::to_string(i) + "]";
      switch (cfg.sweep_kind) {
      case SweepKind::Bandwidth:
      case SweepKind::Length:
        cfg.sweep_axis.push_back(positive_quantity(ja[i], p, Kind::Length));
        break;
      case SweepKind::Angle:
      case SweepKind::ApodizationFwhm:
        cfg.sweep_axis.push_back(quantity(ja[i], p, Kind::Angle));
        break;
      case SweepKind::Fresnel:
        cfg.sweep_axis.push_back(number(ja[i], p));
        break;
      case SweepKind::JointIntensityGrid:
        break;
      }
    }
    cfg.has_sweep = true;
  }

  if (doc.contains("ji")) {
    const json& jj = doc["ji"];
    if (!jj.is_object())
      fail("ji", "expected an object");
    check_keys(jj, "ji", {"kind", "rows", "cols"});
    if (jj.contains("kind")) {
      cfg.ji_kind = string_value(jj["kind"], "ji.kind");
      if (cfg.ji_kind != "energy" && cfg.ji_kind != "momentum" && cfg.ji_kind != "both")
        fail("ji.kind", "expected one of energy, momentum, both");
    }
    if (jj.contains("rows"))
      cfg.ji_rows = integer(jj["rows"], "ji.rows", 2);
    if (jj.contains("cols"))
      cfg.ji_cols = integer(jj["cols"], "ji.cols", 2);
    cfg.has_ji = true;
  }

  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f)
    throw std::runtime_error("cannot open config " + path);
  json doc;
  try {
    f >> doc;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return run_config_from_json(doc, fs::path(path).parent_path().string());
}

json resolved_config_json(const RunConfig& cfg) {
  json m;
  m["name"] = cfg.medium.name;
  m["sellmeier_b"] = cfg.medium.sellmeier_b;
  m["sellmeier_resonance_um"] = cfg.medium.sellmeier_resonance_um;
  if (!cfg.medium.unbounded_window()) {
    m["validity_min"] = tag(cfg.medium.validity_min, "m");
    m["validity_max"] = tag(cfg.medium.validity_max, "m");
  }
  m["raman_shift"] = tag(cfg.medium.raman_shift, "rad/s");
  m["raman_linewidth_fwhm"] = tag(cfg.medium.raman_fwhm, "rad/s");

  json g;
  g["mode"] = geometry_mode_name(cfg.geom.mode);
  g["length"] = tag(cfg.geom.length, "m");
  if (cfg.geom.mode == GeometryMode::ThreeD_OffAxis)
    g["angle"] = tag(cfg.geom.angle_phi, "rad");
  if (cfg.geom.is_3d()) {
    g["pump_waist"] = tag(cfg.geom.waist_wp, "m");
    g["collection_waist"] = tag(cfg.geom.waist_wf, "m");
  }

  json doc;
  doc["medium"] = m;
  doc["pump"] = {{"center_wavelength", tag(cfg.pump.center_wavelength, "m")},
                 {"intensity_fwhm", tag(cfg.pump.intensity_fwhm, "rad/s")}};
  doc["geometry"] = g;
  doc["grid"] = {{"n_nu", cfg.grid.n_nu},
                 {"n_delta", cfg.grid.n_delta},
                 {"n_z", cfg.grid.n_z},
                 {"n_kappa", cfg.grid.n_kappa},
                 {"n_u", cfg.grid.n_u},
                 {"window_factor", cfg.grid.window_factor},
                 {"n_z_spectrum", cfg.grid.n_z_spectrum},
                 {"delta_tan_map", cfg.grid.delta_tan_map}};
  doc["tolerance"] = cfg.tolerance;
  doc["refine_budget"] = cfg.refine_budget;
  doc["threads"] = cfg.threads;
  doc["purity_kind"] = cfg.purity_kind;

  if (cfg.has_sweep) {
    json axis = json::array();
    for (double v : cfg.sweep_axis) {
      switch (cfg.sweep_kind) {
      case SweepKind::Bandwidth:
      case SweepKind::Length:
        axis.push_back(tag(v, "m"));
        break;
      case SweepKind::Angle:
      case SweepKind::ApodizationFwhm:
        axis.push_back(tag(v, "rad"));
        break;
      default:
        axis.push_back(v);
        break;
      }
    }
    doc["sweep"] = {{"kind", sweep_kind_name(cfg.sweep_kind)}, {"axis", axis}};
  }
  if (cfg.has_ji)
    doc["ji"] = {{"kind", cfg.ji_kind}, {"rows", cfg.ji_rows}, {"cols", cfg.ji_cols}};
  return doc;
}

} // namespace raman
