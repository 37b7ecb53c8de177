#include "raman/experiments.hpp"
#include "raman/constants.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace raman {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double display_axis(SweepKind k, double v) {
  switch (k) {
  case SweepKind::Bandwidth: return v * 1e9;          // m -> nm
  case SweepKind::Length: return v * 1e3;             // m -> mm
  case SweepKind::Angle: return v * 180.0 / pi;       // rad -> deg
  case SweepKind::ApodizationFwhm: return v * 180.0 / pi;
  case SweepKind::Fresnel: return v;
  case SweepKind::JointIntensityGrid: return v;
  }
  return v;
}

std::vector<std::string> sweep_columns(SweepKind k) {
  switch (k) {
  case SweepKind::Bandwidth:
    return {"pump_fwhm [nm]", "purity", "schmidt_modes", "g2", "converged",
            "engine", "purity_energy_only", "purity_momentum_only"};
  case SweepKind::Length:
    return {"length [mm]", "purity", "schmidt_modes", "g2", "converged", "engine"};
  case SweepKind::Angle:
    return {"angle [deg]", "purity", "schmidt_modes", "g2", "converged", "engine"};
  case SweepKind::Fresnel:
    return {"fresnel_number", "purity", "schmidt_modes", "g2", "converged", "engine"};
  case SweepKind::ApodizationFwhm:
    return {"angle [deg]", "alpha_fwhm [mm]"};
  case SweepKind::JointIntensityGrid:
    return {};
  }
  return {};
}

std::vector<json> row_values(SweepKind k, const SweepRow& r) {
  switch (k) {
  case SweepKind::Bandwidth:
    return {r.axis_value, r.purity,    r.mode_number,        r.g2,
            r.converged,  r.engine,    r.purity_energy_only, r.purity_momentum_only};
  case SweepKind::Length:
  case SweepKind::Angle:
  case SweepKind::Fresnel:
    return {r.axis_value, r.purity, r.mode_number, r.g2, r.converged, r.engine};
  case SweepKind::ApodizationFwhm:
    return {r.axis_value, r.alpha_fwhm_mm};
  case SweepKind::JointIntensityGrid:
    return {};
  }
  return {};
}

SweepRow compute_row(const SweepSpec& spec, double axis_si) {
  SweepRow row;
  row.axis_value = display_axis(spec.kind, axis_si);
  if (spec.kind == SweepKind::ApodizationFwhm) {
    PairContext ctx = make_pair_context(spec.medium, spec.pump, spec.geom);
    row.alpha_fwhm_mm = alpha_fwhm(ctx, axis_si) * 1e3;
    row.converged = true;
    return row;
  }

  PumpSpec pump = spec.pump;
  GeometrySpec geom = spec.geom;
  switch (spec.kind) {
  case SweepKind::Bandwidth:
    // axis carries the wavelength span; the pump stores its angular width
    pump.intensity_fwhm =
        pump_sigma_from_fwhm(pump.center_wavelength, axis_si) * fwhm_sigma;
    break;
  case SweepKind::Length:
    geom.length = axis_si;
    break;
  case SweepKind::Angle:
    geom.angle_phi = axis_si;
    break;
  case SweepKind::Fresnel: {
    double wp0 = pump.omega0();
    double ws0 = wp0 - spec.medium.raman_shift;
    geom = geometry_from_fresnel(geom.mode, geom.length, geom.angle_phi, axis_si,
                                 wavevector(spec.medium, wp0),
                                 wavevector(spec.medium, ws0));
    break;
  }
  default:
    break;
  }

  PairContext ctx = make_pair_context(spec.medium, pump, geom);
  SchmidtReport total =
      refine_until_converged(ctx, spec.grid, spec.tolerance, spec.refine_budget);
  row.purity = total.purity;
  row.mode_number = total.mode_number;
  row.g2 = total.g2_predicted;
  row.engine = total.engine;
  row.converged = total.converged;

  if (spec.kind == SweepKind::Bandwidth) {
    // single-mechanism companions through the same total-purity machinery:
    // linewidth-only with dispersion switched off, dispersion-only with the
    // line narrowed a thousandfold (tan-mapped delta axis to resolve it)
    PairContext ctx_e =
        make_pair_context(dispersionless_like(spec.medium), pump, geom);
    SchmidtReport e =
        refine_until_converged(ctx_e, spec.grid, spec.tolerance, spec.refine_budget);
    Medium narrow = spec.medium;
    narrow.raman_fwhm /= 1e3;
    QuadratureGrid gm = spec.grid;
    gm.delta_tan_map = true;
    PairContext ctx_m = make_pair_context(narrow, pump, geom);
    SchmidtReport m =
        refine_until_converged(ctx_m, gm, spec.tolerance, spec.refine_budget);
    row.purity_energy_only = e.purity;
    row.purity_momentum_only = m.purity;
    row.converged = row.converged && e.converged && m.converged;
  }
  return row;
}

} // namespace

const char* sweep_kind_name(SweepKind k) {
  switch (k) {
  case SweepKind::Bandwidth: return "bandwidth";
  case SweepKind::Length: return "length";
  case SweepKind::Angle: return "angle";
  case SweepKind::Fresnel: return "fresnel";
  case SweepKind::ApodizationFwhm: return "apodization-fwhm";
  case SweepKind::JointIntensityGrid: return "joint-intensity-grid";
  }
  return "?";
}

SweepKind sweep_kind_from_name(const std::string& s) {
  for (SweepKind k : {SweepKind::Bandwidth, SweepKind::Length, SweepKind::Angle,
                      SweepKind::Fresnel, SweepKind::ApodizationFwhm,
                      SweepKind::JointIntensityGrid})
    if (s == sweep_kind_name(k))
      return k;
  throw std::invalid_argument("unknown sweep kind '" + s + "'");
}

void validate_sweep(const SweepSpec& spec) {
  if (spec.kind == SweepKind::JointIntensityGrid)
    throw std::invalid_argument(
        "kind: joint-intensity-grid is not a row sweep, use joint_intensity_grid");
  if (spec.axis.empty())
    throw std::invalid_argument("axis: must be non-empty");
  for (size_t i = 1; i < spec.axis.size(); ++i)
    if (!(spec.axis[i] > spec.axis[i - 1]))
      throw std::invalid_argument("axis: values must be strictly increasing");
  switch (spec.kind) {
  case SweepKind::Bandwidth:
  case SweepKind::Length:
    if (spec.axis.front() <= 0.0)
      throw std::invalid_argument("axis: values must be positive");
    break;
  case SweepKind::Angle:
  case SweepKind::ApodizationFwhm:
    if (!spec.geom.is_3d())
      throw std::invalid_argument("geometry.mode: angle sweeps need a 3d geometry");
    if (spec.axis.front() < 0.0 || spec.axis.back() > pi)
      throw std::invalid_argument("axis: angles must lie in [0, pi]");
    break;
  case SweepKind::Fresnel:
    if (!spec.geom.is_3d())
      throw std::invalid_argument("geometry.mode: fresnel sweeps need a 3d geometry");
    if (spec.axis.front() <= 0.0)
      throw std::invalid_argument("axis: fresnel numbers must be positive");
    break;
  default:
    break;
  }
  if (spec.threads < 1)
    throw std::invalid_argument("threads: must be >= 1");
}

SweepResult run_sweep(const SweepSpec& spec) {
  validate_sweep(spec);
  SweepResult res;
  res.kind = spec.kind;
  res.columns = sweep_columns(spec.kind);
  res.rows.resize(spec.axis.size());

  std::atomic<size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= spec.axis.size())
        return;
      try {
        res.rows[i] = compute_row(spec, spec.axis[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error)
          first_error = std::current_exception();
      }
    }
  };
  size_t nthreads = std::min<size_t>(std::max(spec.threads, 1), spec.axis.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (size_t t = 0; t < nthreads; ++t)
      pool.emplace_back(worker);
    for (auto& th : pool)
      th.join();
  }
  if (first_error)
    std::rethrow_exception(first_error);
  return res;
}

void write_sweep_csv(const SweepResult& r, const std::string& path) {
  std::ofstream f(path);
  if (!f)
    throw std::runtime_error("cannot open " + path + " for writing");
  for (size_t i = 0; i < r.columns.size(); ++i)
    f << (i ? "," : "") << r.columns[i];
  f << '\n';
  for (const SweepRow& row : r.rows) {
    auto vals = row_values(r.kind, row);
    for (size_t i = 0; i < vals.size(); ++i) {
      if (i)
        f << ',';
      if (vals[i].is_number_float())
        f << fmt_double(vals[i].get<double>());
      else if (vals[i].is_boolean())
        f << (vals[i].get<bool>() ? "true" : "false");
      else
        f << vals[i].get<std::string>();
    }
    f << '\n';
  }
  if (!f)
    throw std::runtime_error("write failed for " + path);
}

void write_sweep_json(const SweepResult& r, const std::string& path) {
  json doc;
  doc["kind"] = sweep_kind_name(r.kind);
  doc["columns"] = r.columns;
  json rows = json::array();
  for (const SweepRow& row : r.rows)
    rows.push_back(row_values(r.kind, row));
  doc["rows"] = rows;
  std::ofstream f(path);
  if (!f)
    throw std::runtime_error("cannot open " + path + " for writing");
  f << doc.dump(2) << '\n';
  if (!f)
    throw std::runtime_error("write failed for " + path);
}

SweepResult read_sweep_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f)
    throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(f, line))
    throw std::runtime_error(path + ": empty file");
  SweepResult r;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
      r.columns.push_back(cell);
  }
  if (r.columns.empty())
    throw std::runtime_error(path + ": missing header");
  const std::string& c0 = r.columns.front();
  if (c0 == "pump_fwhm [nm]")
    r.kind = SweepKind::Bandwidth;
  else if (c0 == "length [mm]")
    r.kind = SweepKind::Length;
  else if (c0 == "fresnel_number")
    r.kind = SweepKind::Fresnel;
  else if (c0 == "angle [deg]")
    r.kind = (r.columns.size() == 2) ? SweepKind::ApodizationFwhm : SweepKind::Angle;
  else
    throw std::runtime_error(path + ": unrecognized sweep header '" + c0 + "'");
  while (std::getline(f, line)) {
    if (line.empty())
      continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
      cells.push_back(cell);
    if (cells.size() != r.columns.size())
      throw std::runtime_error(path + ": row with wrong cell count");
    SweepRow row;
    row.axis_value = std::stod(cells[0]);
    if (r.kind == SweepKind::ApodizationFwhm) {
      row.alpha_fwhm_mm = std::stod(cells[1]);
      row.converged = true;
    } else {
      row.purity = std::stod(cells[1]);
      row.mode_number = std::stod(cells[2]);
      row.g2 = std::stod(cells[3]);
      row.converged = cells[4] == "true";
      row.engine = cells[5];
      if (r.kind == SweepKind::Bandwidth) {
        row.purity_energy_only = std::stod(cells[6]);
        row.purity_momentum_only = std::stod(cells[7]);
      }
    }
    r.rows.push_back(row);
  }
  return r;
}

Grid2D joint_intensity_grid(const PairContext& ctx, JointIntensityKind kind, int n_rows,
                            int n_cols) {
  if (n_rows < 2 || n_cols < 2)
    throw std::invalid_argument("joint intensity grids need at least 2x2 points");
  double sigma = ctx.pump.sigma();
  double gamma = ctx.line.gamma;
  Grid2D g;
  g.rows.name = "stokes_wavelength";
  g.rows.unit = "nm";
  g.data.assign(static_cast<size_t>(n_rows) * n_cols, 0.0);

  // wavelength ascending means Stokes detuning descending
  double w_nu = (kind == JointIntensityKind::Energy) ? 3.0 * (2.0 * sigma + gamma)
                                                     : 6.0 * sigma;
  std::vector<double> nu(n_rows);
  for (int i = 0; i < n_rows; ++i) {
    nu[i] = w_nu - 2.0 * w_nu * i / (n_rows - 1);
    g.rows.values.push_back(two_pi * c0 / (ctx.omega_s0 + nu[i]) * 1e9);
  }

  double peak = 0.0;
  if (kind == JointIntensityKind::Energy) {
    g.cols.name = "ce_shift";
    g.cols.unit = "cm^-1";
    double w_d = 8.0 * gamma;
    std::vector<double> Om(n_cols);
    for (int j = 0; j < n_cols; ++j) {
      Om[j] = ctx.line.omega0 - w_d + 2.0 * w_d * j / (n_cols - 1);
      g.cols.values.push_back(Om[j] / (two_pi * c0 * 100.0));
    }
    for (int i = 0; i < n_rows; ++i)
      for (int j = 0; j < n_cols; ++j) {
        double v = std::norm(f_energy(ctx, ctx.omega_s0 + nu[i], Om[j]));
        g.at(i, j) = v;
        peak = std::max(peak, v);
      }
  } else {
    g.cols.name = "ce_wavelength";
    g.cols.unit = "um";
    double kce_center = ctx.k_p0 - ctx.k_s0; // copropagating carrier
    double w_k = std::abs(ctx.beta_p0 - ctx.beta_s0) * w_nu +
                 10.0 * two_pi / ctx.geom.length;
    // CE wavelength ascending means kappa descending
    std::vector<double> kce(n_cols);
    for (int j = 0; j < n_cols; ++j) {
      kce[j] = kce_center + w_k - 2.0 * w_k * j / (n_cols - 1);
      g.cols.values.push_back(two_pi / kce[j] * 1e6);
    }
    for (int i = 0; i < n_rows; ++i)
      for (int j = 0; j < n_cols; ++j) {
        double v = std::norm(f_momentum(ctx, ctx.omega_s0 + nu[i], kce[j]));
        g.at(i, j) = v;
        peak = std::max(peak, v);
      }
  }
  if (peak <= 0.0)
    throw std::runtime_error("joint intensity grid is identically zero");
  for (double& v : g.data)
    v /= peak;
  return g;
}

SweepResult apodization_fwhm_curve(const PairContext& ctx,
                                   const std::vector<double>& phis) {
  if (phis.empty())
    throw std::invalid_argument("axis: must be non-empty");
  SweepResult r;
  r.kind = SweepKind::ApodizationFwhm;
  r.columns = sweep_columns(r.kind);
  for (double phi : phis) {
    SweepRow row;
    row.axis_value = phi * 180.0 / pi;
    row.alpha_fwhm_mm = alpha_fwhm(ctx, phi) * 1e3;
    row.converged = true;
    r.rows.push_back(row);
  }
  return r;
}

void validate_coincidence(const CoincidenceRecord& rec) {
  if (rec.pulses < 1)
    throw std::invalid_argument("pulses: must be >= 1");
  if (rec.n12 > std::min(rec.n1, rec.n2))
    throw std::invalid_argument("n12: coincidences exceed min(n1, n2)");
}

G2Estimate g2_estimate(const CoincidenceRecord& rec) {
  validate_coincidence(rec);
  if (rec.n1 == 0 || rec.n2 == 0)
    throw std::invalid_argument("n1, n2: zero singles leave g2 undefined");
  G2Estimate est;
  est.g2 = static_cast<double>(rec.n12) * static_cast<double>(rec.pulses) /
           (static_cast<double>(rec.n1) * static_cast<double>(rec.n2));
  double inv12;
  if (rec.n12 == 0) {
    inv12 = 1.0;
    est.error_bar_floored = true;
  } else {
    inv12 = 1.0 / static_cast<double>(rec.n12);
  }
  est.std_error = est.g2 * std::sqrt(inv12 + 1.0 / static_cast<double>(rec.n1) +
                                     1.0 / static_cast<double>(rec.n2));
  return est;
}

PurityEstimate purity_from_g2(double g2, double std_error) {
  PurityEstimate p;
  p.purity = g2 - 1.0;
  p.std_error = std_error;
  p.out_of_range = p.purity < 0.0 || p.purity > 1.0;
  return p;
}

CoincidenceRecord simulate_thermal_g2(double mean_photons, std::uint64_t pulses,
                                      std::uint64_t seed) {
  if (!(mean_photons > 0.0))
    throw std::invalid_argument("mean_photons: must be positive");
  if (pulses < 1)
    throw std::invalid_argument("pulses: must be >= 1");
  std::mt19937_64 rng(seed);
  const double log_ratio = std::log(mean_photons / (1.0 + mean_photons));
  CoincidenceRecord rec;
  rec.pulses = pulses;
  rec.label = "thermal-mc";
  for (std::uint64_t p = 0; p < pulses; ++p) {
    // geometric photon number by inverse CDF; raw 53-bit mantissa keeps the
    // stream identical across standard library implementations
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    auto n = static_cast<std::uint64_t>(std::floor(std::log1p(-u) / log_ratio));
    if (n == 0)
      continue;
    std::uint64_t k1 = 0;
    for (std::uint64_t i = 0; i < n; ++i)
      k1 += rng() & 1u;
    std::uint64_t k2 = n - k1;
    if (k1 > 0)
      ++rec.n1;
    if (k2 > 0)
      ++rec.n2;
    if (k1 > 0 && k2 > 0)
      ++rec.n12;
  }
  return rec;
}

std::vector<CoincidenceRecord> read_coincidence_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f)
    throw std::runtime_error("cannot open " + path);
  std::vector<CoincidenceRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#')
      continue;
    if (!line.empty() && !std::isdigit(static_cast<unsigned char>(line[0])))
      continue; // header row
    CoincidenceRecord rec;
    unsigned long long a = 0, b = 0, c = 0, d = 0;
    if (std::sscanf(line.c_str(), "%llu,%llu,%llu,%llu", &a, &b, &c, &d) != 4)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected n1,n2,n12,pulses");
    rec.n1 = a;
    rec.n2 = b;
    rec.n12 = c;
    rec.pulses = d;
    validate_coincidence(rec);
    out.push_back(rec);
  }
  return out;
}

} // namespace raman
