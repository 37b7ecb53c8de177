#include "raman/config.hpp"
#include "raman/constants.hpp"
#include "raman/manifest.hpp"
#include "raman/sha256.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

extern "C" void openblas_set_num_threads(int);

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace raman;

struct CliArgs {
  std::string config;
  std::string output;
  std::string manifest_from;
  int threads = 0;        // 0: take from config
  double tolerance = 0.0; // 0: take from config
};

struct Loaded {
  RunConfig cfg;
  std::map<std::string, std::string> hashes;
};

Loaded acquire(const CliArgs& cli) {
  if (!cli.config.empty() && !cli.manifest_from.empty())
    throw std::invalid_argument("--config and --manifest-from are mutually exclusive");
  Loaded out;
  if (!cli.manifest_from.empty()) {
    RunManifest m = read_manifest(cli.manifest_from);
    out.cfg = run_config_from_json(m.resolved_config,
                                   fs::path(cli.manifest_from).parent_path().string());
    out.hashes[cli.manifest_from] = "sha256:" + sha256_file(cli.manifest_from);
  } else if (!cli.config.empty()) {
    out.cfg = load_run_config(cli.config);
    out.hashes[cli.config] = "sha256:" + sha256_file(cli.config);
    if (out.cfg.medium_source != "<inline>")
      out.hashes[out.cfg.medium_source] = "sha256:" + sha256_file(out.cfg.medium_source);
  } else {
    throw std::invalid_argument("--config: required (or --manifest-from)");
  }
  if (cli.threads > 0)
    out.cfg.threads = cli.threads;
  if (cli.tolerance > 0.0)
    out.cfg.tolerance = cli.tolerance;
  return out;
}

void require_output(const CliArgs& cli) {
  if (cli.output.empty())
    throw std::invalid_argument("--output: required; files get suffixes like "
                                ".report.json / .csv / .manifest.json");
}

RunManifest base_manifest(const char* command, const Loaded& loaded) {
  RunManifest m;
  m.command = command;
  m.resolved_config = resolved_config_json(loaded.cfg);
  m.input_hashes = loaded.hashes;
  m.threads = loaded.cfg.threads;
  m.tolerance = loaded.cfg.tolerance;
  return m;
}

json grid_json(const QuadratureGrid& g) {
  return {{"n_nu", g.n_nu},
          {"n_delta", g.n_delta},
          {"n_z", g.n_z},
          {"n_kappa", g.n_kappa},
          {"n_u", g.n_u},
          {"window_factor", g.window_factor},
          {"n_z_spectrum", g.n_z_spectrum},
          {"delta_tan_map", g.delta_tan_map}};
}

json report_json(const SchmidtReport& r) {
  json hist = json::array();
  for (const RefineStep& s : r.refinement_history)
    hist.push_back({{"n_nu", s.n_nu},
                    {"n_delta", s.n_delta},
                    {"n_z", s.n_z},
                    {"window_factor", s.window_factor},
                    {"purity", s.purity}});
  return {{"engine", r.engine},
          {"z_method", r.z_method},
          {"purity", r.purity},
          {"mode_number", r.mode_number},
          {"g2_predicted", r.g2_predicted},
          {"converged", r.converged},
          {"spectrum_resolved", r.spectrum_resolved},
          {"purity_spectral", r.purity_spectral},
          {"schmidt_coefficients", r.lambdas},
          {"grid", grid_json(r.grid)},
          {"refinement_history", hist}};
}

void dump_json(const json& doc, const std::string& path) {
  std::ofstream f(path);
  if (!f)
    throw std::runtime_error("cannot open " + path + " for writing");
  f << doc.dump(2) << '\n';
  if (!f)
    throw std::runtime_error("write failed for " + path);
}

GeometryMode mode_from_cli_name(const std::string& s) {
  if (s == "forward")
    return GeometryMode::OneD_Forward;
  if (s == "backward")
    return GeometryMode::OneD_Backward;
  if (s == "collinear")
    return GeometryMode::ThreeD_Collinear;
  if (s == "offaxis")
    return GeometryMode::ThreeD_OffAxis;
  return geometry_mode_from_name(s); // full names work too
}

int run_purity(const CliArgs& cli, const std::string& geometry_override) {
  Loaded loaded = acquire(cli);
  RunConfig& cfg = loaded.cfg;
  if (!geometry_override.empty()) {
    cfg.geom.mode = mode_from_cli_name(geometry_override);
    validate_geometry(cfg.geom);
  }
  require_output(cli);

  PairContext ctx = make_pair_context(cfg.medium, cfg.pump, cfg.geom);
  SchmidtReport rep;
  if (cfg.purity_kind == "total") {
    rep = refine_until_converged(ctx, cfg.grid, cfg.tolerance, cfg.refine_budget);
  } else {
    auto eval = [&](const QuadratureGrid& g) {
      return cfg.purity_kind == "energy" ? purity_energy(ctx, g)
                                         : purity_momentum(ctx, g);
    };
    SchmidtReport base = eval(cfg.grid);
    QuadratureGrid finer = cfg.grid;
    finer.n_nu *= 2;
    finer.n_delta *= 2;
    finer.n_kappa *= 2;
    rep = eval(finer);
    rep.converged = std::abs(rep.purity - base.purity) < cfg.tolerance;
    rep.refinement_history = {
        {cfg.grid.n_nu, cfg.grid.n_delta, cfg.grid.n_z, cfg.grid.window_factor,
         base.purity},
        {finer.n_nu, finer.n_delta, finer.n_z, finer.window_factor, rep.purity}};
  }

  std::string report_path = cli.output + ".report.json";
  dump_json(report_json(rep), report_path);
  RunManifest man = base_manifest("purity", loaded);
  man.outputs = {report_path};
  write_manifest(man, cli.output + ".manifest.json");

  std::printf("%s purity = %.9g  modes = %.6g  g2 = %.9g  engine = %s  %s\n",
              cfg.purity_kind.c_str(), rep.purity, rep.mode_number, rep.g2_predicted,
              rep.engine.c_str(), rep.converged ? "converged" : "NOT converged");
  return rep.converged ? 0 : 2;
}

int run_sweep_cmd(const CliArgs& cli) {
  Loaded loaded = acquire(cli);
  if (!loaded.cfg.has_sweep)
    throw std::invalid_argument("sweep: section missing from config");
  require_output(cli);

  SweepResult res = run_sweep(loaded.cfg.sweep_spec());
  std::string csv_path = cli.output + ".csv";
  std::string json_path = cli.output + ".json";
  write_sweep_csv(res, csv_path);
  write_sweep_json(res, json_path);
  RunManifest man = base_manifest("sweep", loaded);
  man.outputs = {csv_path, json_path};
  write_manifest(man, cli.output + ".manifest.json");

  bool all_ok = true;
  for (const SweepRow& r : res.rows)
    all_ok = all_ok && r.converged;
  std::printf("%s sweep: %zu rows -> %s%s\n", sweep_kind_name(res.kind),
              res.rows.size(), csv_path.c_str(),
              all_ok ? "" : " (some rows NOT converged)");
  return all_ok ? 0 : 2;
}

int run_ji(const CliArgs& cli, const std::string& format) {
  Loaded loaded = acquire(cli);
  require_output(cli);
  if (format != "csv" && format != "bin")
    throw std::invalid_argument("--format: expected csv or bin");
  const RunConfig& cfg = loaded.cfg;
  PairContext ctx = make_pair_context(cfg.medium, cfg.pump, cfg.geom);
  RunManifest man = base_manifest("ji-grid", loaded);
  auto emit = [&](JointIntensityKind kind, const char* tag) {
    std::string p = cli.output + "." + tag + (format == "bin" ? ".bin" : ".csv");
    Grid2D g = joint_intensity_grid(ctx, kind, cfg.ji_rows, cfg.ji_cols);
    if (format == "bin")
      write_grid_bin(g, p);
    else
      write_grid_csv(g, p);
    man.outputs.push_back(p);
  };
  if (cfg.ji_kind == "energy" || cfg.ji_kind == "both")
    emit(JointIntensityKind::Energy, "energy");
  if (cfg.ji_kind == "momentum" || cfg.ji_kind == "both")
    emit(JointIntensityKind::Momentum, "momentum");
  write_manifest(man, cli.output + ".manifest.json");
  std::printf("joint intensity grids -> %s\n", cli.output.c_str());
  return 0;
}

int run_g2(const CliArgs& cli, const CoincidenceRecord& flag_rec, bool have_flags,
           const std::string& counts_path) {
  std::vector<CoincidenceRecord> recs;
  if (!counts_path.empty())
    recs = read_coincidence_csv(counts_path);
  if (have_flags)
    recs.push_back(flag_rec);
  if (recs.empty())
    throw std::invalid_argument(
        "counts: give --n1/--n2/--n12/--pulses or --counts <csv>");
  json out = json::array();
  for (const CoincidenceRecord& rec : recs) {
    G2Estimate est = g2_estimate(rec);
    PurityEstimate pe = purity_from_g2(est.g2, est.std_error);
    std::printf("g2 = %.6g +- %.3g%s   purity = %.6g +- %.3g%s\n", est.g2,
                est.std_error, est.error_bar_floored ? " (error bar floored)" : "",
                pe.purity, pe.std_error,
                pe.out_of_range ? " (outside [0, 1])" : "");
    out.push_back({{"n1", rec.n1},
                   {"n2", rec.n2},
                   {"n12", rec.n12},
                   {"pulses", rec.pulses},
                   {"g2", est.g2},
                   {"g2_std_error", est.std_error},
                   {"error_bar_floored", est.error_bar_floored},
                   {"purity", pe.purity},
                   {"purity_std_error", pe.std_error},
                   {"out_of_range", pe.out_of_range}});
  }
  if (!cli.output.empty())
    dump_json(out, cli.output + ".g2.json");
  return 0;
}

int run_fit(const CliArgs& cli, const std::string& spectrum_path) {
  if (spectrum_path.empty())
    throw std::invalid_argument("--spectrum: required");
  auto samples = read_spectrum(spectrum_path);
  LorentzFit fit = fit_lorentzian(samples);
  // spectra come in as (shift cm^-1, intensity); report SI alongside
  double wn_to_rads = two_pi * c0 * 100.0;
  std::printf("amplitude = %.9g\ncenter = %.9g cm^-1 (%.9g rad/s)\n"
              "fwhm = %.9g cm^-1 (%.9g rad/s)\nbaseline = %.9g\n"
              "iterations = %d\nresidual_rms = %.3g\n%s\n",
              fit.amplitude, fit.center, fit.center * wn_to_rads, fit.fwhm,
              fit.fwhm * wn_to_rads, fit.baseline, fit.iterations, fit.residual_rms,
              fit.degenerate ? "DEGENERATE (no usable peak)"
                             : (fit.converged ? "converged" : "NOT converged"));
  if (!cli.output.empty())
    dump_json(json{{"amplitude", fit.amplitude},
                   {"center_wavenumber", fit.center},
                   {"center_angular_frequency", fit.center * wn_to_rads},
                   {"fwhm_wavenumber", fit.fwhm},
                   {"fwhm_angular_frequency", fit.fwhm * wn_to_rads},
                   {"baseline", fit.baseline},
                   {"converged", fit.converged},
                   {"degenerate", fit.degenerate},
                   {"iterations", fit.iterations},
                   {"residual_rms", fit.residual_rms}},
              cli.output + ".fit.json");
  return (fit.converged && !fit.degenerate) ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"photon / collective-excitation pair-state simulator"};
  app.require_subcommand(1);

  CliArgs cli;
  app.add_option("--config", cli.config, "run configuration file (JSON)");
  app.add_option("--output", cli.output, "output path prefix");
  app.add_option("--threads", cli.threads, "worker threads for sweeps");
  app.add_option("--tolerance", cli.tolerance, "refinement tolerance override");
  app.add_option("--manifest-from", cli.manifest_from,
                 "re-run from a previously written manifest");

  CLI::App* purity = app.add_subcommand("purity", "Schmidt purity of one configuration");
  std::string geometry_override;
  purity->add_option("--geometry", geometry_override,
                     "geometry mode override (forward, backward, collinear, offaxis)");
  purity->fallthrough();

  CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep to CSV/JSON");
  sweep->fallthrough();

  CLI::App* ji = app.add_subcommand("ji-grid", "joint-intensity grids to CSV");
  std::string ji_format = "csv";
  ji->add_option("--format", ji_format, "grid file format: csv or bin");
  ji->fallthrough();

  CLI::App* g2 = app.add_subcommand("g2", "HBT coincidence analysis");
  CoincidenceRecord rec;
  std::string counts_path;
  auto* o1 = g2->add_option("--n1", rec.n1, "singles on detector 1");
  auto* o2 = g2->add_option("--n2", rec.n2, "singles on detector 2");
  g2->add_option("--n12", rec.n12, "coincidences");
  auto* o4 = g2->add_option("--pulses", rec.pulses, "pulse count R");
  g2->add_option("--counts", counts_path, "CSV of n1,n2,n12,pulses rows");
  g2->fallthrough();

  CLI::App* fit = app.add_subcommand("fit", "Lorentzian line fit of a spectrum");
  std::string spectrum_path;
  fit->add_option("--spectrum", spectrum_path, "two-column spectrum file");
  fit->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  // deterministic outputs: all BLAS work single-threaded, parallelism only
  // across sweep points
  openblas_set_num_threads(1);

  try {
    if (purity->parsed())
      return run_purity(cli, geometry_override);
    if (sweep->parsed())
      return run_sweep_cmd(cli);
    if (ji->parsed())
      return run_ji(cli, ji_format);
    if (g2->parsed()) {
      bool have_flags = o1->count() || o2->count() || o4->count();
      if (have_flags && (!o1->count() || !o2->count() || !o4->count()))
        throw std::invalid_argument("counts: --n1, --n2 and --pulses go together");
      return run_g2(cli, rec, have_flags, counts_path);
    }
    if (fit->parsed())
      return run_fit(cli, spectrum_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
