#include <doctest.h>

#include "raman/experiments.hpp"
#include "raman/gridio.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int status = -1;
  std::string out; // stdout and stderr combined
};

CmdResult run_cli(const std::string& args) {
  static int serial = 0;
  std::string capture = "/tmp/raman_test_cli_out_" + std::to_string(serial++);
  std::string cmd =
      std::string(RAMAN_CLI_BIN) + " " + args + " >" + capture + " 2>&1";
  int rc = std::system(cmd.c_str());
  CmdResult r;
  r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  std::ifstream f(capture);
  r.out.assign((std::istreambuf_iterator<char>(f)),
               std::istreambuf_iterator<char>());
  std::remove(capture.c_str());
  return r;
}

// scratch directory shared by the suite; recreated on first use
const std::string& work_dir() {
  static std::string dir = [] {
    std::string d = "/tmp/raman_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write_file(const std::string& name, const std::string& body) {
  std::string p = work_dir() + "/" + name;
  std::ofstream f(p);
  f << body;
  return p;
}

std::string quick_config(const std::string& extra = "") {
  return write_file("quick" + std::to_string(std::hash<std::string>{}(extra)) +
                        ".json",
                    R"({
  "medium": "sapphire_ordinary.json",
  "pump": {"center_wavelength": "775 nm", "intensity_fwhm": "7 nm"},
  "geometry": {"mode": "forward-1d", "length": "8 mm"},
  "grid": {"n_nu": 48, "n_delta": 48, "n_z": 8, "n_u": 257},
  "tolerance": 0.1,
  "refine_budget": 1)" +
                        extra + "\n}\n");
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

json parse_file(const std::string& path) {
  std::ifstream f(path);
  return json::parse(f);
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("help lists the subcommands") {
  CmdResult r = run_cli("--help");
  CHECK(r.status == 0);
  for (const char* name : {"purity", "sweep", "ji-grid", "g2", "fit"})
    CHECK(r.out.find(name) != std::string::npos);
}

TEST_CASE("argument errors exit with 1") {
  CHECK(run_cli("purity").status == 1);
  CmdResult r = run_cli("purity --config " + quick_config());
  CHECK(r.status == 1);
  CHECK(r.out.find("--output") != std::string::npos);
  r = run_cli("purity --config a.json --manifest-from b.json --output x");
  CHECK(r.status == 1);
  CHECK(r.out.find("mutually exclusive") != std::string::npos);
  CHECK(run_cli("frobnicate").status == 1);
  CHECK(run_cli("purity --bogus-flag 3").status == 1);

  std::string bad = write_file("bad.json", "{ this is not json\n");
  r = run_cli("purity --config " + bad + " --output " + work_dir() + "/x");
  CHECK(r.status == 1);
  CHECK(r.out.find("error:") != std::string::npos);

  std::string unknown = write_file("unknown_key.json",
                                   R"({"medium": "sapphire_ordinary.json", "wibble": 1,
  "pump": {"center_wavelength": "775 nm", "intensity_fwhm": "7 nm"},
  "geometry": {"mode": "forward-1d", "length": "8 mm"}})");
  r = run_cli("purity --config " + unknown + " --output " + work_dir() + "/x");
  CHECK(r.status == 1);
  CHECK(r.out.find("wibble") != std::string::npos);
}

TEST_CASE("purity writes a report and a manifest, and re-runs from it") {
  std::string cfg = quick_config();
  std::string out = work_dir() + "/purity_a";
  CmdResult r = run_cli("purity --config " + cfg + " --output " + out);
  CHECK(r.status == 0);
  CHECK(r.out.find("purity =") != std::string::npos);
  CHECK(r.out.find("NOT converged") == std::string::npos);

  json rep = parse_file(out + ".report.json");
  CHECK(rep["engine"] == "svd");
  CHECK(rep["converged"] == true);
  double p = rep["purity"].get<double>();
  CHECK(p > 0.0);
  CHECK(p < 1.0);
  CHECK(rep["refinement_history"].size() >= 2);
  CHECK(rep["refinement_history"][0]["n_nu"] == 48); // base grid from the config

  json man = parse_file(out + ".manifest.json");
  CHECK(man["tool"] == "raman");
  CHECK(man["command"] == "purity");
  CHECK(man["outputs"][0] == out + ".report.json");
  bool saw_config = false, saw_medium = false;
  for (auto& [path, hash] : man["input_hashes"].items()) {
    CHECK(hash.get<std::string>().rfind("sha256:", 0) == 0);
    saw_config = saw_config || path == cfg;
    saw_medium = saw_medium || path.find("sapphire_ordinary") != std::string::npos;
  }
  CHECK(saw_config);
  CHECK(saw_medium);
  CHECK(man["resolved_config"]["medium"]["name"] == "sapphire-ordinary");

  // re-running from the manifest reproduces the report byte for byte
  std::string out2 = work_dir() + "/purity_b";
  r = run_cli("purity --manifest-from " + out + ".manifest.json --output " + out2);
  CHECK(r.status == 0);
  CHECK(slurp(out2 + ".report.json") == slurp(out + ".report.json"));
}

TEST_CASE("purity exits with 2 when the refinement does not converge") {
  std::string cfg = quick_config(",\n  \"comment\": \"tight\"");
  std::string out = work_dir() + "/purity_tight";
  CmdResult r = run_cli("purity --config " + cfg + " --tolerance 1e-16 --output " + out);
  CHECK(r.status == 2);
  CHECK(r.out.find("NOT converged") != std::string::npos);
  json rep = parse_file(out + ".report.json");
  CHECK(rep["converged"] == false);
  // the flag override lands in the manifest
  json man = parse_file(out + ".manifest.json");
  CHECK(man["tolerance"].get<double>() == 1e-16);
}

TEST_CASE("geometry override switches the engine") {
  std::string out = work_dir() + "/purity_bwd";
  CmdResult r = run_cli("purity --config " + quick_config() +
                        " --geometry backward --output " + out);
  CHECK(r.status == 0);
  json rep = parse_file(out + ".report.json");
  CHECK(rep["engine"] == "gram-sinc");
  CHECK(rep["z_method"] == "analytic-sinc");
  CHECK(rep["purity"].get<double>() < 0.1);
}

TEST_CASE("purity_kind energy uses the single-mechanism kernel") {
  std::string cfg = quick_config(",\n  \"purity_kind\": \"energy\"");
  std::string out = work_dir() + "/purity_energy";
  CmdResult r = run_cli("purity --config " + cfg + " --output " + out);
  CHECK(r.status == 0);
  CHECK(r.out.find("energy purity =") != std::string::npos);
  json rep = parse_file(out + ".report.json");
  CHECK(rep["refinement_history"].size() == 2);
}

TEST_CASE("sweep writes csv, json and manifest") {
  std::string cfg = quick_config(
      ",\n  \"sweep\": {\"kind\": \"length\", \"axis\": [\"2 mm\", \"4 mm\"]},"
      "\n  \"tolerance\": 0.5");
  std::string out = work_dir() + "/sweep_len";
  CmdResult r = run_cli("sweep --config " + cfg + " --output " + out);
  CHECK(r.status == 0);
  CHECK(r.out.find("length sweep: 2 rows") != std::string::npos);

  raman::SweepResult res = raman::read_sweep_csv(out + ".csv");
  CHECK(res.kind == raman::SweepKind::Length);
  REQUIRE(res.rows.size() == 2);
  CHECK(res.rows[0].axis_value == 2.0);
  CHECK(res.rows[1].axis_value == 4.0);
  CHECK(parse_file(out + ".json")["rows"].size() == 2);

  // byte-stable under a manifest re-run
  std::string out2 = work_dir() + "/sweep_len2";
  r = run_cli("sweep --manifest-from " + out + ".manifest.json --output " + out2);
  CHECK(r.status == 0);
  CHECK(slurp(out2 + ".csv") == slurp(out + ".csv"));
  CHECK(slurp(out2 + ".json") == slurp(out + ".json"));

  // a config without a sweep section is rejected
  r = run_cli("sweep --config " + quick_config() + " --output " + out);
  CHECK(r.status == 1);
  CHECK(r.out.find("sweep: section missing") != std::string::npos);
}

TEST_CASE("joint intensity grids in both formats") {
  std::string cfg = quick_config(
      ",\n  \"ji\": {\"kind\": \"both\", \"rows\": 17, \"cols\": 17}");
  std::string out = work_dir() + "/ji";
  CmdResult r = run_cli("ji-grid --config " + cfg + " --output " + out);
  CHECK(r.status == 0);
  raman::Grid2D e = raman::read_grid_csv(out + ".energy.csv");
  raman::Grid2D m = raman::read_grid_csv(out + ".momentum.csv");
  CHECK(e.rows.values.size() == 17);
  CHECK(m.cols.values.size() == 17);
  CHECK(e.rows.unit == "nm");
  CHECK(m.cols.unit == "um");

  r = run_cli("ji-grid --config " + cfg + " --format bin --output " + out);
  CHECK(r.status == 0);
  raman::Grid2D eb = raman::read_grid_bin(out + ".energy.bin");
  REQUIRE(eb.data.size() == e.data.size());
  for (size_t k = 0; k < e.data.size(); ++k)
    CHECK(eb.data[k] == e.data[k]);

  r = run_cli("ji-grid --config " + cfg + " --format qux --output " + out);
  CHECK(r.status == 1);
  CHECK(r.out.find("expected csv or bin") != std::string::npos);
}

TEST_CASE("g2 from flags and from a counts file") {
  std::string out = work_dir() + "/hbt";
  CmdResult r = run_cli("g2 --n1 1000 --n2 1000 --n12 100 --pulses 10000 --output " + out);
  CHECK(r.status == 0);
  CHECK(r.out.find("g2 = 1 ") != std::string::npos);
  json doc = parse_file(out + ".g2.json");
  REQUIRE(doc.is_array());
  REQUIRE(doc.size() == 1);
  CHECK(doc[0]["g2"].get<double>() == 1.0);
  CHECK(doc[0]["purity"].get<double>() == 0.0);

  std::string counts = write_file("counts.csv",
                                  "n1,n2,n12,pulses\n"
                                  "1000,1000,100,10000\n"
                                  "2000,2000,800,10000\n");
  r = run_cli("g2 --counts " + counts + " --output " + out);
  CHECK(r.status == 0);
  doc = parse_file(out + ".g2.json");
  REQUIRE(doc.size() == 2);
  CHECK(doc[1]["g2"].get<double>() == 2.0);
  CHECK(doc[1]["purity"].get<double>() == 1.0);

  r = run_cli("g2 --n1 10 --pulses 5");
  CHECK(r.status == 1);
  CHECK(r.out.find("go together") != std::string::npos);
  r = run_cli("g2");
  CHECK(r.status == 1);
  CHECK(r.out.find("--counts") != std::string::npos);
}

TEST_CASE("lorentzian line fit") {
  std::string body = "# shift [cm^-1]  counts\n";
  for (int i = 0; i <= 120; ++i) {
    double x = 740.0 + 13.2 * i / 120.0;
    double d = (x - 746.6) / 5.5;
    char line[64];
    std::snprintf(line, sizeof line, "%.10g %.10g\n", x,
                  0.2 + 2.5 / (1.0 + d * d));
    body += line;
  }
  std::string spec = write_file("line.txt", body);
  std::string out = work_dir() + "/fit";
  CmdResult r = run_cli("fit --spectrum " + spec + " --output " + out);
  CHECK(r.status == 0);
  CHECK(r.out.find("converged") != std::string::npos);
  json doc = parse_file(out + ".fit.json");
  CHECK(doc["center_wavenumber"].get<double>() == doctest::Approx(746.6).epsilon(1e-6));
  CHECK(doc["fwhm_wavenumber"].get<double>() == doctest::Approx(11.0).epsilon(1e-6));
  CHECK(doc["baseline"].get<double>() == doctest::Approx(0.2).epsilon(1e-4));
  CHECK(doc["converged"] == true);
  CHECK(doc["degenerate"] == false);

  CHECK(run_cli("fit").status == 1);
  std::string flat = write_file("flat.txt", "1 1\n2 1\n3 1\n4 1\n5 1\n6 1\n7 1\n8 1\n9 1\n");
  CHECK(run_cli("fit --spectrum " + flat).status == 2);
  std::string tiny = write_file("tiny.txt", "1 1\n2 2\n3 1\n");
  CHECK(run_cli("fit --spectrum " + tiny).status == 1);
}

} // TEST_SUITE
