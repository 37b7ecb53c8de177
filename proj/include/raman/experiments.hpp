#pragma once
#include "raman/gridio.hpp"
#include "raman/jointamp.hpp"
#include "raman/schmidt.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace raman {

enum class SweepKind {
  Bandwidth,
  Length,
  Angle,
  Fresnel,
  ApodizationFwhm,
  JointIntensityGrid,
};

const char* sweep_kind_name(SweepKind k);
SweepKind sweep_kind_from_name(const std::string& s);

struct SweepSpec {
  SweepKind kind = SweepKind::Bandwidth;
  std::vector<double> axis; // SI units (m, rad) or dimensionless, ascending
  Medium medium;
  PumpSpec pump;
  GeometrySpec geom;
  QuadratureGrid grid;
  double tolerance = 1e-3;
  int refine_budget = 2;
  int threads = 1;
};

// Throws std::invalid_argument naming the problem (empty axis, non-monotone
// axis, kind/geometry mismatch).
void validate_sweep(const SweepSpec& spec);

struct SweepRow {
  double axis_value = 0.0; // display units: nm, mm, deg, or dimensionless
  double purity = 0.0;
  double mode_number = 0.0;
  double g2 = 0.0;
  bool converged = false;
  std::string engine;
  // bandwidth sweeps carry the single-mechanism companion purities
  double purity_energy_only = 0.0;
  double purity_momentum_only = 0.0;
  // apodization sweeps report a width instead of a purity
  double alpha_fwhm_mm = 0.0;
};

struct SweepResult {
  SweepKind kind = SweepKind::Bandwidth;
  std::vector<std::string> columns; // CSV header cells, units included
  std::vector<SweepRow> rows;       // ordered by axis value
};

// One report per axis point, each run through grid refinement until the
// purity is stable to spec.tolerance (or the refinement budget runs out,
// flagged in-row). Points run concurrently up to spec.threads; row order
// follows the axis regardless. JointIntensityGrid is not a row sweep and is
// rejected here; call joint_intensity_grid instead.
SweepResult run_sweep(const SweepSpec& spec);

void write_sweep_csv(const SweepResult& r, const std::string& path);
void write_sweep_json(const SweepResult& r, const std::string& path);
SweepResult read_sweep_csv(const std::string& path);

enum class JointIntensityKind { Energy, Momentum };

// Joint intensity in display units, normalized to unit peak.
//   Energy:   |f_energy|^2, rows Stokes wavelength [nm], cols CE shift [cm^-1]
//   Momentum: |f_momentum|^2, rows Stokes wavelength [nm], cols CE wavelength [um]
Grid2D joint_intensity_grid(const PairContext& ctx, JointIntensityKind kind, int n_rows,
                            int n_cols);

// (phi, FWHM of alpha(., phi)) table; phi in rad in, degrees out.
SweepResult apodization_fwhm_curve(const PairContext& ctx,
                                   const std::vector<double>& phis);

// ----- Hanbury Brown-Twiss counting ---------------------------------------

struct CoincidenceRecord {
  std::uint64_t n1 = 0;     // singles, detector 1
  std::uint64_t n2 = 0;     // singles, detector 2
  std::uint64_t n12 = 0;    // coincidences
  std::uint64_t pulses = 0; // pulse count R
  std::string label;
};

// Throws std::invalid_argument naming the violated constraint
// (pulses >= 1, n12 <= min(n1, n2)).
void validate_coincidence(const CoincidenceRecord& rec);

struct G2Estimate {
  double g2 = 0.0;
  double std_error = 0.0;
  // n12 = 0 makes the Poisson propagation singular; the error bar is then
  // computed with 1/n12 replaced by 1 and this flag raised
  bool error_bar_floored = false;
};

// g2 = n12 R / (n1 n2); stderr = g2 sqrt(1/n12 + 1/n1 + 1/n2).
// Throws std::invalid_argument when n1 or n2 is zero (estimate undefined).
G2Estimate g2_estimate(const CoincidenceRecord& rec);

struct PurityEstimate {
  double purity = 0.0;
  double std_error = 0.0;
  bool out_of_range = false; // outside [0, 1], passed through unclamped
};

PurityEstimate purity_from_g2(double g2, double std_error);

// Seeded single-mode thermal source on a 50/50 splitter with unit-efficiency
// click detectors: photon number geometric with the given mean per pulse.
// Expectation g2 -> 2 as mean_photons -> 0.
CoincidenceRecord simulate_thermal_g2(double mean_photons, std::uint64_t pulses,
                                      std::uint64_t seed);

// rows "n1,n2,n12,pulses" with optional '#' comments and header line
std::vector<CoincidenceRecord> read_coincidence_csv(const std::string& path);

} // namespace raman
