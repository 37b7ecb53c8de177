#pragma once
#include <string>
#include <vector>

namespace raman {

// Dispersive host crystal. Sellmeier data always comes from a config file
// (see configs/sapphire_ordinary.json); nothing here is material-specific.
// An empty term list models vacuum, n = 1 at every frequency.
struct Medium {
  std::string name;
  std::vector<double> sellmeier_b;            // dimensionless numerators
  std::vector<double> sellmeier_resonance_um; // resonance wavelengths, um
  double validity_min = 0.0;                  // wavelength window, m
  double validity_max = 0.0;                  // 0/0 means unbounded (vacuum)
  double raman_shift = 0.0;                   // line center Omega0, rad/s
  double raman_fwhm = 0.0;                    // line FWHM Gamma, rad/s

  bool unbounded_window() const { return validity_min == 0.0 && validity_max == 0.0; }
};

Medium load_medium(const std::string& config_path);

// Same schema from an in-memory JSON document (inline medium blocks in run
// configs). source_name labels error messages.
Medium medium_from_json_text(const std::string& json_text, const std::string& source_name);

// A medium with n identically 1 but the same vibrational line. Used for the
// energy-only mechanism curves in the bandwidth sweep.
Medium dispersionless_like(const Medium& m);

// Phase index at angular frequency omega (rad/s). Throws std::domain_error,
// naming the validity window, when the vacuum wavelength falls outside it.
double refractive_index(const Medium& m, double omega);

// k(omega) = n(omega) * omega / c
double wavevector(const Medium& m, double omega);

// beta(omega) = dk/domega, evaluated analytically from the Sellmeier form.
double inverse_group_velocity(const Medium& m, double omega);

// Co-propagating arrival-time mismatch over length L:
//   (beta(omega_a) - beta(omega_b)) * L,  antisymmetric in (a, b).
double group_delay_forward(const Medium& m, double omega_a, double omega_b, double L);

// Counter-propagating version: (beta(omega_a) + beta(omega_b)) * L, symmetric.
double group_delay_backward(const Medium& m, double omega_a, double omega_b, double L);

} // namespace raman
