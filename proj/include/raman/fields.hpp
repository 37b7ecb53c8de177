#pragma once
#include "raman/constants.hpp"

#include <string>
#include <utility>
#include <vector>

namespace raman {

// Transform-limited Gaussian pump with flat spectral phase, normalized to
// unit L2 norm: integral |E(omega)|^2 domega = 1.
struct PumpSpec {
  double center_wavelength = 0.0; // m
  double intensity_fwhm = 0.0;    // FWHM of |E|^2, rad/s

  double omega0() const { return two_pi * c0 / center_wavelength; }
  double sigma() const { return intensity_fwhm / fwhm_sigma; }
};

// Lorentzian vibrational line, FWHM gamma about omega0 (both rad/s).
struct Lineshape {
  double omega0 = 0.0;
  double gamma = 0.0;
};

// E(omega) = (2 pi sigma^2)^(-1/4) exp[-(omega - omega_p0)^2 / (4 sigma^2)]
double pump_amplitude(const PumpSpec& pump, double omega);

// g(Omega) = sqrt( (gamma/2pi) / ((Omega - omega0)^2 + gamma^2/4) ),
// unit L2 norm; g(omega0) = sqrt(2 / (pi gamma))
double lineshape_g(const Lineshape& ls, double Omega);

// Spectral-intensity sigma (rad/s) for an intensity FWHM given as a
// wavelength span at carrier lambda0: |domega/dlambda| = 2 pi c / lambda^2.
double pump_sigma_from_fwhm(double lambda0, double fwhm_wavelength);

struct LorentzFit {
  double amplitude = 0.0; // peak height above baseline
  double center = 0.0;    // same x unit as the input samples
  double fwhm = 0.0;
  double baseline = 0.0;
  bool converged = false;
  bool degenerate = false; // input carries no usable peak (e.g. constant)
  int iterations = 0;
  double residual_rms = 0.0; // RMS residual relative to the fitted peak height
};

// Least-squares fit of A*(G/2)^2/((x-x0)^2+(G/2)^2) + b to (x, y) samples,
// e.g. a measured Stokes line over wavenumber in cm^-1. Needs >= 8 samples.
// Damped Gauss-Newton seeded from the peak and its half-max crossings.
LorentzFit fit_lorentzian(const std::vector<std::pair<double, double>>& samples);

// Two-column whitespace-separated text, '#' starts a comment.
std::vector<std::pair<double, double>> read_spectrum(const std::string& path);

} // namespace raman
