#pragma once
#include "raman/fields.hpp"
#include "raman/geometry.hpp"
#include "raman/medium.hpp"

#include <complex>

namespace raman {

using cdouble = std::complex<double>;

// Everything the pair-state kernels need, with carriers resolved once.
// Detunings used throughout: nu = omega_s - omega_s0, delta = Omega - Omega0,
// kappa = k_CE - k_ce0. The pump argument in every kernel is omega_s + Omega.
struct PairContext {
  Medium medium;
  PumpSpec pump;
  Lineshape line;
  GeometrySpec geom;

  double omega_p0 = 0.0;
  double omega_s0 = 0.0; // omega_p0 - Omega0
  double k_p0 = 0.0;
  double k_s0 = 0.0;
  double k_ce0 = 0.0; // forward k_p0 - k_s0, backward k_p0 + k_s0
  double beta_p0 = 0.0;
  double beta_s0 = 0.0;
  double z_rp = 0.0; // pump Rayleigh range k_p0 w_p^2 / 2 (3D)
  double z_rf = 0.0; // collection Rayleigh range k_s0 w_f^2 / 2 (3D)
};

PairContext make_pair_context(const Medium& medium, const PumpSpec& pump,
                              const GeometrySpec& geom);

// ----- 1D kernels, exact dispersion ---------------------------------------

// E(omega_s + Omega) g(Omega) exp{ i [k(omega_s+Omega) - k(omega_s)] z }
cdouble f1d_forward(const PairContext& ctx, double omega_s, double Omega, double z);

// same with the counter-propagating phase k(omega_s+Omega) + k(omega_s)
cdouble f1d_backward(const PairContext& ctx, double omega_s, double Omega, double z);

// E(omega_s + Omega) g(Omega) sinc[(L/2)(k(omega_s+Omega) - k(omega_s) - k_CE)],
// sinc(x) = sin(x)/x
cdouble f1d_kspace(const PairContext& ctx, double omega_s, double Omega, double k_ce);

// energy-mechanism kernel E(omega_s + Omega) g(Omega)
cdouble f_energy(const PairContext& ctx, double omega_s, double Omega);

// momentum-mechanism kernel at line center,
// E(omega_s + Omega0) sinc[(L/2)(k(omega_s+Omega0) - k(omega_s) - k_CE)]
cdouble f_momentum(const PairContext& ctx, double omega_s, double k_ce);

// ----- 3D paraxial beam-overlap factors -----------------------------------
//
// The off-axis closed forms below come from projecting the transverse pump
// Gaussian and propagation phases onto the collection mode; beam-frequency
// dependence is frozen at the carriers. With c = cos(phi), s = sin(phi):
//   a_p(z) = w_p^2/4 + i z / (2 k_p0)
//   G(z)   = w_f^2/4 - i c z / (2 k_s0)
//   Dx = a_p c^2 + G,  Dy = a_p (2 c^2 - 1) + G
// Dx has strictly positive real part everywhere; Dy does whenever
// w_f^2 > w_p^2 (1 - 2 c^2), which holds for every geometry this library
// constructs from a common Fresnel number (w_f > w_p since k_s0 < k_p0).
// Principal square roots are then continuous in z and phi.

// log of the transverse overlap factor at collection transverse momentum
// q_CE = (qx, qy); absolute qy (the carrier ridge sits near k_s0 sin(phi)).
cdouble log_beta_offaxis(const PairContext& ctx, double qx, double qy, double z,
                         double phi);

// exp(log_beta_offaxis); underflows to 0 far from the ridge
cdouble beta_offaxis(const PairContext& ctx, double qx, double qy, double z, double phi);

// log of alpha(z, phi) = integral of |beta_offaxis|^2 d^2q, in closed form.
// Throws std::domain_error when the collection integral diverges
// (w_f^2 <= w_p^2 (1 - 2 cos^2 phi), possible only for w_p > w_f).
double log_alpha_offaxis(const PairContext& ctx, double z, double phi);

double alpha_offaxis(const PairContext& ctx, double z, double phi);

// collinear overlap: exp(-a_p G0 |q|^2 / (a_p + G0)) / (-2i (a_p + G0)),
// equal to beta_offaxis at phi = 0 exactly
cdouble beta_collinear(const PairContext& ctx, double qx, double qy, double z);

// Lorentzian-shaped apodization of the interaction length,
//   (8 pi^3 / w_p^2 w_f^2) [ (z^2+z_rf^2)/(w_f k_s0)^2 + (z^2+z_rp^2)/(w_p k_p0)^2 ]^-1.
// Differs from alpha_offaxis(z, 0) by the constant factor 4 pi^2 only.
double alpha_collinear(const PairContext& ctx, double z);

// full width at half maximum in z of alpha(., phi), by bisection
double alpha_fwhm(const PairContext& ctx, double phi);

// q-independent longitudinal phase exp[i k(omega_s) (1 - cos phi) z] with the
// exact omega_s dependence; the full off-axis joint amplitude is
// beta_offaxis * offaxis_longitudinal_phase * f1d_forward.
cdouble offaxis_longitudinal_phase(const PairContext& ctx, double omega_s, double z,
                                   double phi);

// log of the unprojected paraxial kernel mu(omega_s, q_s, Omega, q_CE, z, phi):
// transverse pump Gaussians plus propagation phases, k evaluated at the passed
// frequencies. Ships as an independent oracle; projecting exp(log_mu) times
// the collection Gaussian exp(-w_f^2 |q_s|^2 / 4) over q_s reproduces
// beta_offaxis * offaxis_longitudinal_phase up to one global constant.
cdouble log_mu_paraxial_oracle(const PairContext& ctx, double omega_s, double qsx,
                               double qsy, double Omega, double qcex, double qcey,
                               double z, double phi);

// exp(log_mu_paraxial_oracle); can overflow/underflow at large |q| sin(phi)
cdouble mu_paraxial_oracle(const PairContext& ctx, double omega_s, double qsx,
                           double qsy, double Omega, double qcex, double qcey,
                           double z, double phi);

} // namespace raman
