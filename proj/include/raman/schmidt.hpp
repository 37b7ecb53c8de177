#pragma once
#include "raman/jointamp.hpp"

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace raman {

// Discretization knobs for the purity engines. Frequency axes are uniform
// trapezoid grids over +- window_factor * (Gamma + 2 sigma); z axes are
// engine-specific (Gauss-Legendre panels, or closed-form/Filon integrals for
// fast-phase geometries).
struct QuadratureGrid {
  int n_nu = 256;    // photon detuning axis
  int n_delta = 256; // vibrational detuning axis
  int n_z = 48;      // base z count; 3D panels use (n_z/2, 2 n_z, n_z/2)
  int n_kappa = 512; // CE-momentum axis of the momentum-mechanism kernel
  int n_u = 1025;    // frequency-difference axis of the fast-phase engines
  double window_factor = 5.0;
  int n_z_spectrum = 1024; // cap for the diagnostic spectrum of fast-phase runs
  // Switch the delta axis to a Lorentzian-adapted tangent map. Needed when
  // the linewidth is far below the axis step (momentum-only surrogate runs).
  bool delta_tan_map = false;
};

struct RefineStep {
  int n_nu = 0, n_delta = 0, n_z = 0;
  double window_factor = 0.0;
  double purity = 0.0;
};

struct SchmidtReport {
  // normalized Schmidt coefficients, descending. For fast-phase engines this
  // list is a bounded-resolution diagnostic (see spectrum_resolved) while
  // purity comes from the resolved correlation integral.
  std::vector<double> lambdas;
  double purity = 0.0;
  double mode_number = 0.0;  // K = 1/P
  double g2_predicted = 0.0; // 1 + P
  QuadratureGrid grid;
  std::string engine;   // "svd" | "gram-sinc" | "gram-filon"
  std::string z_method; // "none" | "gauss-legendre" | "analytic-sinc" | "filon-interp"
  bool converged = true;
  bool spectrum_resolved = true;
  double purity_spectral = 0.0; // sum lambda_i^2 of the reported spectrum
  std::vector<RefineStep> refinement_history;
};

// Purity of the discrete Schmidt problem for an explicit kernel matrix
// (rows: photon index, columns: environment index), via singular values.
SchmidtReport schmidt_from_matrix(const Eigen::MatrixXcd& m);

// Energy-mechanism purity: kernel E(nu + delta) g(delta), no z structure.
SchmidtReport purity_energy(const PairContext& ctx, const QuadratureGrid& grid);

// Momentum-mechanism purity: kernel E(nu) sinc[(L/2)(dk(nu) - kappa)] on a
// CE-momentum axis of half-width |beta_p - beta_s| W + 10 * 2 pi / L.
SchmidtReport purity_momentum(const PairContext& ctx, const QuadratureGrid& grid);

// Full purity for the context's geometry. Slow-phase geometries run the
// weighted-kernel SVD over (nu; delta, z). Fast-phase geometries (backward,
// wide off-axis angles) integrate the z-dependence per matrix element in
// closed form (1D: analytic sinc) or by Filon quadrature of the apodization
// weight (3D), with purity from the resolved two-frequency correlation
// integral; the engine choice is recorded in the report.
//
// kernel_scale multiplies the whole kernel; any fixed complex constant must
// leave the reported purity unchanged.
SchmidtReport purity_total(const PairContext& ctx, const QuadratureGrid& grid,
                           cdouble kernel_scale = cdouble(1.0, 0.0));

// Alternately doubles the frequency axes, grows n_z by 1.5x, and widens the
// windows by 1.5x until |delta P| < tol between consecutive refinements or
// the step/size budget runs out (converged = false then).
SchmidtReport refine_until_converged(const PairContext& ctx, QuadratureGrid grid,
                                     double tol, int max_steps = 6);

} // namespace raman
