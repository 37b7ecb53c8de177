#include "raman/schmidt.hpp"
#include "raman/constants.hpp"
#include "raman/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#define LAPACK_COMPLEX_CPP
#include <complex>
#include <lapacke.h>

namespace raman {

namespace {

struct Axis {
  std::vector<double> x, w;
};

Axis uniform_trap(int n, double half_width) {
  if (n < 2)
    throw std::invalid_argument("frequency axes need at least 2 nodes");
  Axis a;
  a.x.resize(n);
  a.w.resize(n);
  double step = 2.0 * half_width / (n - 1);
  for (int i = 0; i < n; ++i)
    a.x[i] = -half_width + step * i;
  for (int i = 0; i < n; ++i)
    a.w[i] = (i == 0 || i == n - 1) ? step / 2.0 : step;
  return a;
}

// delta = (gamma/2) tan(t) with t uniform: node density follows the
// Lorentzian so linewidths far below any uniform step stay integrable
Axis lorentz_tan_axis(int n, double half_width, double gamma) {
  Axis a;
  a.x.resize(n);
  a.w.resize(n);
  double tmax = std::atan(2.0 * half_width / gamma);
  double step = 2.0 * tmax / (n - 1);
  for (int i = 0; i < n; ++i) {
    double t = -tmax + step * i;
    double sec = 1.0 / std::cos(t);
    a.x[i] = 0.5 * gamma * std::tan(t);
    double jac = 0.5 * gamma * sec * sec;
    a.w[i] = jac * ((i == 0 || i == n - 1) ? step / 2.0 : step);
  }
  return a;
}

// Row-major m x n buffer read as column-major is the transpose, which has
// the same singular values; this also spares LAPACKE its transpose copy.
std::vector<double> singular_values(std::vector<cdouble>& a, int m, int n) {
  std::vector<double> s(std::min(m, n));
  lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', n, m,
                                   reinterpret_cast<lapack_complex_double*>(a.data()), n,
                                   s.data(), nullptr, 1, nullptr, 1);
  if (info != 0)
    throw std::runtime_error("zgesdd failed to converge (info " + std::to_string(info) + ")");
  return s;
}

// Same trick: the transpose of a Hermitian matrix is its conjugate, with
// identical (real) eigenvalues.
std::vector<double> hermitian_eigenvalues(std::vector<cdouble>& a, int n) {
  std::vector<double> w(n);
  lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n,
                                   reinterpret_cast<lapack_complex_double*>(a.data()), n,
                                   w.data());
  if (info != 0)
    throw std::runtime_error("zheevd failed (info " + std::to_string(info) + ")");
  return w;
}

// lambdas from singular values: truncate the numerical null space, normalize
void fill_from_sigmas(SchmidtReport& r, std::vector<double> sig) {
  std::sort(sig.begin(), sig.end(), std::greater<double>());
  double smax = sig.empty() ? 0.0 : sig.front();
  double tot = 0.0;
  r.lambdas.clear();
  for (double s : sig) {
    if (s < 1e-14 * smax)
      break;
    r.lambdas.push_back(s * s);
    tot += s * s;
  }
  double p = 0.0;
  for (double& l : r.lambdas) {
    l /= tot;
    p += l * l;
  }
  r.purity = p;
  r.purity_spectral = p;
  r.mode_number = 1.0 / p;
  r.g2_predicted = 1.0 + p;
}

double mode_cos_phi(const PairContext& ctx) {
  switch (ctx.geom.mode) {
  case GeometryMode::OneD_Forward: return 1.0;
  case GeometryMode::OneD_Backward: return -1.0;
  case GeometryMode::ThreeD_Collinear: return 1.0;
  case GeometryMode::ThreeD_OffAxis: return std::cos(ctx.geom.angle_phi);
  }
  return 1.0;
}

// phase mismatch about the carriers: k(w_p0+nu+delta) - cphi k(w_s0+nu),
// measured relative to its value at nu = delta = 0
double lambda_phase(const PairContext& ctx, double cphi, double nu, double delta) {
  return wavevector(ctx.medium, ctx.omega_p0 + nu + delta) -
         cphi * wavevector(ctx.medium, ctx.omega_s0 + nu) -
         (ctx.k_p0 - cphi * ctx.k_s0);
}

double freq_half_window(const PairContext& ctx, const QuadratureGrid& g) {
  return g.window_factor * (ctx.line.gamma + 2.0 * ctx.pump.sigma());
}

Axis delta_axis(const PairContext& ctx, const QuadratureGrid& g, double w) {
  if (g.delta_tan_map)
    return lorentz_tan_axis(g.n_delta, w, ctx.line.gamma);
  return uniform_trap(g.n_delta, w);
}

struct ZGrid {
  std::vector<double> z, w;  // nodes and quadrature weights
  std::vector<double> a;     // apodization weight at the nodes, max-normalized
};

// Gauss-Legendre z panels. 3D geometries spend most nodes inside the
// apodization core when it is much shorter than the crystal.
ZGrid z_panels(const PairContext& ctx, const QuadratureGrid& g, double phi, bool is3d) {
  double L = ctx.geom.length;
  ZGrid out;
  auto append = [&](double a, double b, int n) {
    Nodes gl = gauss_legendre(n, a, b);
    out.z.insert(out.z.end(), gl.x.begin(), gl.x.end());
    out.w.insert(out.w.end(), gl.w.begin(), gl.w.end());
  };
  if (!is3d) {
    append(-L / 2.0, L / 2.0, g.n_z);
    out.a.assign(out.z.size(), 1.0);
    return out;
  }
  if (g.n_z == 1) {
    append(-L / 2.0, L / 2.0, 1);
    out.a.assign(1, 1.0);
    return out;
  }
  double fw = alpha_fwhm(ctx, phi);
  if (12.0 * fw >= L / 2.0 || g.n_z < 4) {
    append(-L / 2.0, L / 2.0, std::max(1, 3 * g.n_z));
  } else {
    append(-L / 2.0, -12.0 * fw, std::max(2, g.n_z / 2));
    append(-12.0 * fw, 12.0 * fw, 2 * g.n_z);
    append(12.0 * fw, L / 2.0, std::max(2, g.n_z / 2));
  }
  double la0 = log_alpha_offaxis(ctx, 0.0, phi);
  out.a.resize(out.z.size());
  for (size_t i = 0; i < out.z.size(); ++i)
    out.a[i] = std::exp(log_alpha_offaxis(ctx, out.z[i], phi) - la0);
  return out;
}

SchmidtReport svd_engine(const PairContext& ctx, const QuadratureGrid& g, double cphi,
                         double phi, bool is3d, cdouble scale) {
  double w = freq_half_window(ctx, g);
  Axis nu = uniform_trap(g.n_nu, w);
  Axis dl = delta_axis(ctx, g, w);
  ZGrid zg = z_panels(ctx, g, phi, is3d);
  const int nz = static_cast<int>(zg.z.size());
  const int ncol = g.n_delta * nz;

  std::vector<double> sqz(nz);
  for (int k = 0; k < nz; ++k)
    sqz[k] = std::sqrt(zg.w[k] * zg.a[k]);

  std::vector<cdouble> m(static_cast<size_t>(g.n_nu) * ncol);
  for (int i = 0; i < g.n_nu; ++i) {
    double sni = std::sqrt(nu.w[i]);
    for (int j = 0; j < g.n_delta; ++j) {
      double lam = lambda_phase(ctx, cphi, nu.x[i], dl.x[j]);
      double amp = pump_amplitude(ctx.pump, ctx.omega_p0 + nu.x[i] + dl.x[j]) *
                   lineshape_g(ctx.line, ctx.line.omega0 + dl.x[j]) * sni *
                   std::sqrt(dl.w[j]);
      cdouble* row = &m[static_cast<size_t>(i) * ncol + static_cast<size_t>(j) * nz];
      for (int k = 0; k < nz; ++k)
        row[k] = scale * amp * sqz[k] * std::exp(cdouble(0.0, lam * zg.z[k]));
    }
  }

  SchmidtReport r;
  r.grid = g;
  r.engine = "svd";
  r.z_method = "gauss-legendre";
  fill_from_sigmas(r, singular_values(m, g.n_nu, ncol));
  return r;
}

// z-integral J(dLam) = integral a(z) exp(i dLam z) dz for the gram engines,
// either analytic (uniform weight) or a dense-grid Filon table
struct ZTransform {
  bool analytic = false;
  double length = 0.0;
  double lam_max = 0.0, step = 0.0;
  std::vector<double> re, im;
  double j0 = 0.0;

  cdouble operator()(double lam) const {
    if (analytic) {
      double x = lam * length / 2.0;
      return length * (x == 0.0 ? 1.0 : std::sin(x) / x);
    }
    double t = (lam + lam_max) / step;
    if (t < 0.0 || t > static_cast<double>(re.size() - 1))
      throw std::runtime_error("z-transform table exceeded; phase-mismatch range "
                               "larger than measured bound");
    size_t i = std::min(static_cast<size_t>(t), re.size() - 2);
    double f = t - static_cast<double>(i);
    return cdouble(re[i] + f * (re[i + 1] - re[i]), im[i] + f * (im[i + 1] - im[i]));
  }
};

SchmidtReport gram_engine(const PairContext& ctx, const QuadratureGrid& g, double cphi,
                          double phi, bool is3d, cdouble scale) {
  double L = ctx.geom.length;
  double w = freq_half_window(ctx, g);
  double g_eff = std::abs(ctx.beta_p0 - cphi * ctx.beta_s0);

  // apodization support and the z-integral
  ZTransform zt;
  double span = L;
  std::vector<double> zn;  // Filon nodes (3D)
  std::vector<double> az;
  double la0 = 0.0;
  if (!is3d) {
    zt.analytic = true;
    zt.length = L;
    zt.j0 = L;
  } else {
    double fw = alpha_fwhm(ctx, phi);
    span = std::min(L, 24.0 * fw);
    int nz = 16 * g.n_z;
    if (12.0 * fw >= L / 2.0) {
      for (int i = 0; i < nz; ++i)
        zn.push_back(-L / 2.0 + L * i / (nz - 1));
    } else {
      for (int i = 0; i < std::max(2, nz / 4); ++i)
        zn.push_back(-L / 2.0 + L * i / (std::max(2, nz / 4) - 1));
      for (int i = 0; i < nz; ++i)
        zn.push_back(-12.0 * fw + 24.0 * fw * i / (nz - 1));
      std::sort(zn.begin(), zn.end());
      zn.erase(std::unique(zn.begin(), zn.end()), zn.end());
    }
    la0 = log_alpha_offaxis(ctx, 0.0, phi);
    az.resize(zn.size());
    for (size_t i = 0; i < zn.size(); ++i)
      az[i] = std::exp(log_alpha_offaxis(ctx, zn[i], phi) - la0);
  }

  double umax = std::min(2.0 * w, 40.0 * two_pi / (span * std::max(g_eff, 1e-30)));
  Axis u = uniform_trap(g.n_u, umax);
  Axis nb = uniform_trap(g.n_nu, w);
  Axis dl = delta_axis(ctx, g, w);

  if (is3d) {
    // measure the needed dLam range at the extremes, then build the table
    double lmax = 0.0;
    for (double uu : {umax, -umax})
      for (double nbv : {-w, 0.0, w})
        for (double dd : {-w, 0.0, w}) {
          double l1 = lambda_phase(ctx, cphi, nbv + uu / 2.0, dd);
          double l2 = lambda_phase(ctx, cphi, nbv - uu / 2.0, dd);
          lmax = std::max(lmax, std::abs(l1 - l2));
        }
    lmax = 1.05 * lmax + 4.0 * two_pi / span;
    double step = (two_pi / span) / 64.0;
    size_t nl = static_cast<size_t>(2.0 * lmax / step) + 2;
    std::vector<cdouble> fz(az.size());
    for (size_t i = 0; i < az.size(); ++i)
      fz[i] = az[i];
    zt.lam_max = lmax;
    zt.step = 2.0 * lmax / static_cast<double>(nl - 1);
    zt.re.resize(nl);
    zt.im.resize(nl);
    for (size_t i = 0; i < nl; ++i) {
      cdouble v = filon_linear(zn, fz, -lmax + zt.step * static_cast<double>(i));
      zt.re[i] = v.real();
      zt.im[i] = v.imag();
    }
    zt.j0 = filon_linear(zn, fz, 0.0).real();
  }

  // weights |E g|^2 on the (nu, delta) grid; scale drops out of the ratio
  // but is applied anyway so the invariance holds mechanically
  double s2 = std::norm(scale);

  // Tr rho
  double tr = 0.0;
  for (int i = 0; i < g.n_nu; ++i)
    for (int j = 0; j < g.n_delta; ++j) {
      double a = pump_amplitude(ctx.pump, ctx.omega_p0 + nb.x[i] + dl.x[j]) *
                 lineshape_g(ctx.line, ctx.line.omega0 + dl.x[j]);
      tr += nb.w[i] * dl.w[j] * a * a * s2;
    }
  tr *= zt.j0;

  // Tr rho^2 over the resolved frequency-difference axis
  std::vector<double> gd(g.n_delta), wd(g.n_delta);
  for (int j = 0; j < g.n_delta; ++j) {
    gd[j] = lineshape_g(ctx.line, ctx.line.omega0 + dl.x[j]);
    wd[j] = dl.w[j];
  }
  double tr2 = 0.0;
  for (int iu = 0; iu < g.n_u; ++iu) {
    double uu = u.x[iu];
    double acc_nu = 0.0;
    for (int i = 0; i < g.n_nu; ++i) {
      double n1 = nb.x[i] + uu / 2.0, n2 = nb.x[i] - uu / 2.0;
      double ks1 = wavevector(ctx.medium, ctx.omega_s0 + n1);
      double ks2 = wavevector(ctx.medium, ctx.omega_s0 + n2);
      double ks_diff = cphi * (ks1 - ks2);
      cdouble gm = 0.0;
      for (int j = 0; j < g.n_delta; ++j) {
        double kp1 = wavevector(ctx.medium, ctx.omega_p0 + n1 + dl.x[j]);
        double kp2 = wavevector(ctx.medium, ctx.omega_p0 + n2 + dl.x[j]);
        double dlam = (kp1 - kp2) - ks_diff;
        double a = pump_amplitude(ctx.pump, ctx.omega_p0 + n1 + dl.x[j]) *
                   pump_amplitude(ctx.pump, ctx.omega_p0 + n2 + dl.x[j]) * gd[j] * gd[j];
        gm += wd[j] * a * zt(dlam);
      }
      gm *= s2;
      acc_nu += nb.w[i] * std::norm(gm);
    }
    tr2 += u.w[iu] * acc_nu;
  }

  SchmidtReport r;
  r.grid = g;
  r.engine = is3d ? "gram-filon" : "gram-sinc";
  r.z_method = is3d ? "filon-interp" : "analytic-sinc";
  r.purity = tr2 / (tr * tr);
  r.mode_number = 1.0 / r.purity;
  r.g2_predicted = 1.0 + r.purity;

  // Diagnostic spectrum from the z-side correlation kernel. Resolving the
  // fastest phase beat can need more nodes than the cap; the flag says so.
  {
    double lam_lo = 0.0, lam_hi = 0.0;
    for (double nbv : {-w, 0.0, w})
      for (double dd : {-w, 0.0, w}) {
        double l = lambda_phase(ctx, cphi, nbv, dd);
        lam_lo = std::min(lam_lo, l);
        lam_hi = std::max(lam_hi, l);
      }
    int required = static_cast<int>(std::ceil(4.0 * (lam_hi - lam_lo) * L / two_pi)) + 8;
    int nzs = std::min(std::max(256, required), g.n_z_spectrum);
    r.spectrum_resolved = required <= nzs;

    Axis zt_ax = uniform_trap(nzs, L / 2.0);
    std::vector<double> wz(nzs);
    if (is3d) {
      for (int i = 0; i < nzs; ++i)
        wz[i] = zt_ax.w[i] * std::exp(log_alpha_offaxis(ctx, zt_ax.x[i], phi) - la0);
    } else {
      wz = zt_ax.w;
    }
    double dz = L / (nzs - 1);
    // stationary correlation c(m dz) accumulated by phase recurrence
    std::vector<cdouble> corr(nzs, cdouble(0.0, 0.0));
    for (int i = 0; i < g.n_nu; ++i)
      for (int j = 0; j < g.n_delta; ++j) {
        double a = pump_amplitude(ctx.pump, ctx.omega_p0 + nb.x[i] + dl.x[j]) * gd[j];
        double wgt = nb.w[i] * wd[j] * a * a;
        double lam = lambda_phase(ctx, cphi, nb.x[i], dl.x[j]);
        cdouble rot = std::exp(cdouble(0.0, lam * dz));
        cdouble ph = wgt;
        for (int mm = 0; mm < nzs; ++mm) {
          corr[mm] += ph;
          ph *= rot;
        }
      }
    std::vector<cdouble> cmat(static_cast<size_t>(nzs) * nzs);
    for (int i = 0; i < nzs; ++i)
      for (int j = 0; j < nzs; ++j) {
        cdouble c = (j >= i) ? corr[j - i] : std::conj(corr[i - j]);
        cmat[static_cast<size_t>(i) * nzs + j] = std::sqrt(wz[i] * wz[j]) * c;
      }
    std::vector<double> ev = hermitian_eigenvalues(cmat, nzs);
    std::sort(ev.begin(), ev.end(), std::greater<double>());
    double tot = 0.0;
    for (double& e : ev) {
      if (e < 0.0)
        e = 0.0;
      tot += e;
    }
    r.lambdas.clear();
    double ps = 0.0;
    for (double e : ev) {
      if (e <= 0.0 || e < 1e-28 * ev.front())
        break;
      double l = e / tot;
      r.lambdas.push_back(l);
      ps += l * l;
    }
    r.purity_spectral = ps;
  }
  return r;
}

} // namespace

SchmidtReport schmidt_from_matrix(const Eigen::MatrixXcd& mat) {
  std::vector<cdouble> a(mat.rows() * mat.cols());
  for (Eigen::Index i = 0; i < mat.rows(); ++i)
    for (Eigen::Index j = 0; j < mat.cols(); ++j)
      a[static_cast<size_t>(i) * mat.cols() + j] = mat(i, j);
  SchmidtReport r;
  r.engine = "svd";
  r.z_method = "none";
  fill_from_sigmas(r, singular_values(a, static_cast<int>(mat.rows()),
                                      static_cast<int>(mat.cols())));
  return r;
}

SchmidtReport purity_energy(const PairContext& ctx, const QuadratureGrid& g) {
  double w = freq_half_window(ctx, g);
  Axis nu = uniform_trap(g.n_nu, w);
  Axis dl = delta_axis(ctx, g, w);
  std::vector<cdouble> m(static_cast<size_t>(g.n_nu) * g.n_delta);
  for (int i = 0; i < g.n_nu; ++i)
    for (int j = 0; j < g.n_delta; ++j)
      m[static_cast<size_t>(i) * g.n_delta + j] =
          std::sqrt(nu.w[i] * dl.w[j]) *
          pump_amplitude(ctx.pump, ctx.omega_p0 + nu.x[i] + dl.x[j]) *
          lineshape_g(ctx.line, ctx.line.omega0 + dl.x[j]);
  SchmidtReport r;
  r.grid = g;
  r.engine = "svd";
  r.z_method = "none";
  fill_from_sigmas(r, singular_values(m, g.n_nu, g.n_delta));
  return r;
}

SchmidtReport purity_momentum(const PairContext& ctx, const QuadratureGrid& g) {
  double w = freq_half_window(ctx, g);
  double L = ctx.geom.length;
  Axis nu = uniform_trap(g.n_nu, w);
  double wk = std::abs(ctx.beta_p0 - ctx.beta_s0) * w + 10.0 * two_pi / L;
  Axis kap = uniform_trap(g.n_kappa, wk);
  // copropagating phase matching about the forward carrier
  double kce_fwd = ctx.k_p0 - ctx.k_s0;
  std::vector<cdouble> m(static_cast<size_t>(g.n_nu) * g.n_kappa);
  for (int i = 0; i < g.n_nu; ++i) {
    double dk = wavevector(ctx.medium, ctx.omega_p0 + nu.x[i]) -
                wavevector(ctx.medium, ctx.omega_s0 + nu.x[i]) - kce_fwd;
    double amp = pump_amplitude(ctx.pump, ctx.omega_p0 + nu.x[i]) * std::sqrt(nu.w[i]);
    for (int k = 0; k < g.n_kappa; ++k) {
      double x = (dk - kap.x[k]) * L / 2.0;
      m[static_cast<size_t>(i) * g.n_kappa + k] =
          amp * std::sqrt(kap.w[k]) * (x == 0.0 ? 1.0 : std::sin(x) / x);
    }
  }
  SchmidtReport r;
  r.grid = g;
  r.engine = "svd";
  r.z_method = "none";
  fill_from_sigmas(r, singular_values(m, g.n_nu, g.n_kappa));
  return r;
}

SchmidtReport purity_total(const PairContext& ctx, const QuadratureGrid& g,
                           cdouble kernel_scale) {
  bool is3d = ctx.geom.is_3d();
  double phi = ctx.geom.mode == GeometryMode::ThreeD_OffAxis ? ctx.geom.angle_phi : 0.0;
  double cphi = mode_cos_phi(ctx);
  double g_eff = std::abs(ctx.beta_p0 - cphi * ctx.beta_s0);
  double span = ctx.geom.length;
  if (is3d)
    span = std::min(span, 24.0 * alpha_fwhm(ctx, phi));
  double w = freq_half_window(ctx, g);
  double phase = g_eff * w * span / 2.0;
  if (phase < 40.0 * pi || g.n_z <= 1)
    return svd_engine(ctx, g, cphi, phi, is3d, kernel_scale);
  return gram_engine(ctx, g, cphi, phi, is3d, kernel_scale);
}

SchmidtReport refine_until_converged(const PairContext& ctx, QuadratureGrid grid,
                                     double tol, int max_steps) {
  SchmidtReport cur = purity_total(ctx, grid);
  cur.refinement_history.push_back(
      {grid.n_nu, grid.n_delta, grid.n_z, grid.window_factor, cur.purity});
  double prev = cur.purity;
  for (int step = 0; step < max_steps; ++step) {
    QuadratureGrid next = grid;
    if (step % 2 == 0) {
      next.n_nu *= 2;
      next.n_delta *= 2;
      next.n_z = static_cast<int>(std::ceil(1.5 * next.n_z));
      next.n_u = 2 * next.n_u - 1;
    } else {
      next.window_factor *= 1.5;
    }
    if (static_cast<long long>(next.n_nu) * next.n_delta * std::max(next.n_z, 1) >
        (1LL << 26)) {
      cur.converged = false;
      return cur;
    }
    SchmidtReport r = purity_total(ctx, next);
    r.refinement_history = cur.refinement_history;
    r.refinement_history.push_back(
        {next.n_nu, next.n_delta, next.n_z, next.window_factor, r.purity});
    grid = next;
    bool ok = std::abs(r.purity - prev) < tol;
    prev = r.purity;
    cur = r;
    if (ok) {
      cur.converged = true;
      return cur;
    }
  }
  cur.converged = false;
  return cur;
}

} // namespace raman
