#include "raman/jointamp.hpp"
#include "raman/constants.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace raman {

const char* geometry_mode_name(GeometryMode m) {
  switch (m) {
  case GeometryMode::OneD_Forward: return "forward-1d";
  case GeometryMode::OneD_Backward: return "backward-1d";
  case GeometryMode::ThreeD_Collinear: return "collinear-3d";
  case GeometryMode::ThreeD_OffAxis: return "offaxis-3d";
  }
  return "?";
}

GeometryMode geometry_mode_from_name(const std::string& s) {
  if (s == "forward-1d") return GeometryMode::OneD_Forward;
  if (s == "backward-1d") return GeometryMode::OneD_Backward;
  if (s == "collinear-3d") return GeometryMode::ThreeD_Collinear;
  if (s == "offaxis-3d") return GeometryMode::ThreeD_OffAxis;
  throw std::invalid_argument(
      "unknown geometry mode '" + s +
      "' (expected forward-1d, backward-1d, collinear-3d or offaxis-3d)");
}

void validate_geometry(const GeometrySpec& g) {
  if (!(g.length > 0.0))
    throw std::invalid_argument("geometry.length must be positive");
  if (g.is_3d()) {
    if (!(g.waist_wp > 0.0))
      throw std::invalid_argument("geometry.waist_wp missing or non-positive "
                                  "(required for 3D modes)");
    if (!(g.waist_wf > 0.0))
      throw std::invalid_argument("geometry.waist_wf missing or non-positive "
                                  "(required for 3D modes)");
  }
  if (g.mode == GeometryMode::ThreeD_OffAxis) {
    if (!(g.angle_phi >= 0.0 && g.angle_phi <= pi))
      throw std::invalid_argument("geometry.angle_phi must lie in [0, pi]");
  }
}

GeometrySpec geometry_from_fresnel(GeometryMode mode, double length, double angle_phi,
                                   double fresnel, double k_p0, double k_s0) {
  if (!(fresnel > 0.0))
    throw std::invalid_argument("geometry.fresnel_number must be positive");
  GeometrySpec g;
  g.mode = mode;
  g.length = length;
  g.angle_phi = angle_phi;
  double zr = fresnel * length / 2.0;
  g.waist_wp = std::sqrt(2.0 * zr / k_p0);
  g.waist_wf = std::sqrt(2.0 * zr / k_s0);
  return g;
}

PairContext make_pair_context(const Medium& medium, const PumpSpec& pump,
                              const GeometrySpec& geom) {
  if (!(pump.center_wavelength > 0.0))
    throw std::invalid_argument("pump.center_wavelength must be positive");
  if (!(pump.intensity_fwhm > 0.0))
    throw std::invalid_argument("pump.intensity_fwhm must be positive");
  if (!(medium.raman_shift > 0.0) || !(medium.raman_fwhm > 0.0))
    throw std::invalid_argument("medium needs positive raman_shift and linewidth");
  validate_geometry(geom);

  PairContext ctx;
  ctx.medium = medium;
  ctx.pump = pump;
  ctx.line = Lineshape{medium.raman_shift, medium.raman_fwhm};
  ctx.geom = geom;
  ctx.omega_p0 = pump.omega0();
  ctx.omega_s0 = ctx.omega_p0 - medium.raman_shift;
  if (!(ctx.omega_s0 > 0.0))
    throw std::invalid_argument("Stokes center frequency is not positive");
  ctx.k_p0 = wavevector(medium, ctx.omega_p0);
  ctx.k_s0 = wavevector(medium, ctx.omega_s0);
  ctx.beta_p0 = inverse_group_velocity(medium, ctx.omega_p0);
  ctx.beta_s0 = inverse_group_velocity(medium, ctx.omega_s0);
  ctx.k_ce0 = (geom.mode == GeometryMode::OneD_Backward) ? ctx.k_p0 + ctx.k_s0
                                                         : ctx.k_p0 - ctx.k_s0;
  if (geom.is_3d()) {
    ctx.z_rp = ctx.k_p0 * geom.waist_wp * geom.waist_wp / 2.0;
    ctx.z_rf = ctx.k_s0 * geom.waist_wf * geom.waist_wf / 2.0;
  }
  return ctx;
}

namespace {

const cdouble I(0.0, 1.0);

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// shared quadratic-form pieces of the off-axis overlap
struct BeamParts {
  double c, s;
  cdouble ap, G, Dx, Dy;
};

BeamParts beam_parts(const PairContext& ctx, double z, double phi) {
  BeamParts p;
  p.c = std::cos(phi);
  p.s = std::sin(phi);
  double wp2 = ctx.geom.waist_wp * ctx.geom.waist_wp;
  double wf2 = ctx.geom.waist_wf * ctx.geom.waist_wf;
  p.ap = cdouble(wp2 / 4.0, z / (2.0 * ctx.k_p0));
  p.G = cdouble(wf2 / 4.0, -p.c * z / (2.0 * ctx.k_s0));
  p.Dx = p.ap * (p.c * p.c) + p.G;
  p.Dy = p.ap * (2.0 * p.c * p.c - 1.0) + p.G;
  return p;
}

void require_3d(const PairContext& ctx, const char* op) {
  if (!ctx.geom.is_3d())
    throw std::invalid_argument(std::string(op) + " needs a 3D geometry with waists");
}

} // namespace

cdouble f1d_forward(const PairContext& ctx, double omega_s, double Omega, double z) {
  double amp = pump_amplitude(ctx.pump, omega_s + Omega) * lineshape_g(ctx.line, Omega);
  double ph = (wavevector(ctx.medium, omega_s + Omega) - wavevector(ctx.medium, omega_s)) * z;
  return amp * std::exp(I * ph);
}

cdouble f1d_backward(const PairContext& ctx, double omega_s, double Omega, double z) {
  double amp = pump_amplitude(ctx.pump, omega_s + Omega) * lineshape_g(ctx.line, Omega);
  double ph = (wavevector(ctx.medium, omega_s + Omega) + wavevector(ctx.medium, omega_s)) * z;
  return amp * std::exp(I * ph);
}

cdouble f1d_kspace(const PairContext& ctx, double omega_s, double Omega, double k_ce) {
  double amp = pump_amplitude(ctx.pump, omega_s + Omega) * lineshape_g(ctx.line, Omega);
  double mis = wavevector(ctx.medium, omega_s + Omega) - wavevector(ctx.medium, omega_s) - k_ce;
  return amp * sinc(ctx.geom.length / 2.0 * mis);
}

cdouble f_energy(const PairContext& ctx, double omega_s, double Omega) {
  return pump_amplitude(ctx.pump, omega_s + Omega) * lineshape_g(ctx.line, Omega);
}

cdouble f_momentum(const PairContext& ctx, double omega_s, double k_ce) {
  double omega_p = omega_s + ctx.line.omega0;
  double amp = pump_amplitude(ctx.pump, omega_p);
  double mis = wavevector(ctx.medium, omega_p) - wavevector(ctx.medium, omega_s) - k_ce;
  return amp * sinc(ctx.geom.length / 2.0 * mis);
}

cdouble log_beta_offaxis(const PairContext& ctx, double qx, double qy, double z,
                         double phi) {
  require_3d(ctx, "log_beta_offaxis");
  BeamParts p = beam_parts(ctx, z, phi);
  cdouble Cx = p.ap * (p.ap * p.s * p.s - p.G) / p.Dx;
  double u = qy - ctx.k_s0 * p.s;
  cdouble quad = Cx * (qx * qx) - p.ap * (u * u);
  cdouble t = 2.0 * p.ap * p.c * u + I * (z * p.s);
  quad += t * t / (4.0 * p.Dy);
  return quad - std::log(-2.0 * I * std::sqrt(p.Dx) * std::sqrt(p.Dy));
}

cdouble beta_offaxis(const PairContext& ctx, double qx, double qy, double z, double phi) {
  return std::exp(log_beta_offaxis(ctx, qx, qy, z, phi));
}

double log_alpha_offaxis(const PairContext& ctx, double z, double phi) {
  require_3d(ctx, "log_alpha_offaxis");
  BeamParts p = beam_parts(ctx, z, phi);
  cdouble Cx = p.ap * (p.ap * p.s * p.s - p.G) / p.Dx;
  double ax = -2.0 * Cx.real();
  cdouble k2 = -p.ap + (p.ap * p.c) * (p.ap * p.c) / p.Dy;
  cdouble k1 = p.ap * p.c * I * (z * p.s) / p.Dy;
  cdouble k0 = -(z * p.s) * (z * p.s) / (4.0 * p.Dy);
  double ay = -2.0 * k2.real();
  double by = 2.0 * k1.real();
  double c0 = 2.0 * k0.real();
  if (!(ax > 0.0) || !(ay > 0.0)) {
    std::ostringstream os;
    os << "collection integral diverges at phi = " << phi
       << " (w_f^2 <= w_p^2 (1 - 2 cos^2 phi)); apodization undefined";
    throw std::domain_error(os.str());
  }
  return 0.5 * std::log(pi / ax) + 0.5 * std::log(pi / ay) + c0 + by * by / (4.0 * ay) -
         std::log(4.0 * std::abs(p.Dx) * std::abs(p.Dy));
}

double alpha_offaxis(const PairContext& ctx, double z, double phi) {
  return std::exp(log_alpha_offaxis(ctx, z, phi));
}

cdouble beta_collinear(const PairContext& ctx, double qx, double qy, double z) {
  require_3d(ctx, "beta_collinear");
  BeamParts p = beam_parts(ctx, z, 0.0);
  cdouble denom = p.ap + p.G;
  double q2 = qx * qx + qy * qy;
  return std::exp(-p.ap * p.G / denom * q2) / (-2.0 * I * denom);
}

double alpha_collinear(const PairContext& ctx, double z) {
  require_3d(ctx, "alpha_collinear");
  double wp = ctx.geom.waist_wp, wf = ctx.geom.waist_wf;
  double tf = (z * z + ctx.z_rf * ctx.z_rf) / (wf * ctx.k_s0 * wf * ctx.k_s0);
  double tp = (z * z + ctx.z_rp * ctx.z_rp) / (wp * ctx.k_p0 * wp * ctx.k_p0);
  return 8.0 * pi * pi * pi / (wp * wp * wf * wf) / (tf + tp);
}

double alpha_fwhm(const PairContext& ctx, double phi) {
  // Locate the maximizing z first (golden section); the peak sits at z = 0
  // for symmetric cases but shifts slightly once sin(phi)*z terms bite.
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = -0.5, b = 0.5;
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  double f1 = log_alpha_offaxis(ctx, c1, phi), f2 = log_alpha_offaxis(ctx, c2, phi);
  for (int it = 0; it < 200; ++it) {
    if (f1 > f2) {
      b = c2; c2 = c1; f2 = f1;
      c1 = b - gr * (b - a); f1 = log_alpha_offaxis(ctx, c1, phi);
    } else {
      a = c1; c1 = c2; f1 = f2;
      c2 = a + gr * (b - a); f2 = log_alpha_offaxis(ctx, c2, phi);
    }
  }
  double zs = 0.5 * (a + b);
  double la0 = log_alpha_offaxis(ctx, zs, phi);
  double total = 0.0;
  for (double sgn : {1.0, -1.0}) {
    double lo = 0.0, hi = 50.0; // meters; alpha has decayed by far at 50 m
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      if (log_alpha_offaxis(ctx, zs + sgn * mid, phi) - la0 + std::log(2.0) > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    total += 0.5 * (lo + hi);
  }
  return total;
}

cdouble offaxis_longitudinal_phase(const PairContext& ctx, double omega_s, double z,
                                   double phi) {
  double ks = wavevector(ctx.medium, omega_s);
  return std::exp(I * (ks * (1.0 - std::cos(phi)) * z));
}

cdouble log_mu_paraxial_oracle(const PairContext& ctx, double omega_s, double qsx,
                               double qsy, double Omega, double qcex, double qcey,
                               double z, double phi) {
  require_3d(ctx, "mu_paraxial_oracle");
  double kp = wavevector(ctx.medium, omega_s + Omega);
  double ks = wavevector(ctx.medium, omega_s);
  double c = std::cos(phi), s = std::sin(phi);
  double wp2 = ctx.geom.waist_wp * ctx.geom.waist_wp;
  double px = qsx + qcex;        // pump transverse momentum, x
  double py = qsy * c + qcey;    // pump transverse momentum, y
  double qs2 = qsx * qsx + qsy * qsy;
  cdouble e = 0.0;
  e += -(wp2 / 4.0) * (px * px);
  e += -(wp2 / 4.0) * (py * py);
  e += -(wp2 / 4.0) * (ks * ks - qs2) * s * s;
  e += (wp2 / 2.0) * ks * py * s;
  e += -I * (px * px) / (2.0 * kp) * z;
  e += -I * (py * py) / (2.0 * kp) * z;
  e += -I * (ks * ks - qs2) * s * s / (2.0 * kp) * z;
  e += I * ks * py * s / kp * z;
  e += I * (qs2 * c / (2.0 * ks) - qsy * s) * z;
  e += I * ks * (1.0 - c) * z;
  return e;
}

cdouble mu_paraxial_oracle(const PairContext& ctx, double omega_s, double qsx,
                           double qsy, double Omega, double qcex, double qcey,
                           double z, double phi) {
  return std::exp(
      log_mu_paraxial_oracle(ctx, omega_s, qsx, qsy, Omega, qcex, qcey, z, phi));
}

} // namespace raman
