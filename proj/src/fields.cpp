#include "raman/fields.hpp"
#include "raman/constants.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

namespace raman {

double pump_amplitude(const PumpSpec& pump, double omega) {
  double sigma = pump.sigma();
  double nu = omega - pump.omega0();
  double norm = std::pow(two_pi * sigma * sigma, -0.25);
  return norm * std::exp(-nu * nu / (4.0 * sigma * sigma));
}

double pump_sigma_from_fwhm(double lambda0, double fwhm_wavelength) {
  // |domega/dlambda| = 2 pi c / lambda^2 at the carrier
  double fwhm_omega = two_pi * c0 / (lambda0 * lambda0) * fwhm_wavelength;
  return fwhm_omega / fwhm_sigma;
}

double lineshape_g(const Lineshape& ls, double Omega) {
  double d = Omega - ls.omega0;
  return std::sqrt((ls.gamma / two_pi) / (d * d + ls.gamma * ls.gamma / 4.0));
}

namespace {

double lorentz_model(double x, const Eigen::Vector4d& p) {
  // p = (A, x0, G, b)
  double hg = p[2] / 2.0;
  double d = (x - p[1]) * (x - p[1]) + hg * hg;
  return p[0] * hg * hg / d + p[3];
}

} // namespace

LorentzFit fit_lorentzian(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 8)
    throw std::invalid_argument("fit_lorentzian needs at least 8 samples");

  LorentzFit out;
  const int n = static_cast<int>(samples.size());

  double ymin = samples[0].second, ymax = samples[0].second;
  int imax = 0;
  for (int i = 0; i < n; ++i) {
    double y = samples[i].second;
    if (y < ymin) ymin = y;
    if (y > ymax) { ymax = y; imax = i; }
  }
  double xspan = 0.0;
  {
    double xmin = samples[0].first, xmax = samples[0].first;
    for (auto& s : samples) { xmin = std::min(xmin, s.first); xmax = std::max(xmax, s.first); }
    xspan = xmax - xmin;
  }
  if (!(ymax - ymin > 0.0) || !(xspan > 0.0)) {
    out.degenerate = true;
    out.baseline = ymin;
    return out;
  }

  // peak and half-max crossings seed the iteration
  double half = ymin + 0.5 * (ymax - ymin);
  double xl = samples[imax].first, xr = samples[imax].first;
  for (int i = imax; i >= 0; --i)
    if (samples[i].second >= half) xl = samples[i].first; else break;
  for (int i = imax; i < n; ++i)
    if (samples[i].second >= half) xr = samples[i].first; else break;
  double g0 = xr - xl;
  if (!(g0 > 0.0))
    g0 = xspan / 8.0;

  Eigen::Vector4d p(ymax - ymin, samples[imax].first, g0, ymin);

  auto residual_sq = [&](const Eigen::Vector4d& q) {
    double s = 0.0;
    for (auto& sm : samples) {
      double r = sm.second - lorentz_model(sm.first, q);
      s += r * r;
    }
    return s;
  };

  double mu = 1e-3;
  double cost = residual_sq(p);
  int it = 0;
  for (; it < 200; ++it) {
    Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
    Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
    double hg = p[2] / 2.0;
    for (auto& sm : samples) {
      double dx = sm.first - p[1];
      double den = dx * dx + hg * hg;
      double u = hg * hg / den;
      Eigen::Vector4d jrow;
      jrow[0] = u;
      jrow[1] = p[0] * hg * hg * 2.0 * dx / (den * den);
      jrow[2] = p[0] * hg * dx * dx / (den * den); // d/dG of A (G/2)^2/den, dhg/dG = 1/2
      jrow[3] = 1.0;
      double r = sm.second - lorentz_model(sm.first, p);
      jtj += jrow * jrow.transpose();
      jtr += jrow * r;
    }
    bool stepped = false;
    for (int tries = 0; tries < 12; ++tries) {
      Eigen::Matrix4d a = jtj;
      for (int d = 0; d < 4; ++d)
        a(d, d) += mu * std::max(jtj(d, d), 1e-30);
      Eigen::Vector4d step = a.ldlt().solve(jtr);
      Eigen::Vector4d pn = p + step;
      pn[2] = std::abs(pn[2]);
      double cn = residual_sq(pn);
      if (cn <= cost) {
        double rel = std::abs(cost - cn) / std::max(cost, 1e-300);
        p = pn;
        cost = cn;
        mu = std::max(mu / 3.0, 1e-12);
        stepped = true;
        if (rel < 1e-14 || step.norm() < 1e-12 * (1.0 + p.norm()))
          it = 199;
        break;
      }
      mu *= 4.0;
    }
    if (!stepped)
      break;
  }

  out.amplitude = p[0];
  out.center = p[1];
  out.fwhm = std::abs(p[2]);
  out.baseline = p[3];
  out.iterations = it + 1;
  // RMS misfit relative to the fitted peak height, so the number is
  // comparable across spectra with arbitrary intensity scales
  out.residual_rms = std::sqrt(cost / n) / std::max(std::abs(p[0]), 1e-300);
  out.converged = std::isfinite(cost);
  return out;
}

std::vector<std::pair<double, double>> read_spectrum(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open spectrum file " + path);
  std::vector<std::pair<double, double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos)
      line.resize(hash);
    std::istringstream ss(line);
    double x, y;
    if (ss >> x) {
      if (!(ss >> y)) {
        std::ostringstream os;
        os << path << ":" << lineno << ": expected two columns";
        throw std::runtime_error(os.str());
      }
      rows.emplace_back(x, y);
    }
  }
  return rows;
}

} // namespace raman
