#include "raman/medium.hpp"
#include "raman/constants.hpp"
#include "raman/units.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace raman {

using nlohmann::json;

namespace {

Medium parse_medium(const json& j, const std::string& source) {
  Medium m;
  m.name = j.at("name").get<std::string>();
  m.sellmeier_b = j.at("sellmeier_b").get<std::vector<double>>();
  m.sellmeier_resonance_um = j.at("sellmeier_resonance_um").get<std::vector<double>>();
  if (m.sellmeier_b.size() != m.sellmeier_resonance_um.size())
    throw std::runtime_error("medium config " + source +
                             ": sellmeier_b and sellmeier_resonance_um differ in length");
  using units::Kind;
  if (j.contains("validity_min"))
    m.validity_min = units::to_si(j.at("validity_min").get<std::string>(), Kind::Length);
  if (j.contains("validity_max"))
    m.validity_max = units::to_si(j.at("validity_max").get<std::string>(), Kind::Length);
  m.raman_shift = units::to_si(j.at("raman_shift").get<std::string>(), Kind::AngularFrequency);
  m.raman_fwhm =
      units::to_si(j.at("raman_linewidth_fwhm").get<std::string>(), Kind::AngularFrequency);
  return m;
}

} // namespace

Medium load_medium(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in)
    throw std::runtime_error("cannot open medium config " + config_path);
  json j;
  in >> j;
  return parse_medium(j, config_path);
}

Medium medium_from_json_text(const std::string& json_text, const std::string& source_name) {
  return parse_medium(json::parse(json_text), source_name);
}

Medium dispersionless_like(const Medium& m) {
  Medium v = m;
  v.name = m.name + "-dispersionless";
  v.sellmeier_b.clear();
  v.sellmeier_resonance_um.clear();
  v.validity_min = 0.0;
  v.validity_max = 0.0;
  return v;
}

namespace {

// wavelength in um, plus the window check
double lambda_um_checked(const Medium& m, double omega) {
  if (!(omega > 0.0))
    throw std::domain_error("refractive index needs omega > 0");
  double lam = two_pi * c0 / omega; // m
  if (!m.unbounded_window() && (lam < m.validity_min || lam > m.validity_max)) {
    std::ostringstream os;
    os << "wavelength " << lam * 1e6 << " um is outside the Sellmeier validity window ["
       << m.validity_min * 1e6 << ", " << m.validity_max * 1e6 << "] um of medium "
       << m.name;
    throw std::domain_error(os.str());
  }
  return lam * 1e6;
}

} // namespace

double refractive_index(const Medium& m, double omega) {
  double lam = lambda_um_checked(m, omega);
  double l2 = lam * lam;
  double n2 = 1.0;
  for (size_t i = 0; i < m.sellmeier_b.size(); ++i) {
    double r2 = m.sellmeier_resonance_um[i] * m.sellmeier_resonance_um[i];
    n2 += m.sellmeier_b[i] * l2 / (l2 - r2);
  }
  return std::sqrt(n2);
}

double wavevector(const Medium& m, double omega) {
  return refractive_index(m, omega) * omega / c0;
}

double inverse_group_velocity(const Medium& m, double omega) {
  // group index n_g = n - lam * dn/dlam; with the Sellmeier form,
  //   d(n^2)/dlam = -2 lam sum B_i R_i^2 / (lam^2 - R_i^2)^2
  // so n_g = n + (lam^2 / n) sum B_i R_i^2 / (lam^2 - R_i^2)^2.
  double lam = lambda_um_checked(m, omega);
  double l2 = lam * lam;
  double n2 = 1.0, s = 0.0;
  for (size_t i = 0; i < m.sellmeier_b.size(); ++i) {
    double r2 = m.sellmeier_resonance_um[i] * m.sellmeier_resonance_um[i];
    double d = l2 - r2;
    n2 += m.sellmeier_b[i] * l2 / d;
    s += m.sellmeier_b[i] * r2 / (d * d);
  }
  double n = std::sqrt(n2);
  double ng = n + l2 * s / n;
  return ng / c0;
}

double group_delay_forward(const Medium& m, double omega_a, double omega_b, double L) {
  return (inverse_group_velocity(m, omega_a) - inverse_group_velocity(m, omega_b)) * L;
}

double group_delay_backward(const Medium& m, double omega_a, double omega_b, double L) {
  return (inverse_group_velocity(m, omega_a) + inverse_group_velocity(m, omega_b)) * L;
}

} // namespace raman
