#include "raman/units.hpp"
#include "raman/constants.hpp"

#include <cstdlib>
#include <map>
#include <stdexcept>

namespace raman::units {

namespace {

struct UnitDef {
  Kind kind;
  double factor; // SI value of one unit (linear scale)
};

const std::map<std::string, UnitDef>& unit_table() {
  static const std::map<std::string, UnitDef> t = {
      {"m", {Kind::Length, 1.0}},
      {"cm", {Kind::Length, 1e-2}},
      {"mm", {Kind::Length, 1e-3}},
      {"um", {Kind::Length, 1e-6}},
      {"nm", {Kind::Length, 1e-9}},
      {"pm", {Kind::Length, 1e-12}},
      {"s", {Kind::Time, 1.0}},
      {"ms", {Kind::Time, 1e-3}},
      {"us", {Kind::Time, 1e-6}},
      {"ns", {Kind::Time, 1e-9}},
      {"ps", {Kind::Time, 1e-12}},
      {"fs", {Kind::Time, 1e-15}},
      {"rad", {Kind::Angle, 1.0}},
      {"mrad", {Kind::Angle, 1e-3}},
      {"deg", {Kind::Angle, pi / 180.0}},
      {"rad/s", {Kind::AngularFrequency, 1.0}},
      {"Hz", {Kind::AngularFrequency, two_pi}},
      {"GHz", {Kind::AngularFrequency, two_pi * 1e9}},
      {"THz", {Kind::AngularFrequency, two_pi * 1e12}},
      // spectroscopic wavenumber, converted to angular frequency
      {"cm^-1", {Kind::AngularFrequency, two_pi * c0 * 100.0}},
  };
  return t;
}

} // namespace

const char* kind_name(Kind k) {
  switch (k) {
  case Kind::Length: return "length";
  case Kind::Time: return "time";
  case Kind::Angle: return "angle";
  case Kind::AngularFrequency: return "angular frequency";
  }
  return "?";
}

Parsed parse_quantity(const std::string& tagged, Kind expect) {
  const char* s = tagged.c_str();
  char* end = nullptr;
  double v = std::strtod(s, &end);
  if (end == s)
    throw std::invalid_argument("quantity '" + tagged + "' has no numeric part");
  while (*end == ' ' || *end == '\t')
    ++end;
  std::string unit(end);
  while (!unit.empty() && (unit.back() == ' ' || unit.back() == '\t'))
    unit.pop_back();
  if (unit.empty())
    throw std::invalid_argument("quantity '" + tagged +
                                "' is missing a unit tag (expected a " +
                                kind_name(expect) + " unit)");
  auto it = unit_table().find(unit);
  if (it == unit_table().end())
    throw std::invalid_argument("unknown unit '" + unit + "' in '" + tagged + "'");
  if (it->second.kind != expect)
    throw std::invalid_argument("unit '" + unit + "' in '" + tagged + "' is a " +
                                std::string(kind_name(it->second.kind)) +
                                ", expected a " + kind_name(expect));
  return Parsed{v * it->second.factor, expect, unit};
}

double to_si(const std::string& tagged, Kind expect) {
  return parse_quantity(tagged, expect).si_value;
}

} // namespace raman::units
