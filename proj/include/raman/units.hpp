#pragma once
#include <string>

namespace raman::units {

// Physical quantities in config files are strings with an explicit unit tag
// ("7 nm", "11.0 cm^-1", "8 mm"). Bare numbers are reserved for genuinely
// dimensionless fields and are rejected by the quantity parser.
//
// Everything converts to SI on ingest: lengths to m, times to s, angles to
// rad, spectroscopic wavenumbers (cm^-1) to angular frequency (rad/s).

enum class Kind {
  Length,
  Time,
  Angle,
  AngularFrequency, // accepts rad/s, THz (as 2*pi*f), cm^-1 (as 2*pi*c*100*v)
};

struct Parsed {
  double si_value;
  Kind kind;
  std::string unit; // tag as written
};

// Parses "<number> <unit>". Throws std::invalid_argument on a missing or
// unknown tag, or when the tag's dimension differs from `expect`.
Parsed parse_quantity(const std::string& tagged, Kind expect);

double to_si(const std::string& tagged, Kind expect);

const char* kind_name(Kind k);

} // namespace raman::units
