#pragma once
#include <string>

namespace raman {

enum class GeometryMode {
  OneD_Forward,
  OneD_Backward,
  ThreeD_Collinear,
  ThreeD_OffAxis,
};

const char* geometry_mode_name(GeometryMode m);
GeometryMode geometry_mode_from_name(const std::string& s);

// Interaction geometry. For the 3D modes both beams focus at the crystal
// center and share that focal point; waists are 1/e^2 intensity radii.
struct GeometrySpec {
  GeometryMode mode = GeometryMode::OneD_Forward;
  double length = 0.0;    // crystal length L, m
  double angle_phi = 0.0; // collection angle, rad, [0, pi]; off-axis mode only
  double waist_wp = 0.0;  // pump waist, m (3D modes)
  double waist_wf = 0.0;  // collection-mode waist, m (3D modes)

  bool is_3d() const {
    return mode == GeometryMode::ThreeD_Collinear || mode == GeometryMode::ThreeD_OffAxis;
  }
};

// Throws std::invalid_argument naming the offending field.
void validate_geometry(const GeometrySpec& g);

// Waists giving pump and collection modes one common Fresnel number
// F = 2 z_R / L: w = sqrt(F L / k) for each carrier wavevector.
GeometrySpec geometry_from_fresnel(GeometryMode mode, double length, double angle_phi,
                                   double fresnel, double k_p0, double k_s0);

} // namespace raman
