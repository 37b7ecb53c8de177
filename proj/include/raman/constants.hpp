#pragma once

namespace raman {

inline constexpr double c0 = 299792458.0;     // vacuum light speed, m/s
inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

// FWHM = fwhm_sigma * sigma for a Gaussian
inline constexpr double fwhm_sigma = 2.3548200450309493; // 2*sqrt(2*ln 2)

} // namespace raman
