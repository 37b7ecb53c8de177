#pragma once
#include <complex>
#include <vector>

namespace raman {

struct Nodes {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Legendre rule on [a, b]; nodes by Newton iteration, machine accurate.
Nodes gauss_legendre(int n, double a, double b);

// Uniform trapezoid rule with n points including both endpoints.
Nodes trapezoid(int n, double a, double b);

// integral of f(z) exp(i lam z) dz with f piecewise linear between the given
// sorted nodes. Exact per segment for the linear interpolant at any lam, so
// it stays stable when exp(i lam z) oscillates much faster than f varies.
std::complex<double> filon_linear(const std::vector<double>& z,
                                  const std::vector<std::complex<double>>& f,
                                  double lam);

} // namespace raman
