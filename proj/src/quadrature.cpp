#include "raman/quadrature.hpp"
#include "raman/constants.hpp"

#include <cmath>
#include <stdexcept>

namespace raman {

Nodes gauss_legendre(int n, double a, double b) {
  if (n < 1)
    throw std::invalid_argument("gauss_legendre needs n >= 1");
  Nodes r;
  r.x.resize(n);
  r.w.resize(n);
  int mid = (n + 1) / 2;
  for (int i = 0; i < mid; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // recurrence for P_n(x) and P'_n(x)
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15)
        break;
    }
    double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.x[i] = xm - xl * x;
    r.x[n - 1 - i] = xm + xl * x;
    r.w[i] = r.w[n - 1 - i] = w * xl;
  }
  return r;
}

Nodes trapezoid(int n, double a, double b) {
  if (n < 2)
    throw std::invalid_argument("trapezoid needs n >= 2");
  Nodes r;
  r.x.resize(n);
  r.w.resize(n);
  double h = (b - a) / (n - 1);
  for (int i = 0; i < n; ++i) {
    r.x[i] = a + h * i;
    r.w[i] = (i == 0 || i == n - 1) ? 0.5 * h : h;
  }
  return r;
}

std::complex<double> filon_linear(const std::vector<double>& z,
                                  const std::vector<std::complex<double>>& f,
                                  double lam) {
  if (z.size() != f.size() || z.size() < 2)
    throw std::invalid_argument("filon_linear needs matching node/value arrays, n >= 2");
  const std::complex<double> I(0.0, 1.0);
  std::complex<double> acc = 0.0;
  for (size_t i = 0; i + 1 < z.size(); ++i) {
    double h = z[i + 1] - z[i];
    double x = lam * h;
    // I0 = integral over [0,h] of e^{i lam t} dt, I1 = same with extra t/h
    std::complex<double> i0, i1;
    if (std::abs(x) < 1e-4) {
      // series keeps full relative accuracy where the closed form cancels
      i0 = h * std::complex<double>(1.0 - x * x / 6.0, x / 2.0 - x * x * x / 24.0);
      i1 = h * std::complex<double>(0.5 - x * x / 8.0, x / 3.0 - x * x * x / 30.0);
    } else {
      std::complex<double> eix = std::exp(I * x);
      std::complex<double> ilam(0.0, lam);
      i0 = (eix - 1.0) / ilam;
      i1 = (h * eix / ilam - (eix - 1.0) / (ilam * ilam)) / h;
    }
    acc += std::exp(I * lam * z[i]) * (f[i] * i0 + (f[i + 1] - f[i]) * i1);
  }
  return acc;
}

} // namespace raman
