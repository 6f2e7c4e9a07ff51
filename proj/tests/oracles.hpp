#pragma once

// Test-only oracles, independent of the library's operator path: adaptive
// Simpson quadrature and a direct principal-value evaluation of the 1D
// fractional Laplacian of analytic functions.

#include <cmath>
#include <functional>

namespace oracles {

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double fa, double fm,
                                   double fb, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth > 48 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-12) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 0);
}

inline double frlap_normalization(double s) {
  return std::pow(4.0, s) * s * std::tgamma(0.5 + s) /
         (std::sqrt(M_PI) * std::tgamma(1.0 - s));
}

/// Direct principal-value quadrature of (-Laplacian)^s v at point x. The PV
/// singularity is removed by folding y -> x +/- z and integrating the
/// symmetrized difference 2 v(x) - v(x+z) - v(x-z), which is O(z^2) near
/// z = 0; the fold already accounts for both half-lines, so no extra 1/2.
inline double frlap_pv(const std::function<double(double)>& v,
                       double x, double s, double z_max = 1e7,
                       double tol = 1e-11) {
  const double c = frlap_normalization(s);
  const double p = 1.0 + 2.0 * s;
  auto sym = [&](double z) {
    return (2.0 * v(x) - v(x + z) - v(x - z)) * std::pow(z, -p);
  };
  // Head (0, delta]: near z = 0 the symmetrized difference cancels to
  // O(z^2) and its floating-point noise dwarfs any quadrature tolerance,
  // so the head is integrated in closed form from the Taylor expansion
  // sym(z) ~ -v'' z^2 - v'''' z^4 / 12.
  const double delta = 1e-2;
  const double h2 = 1e-3;
  const double vpp = (-v(x - 2 * h2) + 16 * v(x - h2) - 30 * v(x) +
                      16 * v(x + h2) - v(x + 2 * h2)) /
                     (12.0 * h2 * h2);
  const double h4 = 1e-2;
  const double v4 = (v(x - 2 * h4) - 4 * v(x - h4) + 6 * v(x) -
                     4 * v(x + h4) + v(x + 2 * h4)) /
                    (h4 * h4 * h4 * h4);
  double total = -vpp * std::pow(delta, 2.0 - 2.0 * s) / (2.0 - 2.0 * s) -
                 v4 * std::pow(delta, 4.0 - 2.0 * s) / (12.0 * (4.0 - 2.0 * s));
  // graded panels out to z_max
  double a = delta, b = 8.0 * delta;
  while (a < z_max) {
    total += adaptive_simpson(sym, a, std::min(b, z_max), tol);
    a = b;
    b *= 8.0;
  }
  return c * total;
}

}  // namespace oracles
