#include "fracdiff/grid.hpp"

#include <algorithm>
#include <cmath>

namespace fracdiff {

double trapezoid(const Grid1D& g, const Vector& v) {
  double s = 0.5 * (v[0] + v[g.n_points - 1]);
  for (int i = 1; i < g.n_points - 1; ++i) s += v[i];
  return s * g.spacing;
}

double total_mass(const Field& f) {
  double m = trapezoid(f.grid, f.values);
  if (f.tail) {
    const double L = f.grid.half_width;
    m += f.tail->side_mass(f.tail->left_amplitude, L);
    m += f.tail->side_mass(f.tail->right_amplitude, L);
  }
  return m;
}

Vector cumulative_mass(const Field& f) {
  const Grid1D& g = f.grid;
  Vector v(g.n_points);
  double acc = 0.0;
  if (f.tail) acc = f.tail->side_mass(f.tail->left_amplitude, g.half_width);
  v[0] = acc;
  for (int i = 1; i < g.n_points; ++i) {
    acc += 0.5 * g.spacing * (f.values[i - 1] + f.values[i]);
    v[i] = acc;
  }
  return v;
}

bool is_rearranged(const Field& f, double tol) {
  const int n = f.grid.n_points;
  const int c = f.grid.center_index();
  const double scale = std::max(f.max_value(), 0.0);
  if (scale == 0.0) return true;
  const double slack = tol * scale;
  for (int i = 0; i < n; ++i) {
    if (std::fabs(f.values[i] - f.values[n - 1 - i]) > slack) return false;
  }
  for (int i = c; i + 1 < n; ++i) {
    if (f.values[i + 1] > f.values[i] + slack) return false;
  }
  return true;
}

Field bump_field(const Grid1D& g, double mass, double width, double center) {
  Vector v = Vector::Zero(g.n_points);
  for (int i = 0; i < g.n_points; ++i) {
    const double z = (g.x(i) - center) / width;
    if (std::fabs(z) < 1.0) v[i] = std::exp(-1.0 / (1.0 - z * z) + 1.0);
  }
  const double m0 = trapezoid(g, v);
  if (m0 > 0.0) v *= mass / m0;
  return Field(g, v);
}

Field cauchy_tail_field(const Grid1D& g, double mass, double width, double q) {
  Vector v(g.n_points);
  for (int i = 0; i < g.n_points; ++i) {
    const double z = g.x(i) / width;
    v[i] = std::pow(1.0 + z * z, -0.5 * q);
  }
  TailModel t;
  t.decay_exponent = q;
  t.activation_radius = g.half_width;
  // amplitude of x^(-q) matching (1+(x/w)^2)^(-q/2) ~ (w/|x|)^q at large x
  t.left_amplitude = t.right_amplitude = std::pow(width, q);
  Field f(g, v, t);
  const double m0 = total_mass(f);
  f.values *= mass / m0;
  f.tail->left_amplitude *= mass / m0;
  f.tail->right_amplitude *= mass / m0;
  return f;
}

std::optional<TailModel> fit_power_tail(const Field& f, double inner_fraction,
                                        double gamma_min, double gamma_max) {
  const Grid1D& g = f.grid;
  const double L = g.half_width;
  const double r0 = inner_fraction * L;
  const double floor = 1e-280;

  // Gather log-log samples per side, then a joint least squares with a
  // shared slope and per-side intercepts.
  double sx_l = 0.0, sy_l = 0.0, sxy_l = 0.0, sxx_l = 0.0, n_l = 0.0;
  double sx_r = 0.0, sy_r = 0.0, sxy_r = 0.0, sxx_r = 0.0, n_r = 0.0;
  for (int i = 0; i < g.n_points; ++i) {
    const double x = g.x(i);
    if (std::fabs(x) < r0) continue;
    if (f.values[i] < floor) continue;
    const double lx = std::log(std::fabs(x));
    const double ly = std::log(f.values[i]);
    if (x < 0) {
      sx_l += lx; sy_l += ly; sxy_l += lx * ly; sxx_l += lx * lx; n_l += 1.0;
    } else {
      sx_r += lx; sy_r += ly; sxy_r += lx * ly; sxx_r += lx * lx; n_r += 1.0;
    }
  }
  if (n_l < 3 && n_r < 3) return std::nullopt;

  // shared slope, per-side intercepts: centred normal equations summed
  // over the sides that have enough samples
  double num = 0.0, den = 0.0;
  if (n_l >= 3) {
    num += sxy_l - sx_l * sy_l / n_l;
    den += sxx_l - sx_l * sx_l / n_l;
  }
  if (n_r >= 3) {
    num += sxy_r - sx_r * sy_r / n_r;
    den += sxx_r - sx_r * sx_r / n_r;
  }
  if (den <= 0.0) return std::nullopt;
  double gamma = -num / den;
  gamma = std::clamp(gamma, gamma_min, gamma_max);

  TailModel t;
  t.decay_exponent = gamma;
  t.activation_radius = L;
  t.left_amplitude = (n_l >= 3) ? std::exp(sy_l / n_l + gamma * sx_l / n_l) : 0.0;
  t.right_amplitude = (n_r >= 3) ? std::exp(sy_r / n_r + gamma * sx_r / n_r) : 0.0;
  return t;
}

}  // namespace fracdiff
