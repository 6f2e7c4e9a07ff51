#pragma once

#include <Eigen/Core>
#include <cmath>
#include <optional>

#include "fracdiff/errors.hpp"

namespace fracdiff {

using Vector = Eigen::VectorXd;

/// Uniform symmetric grid on [-L, L] with an odd number of nodes, so that
/// x = 0 is a node and every node has a mirror image.
struct Grid1D {
  double half_width = 0.0;  // L
  int n_points = 0;         // odd
  double spacing = 0.0;     // h = 2L/(n_points-1)

  Grid1D() = default;
  Grid1D(double L, int n) : half_width(L), n_points(n) {
    if (L <= 0.0) throw Error("Grid1D: half_width must be positive");
    if (n < 3 || n % 2 == 0) throw Error("Grid1D: n_points must be odd and >= 3");
    spacing = 2.0 * L / (n - 1);
  }

  double x(int i) const { return -half_width + i * spacing; }
  int center_index() const { return (n_points - 1) / 2; }

  Vector nodes() const {
    Vector xs(n_points);
    for (int i = 0; i < n_points; ++i) xs[i] = x(i);
    return xs;
  }

  bool operator==(const Grid1D& o) const {
    return half_width == o.half_width && n_points == o.n_points;
  }
  bool operator!=(const Grid1D& o) const { return !(*this == o); }
};

/// Analytic far-field model: the field behaves as A_pm |x|^(-gamma) for
/// |x| > L. gamma = 0 encodes a constant far field (used by the operator
/// tests and constant steady states); integrability of the tail requires
/// gamma > 1.
struct TailModel {
  double left_amplitude = 0.0;   // A_-
  double right_amplitude = 0.0;  // A_+
  double decay_exponent = 0.0;   // gamma_tail >= 0
  double activation_radius = 0.0;

  double value(double y) const {
    const double a = (y < 0.0) ? left_amplitude : right_amplitude;
    if (decay_exponent == 0.0) return a;
    return a * std::pow(std::fabs(y), -decay_exponent);
  }

  /// Mass carried by one side of the tail beyond radius L.
  double side_mass(double amplitude, double L) const {
    if (amplitude == 0.0) return 0.0;
    if (decay_exponent <= 1.0) {
      throw TailNotIntegrable("tail decay exponent <= 1, tail mass infinite");
    }
    return amplitude * std::pow(L, 1.0 - decay_exponent) / (decay_exponent - 1.0);
  }
};

/// A nonnegative scalar field sampled on a Grid1D, with an optional analytic
/// tail carrying the behaviour outside the truncated window.
struct Field {
  Grid1D grid;
  Vector values;
  std::optional<TailModel> tail;

  Field() = default;
  Field(const Grid1D& g, Vector v, std::optional<TailModel> t = std::nullopt)
      : grid(g), values(std::move(v)), tail(std::move(t)) {
    if (values.size() != grid.n_points) {
      throw GridMismatch("Field: value count does not match grid");
    }
  }

  static Field zero(const Grid1D& g) { return Field(g, Vector::Zero(g.n_points)); }

  static Field constant(const Grid1D& g, double c) {
    TailModel t;
    t.left_amplitude = t.right_amplitude = c;
    t.decay_exponent = 0.0;
    t.activation_radius = g.half_width;
    return Field(g, Vector::Constant(g.n_points, c), t);
  }

  /// Value at arbitrary x: linear interpolation inside the window, tail
  /// model outside (zero if no tail).
  double at(double x) const {
    const double L = grid.half_width;
    if (x < -L || x > L) {
      return tail ? tail->value(x) : 0.0;
    }
    const double u = (x + L) / grid.spacing;
    int i = static_cast<int>(std::floor(u));
    if (i >= grid.n_points - 1) return values[grid.n_points - 1];
    if (i < 0) return values[0];
    const double w = u - i;
    return (1.0 - w) * values[i] + w * values[i + 1];
  }

  double max_value() const { return values.size() ? values.maxCoeff() : 0.0; }
  double min_value() const { return values.size() ? values.minCoeff() : 0.0; }
};

/// Total mass: trapezoidal integral over [-L, L] plus the analytic tail
/// contribution on both sides.
double total_mass(const Field& f);

/// Cumulative mass V_i = integral of f over (-inf, x_i], including the left
/// tail when present. Nondecreasing for nonnegative fields.
Vector cumulative_mass(const Field& f);

/// True iff f is symmetric and nonincreasing for x > 0, both up to
/// tol * max(f).
bool is_rearranged(const Field& f, double tol);

/// Trapezoidal integral of an arbitrary sample vector on the grid.
double trapezoid(const Grid1D& g, const Vector& v);

// --- standard initial data generators -------------------------------------

/// Smooth compactly supported bump of unit height scaled to the requested
/// mass: exp(-w^2/(w^2-x^2)) shape on [-w, w] centred at x0.
Field bump_field(const Grid1D& g, double mass, double width, double center = 0.0);

/// Cauchy-type datum a / (1 + (x/w)^2)^(q/2) with exact power tail of
/// exponent q, scaled to the requested mass.
Field cauchy_tail_field(const Grid1D& g, double mass, double width, double q);

/// Fit a power tail A_pm |x|^(-gamma) to the outer fraction of the field by
/// least squares on log-log values; returns nullopt when the boundary values
/// are too small to support a fit. gamma is clamped to [gamma_min, gamma_max].
std::optional<TailModel> fit_power_tail(const Field& f, double inner_fraction = 0.8,
                                        double gamma_min = 1.05,
                                        double gamma_max = 6.0);

}  // namespace fracdiff
