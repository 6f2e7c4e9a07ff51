#pragma once

#include <Eigen/Core>
#include <functional>

#include "fracdiff/grid.hpp"

namespace fracdiff {

using Matrix = Eigen::MatrixXd;

/// Order of the fractional Laplacian, constrained to (0, 1).
struct FracOrder {
  double s = 0.5;

  explicit FracOrder(double s_) : s(s_) {
    if (!(s > 0.0 && s < 1.0)) throw OutOfRange("FracOrder: s must lie in (0,1)");
  }
};

/// k(alpha, s): the constant in (-Laplacian)^s |x|^alpha = k |x|^(alpha-2s),
/// evaluated through log-Gamma with sign tracking. Throws Pole when a Gamma
/// argument hits a nonpositive integer (e.g. alpha = 2s - 1).
double power_constant(double alpha, FracOrder s);

/// c(s) = lim_{alpha->0} k(alpha, s)/alpha, the constant in
/// (-Laplacian)^s log|x| = c(s) |x|^(-2s). Positive for s > 1/2, zero at
/// s = 1/2, negative below.
double log_constant(FracOrder s);

struct VssConstants {
  double K = 0.0;  // K(s,n), the profile-equation constant
  double C = 0.0;  // VSS amplitude, C^(1+n) = (1+n) K
};

/// Constants of the very singular solution C t^(1/(1+n)) |x|^(-2s/(1+n)).
/// Requires the existence range s > 1/2, 0 <= n < 2s - 1.
VssConstants vss_constant(FracOrder s, double n);

/// Normalization c(1, s) of the 1D singular-integral kernel.
double kernel_normalization(FracOrder s);

/// Dense discretization of the 1D fractional Laplacian on a Grid1D.
///
/// In-window part: exact integration of the kernel against the piecewise
/// linear interpolant, with the principal-value cell (|y - x| < h) handled
/// by a quadratic interpolation correction. The resulting weight matrix is
/// symmetric and annihilates constants together with a matching constant
/// tail. The integral over |y| > L uses the field's analytic tail model by
/// adaptive quadrature after mapping the tail to a bounded interval.
class FrLapOperator {
 public:
  FrLapOperator(const Grid1D& grid, FracOrder s);

  const Grid1D& grid() const { return grid_; }
  FracOrder order() const { return s_; }
  double normalization() const { return c_; }

  /// Weight matrix of the in-window action (symmetric).
  const Matrix& weights() const { return w_; }

  /// Per-row zeroth tail moment: coefficient of v_i coming from the
  /// integral of the kernel over the exterior region.
  const Vector& diag_correction() const { return z0_; }

  /// Full linear matrix acting on in-window values, W + diag(z0). This is
  /// the Jacobian block of the operator for fields whose tail is frozen.
  Matrix dense_matrix() const;

  /// Contribution of the far field tail(y), |y| > L, to the operator at
  /// every row (exterior integrals plus the boundary-cell edge terms).
  /// The full action is W v + z0 .* v + tail_contribution(tail).
  Vector tail_contribution(const std::function<double(double)>& tail) const;

  /// Action on raw values with an arbitrary far-field evaluator
  /// tail(y) for |y| > L (pass nullptr_t-free zero lambda for compact
  /// fields). Used directly by the evolution for composed tails.
  Vector apply_values(const Vector& v,
                      const std::function<double(double)>& tail) const;

  /// Action on a Field, reading the far field from its TailModel. The
  /// result carries no tail model.
  Field apply(const Field& f) const;

 private:
  Grid1D grid_;
  FracOrder s_;
  double c_;            // kernel normalization c(1, s)
  Matrix w_;            // symmetric in-window weights
  Vector z0_;           // exterior zeroth moments (diagonal correction)
  double edge_lo_ = 0.0;  // coefficient of tail(-L-h) in row 0
  double edge_hi_ = 0.0;  // coefficient of tail(+L+h) in row N-1
  double tail_tol_ = 1e-10;

  double exterior_integral(int row, const std::function<double(double)>& tail) const;
};

/// Convenience free function mirroring the other operations.
inline FrLapOperator build_operator(const Grid1D& grid, FracOrder s) {
  return FrLapOperator(grid, s);
}

inline Field apply(const FrLapOperator& op, const Field& f) { return op.apply(f); }

}  // namespace fracdiff
