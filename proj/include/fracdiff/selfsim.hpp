#pragma once

#include <utility>
#include <vector>

#include "fracdiff/evolve.hpp"
#include "fracdiff/frlap.hpp"

namespace fracdiff {

/// All scaling exponents of the self-similar regime. Only defined in the
/// existence range s > 1/2, 0 <= n < 2s - 1 (alpha > 0).
struct ScalingExponents {
  double s = 0.0;
  double n = 0.0;
  double alpha = 0.0;       // 1 / (2s - 1 - n)
  double delta = 0.0;       // 2 s alpha
  double gamma_tail = 0.0;  // 2s / (1 + n)

  ScalingExponents(FracOrder s_, double n_) : s(s_.s), n(n_) {
    const double denom = 2.0 * s - 1.0 - n;
    if (!(n >= 0.0 && denom > 0.0))
      throw OutOfRange("ScalingExponents: requires s > 1/2 and 0 <= n < 2s - 1");
    alpha = 1.0 / denom;
    delta = 2.0 * s * alpha;
    gamma_tail = 2.0 * s / (1.0 + n);
  }

  /// Both candidate L^p convergence exponents (the source formulas differ
  /// in the sign of n; both are reported, neither asserted).
  std::pair<double, double> alpha_p_candidates(double p) const {
    const double minus = (p - 1.0) / (p * (2.0 * s - 1.0 - n));
    const double plus = (p - 1.0) / (p * (2.0 * s - 1.0 + n));
    return {minus, plus};
  }
};

/// Rescaled long-time profile F(xi), xi = x t^(-alpha), on a fixed xi grid.
struct SelfSimilarProfile {
  Vector xi;   // symmetric grid of similarity coordinates
  Vector F;    // profile values
  double mass = 0.0;
  double c_inf = 0.0;          // fitted tail amplitude
  double tail_exponent = 0.0;  // fitted tail decay exponent
  std::vector<double> attraction_distances;  // L1 gaps of consecutive rescalings

  double at(double x) const;  // linear interpolation, fitted tail outside
};

/// Mass-preserving scaling u -> L u(Lx); returns the rescaled field on the
/// same grid together with the companion time dilation factor L^(2s-(1+n)).
std::pair<Field, double> rescale_T_L(const Field& f, double L_factor,
                                     const Nonlinearity& nl, FracOrder s);

/// Default xi grid |xi| <= 20 with 801 nodes.
Grid1D default_xi_grid();

/// Profile of a single state known in renormalized coordinates: the field
/// sim holds A u(A x, t), so F(xi) = t^alpha u(xi t^alpha, t)
/// = (t^alpha / A) sim(xi t^alpha / A). A = 1 recovers physical states.
SelfSimilarProfile profile_from_state(const Field& sim, double amplitude,
                                      double t, const ScalingExponents& exps,
                                      const Grid1D& xi_grid = default_xi_grid());

/// Rescale the trajectory states at the selected time indices onto a fixed
/// xi grid and return the latest profile with the sequence of consecutive
/// L1 distances (which must not be increasing throughout).
SelfSimilarProfile extract_profile(const Trajectory& traj,
                                   const ScalingExponents& exps,
                                   const std::vector<std::size_t>& time_indices,
                                   const Grid1D& xi_grid = default_xi_grid());

/// Mass scaling F_M(xi) = M^(2 s alpha) F(M^((1+n) alpha) xi); expects a
/// mass-1 input profile.
SelfSimilarProfile mass_rescale_profile(const SelfSimilarProfile& F, double M,
                                        const ScalingExponents& exps);

/// Sup-norm of the stationary similarity equation in cumulative form,
/// H(x) = int_{x0}^{x} L(Phi_n F) dr - alpha (x F(x) - x0 F(x0)),
/// normalized by sup |alpha x F| over the window |x| >= window_min
/// (window_min = 0 gives the full-line form). Throws NonpositiveProfile.
double profile_equation_residual(const SelfSimilarProfile& F,
                                 const FrLapOperator& op, const Nonlinearity& nl,
                                 const ScalingExponents& exps,
                                 double window_min = 0.0);

/// The very singular solution C t^(1/(1+n)) |x|^(-2s/(1+n)) sampled on the
/// grid; the non-integrable origin value is capped at the neighbor average.
Field vss_field(const ScalingExponents& exps, double t, const Grid1D& grid);

/// Explicit s = 1/2, n = 0 solution 2 lambda (T - t) / (lambda^2 + x^2),
/// identically zero for t >= T.
Field explicit_log_half_solution(double lambda, double T, const Grid1D& grid,
                                 double t);

/// A long evolution kept at a fixed numerical scale by switching to
/// similarity variables after the first record time: G(xi, tau)
/// = t^alpha u(xi t^alpha, t) with tau = log(t / t_switch) solves a
/// confined equation whose steady state is the long-time profile, so the
/// state never outgrows the window however large the time range. The
/// exterior is closed with the universal very-singular far field
/// C |xi|^(-2s/(1+n)), and the regularization eps = eps_fraction * sup G
/// is refreshed whenever the scale moves.
struct RenormalizedRun {
  std::vector<double> times;      // physical record times
  std::vector<double> sup_norms;  // physical sup u at those times
  std::vector<double> masses;     // similarity-window mass at those times
  std::vector<Field> states;      // states in similarity variables
  std::vector<double> amplitudes; // A = t^alpha (1 at the physical switch)
};

RenormalizedRun renormalized_run(const FrLapOperator& op, const Nonlinearity& nl,
                                 const Field& u0,
                                 const std::vector<double>& record_times,
                                 double eps_fraction = 1e-3);

}  // namespace fracdiff
