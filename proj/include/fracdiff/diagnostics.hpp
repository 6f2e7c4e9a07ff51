#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fracdiff/evolve.hpp"
#include "fracdiff/selfsim.hpp"

namespace fracdiff {

/// Result of a log-log regression of some quantity against time.
struct ExponentFit {
  double fitted_exponent = 0.0;
  double fitted_prefactor = 0.0;
  double r_squared = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
};

/// Closed-form least squares of log(values) vs log(times) over the window
/// [t_begin, t_end]. Throws WindowTooShort when fewer than 3 samples or the
/// window spans less than half a decade.
ExponentFit fit_power_law(const std::vector<double>& times,
                          const std::vector<double>& values, double t_begin,
                          double t_end);

enum class Relation { CONCENTRATION, SHIFT, POINTWISE, ALEKSANDROV };

struct ComparisonReport {
  Relation relation = Relation::POINTWISE;
  double max_violation = 0.0;
  double violation_location = 0.0;  // x (or radius) of the worst defect
  bool verdict = false;
};

/// Mass-concentration comparison f < g: centered cumulative mass of f never
/// exceeds that of g at any radius, within tol * mass(g). Both inputs must
/// be rearranged.
ComparisonReport concentration_compare(const Field& f, const Field& g, double tol);

/// Shifting comparison: cumulative_mass(f) <= cumulative_mass(g) at every
/// node, for equal-mass inputs (within tol).
ComparisonReport shifting_compare(const Field& f, const Field& g, double tol);

/// Reflection comparison at a: u(x, t) <= u(2a - x, t) for x > a at every
/// recorded time, including the initial one (whose violation is a failed
/// precondition rather than a defect).
ComparisonReport aleksandrov_check(const Trajectory& traj, double a, double tol);

/// Fit of the sup-norm decay against t over [t_begin, t_end]; compare the
/// exponent with -alpha externally.
ExponentFit smoothing_fit(const std::vector<double>& times,
                          const std::vector<double>& sup_norms, double t_begin,
                          double t_end);
ExponentFit smoothing_fit(const Trajectory& traj, double t_begin, double t_end);

/// Relative defect of the very weak formulation for a separable test
/// function zeta(x,t) = zeta_x(x) theta(t):
///   | int u zeta_x theta' dx dt - int Phi(u) (Lzeta_x) theta dx dt | / |...|
/// Lzeta_x must be (-Laplacian)^s zeta_x (computed externally, ideally on a
/// refined grid); zeta_x must vanish at the window edge and theta at the
/// first and last recorded times.
double very_weak_residual(const Trajectory& traj, const Nonlinearity& nl,
                          const Field& zeta_x, const Field& lap_zeta_x,
                          const std::function<double(double)>& theta,
                          const std::function<double(double)>& theta_prime);

/// L^p distances to the self-similar solution built from profile F_M (mass
/// M already applied) at every recorded time, with a decay-exponent fit
/// over the last decade for each p.
struct LpRate {
  double p = 0.0;
  std::vector<double> norms;
  ExponentFit fit;
};
std::vector<LpRate> lp_convergence_rates(const Trajectory& traj,
                                         const SelfSimilarProfile& F_M,
                                         const ScalingExponents& exps,
                                         const std::vector<double>& p_values);

/// Positivity of the scaled far field: the reported constant is
/// min over |x| in [r0, L] of f(x) |x|^(2s/(1+n)).
struct LowerBoundReport {
  bool positive = false;
  double constant = 0.0;
};
LowerBoundReport lower_bound_check(const Field& f, const ScalingExponents& exps,
                                   double r0);

/// Mass of the positive part of (f - g), for the L1 contraction check.
double positive_part_mass(const Field& f, const Field& g);

}  // namespace fracdiff
