#pragma once

#include <vector>

#include "fracdiff/evolve.hpp"

namespace fracdiff {

/// Family of regularized runs u_eps = v_eps + eps over a decreasing
/// sequence of eps values, sharing grid, data and recorded times.
struct EpsLadder {
  std::vector<double> eps_values;      // strictly decreasing
  std::vector<Trajectory> trajectories;

  const std::vector<double>& times() const { return trajectories.front().times; }
};

/// Default geometric ladder 1e-1, 5e-2, ..., ratio 1/2 down to ~1e-5.
std::vector<double> default_eps_ladder(double eps_max = 1e-1,
                                       double eps_min = 1e-5,
                                       double ratio = 0.5);

/// Run the regularized problem with data u0 + eps for each rung, recording
/// all rungs at the same output times, and verify the pointwise ordering
/// u_{eps'} <= u_eps for eps' < eps (within 10x the Newton tolerance).
/// Rungs are independent and run in parallel.
EpsLadder build_ladder(const FrLapOperator& op, const Nonlinearity& nl,
                       const Field& u0, const std::vector<double>& eps_values,
                       const std::vector<double>& record_times,
                       const StepperConfig& cfg);

/// Pointwise limit estimate at a recorded time: fits u_eps = u + a eps^p
/// over the last three rungs with a single empirical exponent p clamped to
/// [0.5, 2], and attaches a tail model fit from the smallest-eps rung.
/// Throws NonConvergent when successive rung differences grow.
Field extrapolate_limit(const EpsLadder& ladder, double t);

/// Empirical exponent p of the last extrapolation (reported, never asserted).
double extrapolation_exponent(const EpsLadder& ladder, double t);

enum class Verdict { EXISTS, EXTINCT, INCONCLUSIVE };

const char* to_string(Verdict v);

/// EXISTS when the extrapolated limit keeps >= 95% of the initial mass and
/// stays positive on the central half-window; EXTINCT when its sup falls
/// below the threshold (default 1e-6 * sup u0); INCONCLUSIVE otherwise.
Verdict extinction_verdict(const EpsLadder& ladder, const Field& u0, double t,
                           double threshold);

}  // namespace fracdiff
