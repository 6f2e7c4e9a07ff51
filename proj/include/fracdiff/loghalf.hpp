#pragma once

#include "fracdiff/limits.hpp"
#include "fracdiff/selfsim.hpp"

namespace fracdiff {

/// Measurements for the exceptional case s = 1/2, n = 0, where the
/// explicit extinction solution 2 lambda (T - t) / (lambda^2 + x^2) is
/// available: the exact extinction time is T = mass / (2 pi), and the
/// explicit solution loses mass at the constant rate -2 pi. Whether the
/// numerical limit solution shares that rate is an experiment; the slope
/// is reported, never asserted.
struct LogHalfReport {
  double lambda = 0.0;
  double T_exact = 0.0;        // mass / (2 pi)
  double T_observed = 0.0;     // first recorded t with sup below threshold
  bool extinction_observed = false;
  double mass_decay_slope = 0.0;  // linear fit of mass(t) on [0.1 T, 0.6 T]
};

/// Evolve the explicit initial datum at s = 1/2, n = 0 through the eps
/// ladder, extrapolate the limit at each recorded time, and measure mass
/// decay and extinction. Returns the limit trajectory (eps = 0) and the
/// report.
std::pair<Trajectory, LogHalfReport> run_loghalf(
    double lambda, double T, const Grid1D& grid, const StepperConfig& cfg,
    const std::vector<double>& eps_values = {});

}  // namespace fracdiff
