#pragma once

#include <vector>

#include "fracdiff/frlap.hpp"
#include "fracdiff/grid.hpp"
#include "fracdiff/nonlin.hpp"

namespace fracdiff {

/// Controls for the implicit-Euler / damped-Newton time stepper.
struct StepperConfig {
  double dt = 1e-3;           // current (initial) step
  double newton_tol = 1e-10;  // relative residual target
  int newton_max_iter = 50;
  double damping_min = 1e-4;  // smallest line-search factor before giving up
  bool adaptive = true;       // halve/double dt to keep Newton in [3, 10] iters
  double dt_min = 1e-9;
  double dt_max = 1.0;

  void validate() const {
    if (!(dt > 0.0 && dt_min > 0.0 && dt_max > 0.0 && dt_min <= dt_max))
      throw OutOfRange("StepperConfig: need 0 < dt_min <= dt_max and dt > 0");
    if (!(newton_tol > 0.0 && damping_min > 0.0))
      throw OutOfRange("StepperConfig: tolerances must be positive");
  }
};

/// Default initial step for a given grid/order: h^(2s)/10, commensurate
/// with the diffusion scale of the operator.
inline double default_dt(const Grid1D& g, FracOrder s) {
  return std::pow(g.spacing, 2.0 * s.s) / 10.0;
}

/// Time-stamped sequence of states v_eps(., t) with per-time records.
/// eps = 0 labels an extrapolated limit trajectory.
struct Trajectory {
  std::vector<double> times;   // strictly increasing, starting at 0
  std::vector<Field> states;   // v values (u = v + eps)
  double eps = 0.0;
  std::vector<double> mass;      // total_mass of the state (tail included)
  std::vector<double> sup_norm;  // max of v
  std::vector<double> min_value; // min of v

  void record(double t, const Field& f) {
    times.push_back(t);
    states.push_back(f);
    mass.push_back(total_mass_or_window(f));
    sup_norm.push_back(f.max_value());
    min_value.push_back(f.min_value());
  }

  std::size_t size() const { return times.size(); }

 private:
  static double total_mass_or_window(const Field& f) {
    // Fields whose fitted tail is too flat to integrate still get a
    // window-mass record rather than an exception.
    if (f.tail && f.tail->decay_exponent <= 1.0) return trapezoid(f.grid, f.values);
    return total_mass(f);
  }
};

/// One backward-Euler step: solves v + dt * L(Phi_eps(v)) = v_old by a
/// damped Newton iteration in v, keeping v >= 0. The far-field part of
/// Phi_eps(v) is frozen at v_old's tail composed exactly through Phi_eps.
/// The returned field keeps v_old's tail model (callers refit per step).
/// Throws NewtonDiverged when the residual cannot be reduced to tolerance.
Field implicit_step(const FrLapOperator& op, const RegularizedNonlinearity& rnl,
                    const Field& v_old, double dt, const StepperConfig& cfg,
                    int* iterations = nullptr);

/// Mass that left the window during the step v_old -> v_new, from the
/// scheme's integral identity: dt * trapezoid of L(Phi_eps(v_new)) with the
/// same lagged far field used by implicit_step. Window mass plus cumulative
/// outflux is conserved to Newton tolerance.
double step_outflux(const FrLapOperator& op, const RegularizedNonlinearity& rnl,
                    const Field& v_old, const Field& v_new, double dt);

/// Advance from v0 to t_end. With record_times empty, every accepted step
/// is recorded; otherwise the stepper lands exactly on each requested time
/// and records only there (t = 0 is always recorded). Adaptive mode keeps
/// the Newton iteration count in [3, 10] by halving/doubling dt within
/// [dt_min, dt_max]. The tail model is refit after every step.
Trajectory run(const FrLapOperator& op, const RegularizedNonlinearity& rnl,
               const Field& v0, double t_end, StepperConfig cfg,
               const std::vector<double>& record_times = {});

/// Max over interior recorded times and nodes of (n+1) t du/dt - u with
/// u = v + eps and du/dt by centered differences; a nonpositive value (up
/// to tolerance) certifies the time-monotonicity estimate.
double benilan_crandall_defect(const Trajectory& traj, const Nonlinearity& nl);

}  // namespace fracdiff
