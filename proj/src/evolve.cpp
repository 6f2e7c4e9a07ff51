#include "fracdiff/evolve.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>

namespace fracdiff {

namespace {

// Far-field of Phi_eps(v) for a power-tailed v: the exact composition
// Phi(v_tail(y) + eps) - Phi(eps). Returns an empty function for tailless
// (compactly supported) states, whose regularized flux vanishes outside.
std::function<double(double)> composed_tail(const Field& v,
                                            const RegularizedNonlinearity& rnl) {
  if (!v.tail) return {};
  const TailModel t = *v.tail;
  if (t.left_amplitude == 0.0 && t.right_amplitude == 0.0) return {};
  const Nonlinearity nl = rnl.base;
  const double eps = rnl.eps;
  return [t, nl, eps](double y) {
    return nl.phi(t.value(y) + eps) - nl.phi(eps);
  };
}

double residual_scale(const Field& v_old) {
  return std::max(v_old.max_value(), 1e-12);
}

}  // namespace

Field implicit_step(const FrLapOperator& op, const RegularizedNonlinearity& rnl,
                    const Field& v_old, double dt, const StepperConfig& cfg,
                    int* iterations) {
  if (v_old.grid != op.grid()) throw GridMismatch("implicit_step: grid mismatch");
  if (v_old.min_value() < 0.0)
    throw NegativeArgument("implicit_step: v_old has negative entries");
  cfg.validate();

  const int n = op.grid().n_points;
  const Matrix m = op.dense_matrix();
  const Vector tvec = op.tail_contribution(composed_tail(v_old, rnl));

  auto phi_of = [&](const Vector& v) {
    Vector w(n);
    for (int i = 0; i < n; ++i) w[i] = rnl.phi_eps(v[i]);
    return w;
  };
  auto residual = [&](const Vector& v) -> Vector {
    return v + dt * (m * phi_of(v) + tvec) - v_old.values;
  };

  Vector v = v_old.values;
  Vector r = residual(v);
  const double tol = cfg.newton_tol * residual_scale(v_old);
  double rnorm = r.lpNorm<Eigen::Infinity>();

  int it = 0;
  for (; it < cfg.newton_max_iter && rnorm > tol; ++it) {
    Vector dphi(n);
    for (int i = 0; i < n; ++i) dphi[i] = rnl.phi_eps_prime(v[i]);
    Matrix jac = dt * m * dphi.asDiagonal();
    jac.diagonal().array() += 1.0;
    Vector dv = jac.partialPivLu().solve(-r);

    // damped update: halve until the residual drops and v stays >= 0
    double lambda = 1.0;
    while (true) {
      Vector v_try = v + lambda * dv;
      if (v_try.minCoeff() >= 0.0) {
        Vector r_try = residual(v_try);
        const double rn_try = r_try.lpNorm<Eigen::Infinity>();
        if (rn_try < rnorm || rn_try <= tol) {
          v = std::move(v_try);
          r = std::move(r_try);
          rnorm = rn_try;
          break;
        }
      }
      lambda *= 0.5;
      if (lambda < cfg.damping_min)
        throw NewtonDiverged("implicit_step: line search stalled");
    }
  }
  if (rnorm > tol) throw NewtonDiverged("implicit_step: residual above tolerance");
  if (iterations) *iterations = it;
  return Field(op.grid(), std::move(v), v_old.tail);
}

double step_outflux(const FrLapOperator& op, const RegularizedNonlinearity& rnl,
                    const Field& v_old, const Field& v_new, double dt) {
  const int n = op.grid().n_points;
  Vector w(n);
  for (int i = 0; i < n; ++i) w[i] = rnl.phi_eps(v_new.values[i]);
  Vector lw = op.dense_matrix() * w;
  lw += op.tail_contribution(composed_tail(v_old, rnl));
  return dt * trapezoid(op.grid(), lw);
}

namespace {

// Refit a power tail to the new state; keep the previous model when the
// boundary values are too small to support a fit.
void refit_tail(Field& v) {
  if (auto t = fit_power_tail(v)) {
    v.tail = *t;
  }
}

}  // namespace

Trajectory run(const FrLapOperator& op, const RegularizedNonlinearity& rnl,
               const Field& v0, double t_end, StepperConfig cfg,
               const std::vector<double>& record_times) {
  cfg.validate();
  if (t_end <= 0.0) throw OutOfRange("run: t_end must be positive");
  for (std::size_t i = 1; i < record_times.size(); ++i) {
    if (record_times[i] <= record_times[i - 1])
      throw OutOfRange("run: record_times must be strictly increasing");
  }

  Trajectory traj;
  traj.eps = rnl.eps;
  traj.record(0.0, v0);

  Field v = v0;
  double t = 0.0;
  double dt = std::clamp(cfg.dt, cfg.dt_min, cfg.dt_max);
  std::size_t next_rec = 0;
  while (next_rec < record_times.size() && record_times[next_rec] <= 0.0) ++next_rec;

  while (t < t_end * (1.0 - 1e-12)) {
    double target = t_end;
    if (next_rec < record_times.size())
      target = std::min(target, record_times[next_rec]);
    const double dt_eff = std::min(dt, target - t);

    int iters = 0;
    Field v_new(v.grid, v.values, v.tail);
    try {
      v_new = implicit_step(op, rnl, v, dt_eff, cfg, &iters);
    } catch (const NewtonDiverged&) {
      if (dt <= cfg.dt_min * (1.0 + 1e-12)) throw;
      dt = std::max(0.5 * dt, cfg.dt_min);
      continue;
    }
    v = std::move(v_new);
    refit_tail(v);
    t += dt_eff;

    const bool hit_record = next_rec < record_times.size() &&
                            t >= record_times[next_rec] * (1.0 - 1e-12);
    if (hit_record) {
      traj.record(record_times[next_rec], v);
      ++next_rec;
    } else if (record_times.empty()) {
      traj.record(t, v);
    }

    if (cfg.adaptive) {
      if (iters > 10)
        dt = std::max(0.5 * dt, cfg.dt_min);
      else if (iters < 3)
        dt = std::min(2.0 * dt, cfg.dt_max);
    }
  }
  if (!record_times.empty() &&
      (traj.times.empty() || traj.times.back() < t_end * (1.0 - 1e-12))) {
    traj.record(t_end, v);
  }
  return traj;
}

double benilan_crandall_defect(const Trajectory& traj, const Nonlinearity& nl) {
  if (traj.size() < 3)
    throw PreconditionFailed("benilan_crandall_defect: need >= 3 recorded times");
  const double np1 = nl.n + 1.0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    const double t = traj.times[k];
    const double dt2 = traj.times[k + 1] - traj.times[k - 1];
    const Vector& up = traj.states[k + 1].values;
    const Vector& um = traj.states[k - 1].values;
    const Vector& u0 = traj.states[k].values;
    for (int i = 0; i < u0.size(); ++i) {
      const double dudt = (up[i] - um[i]) / dt2;
      const double u = u0[i] + traj.eps;
      worst = std::max(worst, np1 * t * dudt - u);
    }
  }
  return worst;
}

}  // namespace fracdiff
