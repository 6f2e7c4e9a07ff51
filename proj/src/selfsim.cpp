#include "fracdiff/selfsim.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

namespace fracdiff {

double SelfSimilarProfile::at(double x) const {
  const int n = static_cast<int>(xi.size());
  const double lo = xi[0], hi = xi[n - 1];
  if (x < lo || x > hi) {
    if (c_inf <= 0.0 || tail_exponent <= 0.0) return 0.0;
    return c_inf * std::pow(std::fabs(x), -tail_exponent);
  }
  const double h = (hi - lo) / (n - 1);
  const double u = (x - lo) / h;
  int i = std::clamp(static_cast<int>(std::floor(u)), 0, n - 2);
  const double w = u - i;
  return (1.0 - w) * F[i] + w * F[i + 1];
}

std::pair<Field, double> rescale_T_L(const Field& f, double L_factor,
                                     const Nonlinearity& nl, FracOrder s) {
  if (L_factor <= 0.0) throw OutOfRange("rescale_T_L: L_factor must be positive");
  const Grid1D& g = f.grid;
  Vector v(g.n_points);
  for (int i = 0; i < g.n_points; ++i) v[i] = L_factor * f.at(L_factor * g.x(i));
  std::optional<TailModel> tail;
  if (f.tail) {
    TailModel t = *f.tail;
    const double scale = std::pow(L_factor, 1.0 - t.decay_exponent);
    t.left_amplitude *= scale;
    t.right_amplitude *= scale;
    tail = t;
  }
  const double time_factor = std::pow(L_factor, 2.0 * s.s - (1.0 + nl.n));
  return {Field(g, std::move(v), tail), time_factor};
}

Grid1D default_xi_grid() { return Grid1D(20.0, 801); }

namespace {

// Least-squares fit of log F vs log xi over the last decade of the xi
// window, pooling both sides.
void fit_profile_tail(SelfSimilarProfile& p) {
  const int n = static_cast<int>(p.xi.size());
  const double xi_max = p.xi[n - 1];
  const double r0 = 0.1 * xi_max;
  double sx = 0.0, sy = 0.0, sxy = 0.0, sxx = 0.0, cnt = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = std::fabs(p.xi[i]);
    if (r < r0 || p.F[i] <= 1e-280) continue;
    const double lx = std::log(r), ly = std::log(p.F[i]);
    sx += lx; sy += ly; sxy += lx * ly; sxx += lx * lx; cnt += 1.0;
  }
  if (cnt < 4.0) {
    p.c_inf = 0.0;
    p.tail_exponent = 0.0;
    return;
  }
  const double den = sxx - sx * sx / cnt;
  const double slope = (den > 0.0) ? (sxy - sx * sy / cnt) / den : 0.0;
  p.tail_exponent = -slope;
  p.c_inf = std::exp(sy / cnt + p.tail_exponent * sx / cnt);
}

double profile_mass(const SelfSimilarProfile& p) {
  const int n = static_cast<int>(p.xi.size());
  const double h = (p.xi[n - 1] - p.xi[0]) / (n - 1);
  double m = 0.5 * (p.F[0] + p.F[n - 1]);
  for (int i = 1; i + 1 < n; ++i) m += p.F[i];
  m *= h;
  if (p.c_inf > 0.0 && p.tail_exponent > 1.0) {
    m += 2.0 * p.c_inf * std::pow(p.xi[n - 1], 1.0 - p.tail_exponent) /
         (p.tail_exponent - 1.0);
  }
  return m;
}

}  // namespace

SelfSimilarProfile profile_from_state(const Field& sim, double amplitude,
                                      double t, const ScalingExponents& exps,
                                      const Grid1D& xi_grid) {
  if (t <= 0.0) throw OutOfRange("profile_from_state: t must be positive");
  const double ta = std::pow(t, exps.alpha);
  SelfSimilarProfile p;
  p.xi = xi_grid.nodes();
  p.F.resize(xi_grid.n_points);
  for (int i = 0; i < xi_grid.n_points; ++i) {
    p.F[i] = (ta / amplitude) * sim.at(p.xi[i] * ta / amplitude);
  }
  fit_profile_tail(p);
  p.mass = profile_mass(p);
  return p;
}

SelfSimilarProfile extract_profile(const Trajectory& traj,
                                   const ScalingExponents& exps,
                                   const std::vector<std::size_t>& time_indices,
                                   const Grid1D& xi_grid) {
  if (time_indices.size() < 2)
    throw PreconditionFailed("extract_profile: need >= 2 times");
  std::vector<SelfSimilarProfile> profiles;
  profiles.reserve(time_indices.size());
  for (std::size_t idx : time_indices) {
    if (idx >= traj.size()) throw OutOfRange("extract_profile: index out of range");
    Field u(traj.states[idx].grid,
            traj.states[idx].values.array() + traj.eps,
            traj.states[idx].tail);
    profiles.push_back(profile_from_state(u, 1.0, traj.times[idx], exps, xi_grid));
  }
  SelfSimilarProfile out = profiles.back();
  out.attraction_distances.clear();
  const double h = (out.xi[out.xi.size() - 1] - out.xi[0]) /
                   (static_cast<int>(out.xi.size()) - 1);
  for (std::size_t k = 0; k + 1 < profiles.size(); ++k) {
    out.attraction_distances.push_back(
        h * (profiles[k + 1].F - profiles[k].F).lpNorm<1>());
  }
  if (out.attraction_distances.size() >= 2) {
    bool all_increasing = true;
    for (std::size_t k = 0; k + 1 < out.attraction_distances.size(); ++k) {
      if (out.attraction_distances[k + 1] <= out.attraction_distances[k])
        all_increasing = false;
    }
    if (all_increasing)
      throw NotConverging("extract_profile: rescaled profiles diverging");
  }
  return out;
}

SelfSimilarProfile mass_rescale_profile(const SelfSimilarProfile& F, double M,
                                        const ScalingExponents& exps) {
  if (M <= 0.0) throw OutOfRange("mass_rescale_profile: M must be positive");
  const double amp = std::pow(M, 2.0 * exps.s * exps.alpha);
  const double stretch = std::pow(M, (1.0 + exps.n) * exps.alpha);
  SelfSimilarProfile out;
  out.xi = F.xi;
  out.F.resize(F.xi.size());
  for (int i = 0; i < F.xi.size(); ++i) out.F[i] = amp * F.at(stretch * out.xi[i]);
  out.tail_exponent = F.tail_exponent;
  out.c_inf = amp * F.c_inf * std::pow(stretch, -F.tail_exponent);
  out.mass = profile_mass(out);
  return out;
}

double profile_equation_residual(const SelfSimilarProfile& F,
                                 const FrLapOperator& op, const Nonlinearity& nl,
                                 const ScalingExponents& exps,
                                 double window_min) {
  const Grid1D& g = op.grid();
  Vector fv(g.n_points), w(g.n_points);
  for (int i = 0; i < g.n_points; ++i) {
    fv[i] = F.at(g.x(i));
    if (fv[i] <= 0.0)
      throw NonpositiveProfile("profile_equation_residual: profile not positive");
    w[i] = nl.phi(fv[i]);
  }
  if (F.c_inf <= 0.0 || F.tail_exponent <= 0.0)
    throw NonpositiveProfile("profile_equation_residual: no positive tail model");
  const double c_inf = F.c_inf, gamma = F.tail_exponent;
  const Nonlinearity nlc = nl;
  auto w_tail = [c_inf, gamma, nlc](double y) {
    return nlc.phi(c_inf * std::pow(std::fabs(y), -gamma));
  };
  const Vector lw = op.apply_values(w, w_tail);

  // cumulative form outward from the window edge on each side
  const int c = g.center_index();
  const double h = g.spacing;
  const double alpha = exps.alpha;
  const double edge = 0.9 * g.half_width;  // skip the outermost cells
  int i0 = c;
  while (g.x(i0) < window_min && i0 + 1 < g.n_points) ++i0;

  double worst = 0.0, scale = 0.0;
  // positive side
  {
    double integral = 0.0;
    const double base = alpha * g.x(i0) * fv[i0];
    for (int i = i0 + 1; i < g.n_points && g.x(i) <= edge; ++i) {
      integral += 0.5 * h * (lw[i - 1] + lw[i]);
      const double target = alpha * g.x(i) * fv[i];
      worst = std::max(worst, std::fabs(integral - (target - base)));
      scale = std::max(scale, std::fabs(target));
    }
  }
  // negative side, mirrored
  {
    const int j0 = 2 * c - i0;  // node at -x(i0)
    double integral = 0.0;
    const double base = alpha * g.x(j0) * fv[j0];
    for (int i = j0 - 1; i >= 0 && g.x(i) >= -edge; --i) {
      integral -= 0.5 * h * (lw[i + 1] + lw[i]);
      const double target = alpha * g.x(i) * fv[i];
      worst = std::max(worst, std::fabs(integral - (target - base)));
      scale = std::max(scale, std::fabs(target));
    }
  }
  if (scale <= 0.0) throw NonpositiveProfile("profile_equation_residual: flat profile");
  return worst / scale;
}

Field vss_field(const ScalingExponents& exps, double t, const Grid1D& grid) {
  if (t <= 0.0) throw OutOfRange("vss_field: t must be positive");
  const VssConstants vc = vss_constant(FracOrder(exps.s), exps.n);
  const double amp = vc.C * std::pow(t, 1.0 / (1.0 + exps.n));
  const double gamma = exps.gamma_tail;
  Vector v(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    const double x = grid.x(i);
    v[i] = (x == 0.0) ? 0.0 : amp * std::pow(std::fabs(x), -gamma);
  }
  const int c = grid.center_index();
  v[c] = 0.5 * (v[c - 1] + v[c + 1]);
  TailModel tail;
  tail.left_amplitude = tail.right_amplitude = amp;
  tail.decay_exponent = gamma;
  tail.activation_radius = grid.half_width;
  return Field(grid, std::move(v), tail);
}

Field explicit_log_half_solution(double lambda, double T, const Grid1D& grid,
                                 double t) {
  if (lambda <= 0.0 || T <= 0.0 || t < 0.0)
    throw OutOfRange("explicit_log_half_solution: need lambda, T > 0 and t >= 0");
  if (t >= T) return Field::zero(grid);
  const double a = 2.0 * lambda * (T - t);
  Vector v(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    const double x = grid.x(i);
    v[i] = a / (lambda * lambda + x * x);
  }
  TailModel tail;
  tail.left_amplitude = tail.right_amplitude = a;
  tail.decay_exponent = 2.0;
  tail.activation_radius = grid.half_width;
  return Field(grid, std::move(v), tail);
}

namespace {


// One implicit-Euler step of the similarity-variable ("confined") equation
//   G_tau = alpha (xi G)_xi - L(Phi_eps(G)),   tau = log-time,
// whose steady state is the self-similar profile. The transport term is
// discretized upwind along its inward-flowing characteristics (dxi/dtau =
// -alpha xi), with the boundary inflow and the nonlocal far field both
// lagged at g_old's tail model. Damped Newton with positivity, as in
// implicit_step.
Field confined_step(const FrLapOperator& op, const RegularizedNonlinearity& rnl,
                    double alpha, const Field& g_old, double dtau,
                    const StepperConfig& cfg, int* iterations) {
  const Grid1D& g = op.grid();
  const int n = g.n_points;
  const double h = g.spacing;
  const double L = g.half_width;

  // transport in conservative flux form: alpha (xi G)_xi ~ T G + b with
  // face fluxes alpha xi_{i+1/2} (G_i + G_{i+1})/2, second order and mass
  // conservative up to the boundary fluxes; the values at +-(L + h) come
  // from the lagged tail model
  Matrix T = Matrix::Zero(n, n);
  Vector b = Vector::Zero(n);
  const double edge_lo = g_old.tail ? g_old.tail->value(-L - h) : 0.0;
  const double edge_hi = g_old.tail ? g_old.tail->value(L + h) : 0.0;
  for (int i = 0; i < n; ++i) {
    const double xr = g.x(i) + 0.5 * h;  // right face
    const double xl = g.x(i) - 0.5 * h;  // left face
    T(i, i) = alpha * (xr - xl) / (2.0 * h);  // = alpha / 2
    if (i + 1 < n)
      T(i, i + 1) = alpha * xr / (2.0 * h);
    else
      b[i] = alpha * xr / (2.0 * h) * edge_hi;
    if (i > 0)
      T(i, i - 1) = -alpha * xl / (2.0 * h);
    else
      b[i] = -alpha * xl / (2.0 * h) * edge_lo;
  }

  std::function<double(double)> wtail;
  if (g_old.tail) {
    const TailModel tm = *g_old.tail;
    const RegularizedNonlinearity r = rnl;
    wtail = [tm, r](double y) { return r.phi_eps(std::max(tm.value(y), 0.0)); };
  }
  const Matrix m = op.dense_matrix();
  const Vector tvec = op.tail_contribution(wtail);

  const double scale = std::max(g_old.max_value(), 1e-12);
  const double tol = cfg.newton_tol * scale;

  Vector v = g_old.values;
  auto residual = [&](const Vector& u) {
    Vector w(n);
    for (int i = 0; i < n; ++i) w[i] = rnl.phi_eps(u[i]);
    return (u - g_old.values - dtau * (T * u + b) + dtau * (m * w + tvec)).eval();
  };
  Vector r = residual(v);
  double rn = r.cwiseAbs().maxCoeff();
  int it = 0;
  while (rn > tol) {
    if (++it > cfg.newton_max_iter)
      throw NewtonDiverged("confined_step: Newton did not converge");
    Vector dphi(n);
    for (int i = 0; i < n; ++i) dphi[i] = rnl.phi_eps_prime(v[i]);
    Matrix jac = dtau * m * dphi.asDiagonal();
    jac -= dtau * T;
    jac.diagonal().array() += 1.0;
    const Vector dv = jac.partialPivLu().solve(-r);
    double lambda = 1.0;
    while (true) {
      Vector trial = v + lambda * dv;
      if (trial.minCoeff() >= 0.0) {
        const Vector rt = residual(trial);
        const double rtn = rt.cwiseAbs().maxCoeff();
        if (rtn < rn || rtn <= tol) {
          v = std::move(trial);
          r = rt;
          rn = rtn;
          break;
        }
      }
      lambda *= 0.5;
      if (lambda < cfg.damping_min)
        throw NewtonDiverged("confined_step: line search stalled");
    }
  }
  if (iterations) *iterations = it;
  return Field(g, std::move(v), g_old.tail);
}

}  // namespace

RenormalizedRun renormalized_run(const FrLapOperator& op, const Nonlinearity& nl,
                                 const Field& u0,
                                 const std::vector<double>& record_times,
                                 double eps_fraction) {
  if (record_times.empty() || record_times.front() <= 0.0)
    throw OutOfRange("renormalized_run: need positive record times");
  for (std::size_t k = 1; k < record_times.size(); ++k) {
    if (record_times[k] <= record_times[k - 1])
      throw OutOfRange("renormalized_run: record times must increase");
  }
  const Grid1D& g = op.grid();
  const FracOrder s = op.order();
  const ScalingExponents exps(s, nl.n);  // throws outside the existence range

  RenormalizedRun out;

  // Phase 1: physical evolution up to the first record time, while the
  // support is still far from the window boundary.
  const double t_switch = record_times.front();
  StepperConfig pcfg;
  pcfg.dt = default_dt(g, s);
  pcfg.dt_max = 0.1;
  const double eps0 = eps_fraction * std::max(u0.max_value(), 1e-12);
  const Trajectory phys =
      run(op, RegularizedNonlinearity(nl, eps0), u0, t_switch, pcfg, {t_switch});
  // Keep the state background-free: a constant epsilon background is not a
  // steady state of the confinement transport (it acts as a uniform mass
  // source), so the regularization lives only inside phi_eps.
  Field u_sw(g, phys.states.back().values, phys.states.back().tail);
  if (auto tail = fit_power_tail(u_sw)) u_sw.tail = *tail;

  out.times.push_back(t_switch);
  out.sup_norms.push_back(u_sw.max_value());
  out.masses.push_back(total_mass(u_sw));
  out.states.push_back(u_sw);
  out.amplitudes.push_back(1.0);

  // Phase 2: similarity variables. G(xi, tau) = t^alpha u(xi t^alpha, t)
  // with tau = log(t / t_switch), reusing the operator grid as the xi grid.
  // In this frame the long-time profile is a steady state, so the state
  // never outgrows the window no matter how large the time range is.
  const double A0 = std::pow(t_switch, exps.alpha);
  Vector Gv(g.n_points);
  for (int i = 0; i < g.n_points; ++i) Gv[i] = A0 * u_sw.at(g.x(i) * A0);

  // Exterior closure: every solution acquires the universal very-singular
  // far field C |xi|^(-gamma) instantaneously, so the region beyond the
  // window is modeled with that fixed tail. A state-dependent tail fit is
  // unstable here: through phi(u) = -u^-n a slightly heavy exterior
  // suppresses the nonlocal export, inflating the window edge and feeding
  // back into the fit.
  TailModel universal;
  universal.left_amplitude = universal.right_amplitude =
      vss_constant(s, nl.n).C;
  universal.decay_exponent = exps.gamma_tail;
  universal.activation_radius = g.half_width;
  Field G(g, std::move(Gv), universal);

  StepperConfig cfg;
  cfg.dt = 0.01;
  cfg.dt_max = 0.05;
  double eps = eps_fraction * std::max(G.max_value(), 1e-12);
  double dtau = cfg.dt;
  double tau = 0.0;

  for (std::size_t next = 1; next < record_times.size();) {
    const double tau_next = std::log(record_times[next] / t_switch);
    const double step = std::min(dtau, tau_next - tau);
    int iters = 0;
    try {
      G = confined_step(op, RegularizedNonlinearity(nl, eps), exps.alpha, G,
                        step, cfg, &iters);
    } catch (const NewtonDiverged&) {
      if (dtau <= cfg.dt_min * (1.0 + 1e-12)) throw;
      dtau = std::max(0.5 * dtau, cfg.dt_min);
      continue;
    }
    tau += step;

    // fresh regularization whenever the scale has moved appreciably
    const double eps_want = eps_fraction * std::max(G.max_value(), 1e-12);
    if (eps_want > 4.0 * eps || eps_want < 0.25 * eps) eps = eps_want;

    if (tau >= tau_next * (1.0 - 1e-12)) {
      const double t = record_times[next];
      const double A = std::pow(t, exps.alpha);
      out.times.push_back(t);
      Field snap = G;
      if (auto tail = fit_power_tail(snap)) snap.tail = *tail;
      out.sup_norms.push_back(snap.max_value() / A);
      out.masses.push_back(total_mass(snap));
      out.states.push_back(std::move(snap));
      out.amplitudes.push_back(A);
      ++next;
    }
    if (cfg.adaptive) {
      if (iters > 10)
        dtau = std::max(0.5 * dtau, cfg.dt_min);
      else if (iters < 3)
        dtau = std::min(2.0 * dtau, cfg.dt_max);
    }
  }
  return out;
}

}  // namespace fracdiff
