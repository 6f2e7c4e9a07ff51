#include "fracdiff/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fracdiff {

ExponentFit fit_power_law(const std::vector<double>& times,
                          const std::vector<double>& values, double t_begin,
                          double t_end) {
  if (times.size() != values.size())
    throw GridMismatch("fit_power_law: size mismatch");
  double sx = 0.0, sy = 0.0, sxy = 0.0, sxx = 0.0, syy = 0.0, cnt = 0.0;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    if (t < t_begin || t > t_end || t <= 0.0 || values[k] <= 0.0) continue;
    lo = std::min(lo, t);
    hi = std::max(hi, t);
    const double lx = std::log(t), ly = std::log(values[k]);
    sx += lx; sy += ly; sxy += lx * ly; sxx += lx * lx; syy += ly * ly;
    cnt += 1.0;
  }
  if (cnt < 3.0 || hi < lo * std::sqrt(10.0))
    throw WindowTooShort("fit_power_law: need >= 3 samples over half a decade");
  const double vxx = sxx - sx * sx / cnt;
  const double vxy = sxy - sx * sy / cnt;
  const double vyy = syy - sy * sy / cnt;
  ExponentFit out;
  out.fitted_exponent = vxy / vxx;
  out.fitted_prefactor = std::exp(sy / cnt - out.fitted_exponent * sx / cnt);
  out.r_squared = (vyy > 0.0) ? (vxy * vxy) / (vxx * vyy) : 1.0;
  out.t_begin = lo;
  out.t_end = hi;
  return out;
}

namespace {

void require_rearranged(const Field& f, const char* who) {
  if (!is_rearranged(f, 1e-6))
    throw NotRearranged(std::string(who) + ": field is not rearranged");
}

}  // namespace

ComparisonReport concentration_compare(const Field& f, const Field& g, double tol) {
  if (f.grid != g.grid) throw GridMismatch("concentration_compare: grid mismatch");
  require_rearranged(f, "concentration_compare");
  require_rearranged(g, "concentration_compare");
  const Grid1D& grid = f.grid;
  const int c = grid.center_index();
  const double scale = std::max(total_mass(g), 1e-300);

  ComparisonReport rep;
  rep.relation = Relation::CONCENTRATION;
  double mf = 0.0, mg = 0.0;
  for (int k = 1; k <= c; ++k) {
    mf += 0.5 * grid.spacing *
          (f.values[c + k - 1] + f.values[c + k] + f.values[c - k + 1] +
           f.values[c - k]);
    mg += 0.5 * grid.spacing *
          (g.values[c + k - 1] + g.values[c + k] + g.values[c - k + 1] +
           g.values[c - k]);
    const double defect = (mf - mg) / scale;
    if (defect > rep.max_violation) {
      rep.max_violation = defect;
      rep.violation_location = k * grid.spacing;
    }
  }
  rep.verdict = rep.max_violation <= tol;
  return rep;
}

ComparisonReport shifting_compare(const Field& f, const Field& g, double tol) {
  if (f.grid != g.grid) throw GridMismatch("shifting_compare: grid mismatch");
  const double mf = total_mass(f), mg = total_mass(g);
  const double scale = std::max(std::max(mf, mg), 1e-300);
  if (std::fabs(mf - mg) > tol * scale)
    throw MassMismatch("shifting_compare: masses differ beyond tolerance");

  const Vector vf = cumulative_mass(f);
  const Vector vg = cumulative_mass(g);
  ComparisonReport rep;
  rep.relation = Relation::SHIFT;
  for (int i = 0; i < vf.size(); ++i) {
    const double defect = (vf[i] - vg[i]) / scale;
    if (defect > rep.max_violation) {
      rep.max_violation = defect;
      rep.violation_location = f.grid.x(i);
    }
  }
  rep.verdict = rep.max_violation <= tol;
  return rep;
}

ComparisonReport aleksandrov_check(const Trajectory& traj, double a, double tol) {
  if (traj.size() == 0) throw PreconditionFailed("aleksandrov_check: empty trajectory");
  const Field& u0 = traj.states.front();
  const double scale = std::max(u0.max_value() + traj.eps, 1e-300);

  auto defect_at = [&](const Field& f) {
    double worst = -std::numeric_limits<double>::infinity();
    double where = a;
    const Grid1D& g = f.grid;
    for (int i = 0; i < g.n_points; ++i) {
      const double x = g.x(i);
      if (x <= a) continue;
      const double mirrored = 2.0 * a - x;
      if (mirrored < -g.half_width) continue;
      const double d = (f.values[i] - f.at(mirrored)) / scale;
      if (d > worst) {
        worst = d;
        where = x;
      }
    }
    return std::make_pair(worst, where);
  };

  if (defect_at(u0).first > tol)
    throw PreconditionFailed("aleksandrov_check: initial data violates u0(x) <= u0(2a-x)");

  ComparisonReport rep;
  rep.relation = Relation::ALEKSANDROV;
  for (const Field& f : traj.states) {
    auto [d, x] = defect_at(f);
    if (d > rep.max_violation) {
      rep.max_violation = d;
      rep.violation_location = x;
    }
  }
  rep.max_violation = std::max(rep.max_violation, 0.0);
  rep.verdict = rep.max_violation <= tol;
  return rep;
}

ExponentFit smoothing_fit(const std::vector<double>& times,
                          const std::vector<double>& sup_norms, double t_begin,
                          double t_end) {
  return fit_power_law(times, sup_norms, t_begin, t_end);
}

ExponentFit smoothing_fit(const Trajectory& traj, double t_begin, double t_end) {
  std::vector<double> sups(traj.sup_norm.begin(), traj.sup_norm.end());
  for (double& v : sups) v += traj.eps;
  return fit_power_law(traj.times, sups, t_begin, t_end);
}

double very_weak_residual(const Trajectory& traj, const Nonlinearity& nl,
                          const Field& zeta_x, const Field& lap_zeta_x,
                          const std::function<double(double)>& theta,
                          const std::function<double(double)>& theta_prime) {
  if (traj.size() < 3)
    throw PreconditionFailed("very_weak_residual: need >= 3 recorded times");
  const Grid1D& g = traj.states.front().grid;
  if (zeta_x.grid != g || lap_zeta_x.grid != g)
    throw GridMismatch("very_weak_residual: test function grid mismatch");
  const double zscale = std::max(zeta_x.values.cwiseAbs().maxCoeff(), 1e-300);
  if (std::fabs(zeta_x.values[0]) > 1e-10 * zscale ||
      std::fabs(zeta_x.values[g.n_points - 1]) > 1e-10 * zscale)
    throw SupportViolation("very_weak_residual: zeta_x not compactly supported");
  if (std::fabs(theta(traj.times.front())) > 1e-12 ||
      std::fabs(theta(traj.times.back())) > 1e-12)
    throw SupportViolation("very_weak_residual: theta not supported in the run");

  // spatial integrals at each recorded time
  std::vector<double> a(traj.size()), b(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const Vector& v = traj.states[k].values;
    Vector uz(g.n_points), pz(g.n_points);
    for (int i = 0; i < g.n_points; ++i) {
      const double u = v[i] + traj.eps;
      uz[i] = u * zeta_x.values[i];
      pz[i] = nl.phi_floored(u) * lap_zeta_x.values[i];
    }
    a[k] = trapezoid(g, uz);
    b[k] = trapezoid(g, pz);
  }

  // time integrals by trapezoid over the recorded times
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    const double dt = traj.times[k + 1] - traj.times[k];
    lhs += 0.5 * dt *
           (a[k] * theta_prime(traj.times[k]) + a[k + 1] * theta_prime(traj.times[k + 1]));
    rhs += 0.5 * dt * (b[k] * theta(traj.times[k]) + b[k + 1] * theta(traj.times[k + 1]));
  }
  return std::fabs(lhs - rhs) / (std::fabs(rhs) + 1e-300);
}

std::vector<LpRate> lp_convergence_rates(const Trajectory& traj,
                                         const SelfSimilarProfile& F_M,
                                         const ScalingExponents& exps,
                                         const std::vector<double>& p_values) {
  const Grid1D& g = traj.states.front().grid;
  std::vector<LpRate> out;
  for (double p : p_values) {
    LpRate rate;
    rate.p = p;
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const double t = traj.times[k];
      if (t <= 0.0) {
        rate.norms.push_back(0.0);
        continue;
      }
      const double ta = std::pow(t, exps.alpha);
      Vector diff(g.n_points);
      for (int i = 0; i < g.n_points; ++i) {
        const double u_ss = F_M.at(g.x(i) / ta) / ta;
        diff[i] = std::pow(std::fabs(traj.states[k].values[i] + traj.eps - u_ss), p);
      }
      rate.norms.push_back(std::pow(trapezoid(g, diff), 1.0 / p));
    }
    const double t_hi = traj.times.back();
    try {
      rate.fit = fit_power_law(traj.times, rate.norms, t_hi / 10.0, t_hi);
    } catch (const WindowTooShort&) {
      rate.fit = ExponentFit{};
    }
    out.push_back(std::move(rate));
  }
  return out;
}

LowerBoundReport lower_bound_check(const Field& f, const ScalingExponents& exps,
                                   double r0) {
  const Grid1D& g = f.grid;
  LowerBoundReport rep;
  rep.constant = std::numeric_limits<double>::infinity();
  bool any = false;
  for (int i = 0; i < g.n_points; ++i) {
    const double r = std::fabs(g.x(i));
    if (r < r0) continue;
    any = true;
    rep.constant =
        std::min(rep.constant, f.values[i] * std::pow(r, exps.gamma_tail));
  }
  if (!any) throw OutOfRange("lower_bound_check: empty window");
  rep.positive = rep.constant > 0.0;
  return rep;
}

double positive_part_mass(const Field& f, const Field& g) {
  if (f.grid != g.grid) throw GridMismatch("positive_part_mass: grid mismatch");
  Vector d = (f.values - g.values).cwiseMax(0.0);
  return trapezoid(f.grid, d);
}

}  // namespace fracdiff
