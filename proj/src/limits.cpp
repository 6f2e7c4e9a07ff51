#include "fracdiff/limits.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace fracdiff {

std::vector<double> default_eps_ladder(double eps_max, double eps_min,
                                       double ratio) {
  if (!(eps_max > eps_min && eps_min > 0.0 && ratio > 0.0 && ratio < 1.0))
    throw OutOfRange("default_eps_ladder: need eps_max > eps_min > 0, ratio in (0,1)");
  std::vector<double> out;
  for (double e = eps_max; e >= eps_min * (1.0 - 1e-12); e *= ratio)
    out.push_back(e);
  return out;
}

EpsLadder build_ladder(const FrLapOperator& op, const Nonlinearity& nl,
                       const Field& u0, const std::vector<double>& eps_values,
                       const std::vector<double>& record_times,
                       const StepperConfig& cfg) {
  if (eps_values.empty()) throw OutOfRange("build_ladder: empty eps ladder");
  for (std::size_t k = 1; k < eps_values.size(); ++k) {
    if (eps_values[k] >= eps_values[k - 1])
      throw OutOfRange("build_ladder: eps_values must be strictly decreasing");
  }
  if (u0.tail && u0.tail->decay_exponent <= 1.0)
    throw TailNotIntegrable("build_ladder: u0 tail not integrable");
  if (record_times.empty() || record_times.back() <= 0.0)
    throw OutOfRange("build_ladder: need positive record times");

  EpsLadder ladder;
  ladder.eps_values = eps_values;
  ladder.trajectories.resize(eps_values.size());

  std::vector<std::future<Trajectory>> jobs;
  jobs.reserve(eps_values.size());
  for (double eps : eps_values) {
    jobs.push_back(std::async(std::launch::async, [&, eps] {
      RegularizedNonlinearity rnl(nl, eps);
      return run(op, rnl, u0, record_times.back(), cfg, record_times);
    }));
  }
  for (std::size_t k = 0; k < jobs.size(); ++k)
    ladder.trajectories[k] = jobs[k].get();

  // ordering invariant: u_{eps_{k+1}} <= u_{eps_k} + 10 * newton_tol * scale
  const double slack =
      10.0 * cfg.newton_tol * std::max(u0.max_value() + eps_values.front(), 1.0);
  for (std::size_t k = 0; k + 1 < eps_values.size(); ++k) {
    const Trajectory& hi = ladder.trajectories[k];
    const Trajectory& lo = ladder.trajectories[k + 1];
    for (std::size_t j = 0; j < hi.size(); ++j) {
      const double gap =
          ((lo.states[j].values.array() + lo.eps) -
           (hi.states[j].values.array() + hi.eps)).maxCoeff();
      if (gap > slack)
        throw OrderViolation("build_ladder: eps-monotonicity violated by " +
                             std::to_string(gap));
    }
  }
  return ladder;
}

namespace {

std::size_t time_index(const EpsLadder& ladder, double t) {
  const auto& times = ladder.times();
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (std::fabs(times[j] - t) <= 1e-12 * std::max(1.0, t)) return j;
  }
  throw OutOfRange("ladder: time not among recorded times");
}

// Shared empirical exponent p from the L1 norms of successive differences
// of the last three rungs (geometric ladder with known ratio).
double fit_p(const EpsLadder& ladder, std::size_t j, double* d1n = nullptr,
             double* d2n = nullptr) {
  const std::size_t m = ladder.eps_values.size();
  if (m < 3) throw PreconditionFailed("extrapolate_limit: need >= 3 rungs");
  const Vector u1 = ladder.trajectories[m - 3].states[j].values.array() +
                    ladder.eps_values[m - 3];
  const Vector u2 = ladder.trajectories[m - 2].states[j].values.array() +
                    ladder.eps_values[m - 2];
  const Vector u3 = ladder.trajectories[m - 1].states[j].values.array() +
                    ladder.eps_values[m - 1];
  const double n1 = (u1 - u2).lpNorm<1>();
  const double n2 = (u2 - u3).lpNorm<1>();
  if (d1n) *d1n = n1;
  if (d2n) *d2n = n2;
  const double ratio = ladder.eps_values[m - 2] / ladder.eps_values[m - 3];
  if (n1 <= 0.0 || n2 <= 0.0) return 1.0;
  // |d2|/|d1| = ratio^p for u_eps = u + a eps^p on a geometric ladder
  double p = std::log(n2 / n1) / std::log(ratio);
  return std::clamp(p, 0.5, 2.0);
}

}  // namespace

Field extrapolate_limit(const EpsLadder& ladder, double t) {
  const std::size_t j = time_index(ladder, t);
  const std::size_t m = ladder.eps_values.size();
  double n1 = 0.0, n2 = 0.0;
  const double p = fit_p(ladder, j, &n1, &n2);
  const double scale =
      ladder.trajectories.front().states[j].max_value() + ladder.eps_values.front();
  if (n2 > n1 + 1e-9 * scale)
    throw NonConvergent("extrapolate_limit: rung differences not decreasing");

  const double ratio = ladder.eps_values[m - 1] / ladder.eps_values[m - 2];
  const double shrink = std::pow(ratio, p);  // d3/d2 under the power model
  const Vector u2 = ladder.trajectories[m - 2].states[j].values.array() +
                    ladder.eps_values[m - 2];
  const Vector u3 = ladder.trajectories[m - 1].states[j].values.array() +
                    ladder.eps_values[m - 1];
  // u = u3 - (u2 - u3) * shrink / (1 - shrink), geometric sum of remaining
  // differences, floored at zero
  Vector u = u3 - (u2 - u3) * (shrink / (1.0 - shrink));
  u = u.cwiseMax(0.0);

  Field out(ladder.trajectories.front().states[j].grid, std::move(u));
  const Field& smallest = ladder.trajectories[m - 1].states[j];
  Field probe(out.grid, out.values);
  if (auto tail = fit_power_tail(probe)) {
    out.tail = *tail;
  } else if (smallest.tail) {
    out.tail = smallest.tail;
  }
  return out;
}

double extrapolation_exponent(const EpsLadder& ladder, double t) {
  return fit_p(ladder, time_index(ladder, t));
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::EXISTS: return "EXISTS";
    case Verdict::EXTINCT: return "EXTINCT";
    default: return "INCONCLUSIVE";
  }
}

Verdict extinction_verdict(const EpsLadder& ladder, const Field& u0, double t,
                           double threshold) {
  if (t <= 0.0) throw OutOfRange("extinction_verdict: t must be positive");
  Field limit = Field::zero(u0.grid);
  try {
    limit = extrapolate_limit(ladder, t);
  } catch (const NonConvergent&) {
    return Verdict::EXTINCT;  // failure to converge only happens collapsing to 0
  }
  if (limit.max_value() < threshold) return Verdict::EXTINCT;

  const double m0 = total_mass(u0);
  double m = 0.0;
  if (limit.tail && limit.tail->decay_exponent <= 1.0) {
    m = trapezoid(limit.grid, limit.values);
  } else {
    m = total_mass(limit);
  }
  const Grid1D& g = limit.grid;
  double central_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.n_points; ++i) {
    if (std::fabs(g.x(i)) <= 0.5 * g.half_width)
      central_min = std::min(central_min, limit.values[i]);
  }
  if (m >= 0.95 * m0 && central_min > 0.0) return Verdict::EXISTS;
  return Verdict::INCONCLUSIVE;
}

}  // namespace fracdiff
