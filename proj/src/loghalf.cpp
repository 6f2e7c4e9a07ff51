#include "fracdiff/loghalf.hpp"

#include <cmath>

namespace fracdiff {

std::pair<Trajectory, LogHalfReport> run_loghalf(
    double lambda, double T, const Grid1D& grid, const StepperConfig& cfg,
    const std::vector<double>& eps_values) {
  if (lambda <= 0.0 || T <= 0.0)
    throw OutOfRange("run_loghalf: need lambda > 0 and T > 0");

  const Field u0 = explicit_log_half_solution(lambda, T, grid, 0.0);
  const Nonlinearity nl(0.0);
  const FrLapOperator op(grid, FracOrder(0.5));
  const std::vector<double> ladder_eps =
      eps_values.empty() ? default_eps_ladder() : eps_values;

  // records spanning the decay window and a little past the extinction time
  std::vector<double> record_times;
  for (int k = 1; k <= 21; ++k) record_times.push_back(T * 0.05 * k);

  const EpsLadder ladder = build_ladder(op, nl, u0, ladder_eps, record_times, cfg);

  Trajectory limit;
  limit.eps = 0.0;
  limit.record(0.0, u0);
  for (double t : record_times) limit.record(t, extrapolate_limit(ladder, t));

  LogHalfReport rep;
  rep.lambda = lambda;
  rep.T_exact = total_mass(u0) / (2.0 * M_PI);

  const double threshold = 1e-6 * u0.max_value();
  rep.T_observed = limit.times.back();
  for (std::size_t k = 0; k < limit.size(); ++k) {
    if (limit.times[k] > 0.0 && limit.sup_norm[k] < threshold) {
      rep.T_observed = limit.times[k];
      rep.extinction_observed = true;
      break;
    }
  }

  // linear least squares of mass vs t over [0.1 T, 0.6 T]
  double sx = 0.0, sy = 0.0, sxy = 0.0, sxx = 0.0, cnt = 0.0;
  for (std::size_t k = 0; k < limit.size(); ++k) {
    const double t = limit.times[k];
    if (t < 0.1 * T || t > 0.6 * T) continue;
    sx += t; sy += limit.mass[k]; sxy += t * limit.mass[k]; sxx += t * t;
    cnt += 1.0;
  }
  if (cnt >= 2.0) {
    rep.mass_decay_slope = (sxy - sx * sy / cnt) / (sxx - sx * sx / cnt);
  }
  return {std::move(limit), rep};
}

}  // namespace fracdiff
