#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fracdiff/evolve.hpp"
#include "fracdiff/selfsim.hpp"

namespace fracdiff {

/// Field persistence: `<path>` holds CSV with header `x,value`; a JSON
/// sidecar `<path>.json` carries {L, n_points, tail}. Values are written
/// with 17 significant digits.
void write_field_csv(const std::filesystem::path& path, const Field& f);
Field read_field_csv(const std::filesystem::path& path);

/// Trajectory persistence: a directory of `t_<index>.csv` field files plus
/// `trajectory.json` {eps, s, n, times, records}.
void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj,
                      double s, double n);
Trajectory read_trajectory(const std::filesystem::path& dir);

/// Profile CSV with header `xi,F`.
void write_profile_csv(const std::filesystem::path& path,
                       const SelfSimilarProfile& p);

/// Generic pretty-printed JSON report (string is assumed valid JSON text).
void write_text(const std::filesystem::path& path, const std::string& text);

/// Experiment configuration parsed from a flat sectioned key-value file:
///   [model]   s, n
///   [grid]    half_width, n_points
///   [data]    kind (bump|cauchy_tail|vss_like|custom_csv), mass, width,
///             center, q, path
///   [ladder]  eps_max, eps_min, ratio
///   [time]    t_end, records
///   [stepper] dt, dt_min, dt_max, newton_tol, newton_max_iter, adaptive
///   [output]  dir
///   [checks]  names (comma separated)
/// Unknown sections or keys are parse errors.
struct ExperimentConfig {
  double s = 0.75;
  double n = 0.0;
  double half_width = 50.0;
  int n_points = 513;
  std::string data_kind = "bump";
  double mass = 1.0;
  double width = 2.0;
  double center = 0.0;
  double q = 2.0;          // tail exponent of cauchy_tail data
  std::string data_path;   // custom_csv
  double eps_max = 1e-1;
  double eps_min = 1e-5;
  double eps_ratio = 0.5;
  double t_end = 1.0;
  int records = 8;
  double dt = 0.0;         // 0 = default h^(2s)/10
  double dt_min = 1e-9;
  double dt_max = 1.0;
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  bool adaptive = true;
  std::string out_dir = "out";
  std::vector<std::string> checks;

  Grid1D grid() const { return Grid1D(half_width, n_points); }
  StepperConfig stepper(FracOrder order) const;
  Field initial_data() const;
};

ExperimentConfig parse_config(const std::filesystem::path& path);

}  // namespace fracdiff
