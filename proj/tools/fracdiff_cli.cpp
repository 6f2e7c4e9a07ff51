// Command-line front end: constants, evolve, barenblatt, verify, loghalf.
// Exit codes: 0 ok, 1 parse error, 2 solver error, 3 failed check.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <Eigen/Core>

#include "CLI11.hpp"
#include "json.hpp"

#include "fracdiff/diagnostics.hpp"
#include "fracdiff/io.hpp"
#include "fracdiff/limits.hpp"
#include "fracdiff/loghalf.hpp"
#include "fracdiff/selfsim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fracdiff;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitSolver = 2;
constexpr int kExitCheck = 3;

void apply_threads(int threads) {
  if (const char* env = std::getenv("FRACDIFF_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) threads = t;
  }
  if (threads > 0) Eigen::setNbThreads(threads);
}

bool in_existence_range(double s, double n) {
  return s > 0.5 && n >= 0.0 && n < 2.0 * s - 1.0;
}

int cmd_constants(double s, double n) {
  const FracOrder order(s);
  std::printf("s = %g, n = %g\n", s, n);
  if (!in_existence_range(s, n)) {
    std::fprintf(stderr,
                 "outside existence range: requires s > 1/2 and 0 <= n < 2s - 1\n");
    return kExitCheck;
  }
  const ScalingExponents exps(order, n);
  const VssConstants vc = vss_constant(order, n);
  std::printf("alpha       = %.12g\n", exps.alpha);
  std::printf("delta       = %.12g\n", exps.delta);
  std::printf("gamma_tail  = %.12g\n", exps.gamma_tail);
  if (n > 0.0) {
    std::printf("k(alpha,s)  = %.12g  (alpha = 2sn/(1+n) = %.12g)\n",
                power_constant(2.0 * s * n / (1.0 + n), order),
                2.0 * s * n / (1.0 + n));
  }
  std::printf("c(s)        = %.12g\n", log_constant(order));
  std::printf("K(s,n)      = %.12g\n", vc.K);
  std::printf("C(n,s)      = %.12g\n", vc.C);
  return kExitOk;
}

json verdict_json(Verdict v) { return to_string(v); }

int cmd_evolve(const fs::path& config_path, std::string out_override) {
  const ExperimentConfig cfg = parse_config(config_path);
  const fs::path out_dir = out_override.empty() ? fs::path(cfg.out_dir)
                                                : fs::path(out_override);
  fs::create_directories(out_dir);

  const Grid1D grid = cfg.grid();
  const FracOrder order(cfg.s);
  const Nonlinearity nl(cfg.n);
  const FrLapOperator op(grid, order);
  const Field u0 = cfg.initial_data();
  const StepperConfig stepper = cfg.stepper(order);
  const auto eps = default_eps_ladder(cfg.eps_max, cfg.eps_min, cfg.eps_ratio);

  std::vector<double> record_times;
  for (int k = 1; k <= cfg.records; ++k)
    record_times.push_back(cfg.t_end * std::pow(2.0, k - cfg.records));

  const EpsLadder ladder = build_ladder(op, nl, u0, eps, record_times, stepper);
  json manifest{{"s", cfg.s}, {"n", cfg.n}, {"eps_values", eps}};
  json rungs = json::array();
  for (std::size_t k = 0; k < ladder.trajectories.size(); ++k) {
    const std::string name = "rung_" + std::to_string(k);
    write_trajectory(out_dir / name, ladder.trajectories[k], cfg.s, cfg.n);
    rungs.push_back(name);
  }
  manifest["trajectories"] = rungs;

  const double t_final = record_times.back();
  const Verdict verdict =
      extinction_verdict(ladder, u0, t_final, 1e-6 * u0.max_value());
  manifest["verdicts"] = {{"extinction", verdict_json(verdict)}};

  Trajectory limit;
  limit.eps = 0.0;
  limit.record(0.0, u0);
  for (double t : record_times) limit.record(t, extrapolate_limit(ladder, t));
  write_trajectory(out_dir / "limit", limit, cfg.s, cfg.n);

  json summary{{"verdict", verdict_json(verdict)},
               {"initial_mass", total_mass(u0)},
               {"final_mass", limit.mass.back()},
               {"extrapolation_p", extrapolation_exponent(ladder, t_final)}};
  for (const std::string& check : cfg.checks) {
    if (check == "benilan_crandall") {
      summary["benilan_crandall_defect"] =
          benilan_crandall_defect(ladder.trajectories.back(), nl);
    } else if (check == "smoothing" && in_existence_range(cfg.s, cfg.n)) {
      try {
        const ExponentFit fit = smoothing_fit(limit, t_final / 30.0, t_final);
        summary["smoothing_exponent"] = fit.fitted_exponent;
      } catch (const WindowTooShort&) {
        summary["smoothing_exponent"] = nullptr;
      }
    }
  }
  write_text(out_dir / "manifest.json", manifest.dump(2));
  write_text(out_dir / "summary.json", summary.dump(2));
  std::printf("verdict: %s\n", to_string(verdict));
  return kExitOk;
}

int cmd_barenblatt(const fs::path& config_path, std::string out_override) {
  const ExperimentConfig cfg = parse_config(config_path);
  if (!in_existence_range(cfg.s, cfg.n)) {
    std::fprintf(stderr, "barenblatt requires the existence range\n");
    return kExitCheck;
  }
  const fs::path out_dir = out_override.empty() ? fs::path(cfg.out_dir)
                                                : fs::path(out_override);
  fs::create_directories(out_dir);

  const Grid1D grid = cfg.grid();
  const FracOrder order(cfg.s);
  const Nonlinearity nl(cfg.n);
  const ScalingExponents exps(order, cfg.n);
  const FrLapOperator op(grid, order);
  const Field u0 = cfg.initial_data();

  std::vector<double> record_times;
  for (int k = 0; k < cfg.records; ++k)
    record_times.push_back(cfg.t_end * std::pow(2.0, k - cfg.records + 1));
  const RenormalizedRun rr = renormalized_run(op, nl, u0, record_times);

  SelfSimilarProfile profile = profile_from_state(
      rr.states.back(), rr.amplitudes.back(), rr.times.back(), exps);
  std::vector<double> distances;
  {
    SelfSimilarProfile prev = profile_from_state(rr.states.front(),
                                                 rr.amplitudes.front(),
                                                 rr.times.front(), exps);
    const double h = (prev.xi[prev.xi.size() - 1] - prev.xi[0]) /
                     (static_cast<int>(prev.xi.size()) - 1);
    for (std::size_t k = 1; k < rr.states.size(); ++k) {
      SelfSimilarProfile cur =
          profile_from_state(rr.states[k], rr.amplitudes[k], rr.times[k], exps);
      distances.push_back(h * (cur.F - prev.F).lpNorm<1>());
      prev = std::move(cur);
    }
  }

  const Grid1D xi_op_grid(20.0, 1025);
  const FrLapOperator op_xi(xi_op_grid, order);
  const double residual = profile_equation_residual(profile, op_xi, nl, exps);
  const VssConstants vc = vss_constant(order, cfg.n);

  write_profile_csv(out_dir / "profile.csv", profile);
  json fit{{"alpha", exps.alpha},
           {"gamma_fit", profile.tail_exponent},
           {"gamma_expected", exps.gamma_tail},
           {"c_inf_fit", profile.c_inf},
           {"C_paper", vc.C},
           {"ratios",
            {{"gamma", profile.tail_exponent / exps.gamma_tail},
             {"c_inf", profile.c_inf / vc.C}}},
           {"profile_mass", profile.mass},
           {"sup_F", profile.F.maxCoeff()},
           {"equation_residual", residual},
           {"attraction_distances", distances}};
  write_text(out_dir / "fit.json", fit.dump(2));

  bool converging = distances.size() < 2;
  for (std::size_t k = 0; k + 1 < distances.size() && !converging; ++k)
    if (distances[k + 1] <= distances[k]) converging = true;
  if (!converging) {
    std::fprintf(stderr, "profile rescalings are not converging\n");
    return kExitCheck;
  }
  std::printf("gamma_fit = %.6g (expected %.6g), c_inf = %.6g (C = %.6g), "
              "residual = %.3g\n",
              profile.tail_exponent, exps.gamma_tail, profile.c_inf, vc.C,
              residual);
  return kExitOk;
}

int cmd_loghalf(double lambda, double T, const std::string& out_dir_s) {
  const Grid1D grid(100.0, 1025);
  StepperConfig cfg;
  cfg.dt = default_dt(grid, FracOrder(0.5));
  auto [limit, rep] = run_loghalf(lambda, T, grid, cfg);

  json out{{"lambda", rep.lambda},
           {"T_exact", rep.T_exact},
           {"T_observed", rep.T_observed},
           {"extinction_observed", rep.extinction_observed},
           {"mass_decay_slope", rep.mass_decay_slope},
           {"mass_decay_slope_explicit", -2.0 * M_PI}};
  std::printf("T_exact = %.6g, T_observed = %.6g, mass slope = %.6g "
              "(explicit solution: %.6g)\n",
              rep.T_exact, rep.T_observed, rep.mass_decay_slope, -2.0 * M_PI);
  if (!out_dir_s.empty()) {
    fs::create_directories(out_dir_s);
    write_trajectory(fs::path(out_dir_s) / "limit", limit, 0.5, 0.0);
    write_text(fs::path(out_dir_s) / "report.json", out.dump(2));
  }
  return kExitOk;
}

int verify_operator(json& report) {
  bool ok = true;
  // power-law action against the closed-form constant
  {
    const double s = 0.8, n = 0.2;
    const FracOrder order(s);
    const double alpha = 2.0 * s * n / (1.0 + n);
    const double k = power_constant(alpha, order);
    Grid1D g(50.0, 2049);
    FrLapOperator op(g, order);
    Vector v(g.n_points);
    for (int i = 0; i < g.n_points; ++i)
      v[i] = std::pow(std::max(std::fabs(g.x(i)), 0.5 * g.spacing), alpha);
    auto tail = [alpha](double y) { return std::pow(std::fabs(y), alpha); };
    Vector lv = op.apply_values(v, tail);
    double worst = 0.0;
    for (int i = 0; i < g.n_points; ++i) {
      const double x = std::fabs(g.x(i));
      if (x < 0.5 || x > 0.25 * g.half_width) continue;
      const double ref = k * std::pow(x, alpha - 2.0 * s);
      worst = std::max(worst, std::fabs(lv[i] - ref) / ref);
    }
    report["power_action_max_rel_err"] = worst;
    ok = ok && worst < 0.01;
  }
  // s = 1/2 elliptic identity
  {
    Grid1D g(200.0, 4097);
    FrLapOperator op(g, FracOrder(0.5));
    Vector v(g.n_points);
    for (int i = 0; i < g.n_points; ++i)
      v[i] = std::log(2.0 / (1.0 + g.x(i) * g.x(i)));
    auto tail = [](double y) { return std::log(2.0 / (1.0 + y * y)); };
    Vector lv = op.apply_values(v, tail);
    double worst = 0.0;
    for (int i = 0; i < g.n_points; ++i) {
      const double ref = 2.0 / (1.0 + g.x(i) * g.x(i));
      worst = std::max(worst, std::fabs(lv[i] - ref));
    }
    report["log_identity_max_err"] = worst / 2.0;
    ok = ok && worst / 2.0 < 0.01;
  }
  return ok ? kExitOk : kExitCheck;
}

int verify_comparison(json& report) {
  const double s = 0.8, n = 0.2, tol = 1e-3;
  const Grid1D g(50.0, 513);
  const FracOrder order(s);
  const Nonlinearity nl(n);
  const FrLapOperator op(g, order);
  StepperConfig cfg;
  cfg.dt = default_dt(g, order);

  const Field f = bump_field(g, 1.0, 3.0);
  const Field wide = bump_field(g, 1.0, 6.0);
  std::vector<double> times{0.05, 0.1, 0.2, 0.4};
  RegularizedNonlinearity rnl(nl, 1e-3);
  const Trajectory tf = run(op, rnl, f, times.back(), cfg, times);
  const Trajectory tw = run(op, rnl, wide, times.back(), cfg, times);

  bool ok = true;
  double worst_cc = 0.0, worst_sh = 0.0;
  for (std::size_t k = 0; k < tf.size(); ++k) {
    const auto cc = concentration_compare(tw.states[k], tf.states[k], tol);
    worst_cc = std::max(worst_cc, cc.max_violation);
    ok = ok && cc.verdict;
    const auto sh = shifting_compare(tw.states[k], tf.states[k], tol);
    worst_sh = std::max(worst_sh, sh.max_violation);
    ok = ok && sh.verdict;
  }
  const auto al = aleksandrov_check(tf, 0.0, tol);
  report["concentration_max_violation"] = worst_cc;
  report["shifting_max_violation"] = worst_sh;
  report["aleksandrov_max_violation"] = al.max_violation;
  ok = ok && al.verdict;
  return ok ? kExitOk : kExitCheck;
}

int verify_scaling(json& report) {
  const double s = 0.8, n = 0.2;
  const FracOrder order(s);
  const Nonlinearity nl(n);
  const ScalingExponents exps(order, n);
  const Grid1D g(50.0, 513);
  const FrLapOperator op(g, order);
  const Field u0 = cauchy_tail_field(g, 1.0, 1.0, exps.gamma_tail);
  std::vector<double> times;
  for (int k = 0; k <= 12; ++k) times.push_back(0.5 * std::pow(2.0, 0.5 * k));
  const RenormalizedRun rr = renormalized_run(op, nl, u0, times);
  const ExponentFit fit =
      smoothing_fit(rr.times, rr.sup_norms, times.front(), times.back());
  report["smoothing_exponent"] = fit.fitted_exponent;
  report["smoothing_expected"] = -exps.alpha;
  report["r_squared"] = fit.r_squared;
  const double rel = std::fabs(fit.fitted_exponent + exps.alpha) / exps.alpha;
  return rel < 0.05 ? kExitOk : kExitCheck;
}

int verify_loghalf(json& report) {
  // PDE identity of the explicit solution at sampled times
  const Grid1D g(200.0, 2049);
  const FrLapOperator op(g, FracOrder(0.5));
  const double lambda = 1.0, T = 1.0;
  double worst = 0.0;
  for (double t : {0.1, 0.5}) {
    const Field u = explicit_log_half_solution(lambda, T, g, t);
    Vector logu(g.n_points);
    for (int i = 0; i < g.n_points; ++i) logu[i] = std::log(u.values[i]);
    const double a = 2.0 * lambda * (T - t);
    auto tail = [a, lambda](double y) {
      return std::log(a / (lambda * lambda + y * y));
    };
    const Vector lv = op.apply_values(logu, tail);
    // dU/dt = -2 lambda / (lambda^2 + x^2); identity: dU/dt + L(log U) = 0
    double num = 0.0, den = 0.0;
    for (int i = 0; i < g.n_points; ++i) {
      const double x = g.x(i);
      const double dudt = -2.0 * lambda / (lambda * lambda + x * x);
      num = std::max(num, std::fabs(dudt + lv[i]));
      den = std::max(den, std::fabs(dudt));
    }
    worst = std::max(worst, num / den);
  }
  report["pde_identity_rel_err"] = worst;
  return worst < 0.02 ? kExitOk : kExitCheck;
}

int cmd_verify(const std::string& suite, const std::string& out_dir) {
  json report;
  int rc = kExitOk;
  auto runsuite = [&](const std::string& name, int (*fn)(json&)) {
    json sub;
    const int r = fn(sub);
    sub["passed"] = (r == kExitOk);
    report[name] = sub;
    if (r != kExitOk) rc = kExitCheck;
  };
  if (suite == "operator" || suite == "all") runsuite("operator", verify_operator);
  if (suite == "comparison" || suite == "all") runsuite("comparison", verify_comparison);
  if (suite == "scaling" || suite == "all") runsuite("scaling", verify_scaling);
  if (suite == "loghalf" || suite == "all") runsuite("loghalf", verify_loghalf);
  if (report.empty()) {
    std::fprintf(stderr, "unknown suite: %s\n", suite.c_str());
    return kExitParse;
  }
  std::printf("%s\n", report.dump(2).c_str());
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_text(fs::path(out_dir) / ("verify_" + suite + ".json"), report.dump(2));
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for 1D very singular fractional diffusion"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker thread count (env FRACDIFF_THREADS overrides)");

  double s = 0.75, n = 0.0, lambda = 1.0, T = 1.0;
  std::string config_path, out_dir, suite = "all";

  auto* constants = app.add_subcommand("constants", "print the derived constants");
  constants->add_option("--s", s, "fractional order in (0,1)")->required();
  constants->add_option("--n", n, "nonlinearity exponent >= 0")->required();

  auto* evolve = app.add_subcommand("evolve", "run an eps-ladder experiment");
  evolve->add_option("--config", config_path, "config file")->required();
  evolve->add_option("--out", out_dir, "output directory override");

  auto* barenblatt = app.add_subcommand("barenblatt", "extract the self-similar profile");
  barenblatt->add_option("--config", config_path, "config file")->required();
  barenblatt->add_option("--out", out_dir, "output directory override");

  auto* verify = app.add_subcommand("verify", "run a named verification suite");
  verify->add_option("suite", suite, "operator|comparison|scaling|loghalf|all");
  verify->add_option("--out", out_dir, "output directory");

  auto* loghalf = app.add_subcommand("loghalf", "s = 1/2 logarithmic-case experiment");
  loghalf->add_option("--lambda", lambda, "profile width");
  loghalf->add_option("--T", T, "extinction time of the explicit datum");
  loghalf->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitParse;
  }

  apply_threads(threads);
  try {
    if (constants->parsed()) return cmd_constants(s, n);
    if (evolve->parsed()) return cmd_evolve(config_path, out_dir);
    if (barenblatt->parsed()) return cmd_barenblatt(config_path, out_dir);
    if (verify->parsed()) return cmd_verify(suite, out_dir);
    if (loghalf->parsed()) return cmd_loghalf(lambda, T, out_dir);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitParse;
  } catch (const NotConverging& e) {
    std::fprintf(stderr, "check failed: %s\n", e.what());
    return kExitCheck;
  } catch (const Error& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  }
  return kExitParse;
}
