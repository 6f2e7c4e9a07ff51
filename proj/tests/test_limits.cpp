#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fracdiff/limits.hpp"

using namespace fracdiff;

namespace {

// Hand-built ladder whose rungs satisfy u_eps = u + a * eps^p exactly.
EpsLadder synthetic_ladder(const Grid1D& g, const Vector& u, double a, double p,
                           const std::vector<double>& eps_values) {
  EpsLadder ladder;
  ladder.eps_values = eps_values;
  for (double eps : eps_values) {
    Trajectory traj;
    traj.eps = eps;
    const double shift = a * std::pow(eps, p);
    // states hold v = u_eps - eps
    Vector v = (u.array() + shift - eps).matrix();
    traj.record(0.0, Field(g, v));
    traj.record(1.0, Field(g, v));
    ladder.trajectories.push_back(std::move(traj));
  }
  return ladder;
}

}  // namespace

TEST_CASE("default ladder is geometric and decreasing") {
  auto eps = default_eps_ladder();
  REQUIRE(eps.size() >= 4);
  CHECK(eps.front() == doctest::Approx(1e-1));
  // last rung is the smallest ladder value still >= eps_min
  CHECK(eps.back() >= 1e-5);
  CHECK(0.5 * eps.back() < 1e-5);
  for (std::size_t k = 1; k < eps.size(); ++k)
    CHECK(eps[k] == doctest::Approx(0.5 * eps[k - 1]));
  CHECK_THROWS_AS(default_eps_ladder(1e-5, 1e-1), OutOfRange);
}

TEST_CASE("extrapolation recovers the exact limit of a power model") {
  Grid1D g(10.0, 101);
  Vector u(g.n_points);
  for (int i = 0; i < g.n_points; ++i) u[i] = 1.0 + std::exp(-0.1 * g.x(i) * g.x(i));
  for (double p : {0.6, 1.0, 1.7}) {
    auto ladder = synthetic_ladder(g, u, 0.5, p, {4e-2, 2e-2, 1e-2, 5e-3});
    CHECK(extrapolation_exponent(ladder, 1.0) == doctest::Approx(p).epsilon(1e-10));
    Field lim = extrapolate_limit(ladder, 1.0);
    CHECK((lim.values - u).cwiseAbs().maxCoeff() < 1e-12 * u.maxCoeff());
  }
}

TEST_CASE("extrapolation rejects growing rung differences") {
  Grid1D g(10.0, 101);
  Vector u = Vector::Ones(g.n_points);
  // exponent -0.5: differences grow as eps decreases
  auto ladder = synthetic_ladder(g, u, 1e-3, -0.5, {4e-2, 2e-2, 1e-2});
  CHECK_THROWS_AS(extrapolate_limit(ladder, 1.0), NonConvergent);
  CHECK_THROWS_AS(extrapolate_limit(ladder, 0.3), OutOfRange);  // unknown time
}

TEST_CASE("ladder on the regularized flow: ordering and limit sanity") {
  Grid1D g(30.0, 257);
  FrLapOperator op(g, FracOrder(0.8));
  Nonlinearity nl(0.2);
  Field u0 = bump_field(g, 1.0, 4.0);
  StepperConfig cfg;
  cfg.dt = default_dt(g, op.order());
  std::vector<double> rec = {0.1, 0.2};
  auto eps = default_eps_ladder(4e-2, 2.4e-3, 0.5);  // 5 rungs, fast
  EpsLadder ladder = build_ladder(op, nl, u0, eps, rec, cfg);
  REQUIRE(ladder.trajectories.size() == eps.size());
  for (const auto& traj : ladder.trajectories) {
    CHECK(traj.times.size() == 3);
    CHECK(traj.min_value.back() >= 0.0);
  }
  Field lim = extrapolate_limit(ladder, 0.2);
  CHECK(lim.min_value() >= 0.0);
  CHECK(lim.max_value() <= u0.max_value());
  // limit mass stays close to the initial mass in the existence range
  CHECK(trapezoid(g, lim.values) ==
        doctest::Approx(trapezoid(g, u0.values)).epsilon(0.05));
  const double p = extrapolation_exponent(ladder, 0.2);
  CHECK(p >= 0.5);
  CHECK(p <= 2.0);

  CHECK_THROWS_AS(build_ladder(op, nl, u0, {1e-2, 2e-2}, rec, cfg), OutOfRange);
  CHECK_THROWS_AS(build_ladder(op, nl, u0, eps, {}, cfg), OutOfRange);
}

TEST_CASE("verdict labels") {
  CHECK(std::string(to_string(Verdict::EXISTS)) == "EXISTS");
  CHECK(std::string(to_string(Verdict::EXTINCT)) == "EXTINCT");
  CHECK(std::string(to_string(Verdict::INCONCLUSIVE)) == "INCONCLUSIVE");
}

TEST_CASE("verdicts on synthetic ladders") {
  Grid1D g(10.0, 101);
  Field u0 = bump_field(g, 1.0, 8.0);

  // rungs collapse onto u0 itself: mass preserved, positive center
  {
    Vector plateau = (u0.values.array() + 0.1).matrix();
    EpsLadder ladder = synthetic_ladder(g, plateau, 0.3, 1.0, {4e-2, 2e-2, 1e-2});
    CHECK(extinction_verdict(ladder, u0, 1.0, 1e-6) == Verdict::EXISTS);
  }
  // rungs collapse to zero
  {
    EpsLadder ladder =
        synthetic_ladder(g, Vector::Zero(g.n_points), 1.0, 1.0, {4e-2, 2e-2, 1e-2});
    CHECK(extinction_verdict(ladder, u0, 1.0, 1e-6) == Verdict::EXTINCT);
  }
  // rungs collapse to half of u0: neither extinct nor mass-preserving
  {
    EpsLadder ladder = synthetic_ladder(g, (0.5 * u0.values).eval(), 0.3, 1.0,
                                        {4e-2, 2e-2, 1e-2});
    CHECK(extinction_verdict(ladder, u0, 1.0, 1e-6) == Verdict::INCONCLUSIVE);
  }
}
