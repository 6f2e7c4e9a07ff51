#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fracdiff/evolve.hpp"

using namespace fracdiff;

namespace {

struct Setup {
  Grid1D g{30.0, 257};
  FrLapOperator op{g, FracOrder(0.8)};
  RegularizedNonlinearity rnl{Nonlinearity(0.2), 1e-2};
};

}  // namespace

TEST_CASE("config validation") {
  StepperConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.dt = -1.0;
  CHECK_THROWS_AS(cfg.validate(), OutOfRange);
  cfg = StepperConfig{};
  cfg.newton_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), OutOfRange);
  Grid1D g(10.0, 101);
  CHECK(default_dt(g, FracOrder(0.5)) == doctest::Approx(g.spacing / 10.0));
}

TEST_CASE("zero and constant fields are fixed points of one step") {
  Setup su;
  StepperConfig cfg;
  cfg.dt = 0.01;
  Field z = Field::zero(su.g);
  Field z1 = implicit_step(su.op, su.rnl, z, cfg.dt, cfg);
  CHECK(z1.values.cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  // a constant v with constant tail: Phi_eps(v) is constant, annihilated
  Field c = Field::constant(su.g, 0.5);
  Field c1 = implicit_step(su.op, su.rnl, c, cfg.dt, cfg);
  CHECK((c1.values.array() - 0.5).abs().maxCoeff() < 1e-8);
}

TEST_CASE("single step: positivity, sup decay, and the mass identity") {
  Setup su;
  Field v0 = bump_field(su.g, 1.0, 4.0);
  StepperConfig cfg;
  cfg.dt = default_dt(su.g, su.op.order());
  int iters = 0;
  Field v1 = implicit_step(su.op, su.rnl, v0, cfg.dt, cfg, &iters);
  CHECK(iters >= 1);
  CHECK(v1.min_value() >= 0.0);
  CHECK(v1.max_value() < v0.max_value());

  // discrete conservation: window mass change equals -outflux to Newton tol
  const double m0 = trapezoid(su.g, v0.values);
  const double m1 = trapezoid(su.g, v1.values);
  const double out = step_outflux(su.op, su.rnl, v0, v1, cfg.dt);
  CHECK(std::fabs(m1 + out - m0) / m0 < 1e-6);
}

TEST_CASE("rejects inadmissible starting data") {
  Setup su;
  Vector v = Vector::Constant(su.g.n_points, -1.0);
  StepperConfig cfg;
  CHECK_THROWS(implicit_step(su.op, su.rnl, Field(su.g, v), 0.01, cfg));
}

TEST_CASE("run records at requested times and decays monotonically") {
  Setup su;
  Field v0 = bump_field(su.g, 1.0, 4.0);
  StepperConfig cfg;
  cfg.dt = default_dt(su.g, su.op.order());
  std::vector<double> want = {0.05, 0.1, 0.2, 0.4};
  Trajectory traj = run(su.op, su.rnl, v0, 0.4, cfg, want);
  REQUIRE(traj.size() == 5);  // t = 0 plus the four requests
  CHECK(traj.times[0] == doctest::Approx(0.0));
  for (std::size_t k = 0; k < want.size(); ++k)
    CHECK(traj.times[k + 1] == doctest::Approx(want[k]));
  for (std::size_t k = 1; k < traj.size(); ++k) {
    CHECK(traj.sup_norm[k] < traj.sup_norm[k - 1]);
    CHECK(traj.min_value[k] >= 0.0);
  }
  // mass leaks only through the window boundary; over this short run the
  // tail-corrected mass stays within a fraction of a percent
  CHECK(std::fabs(traj.mass.back() - traj.mass.front()) / traj.mass.front() < 0.01);
  CHECK(traj.eps == doctest::Approx(su.rnl.eps));
}

TEST_CASE("full recording mode stores every accepted step") {
  Setup su;
  Field v0 = bump_field(su.g, 1.0, 4.0);
  StepperConfig cfg;
  cfg.dt = default_dt(su.g, su.op.order());
  cfg.adaptive = false;
  Trajectory traj = run(su.op, su.rnl, v0, 10.0 * cfg.dt, cfg);
  CHECK(traj.size() == 11);
  for (std::size_t k = 1; k < traj.size(); ++k)
    CHECK(traj.times[k] == doctest::Approx(traj.times[k - 1] + cfg.dt));
}

TEST_CASE("time-monotonicity defect is nonpositive along a run") {
  Setup su;
  Field v0 = bump_field(su.g, 1.0, 4.0);
  StepperConfig cfg;
  cfg.dt = default_dt(su.g, su.op.order());
  std::vector<double> rec;
  for (int k = 1; k <= 8; ++k) rec.push_back(0.05 * k);
  Trajectory traj = run(su.op, su.rnl, v0, rec.back(), cfg, rec);
  const double defect = benilan_crandall_defect(traj, su.rnl.base);
  CHECK(defect <= 1e-3 * traj.sup_norm.front());
}
