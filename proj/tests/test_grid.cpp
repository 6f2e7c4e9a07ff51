#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fracdiff/grid.hpp"

using namespace fracdiff;

TEST_CASE("grid geometry") {
  Grid1D g(10.0, 101);
  CHECK(g.spacing == doctest::Approx(0.2));
  CHECK(g.x(0) == doctest::Approx(-10.0));
  CHECK(g.x(100) == doctest::Approx(10.0));
  CHECK(g.x(g.center_index()) == doctest::Approx(0.0));
  CHECK_THROWS_AS(Grid1D(10.0, 100), Error);  // even point count
  CHECK_THROWS_AS(Grid1D(-1.0, 101), Error);
}

TEST_CASE("field invariants and interpolation") {
  Grid1D g(5.0, 11);
  CHECK_THROWS_AS(Field(g, Vector::Zero(10)), GridMismatch);
  Field f = Field::constant(g, 2.0);
  CHECK(f.at(0.25) == doctest::Approx(2.0));
  CHECK(f.at(7.0) == doctest::Approx(2.0));  // constant tail
  Field z = Field::zero(g);
  CHECK(z.at(100.0) == 0.0);
}

TEST_CASE("total mass of a hat function") {
  // hat of height 1 on [-1, 1]
  Grid1D g(5.0, 2001);
  Vector v(g.n_points);
  for (int i = 0; i < g.n_points; ++i)
    v[i] = std::max(0.0, 1.0 - std::fabs(g.x(i)));
  CHECK(total_mass(Field(g, v)) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("total and cumulative mass against the arctan antiderivative") {
  Grid1D g(200.0, 4001);
  Vector v(g.n_points);
  for (int i = 0; i < g.n_points; ++i) v[i] = 1.0 / (1.0 + g.x(i) * g.x(i));
  TailModel t;
  t.left_amplitude = t.right_amplitude = 1.0;
  t.decay_exponent = 2.0;
  t.activation_radius = g.half_width;
  Field f(g, v, t);
  CHECK(total_mass(f) == doctest::Approx(M_PI).epsilon(0.01));

  const Vector cum = cumulative_mass(f);
  for (int i = 0; i < g.n_points; i += 500) {
    const double ref = M_PI / 2.0 + std::atan(g.x(i));
    CHECK(cum[i] == doctest::Approx(ref).epsilon(0.01));
  }
  // consistency: last entry + right tail = total mass
  const double right = t.side_mass(t.right_amplitude, g.half_width);
  CHECK(cum[g.n_points - 1] + right == doctest::Approx(total_mass(f)).epsilon(1e-9));
  // monotone
  for (int i = 1; i < g.n_points; ++i) CHECK(cum[i] >= cum[i - 1]);
}

TEST_CASE("tail integrability errors") {
  Grid1D g(10.0, 101);
  TailModel t;
  t.left_amplitude = t.right_amplitude = 1.0;
  t.decay_exponent = 1.0;  // borderline, not integrable
  t.activation_radius = g.half_width;
  Field f(g, Vector::Ones(g.n_points), t);
  CHECK_THROWS_AS(total_mass(f), TailNotIntegrable);
  CHECK_THROWS_AS(cumulative_mass(f), TailNotIntegrable);
}

TEST_CASE("rearrangement predicate") {
  Grid1D g(10.0, 201);
  CHECK(is_rearranged(bump_field(g, 1.0, 3.0), 1e-12));
  CHECK_FALSE(is_rearranged(bump_field(g, 1.0, 3.0, 5.0 * g.spacing), 1e-6));
  Vector v = Vector::Zero(g.n_points);
  v[g.center_index() + 3] = 1.0;  // asymmetric spike
  CHECK_FALSE(is_rearranged(Field(g, v), 1e-6));
  CHECK(is_rearranged(Field::zero(g), 1e-6));
}

TEST_CASE("generated data have the requested mass") {
  Grid1D g(50.0, 1001);
  CHECK(total_mass(bump_field(g, 2.5, 4.0)) == doctest::Approx(2.5).epsilon(1e-10));
  Field c = cauchy_tail_field(g, 1.5, 2.0, 2.0);
  CHECK(total_mass(c) == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(c.tail.has_value());
  CHECK(c.tail->decay_exponent == doctest::Approx(2.0));
}

TEST_CASE("power tail fit recovers amplitude and exponent") {
  Grid1D g(100.0, 2001);
  Vector v(g.n_points);
  const double A = 3.0, gamma = 1.5;
  for (int i = 0; i < g.n_points; ++i)
    v[i] = A * std::pow(std::max(std::fabs(g.x(i)), 1.0), -gamma);
  auto t = fit_power_tail(Field(g, v));
  REQUIRE(t.has_value());
  CHECK(t->decay_exponent == doctest::Approx(gamma).epsilon(1e-6));
  CHECK(t->left_amplitude == doctest::Approx(A).epsilon(1e-6));
  CHECK(t->right_amplitude == doctest::Approx(A).epsilon(1e-6));

  // too small to fit
  CHECK_FALSE(fit_power_tail(Field::zero(g)).has_value());
}
