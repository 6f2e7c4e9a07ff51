#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fracdiff/io.hpp"

using namespace fracdiff;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("fracdiff_io_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("field round trip preserves values and tail model") {
  TempDir tmp;
  Grid1D g(25.0, 101);
  TailModel tail;
  tail.left_amplitude = 0.3;
  tail.right_amplitude = 0.4;
  tail.decay_exponent = 1.5;
  tail.activation_radius = 25.0;
  Field f(g, bump_field(g, 2.0, 1.5).values, tail);

  const fs::path p = tmp.path / "field.csv";
  write_field_csv(p, f);
  Field back = read_field_csv(p);

  CHECK(back.grid == g);
  CHECK((back.values - f.values).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(back.tail.has_value());
  CHECK(back.tail->left_amplitude == 0.3);
  CHECK(back.tail->right_amplitude == 0.4);
  CHECK(back.tail->decay_exponent == 1.5);
  CHECK(back.tail->activation_radius == 25.0);

  // a tailless field round-trips without growing one
  const fs::path p2 = tmp.path / "compact.csv";
  write_field_csv(p2, Field(g, f.values));
  CHECK_FALSE(read_field_csv(p2).tail.has_value());

  // missing sidecar and malformed rows are parse errors
  fs::remove(p.string() + ".json");
  CHECK_THROWS_AS(read_field_csv(p), ParseError);
  CHECK_THROWS_AS(read_field_csv(tmp.path / "missing.csv"), ParseError);
}

TEST_CASE("trajectory round trip") {
  TempDir tmp;
  Grid1D g(10.0, 51);
  Trajectory traj;
  traj.eps = 2.5e-3;
  traj.record(0.0, bump_field(g, 1.0, 1.0));
  traj.record(0.5, bump_field(g, 0.9, 1.2));
  traj.record(1.0, bump_field(g, 0.8, 1.4));

  const fs::path dir = tmp.path / "run";
  write_trajectory(dir, traj, 0.8, 0.2);
  Trajectory back = read_trajectory(dir);

  REQUIRE(back.size() == 3);
  CHECK(back.eps == 2.5e-3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(back.times[k] == traj.times[k]);
    CHECK((back.states[k].values - traj.states[k].values)
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK(back.mass[k] == doctest::Approx(traj.mass[k]));
    CHECK(back.sup_norm[k] == doctest::Approx(traj.sup_norm[k]));
  }
  CHECK_THROWS_AS(read_trajectory(tmp.path / "absent"), ParseError);
}

TEST_CASE("profile csv is written with both columns") {
  TempDir tmp;
  SelfSimilarProfile p;
  Grid1D xs(5.0, 11);
  p.xi = xs.nodes();
  p.F = Vector::LinSpaced(11, 1.0, 2.0);
  const fs::path path = tmp.path / "profile.csv";
  write_profile_csv(path, p);
  std::ifstream in(path);
  std::string header, row;
  REQUIRE(std::getline(in, header));
  CHECK(header == "xi,F");
  int rows = 0;
  while (std::getline(in, row)) ++rows;
  CHECK(rows == 11);
}

TEST_CASE("config parsing: full file, defaults, and errors") {
  TempDir tmp;
  const fs::path p = tmp.path / "exp.cfg";
  {
    std::ofstream out(p);
    out << "# experiment\n"
        << "[model]\n s = 0.8\n n = 0.2\n"
        << "[grid]\n half_width = 30\n n_points = 257\n"
        << "[data]\n kind = cauchy_tail\n mass = 2.0\n width = 1.5\n q = 2.5\n"
        << "[ladder]\n eps_max = 1e-2\n eps_min = 1e-4\n ratio = 0.25\n"
        << "[time]\n t_end = 4\n records = 16\n"
        << "[stepper]\n dt = 0.001\n adaptive = false\n"
        << "[output]\n dir = results\n"
        << "[checks]\n names = mass, comparison\n";
  }
  ExperimentConfig cfg = parse_config(p);
  CHECK(cfg.s == 0.8);
  CHECK(cfg.n == 0.2);
  CHECK(cfg.half_width == 30.0);
  CHECK(cfg.n_points == 257);
  CHECK(cfg.data_kind == "cauchy_tail");
  CHECK(cfg.mass == 2.0);
  CHECK(cfg.q == 2.5);
  CHECK(cfg.eps_ratio == 0.25);
  CHECK(cfg.t_end == 4.0);
  CHECK(cfg.records == 16);
  CHECK(cfg.dt == 0.001);
  CHECK_FALSE(cfg.adaptive);
  CHECK(cfg.out_dir == "results");
  REQUIRE(cfg.checks.size() == 2);
  CHECK(cfg.checks[0] == "mass");
  CHECK(cfg.checks[1] == "comparison");

  // derived helpers
  CHECK(cfg.grid() == Grid1D(30.0, 257));
  StepperConfig sc = cfg.stepper(FracOrder(0.8));
  CHECK(sc.dt == 0.001);
  CHECK_FALSE(sc.adaptive);
  Field u0 = cfg.initial_data();
  CHECK(u0.grid == cfg.grid());
  CHECK(total_mass(u0) == doctest::Approx(2.0).epsilon(1e-6));

  // defaults survive a minimal file
  const fs::path pmin = tmp.path / "min.cfg";
  { std::ofstream out(pmin); out << "[model]\ns = 0.9\n"; }
  ExperimentConfig mini = parse_config(pmin);
  CHECK(mini.s == 0.9);
  CHECK(mini.n == 0.0);
  CHECK(mini.n_points == 513);
  CHECK(mini.data_kind == "bump");

  auto expect_parse_error = [&](const std::string& text) {
    const fs::path bad = tmp.path / "bad.cfg";
    { std::ofstream out(bad); out << text; }
    CHECK_THROWS_AS(parse_config(bad), ParseError);
  };
  expect_parse_error("[nosuchsection]\nkey = 1\n");
  expect_parse_error("[model]\nnosuchkey = 1\n");
  expect_parse_error("[model]\ns 0.8\n");
  expect_parse_error("[model]\ns = zebra\n");
  expect_parse_error("[model]\ns = 1.5\n");
  expect_parse_error("[grid]\nn_points = 10\n");
  CHECK_THROWS_AS(parse_config(tmp.path / "never_written.cfg"), ParseError);
}
