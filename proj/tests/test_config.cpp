#include "fcascade/config.hpp"
#include "fcascade/errors.hpp"

#include <doctest.h>

#include <sstream>
#include <string>

using namespace fcascade;

namespace {

RunConfig load(const std::string& text) {
  std::istringstream in(text);
  return load_run_config(in, "cfg.ini");
}

std::string error_of(const std::string& text) {
  try {
    load(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("ini parsing") {
  std::istringstream in("# comment\n[a]\nx = 1 # trailing\n; full-line comment\n\n[b]\ny=two words\n");
  const IniFile ini = parse_ini(in, "t.ini");
  CHECK(ini.sections.at("a").at("x").text == "1");
  CHECK(ini.sections.at("a").at("x").line == 3);
  CHECK(ini.sections.at("b").at("y").text == "two words");
}

TEST_CASE("ini syntax errors carry the line") {
  std::istringstream dup("[a]\nx = 1\nx = 2\n");
  CHECK_THROWS_WITH_AS(parse_ini(dup, "t.ini"), doctest::Contains("t.ini:3"), ConfigError);
  std::istringstream noeq("[a]\njunk\n");
  CHECK_THROWS_WITH_AS(parse_ini(noeq, "t.ini"), doctest::Contains("t.ini:2"), ConfigError);
  std::istringstream hdr("[a\n");
  CHECK_THROWS_AS(parse_ini(hdr, "t.ini"), ConfigError);
}

TEST_CASE("defaults") {
  const RunConfig cfg = load("");
  CHECK(cfg.model == ModelKind::Beam);
  CHECK(cfg.seed == 42);
  CHECK(cfg.beam.N == 32);
  CHECK(cfg.sim.dt == 1e-3);
  CHECK(cfg.controller.sample_period == 0.05);
  CHECK(cfg.quad.step == 1e-3);
  CHECK_FALSE(cfg.compare_modes);
}

TEST_CASE("full beam config") {
  const RunConfig cfg = load(
      "[run]\nmodel = beam\nseed = 7\nout = here\n"
      "[beam]\nN = 16\nlambda = 0.5\ntheta_ref = 1\n"
      "[quad]\nstep = 0.05\nscheme = imex-cn\n"
      "[sim]\ndt = 0.001\nT_final = 2\nscheme = rk4\n"
      "[controller]\nmode = linear\nsample_period = 0.01\n"
      "[initial]\nx0 = random\nx0_energy = 2\nz0 = 1\n"
      "[regulate]\ntheta_refs = 0.1 1 5\ncompare_modes = true\n");
  CHECK(cfg.seed == 7);
  CHECK(cfg.out == "here");
  CHECK(cfg.beam.N == 16);
  CHECK(cfg.beam.lambda == 0.5);
  CHECK(cfg.quad.scheme == Scheme::ImexCN);
  CHECK(cfg.sim.scheme == Scheme::RK4);
  CHECK(cfg.controller.mode == ControllerMode::LinearM0);
  CHECK(cfg.initial.x0_kind == "random");
  REQUIRE(cfg.initial.z0);
  CHECK((*cfg.initial.z0)(0) == 1.0);
  CHECK(cfg.theta_refs == std::vector<double>{0.1, 1.0, 5.0});
  CHECK(cfg.compare_modes);
}

TEST_CASE("custom linear config") {
  const RunConfig cfg = load(
      "[run]\nmodel = custom-linear\n"
      "[linear]\nA = -1 0; 0 -2\nB = 1; 1\nC = 1 0\nS = 0\nQX = 2 0; 0 1\n");
  CHECK(cfg.linear.A.rows() == 2);
  CHECK(cfg.linear.A(1, 1) == -2.0);
  CHECK(cfg.linear.B.cols() == 1);
  REQUIRE(cfg.linear.QX);
  const CascadeRealization m = build_model(cfg);
  CHECK(m.n() == 2);
  CHECK(m.m() == 1);
}

TEST_CASE("config errors name the line") {
  CHECK(error_of("[run]\nmodel = rocket\n").find("cfg.ini:2") != std::string::npos);
  CHECK(error_of("[run]\nbogus = 1\n").find("cfg.ini:2") != std::string::npos);
  CHECK(error_of("[nope]\nx = 1\n").find("cfg.ini:2") != std::string::npos);
  CHECK(error_of("[beam]\n\nN = many\n").find("cfg.ini:3") != std::string::npos);
  CHECK(error_of("[sim]\ndt = 0.1\n[controller]\nsample_period = 0.05\n") != "");
  CHECK(error_of("[run]\nmodel = scalar\n[initial]\nx0 = rest\n") != "");
  CHECK(error_of("[run]\nmodel = scalar\n[initial]\nz0 = 1 2\n") != "");
  CHECK(error_of("[run]\nmodel = custom-linear\n[linear]\nA = -1\n") != "");
  CHECK(error_of("[run]\nmodel = custom-linear\n[linear]\nA = -1 0; 0\nB = 1\nC = 1\nS = 0\n")
            .find("cfg.ini:4") != std::string::npos);
  CHECK(error_of("[run]\nmodel = custom-linear\n[linear]\nA = -1\nB = 1\nC = 1 1\nS = 0\n") !=
        "");
  CHECK(error_of("[run]\nmodel = scalar\n[controller]\ny_ref = 1 2\n") != "");
}

TEST_CASE("parse_reals") {
  CHECK(parse_reals("1 -2.5  3e-1", "w") == std::vector<double>{1.0, -2.5, 0.3});
  CHECK_THROWS_AS(parse_reals("1 x", "w"), ConfigError);
}

TEST_CASE("missing config file") {
  CHECK_THROWS_AS(load_run_config_file("/nonexistent/cfg.ini"), ConfigError);
}
