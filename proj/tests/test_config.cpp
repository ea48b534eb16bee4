#include <gtest/gtest.h>

#include "config.hpp"

using namespace hjft;
using hjft::cli::parse_config;
using nlohmann::json;

namespace {

std::string error_path(const std::string& text) {
  try {
    parse_config(json::parse(text));
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

}  // namespace

TEST(Config, EmptyObjectGivesDefaults) {
  const auto c = parse_config(json::object());
  EXPECT_EQ(c.delta, 0.05);
  EXPECT_EQ(c.seed, 1u);
  EXPECT_FALSE(c.glimm_c);
  EXPECT_EQ(c.scenario.a(0.3), 1.0);
  EXPECT_EQ(c.output.times, std::vector<double>{1.0});
  EXPECT_TRUE(c.verify.suites.empty());
}

TEST(Config, InterfaceExample) {
  const auto c = parse_config(json::parse(R"j({
    "a": {"jumps": [0.0], "pieces": [1.0, 1.5]}, "g": 1.0, "p0": 0.0,
    "window": [-1.0, 2.0], "mesh": 0.5, "delta": 0.05})j"));
  const auto pb = make_problem(c.scenario, c.delta);
  EXPECT_EQ(pb.a.values(), (std::vector<double>{1.0, 1.5}));
  EXPECT_EQ(c.scenario.x_lo, -1.0);
  EXPECT_EQ(c.scenario.x_hi, 2.0);
}

TEST(Config, ExpressionsAndPotential) {
  const auto c = parse_config(json::parse(R"j({"a": "1.5 + 0.25*tanh(4*x)", "u0": "0.5*sin(pi*x)/pi"})j"));
  EXPECT_NEAR(c.scenario.a(0.0), 1.5, 1e-15);
  ASSERT_TRUE(c.scenario.u0);
  EXPECT_NEAR(c.scenario.u0_at(0.5), 0.5 / M_PI, 1e-15);
}

TEST(Config, BuiltinAndOverrides) {
  const auto c = parse_config(json::parse(R"j({"builtin": "random", "seed": 4, "horizon": 0.5})j"));
  EXPECT_EQ(c.scenario.name, "random-4");
  EXPECT_EQ(c.scenario.horizon, 0.5);
  EXPECT_EQ(parse_config(json::parse(R"j({"builtin": "interface"})j")).scenario.name, "interface");
}

TEST(Config, ErrorsCarryFieldPaths) {
  EXPECT_EQ(error_path(R"j({"delta": 0})j"), "delta");
  EXPECT_EQ(error_path(R"j({"delta": "x"})j"), "delta");
  EXPECT_EQ(error_path(R"j({"mesh": -1})j"), "mesh");
  EXPECT_EQ(error_path(R"j({"horizon": 0})j"), "horizon");
  EXPECT_EQ(error_path(R"j({"window": [1, -1]})j"), "window");
  EXPECT_EQ(error_path(R"j({"window": [0, "a"]})j"), "window[1]");
  EXPECT_EQ(error_path(R"j({"bogus": 1})j"), "bogus");
  EXPECT_EQ(error_path(R"j({"builtin": "nope"})j"), "builtin");
  EXPECT_EQ(error_path(R"j({"a": {"jumps": [0.0], "pieces": [1.0]}})j"), "a.pieces");
  EXPECT_EQ(error_path(R"j({"a": {"jumps": [0.0], "pieces": [1.0, "1 +"]}})j"), "a.pieces[1]");
  EXPECT_EQ(error_path(R"j({"a": {"jumps": [5.0], "pieces": [1.0, 1.5]}})j"), "a.jumps[0]");
  EXPECT_EQ(error_path(R"j({"a": {"pieces": [1.0], "extra": 1}})j"), "a.extra");
  EXPECT_EQ(error_path(R"j({"a": 3.0})j"), "a");
  EXPECT_EQ(error_path(R"j({"g": {"jumps": [0.5], "pieces": [1.0, 0.1]}})j"), "g");
  EXPECT_EQ(error_path(R"j({"u0": 0.0, "p0": 0.0})j"), "p0");
  EXPECT_EQ(error_path(R"j({"model": {"family": "cubic"}})j"), "model.family");
  EXPECT_EQ(error_path(R"j({"model": {"family": "quadratic_cap"}})j"), "model");
  EXPECT_EQ(error_path(R"j({"model": {"a_range": [2, 1]}})j"), "model.a_range");
  EXPECT_EQ(error_path(R"j({"output": {"times": [2.0]}})j"), "output.times[0]");
  EXPECT_EQ(error_path(R"j({"output": {"points": 1}})j"), "output.points");
  EXPECT_EQ(error_path(R"j({"convergence": {"deltas": [0.1, 0.2]}})j"), "convergence.deltas[1]");
  EXPECT_EQ(error_path(R"j({"convergence": {"fd_dx": 0}})j"), "convergence.fd_dx");
  EXPECT_EQ(error_path(R"j({"verify": {"suites": ["entropy", "x"]}})j"), "verify.suites[1]");
  EXPECT_EQ(error_path(R"j({"verify": {"bumps": 0}})j"), "verify.bumps");
  EXPECT_EQ(error_path(R"j({"riemann": {"a_l": 9}})j"), "riemann.a_l");
  EXPECT_EQ(error_path(R"j({"riemann": {"t": 0}})j"), "riemann.t");
  EXPECT_EQ(error_path(R"j({"seed": -1})j"), "seed");
  EXPECT_EQ(error_path(R"j([1, 2])j"), "");
}

TEST(Config, QuadraticCapNeedsGuardOnlyThere) {
  const auto c = parse_config(json::parse(R"j({"model": {"family": "quadratic_cap", "p_guard": 3}})j"));
  EXPECT_EQ(c.scenario.model.family(), Family::quadratic_cap);
  EXPECT_EQ(error_path(R"j({"model": {"p_guard": 3}})j"), "model.p_guard");
}
