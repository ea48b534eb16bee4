#pragma once

// JSON run configuration. Every field is validated; errors carry the field
// path, e.g. "a.pieces[1]".

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hjft/errors.hpp"
#include "hjft/scenarios.hpp"
#include "json.hpp"

namespace hjft::cli {

using nlohmann::json;

struct OutputConfig {
  std::vector<double> times;  // snapshot times; default {horizon}
  int points = 201;           // sample points per snapshot
};

struct ConvergenceConfig {
  std::vector<double> deltas{0.2, 0.1, 0.05, 0.025};
  double fd_dx = 1e-3;
};

struct VerifyConfig {
  std::vector<std::string> suites;
  int bumps = 8;
  int pairs = 20;
  int seeds = 100;
  std::vector<double> deltas{0.1, 0.05};
};

struct RiemannConfig {
  double a_l = 1.0;
  double a_r = 1.0;
  double p_l = 0.0;
  double p_r = 0.0;
  double g = 1.0;
  double u0 = 0.0;
  double t = 1.0;
  std::vector<double> xs;
};

struct RunConfig {
  Scenario scenario;
  double delta = 0.05;
  std::uint64_t seed = 1;
  std::optional<double> glimm_c;
  OutputConfig output;
  ConvergenceConfig convergence;
  VerifyConfig verify;
  std::optional<RiemannConfig> riemann;
};

inline const std::set<std::string>& known_suites() {
  static const std::set<std::string> s{"entropy",  "weak",     "interface-viscosity", "contraction",
                                       "comparison", "monitors", "interaction",        "forged"};
  return s;
}

namespace detail {

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  void require_object() const {
    if (!j_.is_object()) fail("expected an object");
  }

  void only(std::initializer_list<const char*> keys) const {
    require_object();
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      bool ok = false;
      for (const char* k : keys) ok = ok || it.key() == k;
      if (!ok) throw ConfigError(child(it.key()), "unknown field");
    }
  }

  bool has(const char* k) const { return j_.contains(k); }
  Reader at(const char* k) const { return {j_.at(k), child(k)}; }
  Reader at(std::size_t i) const { return {j_.at(i), path_ + "[" + std::to_string(i) + "]"}; }
  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) fail("not finite");
    return v;
  }

  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("must be positive");
    return v;
  }

  int integer(int lo) const {
    if (!j_.is_number_integer()) fail("expected an integer");
    const auto v = j_.get<long long>();
    if (v < lo) fail("must be at least " + std::to_string(lo));
    return static_cast<int>(v);
  }

  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }

  std::vector<double> numbers(std::size_t min_size = 0) const {
    if (!j_.is_array()) fail("expected an array of numbers");
    if (j_.size() < min_size) fail("needs at least " + std::to_string(min_size) + " entries");
    std::vector<double> out;
    for (std::size_t i = 0; i < j_.size(); ++i) out.push_back(at(i).number());
    return out;
  }

  std::pair<double, double> range() const {
    const auto v = numbers(2);
    if (v.size() != 2) fail("expected [lo, hi]");
    if (!(v[0] < v[1])) fail("needs lo < hi");
    return {v[0], v[1]};
  }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path_, what); }

 private:
  std::string child(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  const json& j_;
  std::string path_;
};

inline Expression expression(const Reader& r) {
  try {
    if (r.raw().is_number()) return Expression::constant(r.number());
    return Expression::parse(r.string());
  } catch (const SpecError& e) {
    r.fail(e.what());
  }
}

/// A number, an expression string, or {"jumps": [...], "pieces": [...]}.
inline CoefficientPiece coefficient(const Reader& r, double lo, double hi) {
  CoefficientPiece c;
  if (r.raw().is_object()) {
    r.only({"jumps", "pieces"});
    if (!r.has("pieces")) r.fail("missing field 'pieces'");
    if (r.has("jumps")) c.jumps = r.at("jumps").numbers();
    const auto ps = r.at("pieces");
    if (!ps.raw().is_array()) ps.fail("expected an array");
    for (std::size_t i = 0; i < ps.raw().size(); ++i) c.pieces.push_back(expression(ps.at(i)));
    for (std::size_t i = 0; i < c.jumps.size(); ++i) {
      if (!(c.jumps[i] > lo && c.jumps[i] < hi)) r.at("jumps").at(i).fail("outside the open domain");
      if (i > 0 && !(c.jumps[i] > c.jumps[i - 1])) r.at("jumps").at(i).fail("jumps must increase");
    }
    if (c.pieces.size() != c.jumps.size() + 1) ps.fail("needs one more piece than jumps");
  } else {
    c.pieces.push_back(expression(r));
  }
  // Evaluate once per piece so bad expressions fail here.
  for (std::size_t i = 0; i < c.pieces.size(); ++i) {
    const double l = i == 0 ? lo : c.jumps[i - 1];
    const double h = i == c.jumps.size() ? hi : c.jumps[i];
    try {
      (void)c.pieces[i](0.5 * (l + h));
    } catch (const SpecError& e) {
      r.fail(e.what());
    }
  }
  return c;
}

inline HamiltonianModel model(const Reader& r) {
  r.only({"family", "a_range", "g_range", "p_guard"});
  const std::string fam = r.has("family") ? r.at("family").string() : "offset_eikonal";
  CoefficientBox box{1.0, 2.0, 0.5, 2.0};
  if (r.has("a_range")) std::tie(box.a_min, box.a_max) = r.at("a_range").range();
  if (r.has("g_range")) std::tie(box.g_min, box.g_max) = r.at("g_range").range();
  try {
    if (fam == "offset_eikonal") {
      if (r.has("p_guard")) r.at("p_guard").fail("not used by offset_eikonal");
      return HamiltonianModel::offset_eikonal(box);
    }
    if (fam == "quadratic_cap") {
      if (!r.has("p_guard")) r.fail("quadratic_cap needs 'p_guard'");
      return HamiltonianModel::quadratic_cap(box, r.at("p_guard").positive());
    }
  } catch (const InputError& e) {
    r.fail(e.what());
  }
  r.at("family").fail("unknown family '" + fam + "'");
}

}  // namespace detail

inline RunConfig parse_config(const json& j) {
  detail::Reader r(j, "");
  r.only({"builtin", "model", "a", "g", "u0", "p0", "window", "horizon", "delta", "mesh", "seed", "glimm_c",
          "output", "convergence", "verify", "riemann"});
  RunConfig c;
  if (r.has("seed")) c.seed = static_cast<std::uint64_t>(r.at("seed").integer(0));
  if (r.has("builtin")) {
    const auto name = r.at("builtin").string();
    if (name == "random") {
      c.scenario = random_scenario(c.seed);
    } else if (auto s = find_scenario(name)) {
      c.scenario = *s;
    } else {
      r.at("builtin").fail("unknown scenario '" + name + "'");
    }
  } else {
    c.scenario.name = "config";
  }
  auto& sc = c.scenario;
  if (r.has("model")) sc.model = detail::model(r.at("model"));
  if (r.has("window")) std::tie(sc.x_lo, sc.x_hi) = r.at("window").range();
  if (r.has("horizon")) sc.horizon = r.at("horizon").positive();
  if (r.has("delta")) c.delta = r.at("delta").positive();
  if (r.has("mesh")) sc.mesh = r.at("mesh").positive();
  if (r.has("glimm_c")) c.glimm_c = r.at("glimm_c").positive();
  if (r.has("a")) sc.a = detail::coefficient(r.at("a"), sc.x_lo, sc.x_hi);
  if (r.has("g")) sc.g = detail::coefficient(r.at("g"), 0.0, sc.horizon);
  if (r.has("u0") && r.has("p0")) r.at("p0").fail("give either 'u0' or 'p0', not both");
  if (r.has("u0")) sc.u0 = detail::coefficient(r.at("u0"), sc.x_lo, sc.x_hi);
  if (r.has("p0")) {
    sc.p0 = detail::coefficient(r.at("p0"), sc.x_lo, sc.x_hi);
    sc.u0.reset();
  }
  // Coefficients must sit in the model box.
  const auto& box = sc.model.box();
  for (double x : {sc.x_lo, 0.5 * (sc.x_lo + sc.x_hi), sc.x_hi}) {
    const double a = sc.a(x);
    if (a < box.a_min || a > box.a_max) (r.has("a") ? r.at("a") : r).fail("value outside model.a_range");
  }
  for (double t : {0.0, 0.5 * sc.horizon, sc.horizon}) {
    const double g = sc.g(t);
    if (g < box.g_min || g > box.g_max) (r.has("g") ? r.at("g") : r).fail("value outside model.g_range");
  }
  if (r.has("output")) {
    const auto o = r.at("output");
    o.only({"times", "points"});
    if (o.has("times")) {
      c.output.times = o.at("times").numbers(1);
      for (std::size_t i = 0; i < c.output.times.size(); ++i) {
        const double t = c.output.times[i];
        if (t < 0.0 || t > sc.horizon) o.at("times").at(i).fail("outside [0, horizon]");
      }
    }
    if (o.has("points")) c.output.points = o.at("points").integer(2);
  }
  if (c.output.times.empty()) c.output.times = {sc.horizon};
  if (r.has("convergence")) {
    const auto o = r.at("convergence");
    o.only({"deltas", "fd_dx"});
    if (o.has("deltas")) {
      c.convergence.deltas = o.at("deltas").numbers(2);
      for (std::size_t i = 0; i < c.convergence.deltas.size(); ++i) {
        if (!(c.convergence.deltas[i] > 0.0)) o.at("deltas").at(i).fail("must be positive");
        if (i > 0 && !(c.convergence.deltas[i] < c.convergence.deltas[i - 1])) {
          o.at("deltas").at(i).fail("deltas must decrease");
        }
      }
    }
    if (o.has("fd_dx")) c.convergence.fd_dx = o.at("fd_dx").positive();
  }
  if (r.has("verify")) {
    const auto o = r.at("verify");
    o.only({"suites", "bumps", "pairs", "seeds", "deltas"});
    if (o.has("suites")) {
      const auto s = o.at("suites");
      if (!s.raw().is_array()) s.fail("expected an array of names");
      for (std::size_t i = 0; i < s.raw().size(); ++i) {
        const auto name = s.at(i).string();
        if (!known_suites().count(name)) s.at(i).fail("unknown suite '" + name + "'");
        c.verify.suites.push_back(name);
      }
    }
    if (o.has("bumps")) c.verify.bumps = o.at("bumps").integer(1);
    if (o.has("pairs")) c.verify.pairs = o.at("pairs").integer(1);
    if (o.has("seeds")) c.verify.seeds = o.at("seeds").integer(1);
    if (o.has("deltas")) c.verify.deltas = o.at("deltas").numbers(2);
  }
  if (r.has("riemann")) {
    const auto o = r.at("riemann");
    o.only({"a_l", "a_r", "p_l", "p_r", "g", "u0", "t", "xs"});
    RiemannConfig rc;
    if (o.has("a_l")) rc.a_l = o.at("a_l").number();
    if (o.has("a_r")) rc.a_r = o.at("a_r").number();
    if (o.has("p_l")) rc.p_l = o.at("p_l").number();
    if (o.has("p_r")) rc.p_r = o.at("p_r").number();
    if (o.has("g")) rc.g = o.at("g").number();
    if (o.has("u0")) rc.u0 = o.at("u0").number();
    if (o.has("t")) rc.t = o.at("t").positive();
    if (o.has("xs")) rc.xs = o.at("xs").numbers(1);
    for (const char* k : {"a_l", "a_r"}) {
      const double a = k[2] == 'l' ? rc.a_l : rc.a_r;
      if (a < box.a_min || a > box.a_max) (o.has(k) ? o.at(k) : o).fail("outside model.a_range");
    }
    if (rc.g < box.g_min || rc.g > box.g_max) (o.has("g") ? o.at("g") : o).fail("outside model.g_range");
    c.riemann = rc;
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, std::string("parse error: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace hjft::cli
