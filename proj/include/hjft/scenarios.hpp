#pragma once

// Built-in problems and the random BV data generator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hjft/coeffs.hpp"
#include "hjft/errors.hpp"
#include "hjft/flux_model.hpp"
#include "hjft/tracker.hpp"

namespace hjft {

struct Scenario {
  std::string name;
  HamiltonianModel model = HamiltonianModel::offset_eikonal({1.0, 2.0, 0.5, 2.0});
  CoefficientPiece a = CoefficientPiece::constant(1.0);
  CoefficientPiece g = CoefficientPiece::constant(1.0);
  std::optional<CoefficientPiece> u0;  // potential; takes precedence over p0
  CoefficientPiece p0 = CoefficientPiece::constant(0.0);
  double x_lo = -1.0;
  double x_hi = 1.0;
  double horizon = 1.0;
  std::optional<double> mesh;  // coefficient mesh; defaults to delta
  double u_offset = 0.0;       // added to the potential

  double u0_at(double x) const {
    if (u0) return (*u0)(x) + u_offset;
    // Primitive of p0 from 0, by the piecewise expressions.
    const int n = 4000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += p0(x * (i + 0.5) / n) * x / n;
    return s + u_offset;
  }
};

inline CoefficientPiece steps(std::vector<double> jumps, const std::vector<double>& values) {
  CoefficientPiece c;
  c.jumps = std::move(jumps);
  for (double v : values) c.pieces.push_back(Expression::constant(v));
  return c;
}

inline TrackerProblem make_problem(const Scenario& sc, double delta, std::optional<double> glimm_c = std::nullopt) {
  const double h = sc.mesh.value_or(delta);
  TrackerProblem pb;
  pb.model = sc.model;
  pb.a = discretize(sc.a, sc.x_lo, sc.x_hi, h);
  pb.g = discretize(sc.g, 0.0, sc.horizon, h);
  pb.p0 = sc.u0 ? slope_from_potential(*sc.u0, sc.x_lo, sc.x_hi, h) : discretize(sc.p0, sc.x_lo, sc.x_hi, h);
  pb.delta = delta;
  pb.horizon = sc.horizon;
  pb.glimm_c = glimm_c;
  return pb;
}

inline Scenario constant_scenario() {
  Scenario s;
  s.name = "constant";
  s.a = CoefficientPiece::constant(1.2);
  s.g = CoefficientPiece::constant(1.0);
  s.p0 = CoefficientPiece::constant(0.3);
  return s;
}

/// a: 1 -> 1.5 at x = 0, g = 1, p0 = 0.
inline Scenario interface_scenario() {
  Scenario s;
  s.name = "interface";
  s.a = steps({0.0}, {1.0, 1.5});
  s.g = CoefficientPiece::constant(1.0);
  s.p0 = CoefficientPiece::constant(0.0);
  s.x_lo = -1.0;
  s.x_hi = 2.0;
  s.mesh = 0.5;
  return s;
}

/// p0: -1 -> 1 at x = 0 with a = g = 1.
inline Scenario stationary_shock_scenario() {
  Scenario s;
  s.name = "stationary-shock";
  s.a = CoefficientPiece::constant(1.0);
  s.p0 = steps({0.0}, {-1.0, 1.0});
  s.mesh = 0.5;
  return s;
}

/// Smooth a and data; every discretization error is O(delta). g stays
/// constant: each g-jump regrids with every current state on every level.
inline Scenario smooth_scenario() {
  Scenario s;
  s.name = "smooth";
  s.a = CoefficientPiece::smooth("1.5 + 0.25*tanh(4*x)");
  s.g = CoefficientPiece::constant(1.0);
  s.u0 = CoefficientPiece::smooth("0.5*sin(pi*x)/pi");
  s.x_lo = -1.5;
  s.x_hi = 1.5;
  s.horizon = 0.5;
  return s;
}

/// Interface example with nontrivial data on both sides.
inline Scenario two_sided_scenario() {
  Scenario s;
  s.name = "two-sided";
  s.a = steps({0.0}, {1.0, 1.5});
  s.g = steps({0.5}, {1.0, 1.2});
  s.u0 = CoefficientPiece::smooth("0.3*cos(2*x)");
  s.x_lo = -2.0;
  s.x_hi = 2.0;
  s.horizon = 1.0;
  return s;
}

inline std::vector<Scenario> builtin_scenarios() {
  return {constant_scenario(), interface_scenario(), stationary_shock_scenario(), smooth_scenario(),
          two_sided_scenario()};
}

inline std::optional<Scenario> find_scenario(const std::string& name) {
  for (auto& s : builtin_scenarios()) {
    if (s.name == name) return s;
  }
  return std::nullopt;
}

/// Random BV data: piecewise-constant p0 with several jumps, one a-jump and
/// two g-jumps, on [-2, 2] with horizon 1.
inline Scenario random_scenario(std::uint64_t seed, int p_jumps = 6) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-1.5, 1.5);
  std::uniform_real_distribution<double> pv(-1.0, 1.0);
  std::uniform_real_distribution<double> av(1.0, 2.0);
  std::uniform_real_distribution<double> gv(0.8, 1.4);
  std::uniform_real_distribution<double> tv(0.1, 0.9);
  Scenario s;
  s.name = "random-" + std::to_string(seed);
  std::vector<double> xs;
  while (static_cast<int>(xs.size()) < p_jumps) {
    const double x = std::round(pos(rng) * 64.0) / 64.0;
    if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end());
  std::vector<double> ps;
  for (int i = 0; i <= p_jumps; ++i) ps.push_back(pv(rng));
  s.p0 = steps(xs, ps);
  const double xa = std::round(pos(rng) * 64.0 + 0.5) / 64.0 - 0.5 / 64.0;
  s.a = steps({xa}, {av(rng), av(rng)});
  double t1 = tv(rng);
  double t2 = tv(rng);
  if (std::abs(t1 - t2) < 0.05) t2 = t1 < 0.5 ? t1 + 0.3 : t1 - 0.3;
  if (t2 < t1) std::swap(t1, t2);
  s.g = steps({t1, t2}, {gv(rng), gv(rng), gv(rng)});
  s.x_lo = -2.0;
  s.x_hi = 2.0;
  s.horizon = 1.0;
  s.mesh = 4.0;
  return s;
}

/// Pointwise sum of two step functions.
inline CoefficientPiece add_steps(const CoefficientPiece& f, const CoefficientPiece& h) {
  std::vector<double> js = f.jumps;
  js.insert(js.end(), h.jumps.begin(), h.jumps.end());
  std::sort(js.begin(), js.end());
  js.erase(std::unique(js.begin(), js.end()), js.end());
  std::vector<double> vals;
  for (std::size_t i = 0; i <= js.size(); ++i) {
    const double x = js.empty() ? 0.0 : (i == 0 ? js[0] - 1.0 : (i == js.size() ? js.back() + 1.0 : 0.5 * (js[i - 1] + js[i])));
    vals.push_back(f(x) + h(x));
  }
  return steps(js, vals);
}

/// Two data sets on the coefficients of random_scenario(seed). When ordered,
/// the second potential is the first plus a nonnegative trapezoid supported
/// in x > 0, so u0 <= v0.
inline std::pair<Scenario, Scenario> random_pair(std::uint64_t seed, bool ordered) {
  Scenario u = random_scenario(seed);
  Scenario v = u;
  v.name = u.name + (ordered ? "-above" : "-other");
  if (!ordered) {
    v.p0 = random_scenario(seed + 7919).p0;
    return {u, v};
  }
  std::mt19937_64 rng(seed * 31 + 5);
  std::uniform_real_distribution<double> sv(0.2, 1.0);
  std::uniform_real_distribution<double> wv(4.0, 16.0);
  const double slope = sv(rng);
  const double x1 = 0.25 + std::round(wv(rng)) / 64.0;
  const double ramp = std::round(wv(rng)) / 64.0;
  const double flat = std::round(wv(rng)) / 64.0;
  v.p0 = add_steps(u.p0, steps({x1, x1 + ramp, x1 + ramp + flat, x1 + 2 * ramp + flat}, {0.0, slope, 0.0, -slope, 0.0}));
  return {u, v};
}

}  // namespace hjft
