#pragma once

// Independent checks on a tracked solution: Kruzkov entropy and weak-form
// residuals, viscosity inequalities at interfaces, a Godunov finite-difference
// oracle, and paired-run contraction/comparison.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hjft/coeffs.hpp"
#include "hjft/errors.hpp"
#include "hjft/grid.hpp"
#include "hjft/hj.hpp"
#include "hjft/scenarios.hpp"
#include "hjft/tracker.hpp"

namespace hjft {

namespace detail {

/// 8-point Gauss-Legendre on [a, b]; exact for polynomials of degree 15.
template <class F>
double gauss8(F&& f, double a, double b) {
  static constexpr std::array<double, 4> x{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                           0.9602898564975363};
  static constexpr std::array<double, 4> w{0.3626837833783620, 0.3137066238173381, 0.2223810344533745,
                                           0.1012285362903763};
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) s += w[i] * (f(m - r * x[i]) + f(m + r * x[i]));
  return r * s;
}

inline double bump(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double q = 1.0 - s * s;
  return q * q * q;
}

inline double bump_d(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double q = 1.0 - s * s;
  return -6.0 * s * q * q;
}

/// int_{-1}^{s} bump.
inline double bump_int(double s) {
  s = std::clamp(s, -1.0, 1.0);
  const double s2 = s * s;
  return s * (1.0 - s2 * (1.0 - s2 * (0.6 - s2 / 7.0))) + 16.0 / 35.0;
}

}  // namespace detail

/// phi(x, t) = b((x - xc) / rx) b((t - tc) / rt) with b(s) = (1 - s^2)^3.
struct Bump {
  double xc = 0.0;
  double tc = 0.5;
  double rx = 0.5;
  double rt = 0.25;

  double operator()(double x, double t) const { return detail::bump((x - xc) / rx) * detail::bump((t - tc) / rt); }
  double dx(double x, double t) const {
    return detail::bump_d((x - xc) / rx) * detail::bump((t - tc) / rt) / rx;
  }
  double dt(double x, double t) const {
    return detail::bump((x - xc) / rx) * detail::bump_d((t - tc) / rt) / rt;
  }
  /// int_{x0}^{x1} b((x - xc) / rx) dx.
  double x_mass(double x0, double x1) const {
    return rx * (detail::bump_int((x1 - xc) / rx) - detail::bump_int((x0 - xc) / rx));
  }
  double t_lo() const { return tc - rt; }
  double t_hi() const { return tc + rt; }
};

/// Bumps with supports inside the window and before the horizon.
inline std::vector<Bump> bump_family(const TrackerLog& log, std::size_t n, std::uint64_t seed,
                                     bool touch_initial = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double w = log.x_hi - log.x_lo;
  std::vector<Bump> out;
  for (std::size_t i = 0; i < n; ++i) {
    Bump b;
    b.rx = w * (0.05 + 0.2 * u(rng));
    b.xc = log.x_lo + b.rx + (w - 2.0 * b.rx) * u(rng);
    b.rt = log.horizon * (0.05 + 0.2 * u(rng));
    const double lo = touch_initial ? -b.rt : b.rt;
    b.tc = lo + (log.horizon - b.rt - lo) * u(rng);
    out.push_back(b);
  }
  return out;
}

namespace detail {

inline void check_support(const TrackerLog& log, const Bump& phi) {
  if (!(phi.rx > 0.0 && phi.rt > 0.0)) throw InputError("test function: radii must be positive");
  if (phi.t_hi() > log.horizon + 1e-12 || phi.xc - phi.rx < log.x_lo - 1e-12 || phi.xc + phi.rx > log.x_hi + 1e-12) {
    throw InputError("test function: support must lie inside the window and before the horizon");
  }
}

/// H^delta(c) on the level of coefficient a in g-interval n; the model
/// itself outside the grid range.
inline double grid_flux(const TrackerLog& log, std::size_t n, double a, double c, const HamiltonianModel& m) {
  const auto& grid = *log.grids.at(n);
  const auto j = grid.level_of(a);
  const auto& lv = grid.level(j);
  if (c < lv.p.front() || c > lv.p.back()) return m.eval(c, a, log.interval_g.at(n));
  return grid.flux_interp(j, c);
}

/// |p - c| and the entropy flux sign(p - c) (H(p) - H(c)) of one state.
struct KruzkovPair {
  double A;
  double B;
};

inline KruzkovPair kruzkov(const TrackerLog& log, std::size_t n, const SideState& s, double c,
                           const HamiltonianModel& m) {
  const double hc = grid_flux(log, n, s.a, c, m);
  const double sg = s.p > c ? 1.0 : (s.p < c ? -1.0 : 0.0);
  return {std::abs(s.p - c), sg * (s.h - hc)};
}

/// Time window on which a front segment lies in the open support of phi.
inline std::pair<double, double> support_window(const FrontRecord& f, const Bump& phi, double horizon) {
  double t0 = std::max({f.birth, phi.t_lo(), 0.0});
  double t1 = std::min({f.death, phi.t_hi(), horizon});
  const double lo = phi.xc - phi.rx;
  const double hi = phi.xc + phi.rx;
  if (f.speed == 0.0) {
    if (!(f.x0 > lo && f.x0 < hi)) return {0.0, 0.0};
  } else {
    double ta = f.birth + (lo - f.x0) / f.speed;
    double tb = f.birth + (hi - f.x0) / f.speed;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  return {t0, t1};
}

/// Fronts alive on an open slab between consecutive event times, in profile
/// order; positions move linearly inside the slab.
struct Slab {
  double t0 = 0.0;
  double t1 = 0.0;
  std::size_t interval = 0;
  SideState far_left;
  std::vector<const FrontRecord*> fronts;

  // Profile at time t in (t0, t1).
  Profile at(double t) const {
    Profile pr;
    pr.states.push_back(far_left);
    for (const auto* f : fronts) {
      pr.x.push_back(f->position(t));
      pr.states.push_back(f->right);
    }
    for (std::size_t i = 1; i < pr.x.size(); ++i) pr.x[i] = std::max(pr.x[i], pr.x[i - 1]);
    return pr;
  }
};

inline std::vector<Slab> slabs(const TrackerLog& log, double lo, double hi) {
  std::vector<double> ts{std::max(0.0, lo), std::min(log.horizon, hi)};
  for (const auto& f : log.fronts) {
    ts.push_back(f.birth);
    ts.push_back(f.death);
  }
  for (double s : log.interval_start) ts.push_back(s);
  const double a = ts[0];
  const double b = ts[1];
  ts.erase(std::remove_if(ts.begin(), ts.end(), [&](double s) { return !(s >= a && s <= b); }), ts.end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  std::vector<const FrontRecord*> by_birth;
  for (const auto& f : log.fronts) by_birth.push_back(&f);
  std::sort(by_birth.begin(), by_birth.end(),
            [](const FrontRecord* x, const FrontRecord* y) { return x->birth < y->birth; });
  std::vector<const FrontRecord*> live;
  std::size_t next = 0;
  std::vector<Slab> out;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    if (!(ts[k + 1] > ts[k])) continue;
    Slab s;
    s.t0 = ts[k];
    s.t1 = ts[k + 1];
    const double tm = 0.5 * (s.t0 + s.t1);
    while (next < by_birth.size() && by_birth[next]->birth <= tm) live.push_back(by_birth[next++]);
    live.erase(std::remove_if(live.begin(), live.end(), [tm](const FrontRecord* f) { return !f->alive(tm); }),
               live.end());
    s.interval = log.interval_at(tm);
    s.far_left = log.far_left_at(tm);
    s.fronts = live;
    std::sort(s.fronts.begin(), s.fronts.end(), [tm](const FrontRecord* x, const FrontRecord* y) {
      const double xa = x->position(tm);
      const double xb = y->position(tm);
      if (std::abs(xa - xb) > 1e-9) return xa < xb;
      return x->seq < y->seq;
    });
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace detail

/// Kruzkov constants: every grid p-value of the run and the midpoints between
/// consecutive ones.
inline std::vector<double> kruzkov_constants(const TrackerLog& log) {
  std::vector<double> ps;
  for (const auto& g : log.grids) {
    for (std::size_t j = 0; j < g->level_count(); ++j) {
      for (double p : g->level(j).p) ps.push_back(p);
    }
  }
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12; }), ps.end());
  std::vector<double> out;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    out.push_back(ps[i]);
    if (i + 1 < ps.size()) out.push_back(0.5 * (ps[i] + ps[i + 1]));
  }
  return out;
}

/// At most n entries spread evenly over a sorted list, ends included.
inline std::vector<double> thin_constants(const std::vector<double>& cs, std::size_t n) {
  if (cs.size() <= n || n < 2) return cs;
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(cs[i * (cs.size() - 1) / (n - 1)]);
  return out;
}

/// Left side of the entropy inequality, with the initial-trace term, on the
/// discretized problem (grid flux, piecewise-constant coefficients). By the
/// divergence theorem every space-time cell reduces to its boundary, so the
/// residual is a sum of line integrals along fronts, each exact.
inline double entropy_residual(const TrackerLog& log, const HamiltonianModel& m, double c, const Bump& phi) {
  detail::check_support(log, phi);
  double total = 0.0;
  for (const auto& f : log.fronts) {
    const auto [t0, t1] = detail::support_window(f, phi, log.horizon);
    if (!(t1 > t0)) continue;
    const auto n = f.interval;
    const auto L = detail::kruzkov(log, n, f.left, c, m);
    const auto R = detail::kruzkov(log, n, f.right, c, m);
    double weight = (L.B - R.B) - f.speed * (L.A - R.A);
    if (f.kind == WaveKind::a_wave) {
      weight += std::abs(detail::grid_flux(log, n, f.right.a, c, m) - detail::grid_flux(log, n, f.left.a, c, m));
    }
    if (weight == 0.0) continue;
    total += weight * detail::gauss8([&](double t) { return phi(f.position(t), t); }, t0, t1);
  }
  return total;
}

/// The same quantity written as a volume integral: the x-integral over every
/// cell of the profile is exact, the t-integral is a composite midpoint rule
/// with steps at most dt between event times.
inline double entropy_residual_volume(const TrackerLog& log, const HamiltonianModel& m, double c, const Bump& phi,
                                      double dt = 1e-5) {
  detail::check_support(log, phi);
  const double lo = phi.xc - phi.rx;
  const double hi = phi.xc + phi.rx;
  auto at_time = [&](const Profile& pr, std::size_t n, double t) {
    const double tb = detail::bump((t - phi.tc) / phi.rt);
    const double tbd = detail::bump_d((t - phi.tc) / phi.rt) / phi.rt;
    double s = 0.0;
    for (std::size_t i = 0; i < pr.states.size(); ++i) {
      const double x0 = std::max(lo, i == 0 ? lo : pr.x[i - 1]);
      const double x1 = std::min(hi, i < pr.x.size() ? pr.x[i] : hi);
      if (!(x1 > x0)) continue;
      const auto k = detail::kruzkov(log, n, pr.states[i], c, m);
      s += k.A * phi.x_mass(x0, x1) * tbd + k.B * (phi(x1, t) - phi(x0, t));
    }
    for (std::size_t i = 0; i < pr.x.size(); ++i) {
      if (pr.states[i].a == pr.states[i + 1].a || pr.x[i] <= lo || pr.x[i] >= hi) continue;
      s += std::abs(detail::grid_flux(log, n, pr.states[i + 1].a, c, m) -
                    detail::grid_flux(log, n, pr.states[i].a, c, m)) *
           detail::bump((pr.x[i] - phi.xc) / phi.rx) * tb;
    }
    return s;
  };
  double total = 0.0;
  for (const auto& sl : detail::slabs(log, phi.t_lo(), phi.t_hi())) {
    const auto steps = static_cast<std::size_t>(std::ceil((sl.t1 - sl.t0) / dt));
    const double h = (sl.t1 - sl.t0) / static_cast<double>(steps);
    for (std::size_t j = 0; j < steps; ++j) {
      const double t = sl.t0 + (j + 0.5) * h;
      total += h * at_time(sl.at(t), sl.interval, t);
    }
  }
  if (phi.t_lo() < 0.0) {
    const auto pr = log.profile(0.0);
    const double tb = detail::bump(-phi.tc / phi.rt);
    for (std::size_t i = 0; i < pr.states.size(); ++i) {
      const double x0 = std::max(lo, i == 0 ? lo : pr.x[i - 1]);
      const double x1 = std::min(hi, i < pr.x.size() ? pr.x[i] : hi);
      if (x1 > x0) total += std::abs(pr.states[i].p - c) * phi.x_mass(x0, x1) * tb;
    }
  }
  return total;
}

struct EntropyReport {
  double min_residual = std::numeric_limits<double>::infinity();
  double worst_c = 0.0;
  std::size_t worst_bump = 0;
  std::size_t evaluations = 0;
  std::size_t negative = 0;  // below -tol
};

inline EntropyReport entropy_check(const TrackerLog& log, const HamiltonianModel& m, const std::vector<Bump>& bumps,
                                   const std::vector<double>& cs, double tol = 1e-10) {
  EntropyReport r;
  for (std::size_t b = 0; b < bumps.size(); ++b) {
    for (double c : cs) {
      const double v = entropy_residual(log, m, c, bumps[b]);
      ++r.evaluations;
      if (v < -tol) ++r.negative;
      if (v < r.min_residual) {
        r.min_residual = v;
        r.worst_c = c;
        r.worst_bump = b;
      }
    }
  }
  return r;
}

/// A log holding one stationary-or-moving jump p_l | p_r on constant
/// coefficients, written directly without the Riemann solver.
inline TrackerLog forge_jump_log(const HamiltonianModel& m, double p_l, double p_r, double a, double g, double x_lo,
                                 double x_hi, double horizon, double delta = 0.1) {
  const double cap = std::max({std::abs(p_l), std::abs(p_r), 1.0});
  auto grid = std::make_shared<const FluxGrid>(
      FluxGrid::build(m, delta, std::vector<double>{a}, g, std::vector<double>{p_l, p_r, 0.0}, cap));
  const double hl = m.eval(p_l, a, g);
  const double hr = m.eval(p_r, a, g);
  TrackerLog log;
  log.x_lo = x_lo;
  log.x_hi = x_hi;
  log.horizon = horizon;
  FrontRecord f;
  f.speed = p_l == p_r ? 0.0 : (hr - hl) / (p_r - p_l);
  f.left = {p_l, hl, a};
  f.right = {p_r, hr, a};
  log.fronts.push_back(f);
  log.far_left.emplace_back(0.0, f.left);
  log.interval_start = {0.0};
  log.interval_g = {g};
  log.caps = {cap};
  log.grids = {grid};
  return log;
}

/// Coefficients used by the weak residual; the discretized ones are read
/// from the states when absent.
struct WeakCoefficients {
  std::function<double(double)> a;
  std::function<double(double)> g;
};

/// | int int p phi_t + H(p, a, g) phi_x + int phi(x, 0) p0 |. Against the
/// discretized coefficients (the flux carried by each state) every term is
/// exact per cell and Gauss in t per slab. Given coefficients add the
/// correction int int (H(p, a(x), g(t)) - H^delta) phi_x, which is O(delta)
/// and taken with 2-point Gauss in t and 3-point Gauss in x.
inline double weak_residual(const TrackerLog& log, const HamiltonianModel& m, const Bump& phi,
                            const std::optional<WeakCoefficients>& coeffs = std::nullopt, double dt = 1e-2) {
  detail::check_support(log, phi);
  const double lo = phi.xc - phi.rx;
  const double hi = phi.xc + phi.rx;
  auto cells = [&](const Profile& pr, auto&& fn) {
    for (std::size_t i = 0; i < pr.states.size(); ++i) {
      const double x0 = std::max(lo, i == 0 ? lo : pr.x[i - 1]);
      const double x1 = std::min(hi, i < pr.x.size() ? pr.x[i] : hi);
      if (x1 > x0) fn(pr.states[i], x0, x1);
    }
  };
  auto exact_part = [&](const detail::Slab& sl, double t) {
    const double tbd = detail::bump_d((t - phi.tc) / phi.rt) / phi.rt;
    double s = 0.0;
    cells(sl.at(t), [&](const SideState& st, double x0, double x1) {
      s += st.p * phi.x_mass(x0, x1) * tbd + st.h * (phi(x1, t) - phi(x0, t));
    });
    return s;
  };
  auto correction = [&](const detail::Slab& sl, double t) {
    static constexpr double q = 0.7745966692414834;
    const double gt = coeffs->g(t);
    double s = 0.0;
    cells(sl.at(t), [&](const SideState& st, double x0, double x1) {
      const int pieces = std::max(1, static_cast<int>(std::ceil(4.0 * (x1 - x0) / phi.rx)));
      const double w = (x1 - x0) / pieces;
      for (int k = 0; k < pieces; ++k) {
        const double mid = x0 + (k + 0.5) * w;
        for (const auto& [off, wt] : {std::pair{-q, 5.0 / 9.0}, std::pair{0.0, 8.0 / 9.0}, std::pair{q, 5.0 / 9.0}}) {
          const double x = mid + 0.5 * w * off;
          s += 0.5 * w * wt * (m.eval(st.p, coeffs->a(x), gt) - st.h) * phi.dx(x, t);
        }
      }
    });
    return s;
  };
  double total = 0.0;
  for (const auto& sl : detail::slabs(log, phi.t_lo(), phi.t_hi())) {
    const auto steps = static_cast<std::size_t>(std::ceil((sl.t1 - sl.t0) / dt));
    const double h = (sl.t1 - sl.t0) / static_cast<double>(steps);
    for (std::size_t j = 0; j < steps; ++j) {
      const double t0 = sl.t0 + j * h;
      total += detail::gauss8([&](double t) { return exact_part(sl, t); }, t0, t0 + h);
      if (coeffs) {
        const double r = 0.5 * h / std::sqrt(3.0);
        total += 0.5 * h * (correction(sl, t0 + 0.5 * h - r) + correction(sl, t0 + 0.5 * h + r));
      }
    }
  }
  if (phi.t_lo() < 0.0) {
    const double tb = detail::bump(-phi.tc / phi.rt);
    cells(log.profile(0.0), [&](const SideState& st, double x0, double x1) { total += st.p * phi.x_mass(x0, x1) * tb; });
  }
  return std::abs(total);
}

struct InterfaceEpoch {
  double t0 = 0.0;  // birth of the a-front record
  double x = 0.0;
  double a_l = 0.0;
  double a_r = 0.0;
  double g = 0.0;
  double p_l = 0.0;  // p'_l
  double p_r = 0.0;  // p'_r
  bool dichotomy = true;
  double excess = 0.0;  // largest violation of the applicable inequality
};

struct InterfaceReport {
  std::vector<InterfaceEpoch> epochs;
  std::size_t dichotomy_failures = 0;
  std::size_t inequality_failures = 0;
  std::size_t sub_checks = 0;    // p'_r <= p'_l: test functions touching from above
  std::size_t super_checks = 0;  // p'_l < p'_r: touching from below
  double max_excess = 0.0;
  bool ok() const { return dichotomy_failures == 0 && inequality_failures == 0; }
};

/// At every a-front record: the ordering of the traces, and with
/// phi_t = -H(p'_l, a_l) the inequalities
///   phi_t + min(H(s, a_l), H(s, a_r)) <= 0 for s between p'_r <= p'_l,
///   phi_t + max(H(s, a_l), H(s, a_r)) >= 0 for s between p'_l < p'_r,
/// on the grid flux of the record's g-interval.
inline InterfaceReport interface_viscosity_check(const TrackerLog& log, const HamiltonianModel& m,
                                                 std::size_t samples = 64, double tol = 1e-12) {
  InterfaceReport rep;
  for (const auto& f : log.fronts) {
    if (f.kind != WaveKind::a_wave) continue;
    InterfaceEpoch e;
    e.t0 = f.birth;
    e.x = f.x0;
    e.a_l = f.left.a;
    e.a_r = f.right.a;
    e.g = log.interval_g.at(f.interval);
    e.p_l = f.left.p;
    e.p_r = f.right.p;
    e.dichotomy = (0.0 <= e.p_r && e.p_r <= e.p_l) || (e.p_r <= e.p_l && e.p_l <= 0.0);
    if (!e.dichotomy) ++rep.dichotomy_failures;
    const double phi_t = -f.left.h;
    const bool sub = e.p_r <= e.p_l;
    sub ? ++rep.sub_checks : ++rep.super_checks;
    const double s0 = std::min(e.p_l, e.p_r);
    const double s1 = std::max(e.p_l, e.p_r);
    std::vector<double> ss;
    for (std::size_t k = 0; k <= samples; ++k) ss.push_back(s0 + (s1 - s0) * static_cast<double>(k) / samples);
    const auto& grid = *log.grids.at(f.interval);
    for (double a : {e.a_l, e.a_r}) {
      for (double p : grid.level(grid.level_of(a)).p) {
        if (p > s0 && p < s1) ss.push_back(p);
      }
    }
    for (double sg : ss) {
      const double hl = detail::grid_flux(log, f.interval, e.a_l, sg, m);
      const double hr = detail::grid_flux(log, f.interval, e.a_r, sg, m);
      const double v = sub ? phi_t + std::min(hl, hr) : -(phi_t + std::max(hl, hr));
      e.excess = std::max(e.excess, v);
    }
    if (e.excess > tol) ++rep.inequality_failures;
    rep.max_excess = std::max(rep.max_excess, e.excess);
    rep.epochs.push_back(e);
  }
  return rep;
}

/// Godunov flux of a unimodal H with its maximum at p = 0, with different
/// coefficients on the two sides: min(demand_l(p_l), supply_r(p_r)).
inline double godunov_flux(const HamiltonianModel& m, double p_l, double p_r, double a_l, double a_r, double g) {
  const double demand = m.eval(std::min(p_l, 0.0), a_l, g);
  const double supply = m.eval(std::max(p_r, 0.0), a_r, g);
  return std::min(demand, supply);
}

struct FDOracleConfig {
  double dx = 1e-3;
  double dt = 0.0;  // 0: largest step allowed by cfl
  double cfl = 0.9;
  double p_bound = 0.0;  // range for the speed bound; 0: guard or 10 max(|p0|, 1)
  std::string interface_flux = "godunov";
};

struct FDResult {
  double x_lo = 0.0;
  double dx = 0.0;
  double t = 0.0;
  std::size_t steps = 0;
  std::vector<double> p;  // cell averages

  double at(double x) const {
    const auto i = static_cast<std::ptrdiff_t>(std::floor((x - x_lo) / dx));
    return p[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(p.size()) - 1))];
  }

  /// Exact L1 distance to a step profile over the oracle window.
  double l1_distance(const Profile& pr) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double c0 = x_lo + dx * static_cast<double>(i);
      const double c1 = c0 + dx;
      double from = c0;
      auto it = std::upper_bound(pr.x.begin(), pr.x.end(), c0);
      for (; it != pr.x.end() && *it < c1; ++it) {
        sum += std::abs(pr.at(0.5 * (from + *it)).p - p[i]) * (*it - from);
        from = *it;
      }
      sum += std::abs(pr.at(0.5 * (from + c1)).p - p[i]) * (c1 - from);
    }
    return sum;
  }

  double l1_norm() const {
    double s = 0.0;
    for (double v : p) s += std::abs(v) * dx;
    return s;
  }
};

/// Largest |H_p| over |p| <= p_max and the model box, sampled.
inline double max_speed(const HamiltonianModel& m, double p_max) {
  const auto& b = m.box();
  double s = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double p = -p_max + 2.0 * p_max * i / 400.0;
    for (int j = 0; j <= 4; ++j) {
      for (int k = 0; k <= 4; ++k) {
        const double a = b.a_min + (b.a_max - b.a_min) * j / 4.0;
        const double g = b.g_min + (b.g_max - b.g_min) * k / 4.0;
        s = std::max(s, std::abs(m.dp(p, a, g)));
      }
    }
  }
  return s;
}

/// Explicit conservative scheme for p_t + H(p, a(x), g(t))_x = 0 on
/// [x_lo, x_hi] with constant extrapolation at both ends. Cell averages of
/// the step data are exact; a is taken at cell centres and g at each step's
/// midpoint, so an a-jump at a cell face gets the two-sided flux.
inline FDResult fd_oracle(const PiecewiseConstantFn& p0, const PiecewiseConstantFn& a, const PiecewiseConstantFn& g,
                          const HamiltonianModel& m, const FDOracleConfig& cfg, double horizon) {
  if (cfg.interface_flux != "godunov") throw ConfigError("fd.interface_flux", "unknown rule '" + cfg.interface_flux + "'");
  if (!(cfg.dx > 0.0)) throw ConfigError("fd.dx", "must be positive");
  if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0)) throw ConfigError("fd.cfl", "must lie in (0, 1]");
  const double x_lo = p0.lo();
  const double x_hi = p0.hi();
  const auto n = static_cast<std::size_t>(std::llround((x_hi - x_lo) / cfg.dx));
  if (n < 2) throw ConfigError("fd.dx", "fewer than two cells");
  FDResult r;
  r.x_lo = x_lo;
  r.dx = (x_hi - x_lo) / static_cast<double>(n);
  double p_max = 0.0;
  for (double v : p0.values()) p_max = std::max(p_max, std::abs(v));
  const double bound =
      cfg.p_bound > 0.0 ? cfg.p_bound : (m.p_guard() ? *m.p_guard() : 10.0 * std::max(p_max, 1.0));
  const double speed = std::max(max_speed(m, bound), 1e-12);
  const double dt_max = cfg.cfl * r.dx / speed;
  double dt = cfg.dt > 0.0 ? cfg.dt : dt_max;
  if (dt > dt_max * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "dt=" << dt << " exceeds the CFL limit " << dt_max;
    throw ConfigError("fd.dt", os.str());
  }
  // Exact cell averages.
  std::vector<double> pts;
  for (double b : p0.breaks()) pts.push_back(b);
  r.p.resize(n);
  std::vector<double> ac(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c0 = x_lo + r.dx * static_cast<double>(i);
    const double c1 = c0 + r.dx;
    double from = c0;
    double sum = 0.0;
    bool split = false;
    for (double b : pts) {
      if (b <= c0 || b >= c1) continue;
      sum += p0(0.5 * (from + b)) * (b - from);
      from = b;
      split = true;
    }
    sum += p0(0.5 * (from + c1)) * (c1 - from);
    r.p[i] = split ? sum / r.dx : p0(0.5 * (c0 + c1));
    ac[i] = a(0.5 * (c0 + c1));
  }
  std::vector<double> flux(n + 1);
  std::vector<double> next(n);
  double t = 0.0;
  while (t < horizon - 1e-14) {
    const double h = std::min(dt, horizon - t);
    const double gt = g(std::min(t + 0.5 * h, g.hi()));
    for (std::size_t f = 0; f <= n; ++f) {
      const std::size_t il = f == 0 ? 0 : f - 1;
      const std::size_t ir = f == n ? n - 1 : f;
      flux[f] = godunov_flux(m, r.p[il], r.p[ir], ac[il], ac[ir], gt);
    }
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = r.p[i] - h / r.dx * (flux[i + 1] - flux[i]);
      if (std::abs(next[i]) > bound) throw SolverError("fd_oracle: solution left the range of the speed bound");
    }
    r.p.swap(next);
    t += h;
    ++r.steps;
  }
  r.t = t;
  return r;
}

struct PairGaps {
  std::string name;
  double linf0 = 0.0;           // ||u0 - v0||_inf
  double l10 = 0.0;             // ||p0 - q0||_L1
  double linf_gap = 0.0;        // max_t ||u - v||_inf(window(t)) - linf0
  double l1_gap = 0.0;          // max_t ||p - q||_L1(window(t)) - l10
  bool ordered = false;         // u0 <= v0
  double comparison = 0.0;      // max_t max(u - v); meaningful when ordered
  std::size_t fronts = 0;
};

namespace detail {

/// Breakpoints of both profiles inside [lo, hi], with the ends.
inline std::vector<double> merged_points(const Profile& a, const Profile& b, double lo, double hi) {
  std::vector<double> xs{lo, hi};
  for (double x : a.x) {
    if (x > lo && x < hi) xs.push_back(x);
  }
  for (double x : b.x) {
    if (x > lo && x < hi) xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

inline double l1_between(const Profile& a, const Profile& b, double lo, double hi) {
  const auto xs = merged_points(a, b, lo, hi);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double m = 0.5 * (xs[i] + xs[i + 1]);
    s += std::abs(a.p(m) - b.p(m)) * (xs[i + 1] - xs[i]);
  }
  return s;
}

template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& fn) {
  const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
  std::vector<T> out(n);
  for (std::size_t start = 0; start < n; start += width) {
    std::vector<std::future<T>> batch;
    for (std::size_t i = start; i < std::min(n, start + width); ++i) batch.push_back(std::async(std::launch::async, fn, i));
    for (std::size_t i = 0; i < batch.size(); ++i) out[start + i] = batch[i].get();
  }
  return out;
}

}  // namespace detail

/// Runs two problems with identical coefficients on one grid: each gets the
/// other's data as extra grid values and the larger initial cap, and at each
/// g-jump both regrid with the union of their current states.
inline std::pair<TrackerLog, TrackerLog> track_pair(TrackerProblem pu, TrackerProblem pv) {
  pu.extra_p = pv.p0.values();
  pv.extra_p = pu.p0.values();
  const double cap = std::max(Tracker(pu).cap(), Tracker(pv).cap());
  pu.min_cap = cap;
  pv.min_cap = cap;
  Tracker a(std::move(pu));
  Tracker b(std::move(pv));
  while (!a.done() || !b.done()) {
    const auto ea = a.next_event();
    const auto eb = b.next_event();
    if (!a.done() && ea.type != TrackerEvent::g_jump) {
      a.step();
    } else if (!b.done() && eb.type != TrackerEvent::g_jump) {
      b.step();
    } else if (!a.done() && !b.done()) {
      if (ea.t != eb.t) throw SolverError("track_pair: g-jump times differ");
      a.share_states(b.current_states());
      b.share_states(a.current_states());
      a.step();
      b.step();
    } else {
      throw SolverError("track_pair: runs out of step at a g-jump");
    }
  }
  return {a.take_log(), b.take_log()};
}

/// Runs both data sets on one grid and measures the gaps at the given times on the window shrunk by the
/// largest front speed, where the data outside cannot reach.
inline PairGaps contraction_pair(const Scenario& su, const Scenario& sv, double delta, const std::vector<double>& times) {
  const auto [lu, lv] = track_pair(make_problem(su, delta), make_problem(sv, delta));
  const HJSolution u(lu, su.x_lo, su.u0_at(su.x_lo));
  const HJSolution v(lv, sv.x_lo, sv.u0_at(sv.x_lo));
  double c = 0.0;
  for (const auto* log : {&lu, &lv}) {
    for (const auto& f : log->fronts) c = std::max(c, std::abs(f.speed));
  }
  PairGaps r;
  r.name = su.name + "|" + sv.name;
  r.fronts = lu.fronts.size() + lv.fronts.size();
  r.comparison = -std::numeric_limits<double>::infinity();
  auto measure = [&](double t, double lo, double hi, double& linf, double& l1, double& top) {
    const auto a = lu.profile(t);
    const auto b = lv.profile(t);
    linf = 0.0;
    top = -std::numeric_limits<double>::infinity();
    for (double x : detail::merged_points(a, b, lo, hi)) {
      const double d = u.eval(a, x, t) - v.eval(b, x, t);
      linf = std::max(linf, std::abs(d));
      top = std::max(top, d);
    }
    l1 = detail::l1_between(a, b, lo, hi);
  };
  double top0 = 0.0;
  measure(0.0, su.x_lo, su.x_hi, r.linf0, r.l10, top0);
  r.ordered = top0 <= 1e-12;
  r.linf_gap = -std::numeric_limits<double>::infinity();
  r.l1_gap = -std::numeric_limits<double>::infinity();
  for (double t : times) {
    const double lo = su.x_lo + c * t;
    const double hi = su.x_hi - c * t;
    if (!(hi > lo)) continue;
    double linf = 0.0, l1 = 0.0, top = 0.0;
    measure(t, lo, hi, linf, l1, top);
    r.linf_gap = std::max(r.linf_gap, linf - r.linf0);
    r.l1_gap = std::max(r.l1_gap, l1 - r.l10);
    r.comparison = std::max(r.comparison, top);
  }
  return r;
}

struct ContractionReport {
  double delta = 0.0;
  std::vector<PairGaps> pairs;
  double linf_gap = 0.0;    // max over pairs, floored at 0
  double l1_gap = 0.0;
  double comparison = 0.0;  // max over ordered pairs of max(u - v), floored at 0
  double c_linf() const { return linf_gap / delta; }
  double c_l1() const { return l1_gap / delta; }
  double c_comparison() const { return comparison / delta; }
};

inline ContractionReport contraction_suite(const std::vector<std::pair<Scenario, Scenario>>& pairs, double delta,
                                           std::size_t time_samples = 8) {
  ContractionReport rep;
  rep.delta = delta;
  rep.pairs = detail::parallel_map<PairGaps>(pairs.size(), [&](std::size_t i) {
    const auto& [su, sv] = pairs[i];
    std::vector<double> ts;
    for (std::size_t k = 1; k <= time_samples; ++k) ts.push_back(su.horizon * static_cast<double>(k) / time_samples);
    return contraction_pair(su, sv, delta, ts);
  });
  for (const auto& p : rep.pairs) {
    rep.linf_gap = std::max(rep.linf_gap, p.linf_gap);
    rep.l1_gap = std::max(rep.l1_gap, p.l1_gap);
    if (p.ordered) rep.comparison = std::max(rep.comparison, p.comparison);
  }
  return rep;
}

/// Constants fitted on two halvings agree within a factor 2 (both zero counts
/// as agreement; values below floor are treated as zero).
inline bool stable_constant(double c_coarse, double c_fine, double floor = 1e-9) {
  if (c_coarse <= floor && c_fine <= floor) return true;
  if (c_coarse <= floor || c_fine <= floor) return std::max(c_coarse, c_fine) <= floor * 1e3;
  return c_fine <= 2.0 * c_coarse && c_coarse <= 2.0 * c_fine;
}

struct ConvergenceRow {
  double delta = 0.0;
  std::size_t fronts = 0;
  double l1_next = 0.0;    // ||p^delta - p^next||_L1 at the horizon
  double linf_u_next = 0.0;  // ||u^delta - u^next||_inf at the horizon
  double ratio = 0.0;      // l1_next over the previous row's; NaN on the first
  double fd_l1 = 0.0;      // ||p^delta - fd||_L1
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;  // the last row has no successor
  double fd_dx = 0.0;
  double fd_norm = 0.0;  // ||fd||_L1
  std::size_t fd_steps = 0;
};

/// Tracks the scenario at each delta (concurrently) and compares successive
/// runs at the horizon over the window, and each run with the finite
/// difference oracle built on the finest discretized coefficients.
inline ConvergenceReport convergence_sweep(const Scenario& sc, const std::vector<double>& deltas, double fd_dx,
                                           std::optional<double> glimm_c = std::nullopt) {
  if (deltas.size() < 2) throw InputError("convergence: need at least two deltas");
  for (std::size_t i = 1; i < deltas.size(); ++i) {
    if (!(deltas[i] < deltas[i - 1])) throw InputError("convergence: deltas must decrease");
  }
  auto logs = detail::parallel_map<TrackerLog>(deltas.size(),
                                               [&](std::size_t i) { return track(make_problem(sc, deltas[i], glimm_c)); });
  const auto fine = make_problem(sc, deltas.back(), glimm_c);
  FDOracleConfig cfg;
  cfg.dx = fd_dx;
  const auto fd = fd_oracle(fine.p0, fine.a, fine.g, sc.model, cfg, sc.horizon);
  ConvergenceReport rep;
  rep.fd_dx = fd_dx;
  rep.fd_norm = fd.l1_norm();
  rep.fd_steps = fd.steps;
  const double lo = sc.x_lo;
  const double hi = sc.x_hi;
  const double u_lo = sc.u0_at(lo);
  std::vector<Profile> prs;
  for (const auto& log : logs) prs.push_back(log.profile(sc.horizon));
  for (std::size_t i = 0; i < logs.size(); ++i) {
    ConvergenceRow row;
    row.delta = deltas[i];
    row.fronts = logs[i].fronts.size();
    row.fd_l1 = fd.l1_distance(prs[i]);
    if (i + 1 < logs.size()) {
      row.l1_next = detail::l1_between(prs[i], prs[i + 1], lo, hi);
      const HJSolution u(logs[i], lo, u_lo);
      const HJSolution v(logs[i + 1], lo, u_lo);
      for (double x : detail::merged_points(prs[i], prs[i + 1], lo, hi)) {
        row.linf_u_next = std::max(row.linf_u_next, std::abs(u.eval(prs[i], x, sc.horizon) - v.eval(prs[i + 1], x, sc.horizon)));
      }
    } else {
      row.l1_next = std::numeric_limits<double>::quiet_NaN();
      row.linf_u_next = std::numeric_limits<double>::quiet_NaN();
    }
    row.ratio = i == 0 ? std::numeric_limits<double>::quiet_NaN() : row.l1_next / rep.rows.back().l1_next;
    rep.rows.push_back(row);
  }
  return rep;
}

struct MonitorReport {
  std::size_t samples = 0;
  std::size_t temple_rises = 0;  // T up within a g-interval
  double max_temple_rise = 0.0;
  std::size_t temple_z_rises = 0;
  double max_temple_z_rise = 0.0;
  std::size_t glimm_rises = 0;
  double max_glimm_rise = 0.0;
  double bound_excess = 0.0;  // max T - a-priori bound, floored at 0
  bool ok() const { return temple_rises == 0 && glimm_rises == 0 && bound_excess <= 0.0; }
};

/// Monitor series against T non-increasing within each g-interval, G
/// non-increasing over the run and T below the a-priori bound.
inline MonitorReport monitor_check(const TrackerLog& log, double tol = 1e-10, double bound_slack = 1e-8) {
  MonitorReport r;
  r.samples = log.monitors.size();
  for (std::size_t i = 0; i < log.monitors.size(); ++i) {
    const auto& m1 = log.monitors[i];
    r.bound_excess = std::max(r.bound_excess, m1.T - log.temple_bound - bound_slack);
    if (i == 0) continue;
    const auto& m0 = log.monitors[i - 1];
    if (!m1.after_g_jump) {
      const double dt = m1.T - m0.T;
      const double dz = m1.Tz - m0.Tz;
      r.max_temple_rise = std::max(r.max_temple_rise, dt);
      r.max_temple_z_rise = std::max(r.max_temple_z_rise, dz);
      if (dt > tol) ++r.temple_rises;
      if (dz > tol) ++r.temple_z_rises;
    }
    const double dg = m1.G - m0.G;
    r.max_glimm_rise = std::max(r.max_glimm_rise, dg);
    if (dg > tol) ++r.glimm_rises;
  }
  return r;
}

struct InteractionReport {
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  double c = 0.0;            // smallest violation-free constant
  std::size_t violations = 0;  // against the calibrated constant
};

/// Sampled interaction estimate for random (p_l, p_r, a, g-, g+).
inline InteractionReport interaction_report(const HamiltonianModel& m, std::uint64_t seed, std::size_t samples = 1000) {
  InteractionReport r;
  r.seed = seed;
  r.samples = samples;
  r.c = interaction_ratio(m, seed, samples);
  const double cal = calibrated_glimm_c(m);
  std::mt19937_64 rng(seed);
  const auto& b = m.box();
  std::uniform_real_distribution<double> pd(-3.0, 3.0);
  std::uniform_real_distribution<double> ad(b.a_min, b.a_max);
  std::uniform_real_distribution<double> gd(b.g_min, b.g_max);
  for (std::size_t i = 0; i < samples; ++i) {
    const double pl = pd(rng), pr = pd(rng), a = ad(rng), gm = gd(rng), gp = gd(rng);
    const double before = std::abs(psi(m, pr, a, gm) - psi(m, pl, a, gm));
    const double after = std::abs(psi(m, pr, a, gp) - psi(m, pl, a, gp));
    if (after - before > cal * std::abs(gp - gm) * before + 1e-12) ++r.violations;
  }
  return r;
}

}  // namespace hjft
