#pragma once

// The Hamilton-Jacobi approximation u^delta rebuilt from a tracked p^delta:
// u(x, t) = u(x_ref, 0) - int_0^t H(trace at x_ref) ds + int_{x_ref}^x p dz,
// plus the closed-form value on Riemann data.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hjft/errors.hpp"
#include "hjft/grid.hpp"
#include "hjft/riemann.hpp"
#include "hjft/tracker.hpp"

namespace hjft {

class HJSolution {
 public:
  /// u(x_anchor, 0) = u_anchor fixes the additive constant.
  HJSolution(const TrackerLog& log, double x_anchor, double u_anchor) : log_(&log) {
    x_ref_ = pick_reference(log);
    u_ref_ = u_anchor + log.profile(0.0).integral(x_anchor, x_ref_);
    const auto trace = log.flux_trace(x_ref_, log.horizon);
    double acc = 0.0;
    for (const auto& pc : trace) {
      t_.push_back(pc.t0);
      acc_.push_back(acc);
      h_.push_back(pc.h);
      acc += pc.h * (pc.t1 - pc.t0);
    }
  }

  double x_ref() const { return x_ref_; }
  double u_ref() const { return u_ref_; }
  const TrackerLog& log() const { return *log_; }

  /// int_0^t H^delta(p^delta(x_ref, s)) ds, exact per piece.
  double flux_integral(double t) const {
    if (t_.empty() || t <= 0.0) return 0.0;
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    const auto k = static_cast<std::size_t>(it - t_.begin()) - 1;
    return acc_[k] + h_[k] * (t - t_[k]);
  }

  double operator()(double x, double t) const { return eval(log_->profile(t), x, t); }

  /// Several points at one time, sharing the profile.
  std::vector<double> at(double t, const std::vector<double>& xs) const {
    const auto pr = log_->profile(t);
    std::vector<double> out;
    for (double x : xs) out.push_back(eval(pr, x, t));
    return out;
  }

  double eval(const Profile& pr, double x, double t) const {
    return u_ref_ - flux_integral(t) + pr.integral(x_ref_, x);
  }

 private:
  static double pick_reference(const TrackerLog& log) {
    if (log.x_lo < 0.0 && 0.0 < log.x_hi) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : log.fronts) {
      if (f.kind == WaveKind::a_wave) best = std::min(best, f.x0);
    }
    return std::isfinite(best) ? best : 0.5 * (log.x_lo + log.x_hi);
  }

  const TrackerLog* log_;
  double x_ref_ = 0.0;
  double u_ref_ = 0.0;
  std::vector<double> t_;
  std::vector<double> acc_;
  std::vector<double> h_;
};

struct RiemannHJValue {
  double pointwise = 0.0;  // u0(0) + x p - t H(p, a(x))
  double integral = 0.0;   // u0(0) - t H0 + int_0^x p
  double p = 0.0;
  // Pointwise formula with the states on either side of x / t; they differ
  // only on a wave.
  double left = 0.0;
  double right = 0.0;
};

struct RiemannFan {
  FluxGrid grid;
  WaveFan fan;
  std::size_t jl = 0;
  std::size_t jr = 0;
  std::size_t kl = 0;
  std::size_t kr = 0;
};

/// Fan of the Riemann problem a_l | a_r, p_l | p_r at x = 0 on a grid of
/// width delta holding the data and 0.
inline RiemannFan riemann_fan(const HamiltonianModel& m, double a_l, double a_r, double p_l, double p_r, double g,
                              double delta = 0.05) {
  const auto b = riemann_bounds(m, p_l, p_r, a_l, a_r, g);
  double cap = std::max({b.upper, -b.lower, std::abs(p_l), std::abs(p_r)});
  if (cap <= 0.0) cap = 1.0;
  const std::vector<double> as{a_l, a_r};
  const std::vector<double> ps{p_l, p_r, 0.0};
  RiemannFan r{FluxGrid::build(m, delta, as, g, ps, cap), {}, 0, 0, 0, 0};
  r.jl = r.grid.level_of(a_l);
  r.jr = r.grid.level_of(a_r);
  r.kl = *r.grid.find_index(r.jl, p_l, 1e-12);
  r.kr = *r.grid.find_index(r.jr, p_r, 1e-12);
  r.fan = solve_interface(r.grid, r.jl, r.jr, r.kl, r.kr);
  return r;
}

/// u for Riemann data at x = 0 (coefficient a_l | a_r, slopes p_l | p_r),
/// from the exact fan on a grid of width delta.
inline RiemannHJValue riemann_hj(const HamiltonianModel& m, double a_l, double a_r, double p_l, double p_r,
                                 double g, double u0, double x, double t, double delta = 0.05) {
  if (!(t > 0.0)) throw InputError("riemann_hj: t must be positive");
  const auto rf = riemann_fan(m, a_l, a_r, p_l, p_r, g, delta);
  const auto& grid = rf.grid;
  const auto& fan = rf.fan;
  const auto jl = rf.jl;
  const auto kl = rf.kl;

  // States and breakpoints in xi = x / t.
  std::vector<double> xi;
  std::vector<SideState> st;
  auto side = [&](State s) {
    const auto& lv = grid.level(s.level);
    return SideState{lv.p[s.index], lv.h[s.index], lv.a};
  };
  st.push_back(side({jl, kl}));
  for (const auto& w : fan.waves) {
    xi.push_back(w.speed);
    st.push_back(side(w.right));
  }
  auto state_at = [&](double s) {
    const auto it = std::upper_bound(xi.begin(), xi.end(), s);
    return st[static_cast<std::size_t>(it - xi.begin())];
  };
  const double s = x / t;
  const auto here = state_at(s);
  const auto before = st[static_cast<std::size_t>(std::lower_bound(xi.begin(), xi.end(), s) - xi.begin())];
  RiemannHJValue v;
  v.p = here.p;
  v.pointwise = u0 + x * here.p - t * here.h;
  v.left = u0 + x * before.p - t * before.h;
  v.right = v.pointwise;
  // Flux at x = 0 for t > 0: the state just right of xi = 0 (equal to the
  // left one across a stationary wave).
  const double h0 = state_at(0.0).h;
  double integral = 0.0;
  const double lo = std::min(0.0, s);
  const double hi = std::max(0.0, s);
  double from = lo;
  for (double w : xi) {
    if (w <= lo || w >= hi) continue;
    integral += state_at(0.5 * (from + w)).p * (w - from);
    from = w;
  }
  integral += state_at(0.5 * (from + hi)).p * (hi - from);
  if (s < 0.0) integral = -integral;
  v.integral = u0 - t * h0 + t * integral;
  return v;
}

/// u^delta(x, t) with u0(0) given.
inline double reconstruct(const TrackerLog& log, double u0_at_zero, double x, double t) {
  return HJSolution(log, 0.0, u0_at_zero)(x, t);
}

/// Largest |(u(x+e) - u(x-e)) / 2e - p(x)| over xs at time t. The step is
/// shrunk to half the distance to the nearest front so the stencil stays in
/// one constancy interval.
inline double gradient_check(const HJSolution& u, double t, const std::vector<double>& xs, double step = 1e-5) {
  const auto pr = u.log().profile(t);
  double worst = 0.0;
  for (double x : xs) {
    double e = step;
    const auto it = std::lower_bound(pr.x.begin(), pr.x.end(), x);
    if (it != pr.x.end()) e = std::min(e, 0.5 * (*it - x));
    if (it != pr.x.begin()) e = std::min(e, 0.5 * (x - *(it - 1)));
    if (!(e > 0.0)) continue;
    const double d = (u.eval(pr, x + e, t) - u.eval(pr, x - e, t)) / (2.0 * e);
    worst = std::max(worst, std::abs(d - pr.p(x)));
  }
  return worst;
}

/// Along sampled front trajectories compare u(x(t1), t1) - u(x(t0), t0) with
/// the one-sided increments (x1 - x0) p - (t1 - t0) H on both sides.
inline double trajectory_check(const HJSolution& u, std::size_t max_fronts = 400) {
  const auto& log = u.log();
  double worst = 0.0;
  const std::size_t stride = std::max<std::size_t>(1, log.fronts.size() / max_fronts);
  for (std::size_t i = 0; i < log.fronts.size(); i += stride) {
    const auto& f = log.fronts[i];
    const double end = std::min(f.death, log.horizon);
    if (!(end > f.birth)) continue;
    const double t0 = f.birth + 0.25 * (end - f.birth);
    const double t1 = f.birth + 0.75 * (end - f.birth);
    const double x0 = f.position(t0);
    const double x1 = f.position(t1);
    const double du = u(x1, t1) - u(x0, t0);
    for (const auto& s : {f.left, f.right}) {
      worst = std::max(worst, std::abs(du - ((x1 - x0) * s.p - (t1 - t0) * s.h)));
    }
  }
  return worst;
}

/// Largest mismatch at a front between the affine pieces on either side,
/// each extrapolated from the middle of its constancy interval.
inline double continuity_check(const HJSolution& u, double t) {
  const auto pr = u.log().profile(t);
  std::vector<double> xs;
  for (double x : pr.x) {
    if (xs.empty() || x - xs.back() > 1e-12) xs.push_back(x);
  }
  const double lo = std::min(u.log().x_lo, xs.empty() ? 0.0 : xs.front()) - 1.0;
  const double hi = std::max(u.log().x_hi, xs.empty() ? 0.0 : xs.back()) + 1.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double ml = 0.5 * ((i == 0 ? lo : xs[i - 1]) + xs[i]);
    const double mr = 0.5 * (xs[i] + (i + 1 == xs.size() ? hi : xs[i + 1]));
    const double ul = u.eval(pr, ml, t) + (xs[i] - ml) * pr.p(ml);
    const double ur = u.eval(pr, mr, t) - (mr - xs[i]) * pr.p(mr);
    worst = std::max(worst, std::abs(ul - ur));
  }
  return worst;
}

}  // namespace hjft
