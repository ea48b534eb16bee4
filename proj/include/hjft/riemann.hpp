#pragma once

// Exact Riemann solvers on the discrete flux: scalar problems through convex
// and concave envelopes, and the two-level interface problem through the
// minimal-jump selection of the stationary coefficient wave.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include "hjft/errors.hpp"
#include "hjft/grid.hpp"

namespace hjft {

/// A grid state: breakpoint `index` on coefficient level `level`.
struct State {
  std::size_t level = 0;
  std::size_t index = 0;

  friend bool operator==(const State&, const State&) = default;
};

enum class WaveKind { p_wave, a_wave };

struct Wave {
  double speed = 0.0;
  State left;
  State right;
  WaveKind kind = WaveKind::p_wave;
};

struct WaveFan {
  std::vector<Wave> waves;
  bool tie_broken = false;  // minimal-jump selection had to break an exact tie

  bool empty() const { return waves.empty(); }
  std::size_t size() const { return waves.size(); }
};

namespace detail {

inline double cross(double ox, double oy, double ax, double ay, double bx, double by) {
  return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
}

// Envelope of the nodes k in [k0, k1] (k0 < k1): lower convex when `lower`,
// upper concave otherwise. Returns the hull indices in increasing p.
inline std::vector<std::size_t> envelope(const GridLevel& lv, std::size_t k0, std::size_t k1, bool lower) {
  std::vector<std::size_t> hull;
  for (std::size_t k = k0; k <= k1; ++k) {
    while (hull.size() >= 2) {
      const std::size_t o = hull[hull.size() - 2];
      const std::size_t a = hull.back();
      const double c = cross(lv.p[o], lv.h[o], lv.p[a], lv.h[a], lv.p[k], lv.h[k]);
      if ((lower && c <= 0.0) || (!lower && c >= 0.0)) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(k);
  }
  return hull;
}

inline double slope(const GridLevel& lv, std::size_t i, std::size_t k) {
  return (lv.h[k] - lv.h[i]) / (lv.p[k] - lv.p[i]);
}

}  // namespace detail

/// Entropy solution of the scalar Riemann problem on one level: a fan of
/// discontinuities along the convex (p_l < p_r) or concave (p_l > p_r)
/// envelope of the piecewise linear flux.
inline WaveFan solve_scalar(const FluxGrid& grid, std::size_t level, std::size_t kl, std::size_t kr) {
  if (level >= grid.level_count()) throw InputError("solve_scalar: level out of range");
  const auto& lv = grid.level(level);
  if (kl >= lv.size() || kr >= lv.size()) throw InputError("solve_scalar: state index off level");
  WaveFan fan;
  if (kl == kr) return fan;
  if (kl < kr) {
    const auto hull = detail::envelope(lv, kl, kr, true);
    for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
      fan.waves.push_back({detail::slope(lv, hull[i], hull[i + 1]), {level, hull[i]}, {level, hull[i + 1]},
                           WaveKind::p_wave});
    }
  } else {
    const auto hull = detail::envelope(lv, kr, kl, false);
    for (std::size_t i = hull.size() - 1; i > 0; --i) {
      fan.waves.push_back({detail::slope(lv, hull[i - 1], hull[i]), {level, hull[i]}, {level, hull[i - 1]},
                           WaveKind::p_wave});
    }
  }
  return fan;
}

/// Admissible interface states: the left state may be kept, or replaced by a
/// state reachable through waves of non-positive speed; symmetrically on the
/// right with non-negative speeds.
inline bool admissible_left(double p_l, double cand, bool trivial) {
  constexpr double tol = 1e-12;
  if (trivial) return true;
  return p_l <= 0.0 ? cand >= -p_l - tol : cand >= -tol;
}

inline bool admissible_right(double p_r, double cand, bool trivial) {
  constexpr double tol = 1e-12;
  if (trivial) return true;
  return p_r < 0.0 ? cand <= tol : cand <= -p_r + tol;
}

struct InterfacePair {
  std::size_t left = 0;   // index on the left level
  std::size_t right = 0;  // index on the right level
  bool tie_broken = false;
};

namespace detail {

// Strict ordering of candidate pairs: smaller jump, then more trivial sides,
// then smaller |p'_l|, then smaller indices.
struct PairKey {
  double jump;
  int nontrivial;
  double abs_left;
  std::size_t kl;
  std::size_t kr;
};

inline int compare(const PairKey& x, const PairKey& y) {
  constexpr double tol = 1e-12;
  if (x.jump < y.jump - tol) return -1;
  if (y.jump < x.jump - tol) return 1;
  if (x.nontrivial != y.nontrivial) return x.nontrivial < y.nontrivial ? -1 : 1;
  if (x.abs_left < y.abs_left - tol) return -1;
  if (y.abs_left < x.abs_left - tol) return 1;
  if (x.kl != y.kl) return x.kl < y.kl ? -1 : 1;
  if (x.kr != y.kr) return x.kr < y.kr ? -1 : 1;
  return 0;
}

// Two candidates are "tied" when they agree on the jump and |p'_l| criteria.
inline bool tied(const PairKey& x, const PairKey& y) {
  constexpr double tol = 1e-12;
  return std::abs(x.jump - y.jump) <= tol && x.nontrivial == y.nontrivial &&
         std::abs(x.abs_left - y.abs_left) <= tol;
}

}  // namespace detail

/// Minimal-jump flux-matching pair for the interface problem. Candidates on
/// each side are sorted by flux and swept together.
inline InterfacePair select_interface_pair(const FluxGrid& grid, std::size_t jl, std::size_t jr,
                                           std::size_t kl, std::size_t kr, double flux_tol = 1e-10) {
  const auto& L = grid.level(jl);
  const auto& R = grid.level(jr);
  const double p_l = L.p[kl];
  const double p_r = R.p[kr];
  std::vector<std::size_t> lc;
  std::vector<std::size_t> rc;
  for (std::size_t k = 0; k < L.size(); ++k) {
    if (admissible_left(p_l, L.p[k], k == kl)) lc.push_back(k);
  }
  for (std::size_t k = 0; k < R.size(); ++k) {
    if (admissible_right(p_r, R.p[k], k == kr)) rc.push_back(k);
  }
  std::sort(rc.begin(), rc.end(), [&](std::size_t x, std::size_t y) { return R.h[x] < R.h[y]; });

  bool found = false;
  bool tie = false;
  detail::PairKey best{};
  for (std::size_t a : lc) {
    const double h = L.h[a];
    auto it = std::lower_bound(rc.begin(), rc.end(), h - flux_tol,
                               [&](std::size_t k, double v) { return R.h[k] < v; });
    for (; it != rc.end() && R.h[*it] <= h + flux_tol; ++it) {
      const std::size_t b = *it;
      const detail::PairKey key{std::abs(L.p[a] - R.p[b]), (a != kl ? 1 : 0) + (b != kr ? 1 : 0),
                                std::abs(L.p[a]), a, b};
      if (!found) {
        best = key;
        found = true;
        tie = false;
        continue;
      }
      const int c = detail::compare(key, best);
      if (c < 0) {
        tie = detail::tied(key, best);
        best = key;
      } else if (detail::tied(key, best)) {
        tie = true;
      }
    }
  }
  if (!found) {
    auto range = [](const std::vector<std::size_t>& idx, const GridLevel& lv) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t k : idx) {
        lo = std::min(lo, lv.h[k]);
        hi = std::max(hi, lv.h[k]);
      }
      std::ostringstream os;
      os << "[" << lo << ", " << hi << "]";
      return os.str();
    };
    std::ostringstream os;
    os << "interface Riemann problem unsolvable: left flux range " << range(lc, L) << " on a=" << L.a
       << ", right flux range " << range(rc, R) << " on a=" << R.a;
    throw UnsolvableError(os.str());
  }
  return {best.kl, best.kr, tie};
}

/// Entropy solution of the Riemann problem with a coefficient jump at x = 0:
/// left waves (speed <= 0), the stationary a-wave, right waves (speed >= 0).
inline WaveFan solve_interface(const FluxGrid& grid, std::size_t jl, std::size_t jr, std::size_t kl,
                               std::size_t kr) {
  if (jl >= grid.level_count() || jr >= grid.level_count()) {
    throw InputError("solve_interface: level out of range");
  }
  if (kl >= grid.level(jl).size() || kr >= grid.level(jr).size()) {
    throw InputError("solve_interface: state index off level");
  }
  if (jl == jr) return solve_scalar(grid, jl, kl, kr);

  const auto pair = select_interface_pair(grid, jl, jr, kl, kr);
  WaveFan fan;
  fan.tie_broken = pair.tie_broken;
  constexpr double speed_tol = 1e-9;
  for (auto w : solve_scalar(grid, jl, kl, pair.left).waves) {
    if (w.speed > speed_tol) throw SolverError("solve_interface: positive speed in left sub-fan");
    w.speed = std::min(w.speed, 0.0);
    fan.waves.push_back(w);
  }
  fan.waves.push_back({0.0, {jl, pair.left}, {jr, pair.right}, WaveKind::a_wave});
  for (auto w : solve_scalar(grid, jr, pair.right, kr).waves) {
    if (w.speed < -speed_tol) throw SolverError("solve_interface: negative speed in right sub-fan");
    w.speed = std::max(w.speed, 0.0);
    fan.waves.push_back(w);
  }
  return fan;
}

struct RiemannBounds {
  double lower = 0.0;  // two-sided bound on the solution
  double upper = 0.0;
  double coarse = 0.0;  // symmetric bound on |p|
};

/// Bounds on every state of an interface Riemann solution, from flux
/// monotonicity between H(p_l, a_l) and H(p_r, a_r).
inline RiemannBounds riemann_bounds(const HamiltonianModel& m, double p_l, double p_r, double a_l, double a_r,
                                    double g) {
  auto g_plus = [&](double h, double a) {
    try {
      return m.inverse(h, a, g, Branch::plus);
    } catch (const NoPreimageError&) {
      return 0.0;
    }
  };
  const double hl = m.eval(p_l, a_l, g);
  const double hr = m.eval(p_r, a_r, g);
  RiemannBounds b;
  b.upper = std::max({g_plus(hl, a_r), g_plus(hr, a_l), std::abs(p_l), std::abs(p_r)});
  b.lower = std::min({-g_plus(hl, a_r), -g_plus(hr, a_l), -std::abs(p_l), -std::abs(p_r)});
  b.coarse = g_plus(std::min(hl, hr), std::max(a_l, a_r));
  return b;
}

/// Columnar fan dump: speed p_left p_right H_left H_right kind.
inline void write_fan(std::ostream& os, const FluxGrid& grid, const WaveFan& fan) {
  os << "# speed p_left p_right H_left H_right kind\n" << std::setprecision(17);
  for (const auto& w : fan.waves) {
    const auto& L = grid.level(w.left.level);
    const auto& R = grid.level(w.right.level);
    os << w.speed << ' ' << L.p[w.left.index] << ' ' << R.p[w.right.index] << ' ' << L.h[w.left.index] << ' '
       << R.h[w.right.index] << ' ' << (w.kind == WaveKind::a_wave ? "a" : "p") << '\n';
  }
}

}  // namespace hjft
