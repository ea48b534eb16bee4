#pragma once

// The singular mapping, the (z, alpha) transform, and the discrete flux grid:
// per coefficient level a sorted set of breakpoints (z, p, H) whose piecewise
// linear interpolant replaces H during front tracking.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <vector>

#include "hjft/errors.hpp"
#include "hjft/flux_model.hpp"

namespace hjft {

inline double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

/// alpha(a) = H(0, a, g).
inline double alpha_of(const HamiltonianModel& m, double a, double g) { return m.peak(a, g); }

/// z(p) = -sign(p) (H(p) - H(0)); odd and non-decreasing in p.
inline double z_transform(const HamiltonianModel& m, double p, double a, double g) {
  return -sign_of(p) * (m.eval(p, a, g) - m.peak(a, g));
}

/// Temple singular mapping sign(p) (H(p) - H(0)) / H(0).
inline double psi(const HamiltonianModel& m, double p, double a, double g) {
  const double h0 = m.peak(a, g);
  return sign_of(p) * (m.eval(p, a, g) - h0) / h0;
}

/// Inverse of the z transform on one level.
inline double z_inverse(const HamiltonianModel& m, double z, double a, double g) {
  if (z == 0.0) return 0.0;
  const double p = m.inverse(m.peak(a, g) - std::abs(z), a, g, Branch::plus);
  return z > 0.0 ? p : -p;
}

struct GridLevel {
  double a = 0.0;
  double alpha = 0.0;
  bool active = false;  // the level of a value actually taken by the coefficient
  std::vector<double> z;
  std::vector<double> p;
  std::vector<double> h;

  std::size_t size() const { return z.size(); }
};

class FluxGrid {
 public:
  static constexpr double merge_tol = 1e-12;

  static FluxGrid build(const HamiltonianModel& model, double delta, std::span<const double> a_values,
                        double g, std::span<const double> p_data, double cap) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw InputError("grid: delta must be positive");
    if (a_values.empty()) throw InputError("grid: empty coefficient value list");
    if (p_data.empty()) throw InputError("grid: empty p-data list");
    if (!(cap > 0.0) || !std::isfinite(cap)) throw InputError("grid: cap P must be positive");
    if (model.p_guard() && cap > *model.p_guard() + 1e-12) {
      throw InputError("grid: cap P exceeds the model's p guard");
    }
    for (double p : p_data) {
      if (!std::isfinite(p)) throw InputError("grid: non-finite p-data");
      if (std::abs(p) > cap * (1.0 + 1e-12) + 1e-12) {
        std::ostringstream os;
        os << "grid: cap P=" << cap << " does not cover data value " << p;
        throw InputError(os.str());
      }
    }

    FluxGrid grid(model);
    grid.delta_ = delta;
    grid.g_ = g;
    grid.cap_ = cap;
    grid.data_.assign(p_data.begin(), p_data.end());
    std::sort(grid.data_.begin(), grid.data_.end());
    grid.data_.erase(std::unique(grid.data_.begin(), grid.data_.end()), grid.data_.end());

    // Levels: alpha of every coefficient value, plus the uniform lattice in
    // between. Values with equal alpha share a level.
    std::vector<std::pair<double, double>> act;  // (alpha, a)
    for (double a : a_values) act.emplace_back(alpha_of(model, a, g), a);
    std::sort(act.begin(), act.end());
    for (const auto& [al, a] : act) {
      if (grid.levels_.empty() || al - grid.levels_.back().alpha > merge_tol) {
        GridLevel lv;
        lv.a = a;
        lv.alpha = al;
        lv.active = true;
        grid.levels_.push_back(lv);
      }
    }
    const double lo = grid.levels_.front().alpha;
    const double hi = grid.levels_.back().alpha;
    const auto i_lo = static_cast<long>(std::ceil(lo / delta - 1e-9));
    const auto i_hi = static_cast<long>(std::floor(hi / delta + 1e-9));
    std::vector<GridLevel> lattice;
    for (long i = i_lo; i <= i_hi; ++i) {
      const double al = static_cast<double>(i) * delta;
      if (al < lo - merge_tol || al > hi + merge_tol) continue;
      const bool taken = std::any_of(grid.levels_.begin(), grid.levels_.end(), [&](const GridLevel& l) {
        return std::abs(l.alpha - al) <= merge_tol;
      });
      if (taken) continue;
      GridLevel lv;
      lv.alpha = al;
      lv.a = grid.alpha_inverse(al);
      lattice.push_back(lv);
    }
    grid.levels_.insert(grid.levels_.end(), lattice.begin(), lattice.end());
    std::sort(grid.levels_.begin(), grid.levels_.end(),
              [](const GridLevel& x, const GridLevel& y) { return x.alpha < y.alpha; });

    // Breakpoint candidates per level: (z, p if known exactly).
    struct Cand {
      double z;
      double p;      // NaN when it must be recovered from z
      int rank = 0;  // on merge the higher rank wins: data > cap and 0 > recovered
    };
    constexpr double unknown = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<Cand>> cands(grid.levels_.size());
    std::vector<double> zmax(grid.levels_.size());
    for (std::size_t j = 0; j < grid.levels_.size(); ++j) {
      const auto& lv = grid.levels_[j];
      zmax[j] = z_transform(model, cap, lv.a, g);
      auto& c = cands[j];
      c.push_back({-zmax[j], -cap, 1});
      c.push_back({zmax[j], cap, 1});
      c.push_back({0.0, 0.0, 2});
      const auto kmax = static_cast<long>(std::floor(zmax[j] / delta));
      for (long k = 1; k <= kmax; ++k) {
        const double zk = static_cast<double>(k) * delta;
        if (zk >= zmax[j] - merge_tol) break;
        c.push_back({zk, unknown});
        c.push_back({-zk, unknown});
      }
      for (double p : grid.data_) c.push_back({z_transform(model, p, lv.a, g), p, 2});
    }
    // Flux closure: every flux value present on an active level is present on
    // every level, so interface states always have an exact flux match.
    std::vector<double> fluxes;
    for (std::size_t j = 0; j < grid.levels_.size(); ++j) {
      if (!grid.levels_[j].active) continue;
      for (const auto& c : cands[j]) {
        fluxes.push_back(std::isnan(c.p) ? grid.levels_[j].alpha - std::abs(c.z)
                                         : model.eval(c.p, grid.levels_[j].a, g));
      }
    }
    std::sort(fluxes.begin(), fluxes.end());
    fluxes.erase(std::unique(fluxes.begin(), fluxes.end(),
                             [](double x, double y) { return std::abs(x - y) <= merge_tol; }),
                 fluxes.end());
    for (std::size_t j = 0; j < grid.levels_.size(); ++j) {
      const double al = grid.levels_[j].alpha;
      for (double f : fluxes) {
        const double d = al - f;
        if (d < -merge_tol || d > zmax[j] + merge_tol) continue;
        const double dz = std::clamp(d, 0.0, zmax[j]);
        cands[j].push_back({dz, unknown});
        cands[j].push_back({-dz, unknown});
      }
    }

    for (std::size_t j = 0; j < grid.levels_.size(); ++j) {
      auto& c = cands[j];
      std::sort(c.begin(), c.end(), [](const Cand& x, const Cand& y) { return x.z < y.z; });
      auto& lv = grid.levels_[j];
      std::vector<int> rank;
      for (const auto& cand : c) {
        if (!lv.z.empty() && cand.z - lv.z.back() <= merge_tol) {
          if (cand.rank > rank.back()) {
            lv.z.back() = cand.z;
            lv.p.back() = cand.p;
            rank.back() = cand.rank;
          }
          continue;
        }
        lv.z.push_back(cand.z);
        lv.p.push_back(cand.p);
        rank.push_back(cand.rank);
      }
      for (std::size_t k = 0; k < lv.z.size(); ++k) {
        if (std::isnan(lv.p[k])) lv.p[k] = z_inverse(model, lv.z[k], lv.a, g);
        lv.h.push_back(model.eval(lv.p[k], lv.a, g));
      }
      for (std::size_t k = 1; k < lv.p.size(); ++k) {
        if (!(lv.p[k] > lv.p[k - 1])) throw SolverError("grid: breakpoints not strictly increasing in p");
      }
    }
    return grid;
  }

  /// Rebuild for a new g, keeping every old data value and every current
  /// state as a breakpoint.
  FluxGrid regrid_for_g(double g_new, std::span<const double> current_p, double cap) const {
    std::vector<double> data = data_;
    data.insert(data.end(), current_p.begin(), current_p.end());
    std::vector<double> as;
    for (const auto& lv : levels_) {
      if (lv.active) as.push_back(lv.a);
    }
    return build(model_, delta_, as, g_new, data, std::max(cap, cap_));
  }

  const HamiltonianModel& model() const { return model_; }
  double delta() const { return delta_; }
  double g() const { return g_; }
  double cap() const { return cap_; }
  const std::vector<double>& data() const { return data_; }
  std::size_t level_count() const { return levels_.size(); }
  const GridLevel& level(std::size_t j) const { return levels_.at(j); }
  const std::vector<GridLevel>& levels() const { return levels_; }

  std::size_t breakpoint_count() const {
    std::size_t n = 0;
    for (const auto& lv : levels_) n += lv.size();
    return n;
  }

  std::optional<std::size_t> find_level(double a) const {
    const double al = alpha_of(model_, a, g_);
    for (std::size_t j = 0; j < levels_.size(); ++j) {
      if (std::abs(levels_[j].alpha - al) <= merge_tol) return j;
    }
    return std::nullopt;
  }

  std::size_t level_of(double a) const {
    if (auto j = find_level(a)) return *j;
    std::ostringstream os;
    os << "grid: no level for a=" << a;
    throw RangeError(os.str());
  }

  /// Breakpoint index holding p exactly (up to tol), if any.
  std::optional<std::size_t> find_index(std::size_t j, double p, double tol = 1e-9) const {
    const auto& ps = levels_.at(j).p;
    auto it = std::lower_bound(ps.begin(), ps.end(), p - tol);
    if (it != ps.end() && std::abs(*it - p) <= tol) return static_cast<std::size_t>(it - ps.begin());
    return std::nullopt;
  }

  /// Nearest breakpoint in z, ties toward z = 0.
  std::size_t project(std::size_t j, double p) const {
    const auto& lv = levels_.at(j);
    const double z = z_transform(model_, p, lv.a, g_);
    auto it = std::lower_bound(lv.z.begin(), lv.z.end(), z);
    if (it == lv.z.begin()) return 0;
    if (it == lv.z.end()) return lv.size() - 1;
    const auto hi = static_cast<std::size_t>(it - lv.z.begin());
    const std::size_t lo = hi - 1;
    const double dlo = z - lv.z[lo];
    const double dhi = lv.z[hi] - z;
    if (dlo < dhi) return lo;
    if (dhi < dlo) return hi;
    return std::abs(lv.z[lo]) <= std::abs(lv.z[hi]) ? lo : hi;
  }

  /// Piecewise linear interpolant of the node values on level j.
  double flux_interp(std::size_t j, double p) const {
    const auto& lv = levels_.at(j);
    const double tol = 1e-12 * std::max(1.0, cap_);
    if (p < lv.p.front() - tol || p > lv.p.back() + tol) {
      std::ostringstream os;
      os << "flux_interp: p=" << p << " outside [" << lv.p.front() << ", " << lv.p.back() << "]";
      throw RangeError(os.str());
    }
    auto it = std::lower_bound(lv.p.begin(), lv.p.end(), p);
    if (it == lv.p.end()) return lv.h.back();
    auto k = static_cast<std::size_t>(it - lv.p.begin());
    if (*it == p || k == 0) return lv.h[k];
    const std::size_t k0 = k - 1;
    const double w = (p - lv.p[k0]) / (lv.p[k] - lv.p[k0]);
    return lv.h[k0] + w * (lv.h[k] - lv.h[k0]);
  }

  /// Columnar dump: level k z p H.
  void dump(std::ostream& os) const {
    os << "# level k z p H\n";
    os << std::setprecision(17);
    for (std::size_t j = 0; j < levels_.size(); ++j) {
      const auto& lv = levels_[j];
      for (std::size_t k = 0; k < lv.size(); ++k) {
        os << j << ' ' << k << ' ' << lv.z[k] << ' ' << lv.p[k] << ' ' << lv.h[k] << '\n';
      }
    }
  }

 private:
  explicit FluxGrid(HamiltonianModel model) : model_(std::move(model)) {}

  // a with alpha(a) = target, by bisection over the model's a-range.
  double alpha_inverse(double target) const {
    double lo = model_.box().a_min;
    double hi = model_.box().a_max;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (alpha_of(model_, mid, g_) < target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

  HamiltonianModel model_;
  double delta_ = 0.0;
  double g_ = 0.0;
  double cap_ = 0.0;
  std::vector<double> data_;
  std::vector<GridLevel> levels_;
};

}  // namespace hjft
