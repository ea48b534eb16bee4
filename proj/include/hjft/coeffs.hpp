#pragma once

// Piecewise-constant approximations of the coefficients and of the initial
// slope, from expressions with declared jump points.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <utility>
#include <vector>

#include "hjft/errors.hpp"
#include "hjft/expression.hpp"

namespace hjft {

/// Right-continuous step function on [lo, hi].
class PiecewiseConstantFn {
 public:
  PiecewiseConstantFn() = default;

  PiecewiseConstantFn(double lo, double hi, std::vector<double> breaks, std::vector<double> values)
      : lo_(lo), hi_(hi), breaks_(std::move(breaks)), values_(std::move(values)) {
    if (!(lo < hi)) throw InputError("piecewise function: empty domain");
    if (values_.size() != breaks_.size() + 1) throw InputError("piecewise function: value count mismatch");
    for (std::size_t i = 0; i < breaks_.size(); ++i) {
      if (!(breaks_[i] > lo_ && breaks_[i] < hi_)) throw InputError("piecewise function: breakpoint outside domain");
      if (i > 0 && !(breaks_[i] > breaks_[i - 1])) throw InputError("piecewise function: breakpoints not increasing");
    }
    for (double v : values_) {
      if (!std::isfinite(v)) throw InputError("piecewise function: non-finite value");
    }
  }

  static PiecewiseConstantFn constant(double lo, double hi, double v) { return {lo, hi, {}, {v}}; }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<double>& values() const { return values_; }

  /// Value at s; outside the domain the end values extend.
  double operator()(double s) const {
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), s);
    return values_[static_cast<std::size_t>(it - breaks_.begin())];
  }

  /// Value just left of s.
  double left_limit(double s) const {
    const auto it = std::lower_bound(breaks_.begin(), breaks_.end(), s);
    return values_[static_cast<std::size_t>(it - breaks_.begin())];
  }

  double variation() const {
    double v = 0.0;
    for (std::size_t i = 1; i < values_.size(); ++i) v += std::abs(values_[i] - values_[i - 1]);
    return v;
  }

  /// Variation restricted to (s0, s1].
  double variation_on(double s0, double s1) const {
    double v = 0.0;
    for (std::size_t i = 0; i < breaks_.size(); ++i) {
      if (breaks_[i] > s0 && breaks_[i] <= s1) v += std::abs(values_[i + 1] - values_[i]);
    }
    return v;
  }

  double min_value() const { return *std::min_element(values_.begin(), values_.end()); }
  double max_value() const { return *std::max_element(values_.begin(), values_.end()); }

  /// Distinct values in increasing order.
  std::vector<double> distinct_values() const {
    auto v = values_;
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }

  /// Exact L1 distance on the common domain.
  double l1_distance(const PiecewiseConstantFn& o) const {
    const double lo = std::max(lo_, o.lo_);
    const double hi = std::min(hi_, o.hi_);
    std::vector<double> pts{lo, hi};
    for (double b : breaks_) pts.push_back(b);
    for (double b : o.breaks_) pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const double a = std::max(pts[i], lo);
      const double b = std::min(pts[i + 1], hi);
      if (b <= a) continue;
      const double m = 0.5 * (a + b);
      sum += std::abs((*this)(m) - o(m)) * (b - a);
    }
    return sum;
  }

 private:
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::vector<double> breaks_;
  std::vector<double> values_;
};

/// Expression per interval between declared jump points.
struct CoefficientPiece {
  std::vector<double> jumps;
  std::vector<Expression> pieces;  // jumps.size() + 1 entries

  static CoefficientPiece smooth(const std::string& text) { return {{}, {Expression::parse(text)}}; }

  static CoefficientPiece constant(double v) { return {{}, {Expression::constant(v)}}; }

  void check(double lo, double hi) const {
    if (pieces.size() != jumps.size() + 1) {
      std::ostringstream os;
      os << "coefficient: " << jumps.size() << " jumps need " << jumps.size() + 1 << " expressions, got "
         << pieces.size();
      throw SpecError(os.str());
    }
    for (std::size_t i = 0; i < jumps.size(); ++i) {
      if (!(jumps[i] > lo && jumps[i] < hi)) {
        std::ostringstream os;
        os << "coefficient: jump point " << jumps[i] << " outside (" << lo << ", " << hi << ")";
        throw SpecError(os.str());
      }
      if (i > 0 && !(jumps[i] > jumps[i - 1])) throw SpecError("coefficient: jump points not increasing");
    }
  }

  /// Right-continuous evaluation.
  double operator()(double s) const {
    const auto it = std::upper_bound(jumps.begin(), jumps.end(), s);
    return pieces[static_cast<std::size_t>(it - jumps.begin())](s);
  }
};

namespace detail {

inline std::vector<double> mesh_nodes(double lo, double hi, double h, const std::vector<double>& extra) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InputError("discretize: mesh h must be positive");
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw InputError("discretize: bad domain");
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / h - 1e-9));
  std::vector<double> nodes;
  for (std::size_t i = 0; i <= n; ++i) nodes.push_back(std::min(hi, lo + static_cast<double>(i) * h));
  nodes.back() = hi;
  for (double e : extra) nodes.push_back(e);
  std::sort(nodes.begin(), nodes.end());
  std::vector<double> out;
  for (double v : nodes) {
    if (!out.empty() && v - out.back() <= 1e-12 * std::max(1.0, std::abs(v))) {
      // Keep declared points exactly.
      if (std::find(extra.begin(), extra.end(), v) != extra.end()) out.back() = v;
      continue;
    }
    out.push_back(v);
  }
  return out;
}

inline PiecewiseConstantFn from_cells(double lo, double hi, const std::vector<double>& nodes,
                                      const std::vector<double>& vals) {
  std::vector<double> breaks;
  std::vector<double> values{vals.front()};
  for (std::size_t i = 1; i < vals.size(); ++i) {
    if (vals[i] == values.back()) continue;
    breaks.push_back(nodes[i]);
    values.push_back(vals[i]);
  }
  return {lo, hi, std::move(breaks), std::move(values)};
}

}  // namespace detail

/// Midpoint samples on a uniform mesh of width h with the declared jumps
/// inserted as breakpoints.
inline PiecewiseConstantFn discretize(const CoefficientPiece& f, double lo, double hi, double h) {
  f.check(lo, hi);
  const auto nodes = detail::mesh_nodes(lo, hi, h, f.jumps);
  std::vector<double> vals;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) vals.push_back(f(0.5 * (nodes[i] + nodes[i + 1])));
  return detail::from_cells(lo, hi, nodes, vals);
}

/// Slope of u0 as forward differences on the mesh (kinks of u0 inserted as
/// nodes); the primitive of the result interpolates u0 at every node.
inline PiecewiseConstantFn slope_from_potential(const CoefficientPiece& u0, double lo, double hi, double h) {
  u0.check(lo, hi);
  const auto nodes = detail::mesh_nodes(lo, hi, h, u0.jumps);
  std::vector<double> vals;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    // u0 is continuous: evaluate each end with the piece owning the cell.
    const double m = 0.5 * (nodes[i] + nodes[i + 1]);
    const auto k = static_cast<std::size_t>(std::upper_bound(u0.jumps.begin(), u0.jumps.end(), m) -
                                            u0.jumps.begin());
    const auto& e = u0.pieces[k];
    vals.push_back((e(nodes[i + 1]) - e(nodes[i])) / (nodes[i + 1] - nodes[i]));
  }
  return detail::from_cells(lo, hi, nodes, vals);
}

/// Variation of f on [lo, hi] by dense sampling of each smooth piece plus the
/// declared jumps; `per_unit` samples per unit length.
inline double variation_estimate(const CoefficientPiece& f, double lo, double hi, double per_unit = 4096.0) {
  f.check(lo, hi);
  std::vector<double> ends{lo};
  for (double j : f.jumps) ends.push_back(j);
  ends.push_back(hi);
  double v = 0.0;
  for (std::size_t k = 0; k + 1 < ends.size(); ++k) {
    const auto& e = f.pieces[k];
    const double a = ends[k];
    const double b = ends[k + 1];
    const auto n = std::max<std::size_t>(16, static_cast<std::size_t>((b - a) * per_unit));
    double prev = e(a);
    for (std::size_t i = 1; i <= n; ++i) {
      const double cur = e(a + (b - a) * static_cast<double>(i) / static_cast<double>(n));
      v += std::abs(cur - prev);
      prev = cur;
    }
    if (k + 1 < f.pieces.size()) v += std::abs(f.pieces[k + 1](b) - e(b));
  }
  return v;
}

/// L1 distance between f and a step function, Gauss-Legendre on every cell
/// of the common refinement.
inline double l1_error(const CoefficientPiece& f, const PiecewiseConstantFn& fh, int sub = 8) {
  static constexpr std::array<double, 4> x{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                           0.9602898564975363};
  static constexpr std::array<double, 4> w{0.3626837833783620, 0.3137066238173381, 0.2223810344533745,
                                           0.1012285362903763};
  std::vector<double> pts{fh.lo(), fh.hi()};
  for (double b : fh.breaks()) pts.push_back(b);
  for (double j : f.jumps) {
    if (j > fh.lo() && j < fh.hi()) pts.push_back(j);
  }
  std::sort(pts.begin(), pts.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i];
    const double b = pts[i + 1];
    if (b <= a) continue;
    const double c = fh(0.5 * (a + b));
    const auto k = static_cast<std::size_t>(
        std::upper_bound(f.jumps.begin(), f.jumps.end(), 0.5 * (a + b)) - f.jumps.begin());
    const auto& e = f.pieces[k];
    const double hs = (b - a) / sub;
    for (int s = 0; s < sub; ++s) {
      const double m = a + (s + 0.5) * hs;
      for (std::size_t q = 0; q < 4; ++q) {
        sum += 0.5 * hs * w[q] * (std::abs(e(m + 0.5 * hs * x[q]) - c) + std::abs(e(m - 0.5 * hs * x[q]) - c));
      }
    }
  }
  return sum;
}

}  // namespace hjft
