#pragma once

// Hamiltonian flux families H(p, a, g), their p-derivatives and local inverses,
// plus a sampled validation of the structural assumptions the solver relies on.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hjft/errors.hpp"

namespace hjft {

struct CoefficientBox {
  double a_min = 1.0;
  double a_max = 2.0;
  double g_min = 1.0;
  double g_max = 2.0;

  bool contains(double a, double g, double tol = 1e-12) const {
    return a >= a_min - tol && a <= a_max + tol && g >= g_min - tol && g <= g_max + tol;
  }
};

enum class Family { offset_eikonal, quadratic_cap, custom };

enum class Branch { plus, minus };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::offset_eikonal: return "offset_eikonal";
    case Family::quadratic_cap: return "quadratic_cap";
    case Family::custom: return "custom";
  }
  return "?";
}

class HamiltonianModel {
 public:
  using Fn = std::function<double(double p, double a, double g)>;

  /// H = a + g - sqrt(1 + p^2). Globally Lipschitz in p, concave, even.
  static HamiltonianModel offset_eikonal(CoefficientBox box) {
    HamiltonianModel m;
    m.family_ = Family::offset_eikonal;
    m.name_ = "offset_eikonal";
    m.box_ = box;
    return m;
  }

  /// H = a*g - p^2, admissible only on |p| <= p_guard.
  static HamiltonianModel quadratic_cap(CoefficientBox box, double p_guard) {
    if (!(p_guard > 0.0) || !std::isfinite(p_guard)) {
      throw InputError("quadratic_cap: p_guard must be positive and finite");
    }
    HamiltonianModel m;
    m.family_ = Family::quadratic_cap;
    m.name_ = "quadratic_cap";
    m.box_ = box;
    m.p_guard_ = p_guard;
    return m;
  }

  /// User-supplied flux. Derivatives fall back to central differences and the
  /// inverse to bisection.
  static HamiltonianModel custom(std::string name, Fn h, CoefficientBox box,
                                 std::optional<double> p_guard = std::nullopt) {
    HamiltonianModel m;
    m.family_ = Family::custom;
    m.name_ = std::move(name);
    m.fn_ = std::move(h);
    m.box_ = box;
    m.p_guard_ = p_guard;
    return m;
  }

  Family family() const { return family_; }
  const std::string& name() const { return name_; }
  const CoefficientBox& box() const { return box_; }
  std::optional<double> p_guard() const { return p_guard_; }

  double eval(double p, double a, double g) const {
    check_args(p, a, g);
    return raw(p, a, g);
  }

  /// H(0, a, g), the maximum of p -> H(p, a, g).
  double peak(double a, double g) const { return eval(0.0, a, g); }

  double dp(double p, double a, double g) const {
    check_args(p, a, g);
    switch (family_) {
      case Family::offset_eikonal: return -p / std::sqrt(1.0 + p * p);
      case Family::quadratic_cap: return -2.0 * p;
      case Family::custom: break;
    }
    constexpr double step = 1e-6;
    return (raw(p + step, a, g) - raw(p - step, a, g)) / (2.0 * step);
  }

  double dpp(double p, double a, double g) const {
    check_args(p, a, g);
    switch (family_) {
      case Family::offset_eikonal: return -1.0 / std::pow(1.0 + p * p, 1.5);
      case Family::quadratic_cap: return -2.0;
      case Family::custom: break;
    }
    constexpr double step = 1e-4;
    return (raw(p + step, a, g) - 2.0 * raw(p, a, g) + raw(p - step, a, g)) / (step * step);
  }

  /// Local inverses G+/G-: the p >= 0 (resp. <= 0) solution of H(p, a, g) = h.
  double inverse(double h, double a, double g, Branch branch) const {
    if (!std::isfinite(h)) throw InputError("inverse: non-finite flux value");
    check_args(0.0, a, g);
    const double top = raw(0.0, a, g);
    const double slack = 1e-13 * std::max(1.0, std::abs(top));
    if (h > top + slack) {
      std::ostringstream os;
      os << "inverse: flux value " << h << " above peak " << top << " at a=" << a << ", g=" << g;
      throw NoPreimageError(os.str());
    }
    double p = 0.0;
    if (h < top) {
      switch (family_) {
        case Family::offset_eikonal: {
          const double s = a + g - h;
          p = std::sqrt(std::max(0.0, s * s - 1.0));
          break;
        }
        case Family::quadratic_cap: {
          const double floor_h = raw(*p_guard_, a, g);
          if (h < floor_h - 1e-12 * std::max(1.0, std::abs(floor_h))) {
            throw RangeError("inverse: flux value below H(p_guard)");
          }
          p = std::min(*p_guard_, std::sqrt(std::max(0.0, a * g - h)));
          break;
        }
        case Family::custom:
          p = bisect(h, a, g);
          break;
      }
    }
    return branch == Branch::plus ? p : -p;
  }

 private:
  HamiltonianModel() = default;

  void check_args(double p, double a, double g) const {
    if (!std::isfinite(p) || !std::isfinite(a) || !std::isfinite(g)) {
      throw InputError("non-finite argument to Hamiltonian " + name_);
    }
    if (!box_.contains(a, g)) {
      std::ostringstream os;
      os << "coefficient (a=" << a << ", g=" << g << ") outside box [" << box_.a_min << ", "
         << box_.a_max << "] x [" << box_.g_min << ", " << box_.g_max << "]";
      throw DomainError(os.str());
    }
  }

  double raw(double p, double a, double g) const {
    switch (family_) {
      case Family::offset_eikonal: return a + g - std::sqrt(1.0 + p * p);
      case Family::quadratic_cap: return a * g - p * p;
      case Family::custom: return fn_(p, a, g);
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  double bisect(double h, double a, double g) const {
    double lo = 0.0;
    double hi = 0.0;
    if (p_guard_) {
      hi = *p_guard_;
      if (raw(hi, a, g) > h) throw RangeError("inverse: flux value below H(p_guard)");
    } else {
      hi = 1.0;
      while (raw(hi, a, g) > h) {
        hi *= 2.0;
        if (hi > 1e12) throw RangeError("inverse: no bracket below 1e12");
      }
    }
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      if (raw(mid, a, g) > h) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

  Family family_ = Family::offset_eikonal;
  std::string name_;
  Fn fn_;
  CoefficientBox box_;
  std::optional<double> p_guard_;
};

// ---------------------------------------------------------------------------
// Assumption validation

struct Witness {
  double p = 0.0;
  double a = 0.0;
  double g = 0.0;
  double value = 0.0;  // offending quantity
};

struct AssumptionCheck {
  std::string name;
  bool pass = true;
  std::vector<Witness> witnesses;

  void fail(Witness w) {
    pass = false;
    if (witnesses.size() < 8) witnesses.push_back(w);
  }
};

struct AssumptionReport {
  AssumptionCheck peak_nonzero{"peak_nonzero"};        // H(0, a, g) bounded away from 0
  AssumptionCheck lipschitz_coeff{"lipschitz_coeff"};  // Lipschitz in (a, g), weighted by 1 + |p|
  AssumptionCheck lipschitz_p{"lipschitz_p"};          // global Lipschitz in p
  AssumptionCheck monotone_coeff{"monotone_coeff"};    // non-decreasing in a and g
  AssumptionCheck peak_curvature{"peak_curvature"};    // H_p(0) = 0, H_pp(0) < 0
  AssumptionCheck even_unimodal{"even_unimodal"};      // even, strictly unimodal
  AssumptionCheck growth{"growth"};                    // |H(p)|/p bounded below at large p

  double p_min = 0.0;
  double p_max = 0.0;
  bool restricted_to_guard = false;

  double lipschitz_coeff_constant = 0.0;
  double lipschitz_p_constant = 0.0;
  double growth_constant = 0.0;
  // Curvature/slope bounds: |H_pp| in [c0, C0] for |p| <= P, |H_p| in [c0, C0]
  // for P <= |p| <= p_max.
  double c0 = 0.0;
  double C0 = 0.0;
  double P = 0.0;

  std::vector<const AssumptionCheck*> checks() const {
    return {&peak_nonzero, &lipschitz_coeff, &lipschitz_p, &monotone_coeff,
            &peak_curvature, &even_unimodal, &growth};
  }
  bool all_pass() const {
    for (auto* c : checks()) {
      if (!c->pass) return false;
    }
    return true;
  }
};

namespace detail {
inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return v;
}
}  // namespace detail

/// Samples the coefficient box and the p-range [-p_limit, p_limit] on a tensor
/// grid and checks the structural assumptions. Failures are reported, never
/// thrown. When the model carries a p-guard the p-range is clipped to it.
inline AssumptionReport validate(const HamiltonianModel& model, int samples, double p_limit = 10.0) {
  if (samples < 2) throw InputError("validate: need at least 2 samples per axis");
  if (!(p_limit > 0.0)) throw InputError("validate: p_limit must be positive");
  AssumptionReport r;
  double pmax = p_limit;
  if (model.p_guard() && *model.p_guard() < pmax) {
    pmax = *model.p_guard();
    r.restricted_to_guard = true;
  }
  r.p_min = -pmax;
  r.p_max = pmax;

  const auto& box = model.box();
  const auto as = detail::linspace(box.a_min, box.a_max, samples);
  const auto gs = detail::linspace(box.g_min, box.g_max, samples);
  const int np = std::max(samples, 64) | 1;
  const auto ps = detail::linspace(-pmax, pmax, np);

  double peak_sign = 0.0;
  for (double a : as) {
    for (double g : gs) {
      const double h0 = model.peak(a, g);
      if (std::abs(h0) < 1e-8 || (peak_sign != 0.0 && h0 * peak_sign < 0.0)) {
        r.peak_nonzero.fail({0.0, a, g, h0});
      }
      if (peak_sign == 0.0 && std::abs(h0) >= 1e-8) peak_sign = h0 > 0 ? 1.0 : -1.0;
    }
  }
  if (peak_sign < 0.0) {
    // The solver needs H(0) > 0; a uniformly negative peak is also rejected.
    r.peak_nonzero.fail({0.0, box.a_min, box.g_min, model.peak(box.a_min, box.g_min)});
  }

  // Coefficient Lipschitz constant and monotonicity on neighbouring samples.
  double c_coeff = 0.0;
  for (std::size_t i = 0; i < as.size(); ++i) {
    for (std::size_t j = 0; j < gs.size(); ++j) {
      for (double p : ps) {
        const double h = model.eval(p, as[i], gs[j]);
        if (i + 1 < as.size()) {
          const double d = std::abs(model.eval(p, as[i + 1], gs[j]) - h);
          c_coeff = std::max(c_coeff, d / ((as[i + 1] - as[i]) * (1.0 + std::abs(p))));
          if (model.eval(p, as[i + 1], gs[j]) < h - 1e-12) {
            r.monotone_coeff.fail({p, as[i], gs[j], model.eval(p, as[i + 1], gs[j]) - h});
          }
        }
        if (j + 1 < gs.size()) {
          const double d = std::abs(model.eval(p, as[i], gs[j + 1]) - h);
          c_coeff = std::max(c_coeff, d / ((gs[j + 1] - gs[j]) * (1.0 + std::abs(p))));
          if (model.eval(p, as[i], gs[j + 1]) < h - 1e-12) {
            r.monotone_coeff.fail({p, as[i], gs[j], model.eval(p, as[i], gs[j + 1]) - h});
          }
        }
      }
    }
  }
  r.lipschitz_coeff_constant = c_coeff;
  if (!std::isfinite(c_coeff)) r.lipschitz_coeff.fail({0.0, box.a_min, box.g_min, c_coeff});

  // Global Lipschitz in p. A bounded slope must saturate: the
  // divided difference on the outer half of the range may not keep growing
  // relative to the inner half.
  double c_inner = 0.0;
  double c_outer = 0.0;
  for (double a : as) {
    for (double g : gs) {
      double inner = 0.0;
      double outer = 0.0;
      double worst_p = 0.0;
      for (std::size_t k = 0; k + 1 < ps.size(); ++k) {
        const double slope =
            std::abs(model.eval(ps[k + 1], a, g) - model.eval(ps[k], a, g)) / (ps[k + 1] - ps[k]);
        if (0.5 * std::abs(ps[k] + ps[k + 1]) <= 0.5 * pmax) {
          inner = std::max(inner, slope);
        } else if (slope > outer) {
          outer = slope;
          worst_p = ps[k];
        }
      }
      if (!r.restricted_to_guard && outer > 1.5 * inner) r.lipschitz_p.fail({worst_p, a, g, outer});
      c_inner = std::max(c_inner, inner);
      c_outer = std::max(c_outer, outer);
    }
  }
  r.lipschitz_p_constant = std::max(c_inner, c_outer);

  // Peak curvature, evenness and unimodality.
  for (double a : as) {
    for (double g : gs) {
      const double h1 = 1e-4;
      const double slope0 = (model.eval(h1, a, g) - model.eval(-h1, a, g)) / (2.0 * h1);
      const double curv0 =
          (model.eval(h1, a, g) - 2.0 * model.eval(0.0, a, g) + model.eval(-h1, a, g)) / (h1 * h1);
      if (std::abs(slope0) > 1e-6) r.peak_curvature.fail({0.0, a, g, slope0});
      if (!(curv0 < 0.0)) r.peak_curvature.fail({0.0, a, g, curv0});
      double prev = model.eval(0.0, a, g);
      for (double p : ps) {
        if (p <= 0.0) continue;
        const double hp = model.eval(p, a, g);
        const double hm = model.eval(-p, a, g);
        if (std::abs(hp - hm) > 1e-12 * std::max(1.0, std::abs(hp))) {
          r.even_unimodal.fail({p, a, g, hp - hm});
        }
        if (!(hp < prev)) r.even_unimodal.fail({p, a, g, hp - prev});
        prev = hp;
      }
    }
  }

  // Growth: |H(p)|/p at the largest sampled p stays away from zero and does
  // not collapse between p_max/2 and p_max.
  double growth = std::numeric_limits<double>::infinity();
  for (double a : as) {
    for (double g : gs) {
      const double r_far = std::abs(model.eval(pmax, a, g)) / pmax;
      const double r_mid = std::abs(model.eval(0.5 * pmax, a, g)) / (0.5 * pmax);
      growth = std::min(growth, r_far);
      if (!(r_far > 1e-3) || r_far < 0.5 * r_mid) r.growth.fail({pmax, a, g, r_far});
    }
  }
  r.growth_constant = growth;

  // Curvature/slope bounds with P = p_max / 4.
  r.P = 0.25 * pmax;
  double c0 = std::numeric_limits<double>::infinity();
  double C0 = 0.0;
  for (double a : as) {
    for (double g : gs) {
      for (double p : ps) {
        const double v = std::abs(p) <= r.P ? std::abs(model.dpp(p, a, g)) : std::abs(model.dp(p, a, g));
        c0 = std::min(c0, v);
        C0 = std::max(C0, v);
      }
    }
  }
  r.c0 = c0;
  r.C0 = C0;
  return r;
}

}  // namespace hjft
