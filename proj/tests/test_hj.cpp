#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hjft/hj.hpp"
#include "hjft/scenarios.hpp"

using namespace hjft;

namespace {

const HamiltonianModel kEik = HamiltonianModel::offset_eikonal({1.0, 2.0, 0.5, 2.0});

// Points in [lo, hi] at least gap away from every front at time t.
std::vector<double> away_from_fronts(const Profile& pr, double lo, double hi, int n, double gap) {
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * (i + 0.37) / n;
    bool ok = true;
    for (double f : pr.x) ok = ok && std::abs(x - f) >= gap;
    if (ok) xs.push_back(x);
  }
  return xs;
}

}  // namespace

TEST(RiemannHJ, ConstantStateIsAffine) {
  const double u0 = 0.7;
  for (double x : {-0.8, 0.0, 0.3}) {
    const auto v = riemann_hj(kEik, 1.2, 1.2, 0.3, 0.3, 1.0, u0, x, 0.9);
    const double h = kEik.eval(0.3, 1.2, 1.0);
    EXPECT_NEAR(v.pointwise, u0 + x * 0.3 - 0.9 * h, 1e-12);
    EXPECT_NEAR(v.integral, v.pointwise, 1e-12);
  }
}

TEST(RiemannHJ, InterfaceExample) {
  const double u0 = 0.25;
  const auto v = riemann_hj(kEik, 1.0, 1.5, 0.0, 0.0, 1.0, u0, 0.2, 1.0);
  EXPECT_NEAR(v.p, -std::sqrt(1.25), 1e-12);
  EXPECT_NEAR(v.pointwise, u0 - 0.2 * std::sqrt(1.25) - 1.0, 1e-12);
  EXPECT_NEAR(v.pointwise - u0, -1.2236067977, 1e-9);
  EXPECT_NEAR(v.integral, v.pointwise, 1e-10);
}

TEST(RiemannHJ, ContinuousAcrossShock) {
  const double s = 1.0 / std::sqrt(5.0);
  for (double t : {0.5, 1.0, 2.0}) {
    const auto v = riemann_hj(kEik, 1.0, 1.5, 0.0, 0.0, 1.0, 0.0, s * t, t);
    EXPECT_NE(v.left, 0.0);
    EXPECT_NEAR(v.left, v.right, 1e-10);
  }
  // Across the stationary interface as well.
  const auto w = riemann_hj(kEik, 1.0, 1.5, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0);
  EXPECT_NEAR(w.left, w.right, 1e-10);
}

TEST(RiemannHJ, PointwiseMatchesIntegralOnRandomData) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pv(-1.0, 1.0);
  std::uniform_real_distribution<double> av(1.0, 2.0);
  std::uniform_real_distribution<double> xv(-1.5, 1.5);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double al = av(rng), ar = av(rng), pl = pv(rng), pr = pv(rng);
    for (int j = 0; j < 10; ++j) {
      const auto v = riemann_hj(kEik, al, ar, pl, pr, 1.0, 0.1, xv(rng), 1.0, 0.1);
      worst = std::max(worst, std::abs(v.pointwise - v.integral));
      worst = std::max(worst, std::abs(v.left - v.right));
    }
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(RiemannHJ, RejectsNonPositiveTime) {
  EXPECT_THROW(riemann_hj(kEik, 1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.1, 0.0), InputError);
}

TEST(Reconstruct, ConstantData) {
  const auto log = track(make_problem(constant_scenario(), 0.1));
  const HJSolution u(log, 0.0, 0.4);
  const double h = kEik.eval(0.3, 1.2, 1.0);
  for (double t : {0.0, 0.3, 1.0}) {
    for (double x : {-0.9, 0.0, 0.55}) EXPECT_NEAR(u(x, t), 0.4 + 0.3 * x - t * h, 1e-12);
  }
  EXPECT_LE(gradient_check(u, 0.5, {-0.5, 0.1, 0.7}), 1e-10);
}

TEST(Reconstruct, InterfaceExample) {
  const auto log = track(make_problem(interface_scenario(), 0.05));
  EXPECT_NEAR(reconstruct(log, 0.0, 0.2, 1.0), -1.2236067977, 1e-9);
  const HJSolution u(log, 0.0, 0.0);
  EXPECT_LE(gradient_check(u, 1.0, {-0.5, 0.2, 1.0}), 1e-8);
  // Matches the closed form everywhere in the window.
  for (double x : {-0.9, -0.1, 0.1, 0.44, 0.46, 1.9}) {
    const auto v = riemann_hj(kEik, 1.0, 1.5, 0.0, 0.0, 1.0, 0.0, x, 1.0);
    EXPECT_NEAR(u(x, 1.0), v.pointwise, 1e-10);
  }
}

TEST(Reconstruct, ReferencePointDoesNotMatter) {
  const auto sc = two_sided_scenario();
  const auto log = track(make_problem(sc, 0.05));
  const HJSolution u(log, sc.x_lo, sc.u0_at(sc.x_lo));
  // Moving the reference: u(x,t) - u(y,t) is the profile integral.
  const auto pr = log.profile(0.8);
  for (double y : {-1.5, 0.7}) {
    for (double x : {-1.0, 0.3, 1.6}) {
      EXPECT_NEAR(u(x, 0.8) - u(y, 0.8), pr.integral(y, x), 1e-12);
    }
  }
  // Initial values interpolate the potential at mesh nodes.
  for (int i = 0; i <= 80; i += 7) {
    const double x = sc.x_lo + 0.05 * i;
    EXPECT_NEAR(u(x, 0.0), sc.u0_at(x), 1e-12);
  }
}

TEST(Reconstruct, PiecewiseLinearInX) {
  const auto sc = random_scenario(5);
  const auto log = track(make_problem(sc, 0.05));
  const HJSolution u(log, 0.0, 0.0);
  const auto pr = log.profile(0.6);
  for (std::size_t i = 0; i + 1 < pr.x.size(); ++i) {
    const double a = pr.x[i], b = pr.x[i + 1];
    if (b - a < 1e-6) continue;
    const double m = 0.5 * (a + b), d = 0.25 * (b - a);
    EXPECT_NEAR(u.eval(pr, m - d, 0.6) - 2.0 * u.eval(pr, m, 0.6) + u.eval(pr, m + d, 0.6), 0.0, 1e-12);
  }
}

TEST(Reconstruct, RandomRunsStructuralChecks) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const auto sc = random_scenario(seed);
    const auto log = track(make_problem(sc, 0.05));
    const HJSolution u(log, 0.0, 0.0);
    EXPECT_LE(trajectory_check(u), 1e-9) << "seed " << seed;
    for (double t : {0.0, 0.35, 0.77, 1.0}) {
      EXPECT_LE(continuity_check(u, t), 1e-9) << "seed " << seed;
      const auto xs = away_from_fronts(log.profile(t), -1.9, 1.9, 200, 1e-6);
      EXPECT_LE(gradient_check(u, t, xs), 1e-6) << "seed " << seed;
    }
  }
}

TEST(Reconstruct, ContinuousInTime) {
  const auto sc = random_scenario(9);
  const auto log = track(make_problem(sc, 0.05));
  const HJSolution u(log, 0.0, 0.0);
  // |u_t| <= sup |H| on the cap, so small time steps give small changes.
  for (double t = 0.0; t < 0.99; t += 0.0625) {
    for (double x : {-1.0, 0.0, 1.0}) EXPECT_LE(std::abs(u(x, t + 1e-6) - u(x, t)), 1e-5);
  }
}
