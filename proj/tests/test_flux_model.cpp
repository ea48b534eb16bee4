#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hjft/flux_model.hpp"

using namespace hjft;

namespace {

HamiltonianModel eikonal() { return HamiltonianModel::offset_eikonal({1.0, 2.0, 1.0, 2.0}); }

}  // namespace

TEST(FluxModel, EvalOffsetEikonal) {
  const auto m = eikonal();
  EXPECT_DOUBLE_EQ(m.eval(0.0, 1.0, 1.0), 1.0);
  EXPECT_NEAR(m.eval(1.0, 1.0, 1.0), 0.5857864376269049, 1e-15);
  EXPECT_EQ(m.eval(-1.0, 1.0, 1.0), m.eval(1.0, 1.0, 1.0));
}

TEST(FluxModel, EvalErrors) {
  const auto m = eikonal();
  EXPECT_THROW(m.eval(0.0, 0.5, 1.0), DomainError);
  EXPECT_THROW(m.eval(0.0, 1.0, 2.5), DomainError);
  EXPECT_THROW(m.eval(NAN, 1.0, 1.0), InputError);
  EXPECT_THROW(m.eval(INFINITY, 1.0, 1.0), InputError);
}

TEST(FluxModel, InverseExamples) {
  const auto m = eikonal();
  EXPECT_EQ(m.inverse(1.0, 1.0, 1.0, Branch::plus), 0.0);
  const double h = 2.0 - std::sqrt(2.0);
  EXPECT_NEAR(m.inverse(h, 1.0, 1.0, Branch::plus), 1.0, 1e-12);
  EXPECT_NEAR(m.inverse(h, 1.0, 1.0, Branch::minus), -1.0, 1e-12);
  EXPECT_THROW(m.inverse(1.5, 1.0, 1.0, Branch::plus), NoPreimageError);
}

TEST(FluxModel, InverseGuardRange) {
  const auto q = HamiltonianModel::quadratic_cap({1.0, 2.0, 1.0, 2.0}, 3.0);
  EXPECT_NEAR(q.inverse(1.0 - 4.0, 1.0, 1.0, Branch::plus), 2.0, 1e-14);
  EXPECT_THROW(q.inverse(1.0 - 10.0, 1.0, 1.0, Branch::plus), RangeError);
  const auto c = HamiltonianModel::custom(
      "bounded", [](double p, double a, double g) { return a + g - std::sqrt(1.0 + p * p); },
      {1.0, 2.0, 1.0, 2.0}, 5.0);
  EXPECT_NEAR(c.inverse(2.0 - std::sqrt(2.0), 1.0, 1.0, Branch::plus), 1.0, 1e-11);
  EXPECT_THROW(c.inverse(-10.0, 1.0, 1.0, Branch::plus), RangeError);
}

TEST(FluxModel, CustomDerivativesMatchClosedForm) {
  const auto m = eikonal();
  const auto c = HamiltonianModel::custom(
      "copy", [](double p, double a, double g) { return a + g - std::sqrt(1.0 + p * p); }, m.box());
  for (double p : {-3.0, -0.4, 0.0, 0.7, 2.0}) {
    EXPECT_NEAR(c.dp(p, 1.3, 1.7), m.dp(p, 1.3, 1.7), 1e-8);
    EXPECT_NEAR(c.dpp(p, 1.3, 1.7), m.dpp(p, 1.3, 1.7), 1e-5);
  }
}

TEST(FluxModel, PropertiesOnRandomSamples) {
  const auto m = eikonal();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pd(-20.0, 20.0);
  std::uniform_real_distribution<double> ad(1.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const double p = pd(rng);
    const double a = ad(rng);
    const double g = ad(rng);
    EXPECT_LE(std::abs(m.eval(p, a, g) - m.eval(-p, a, g)), 1e-12);
    const double ap = std::abs(p);
    EXPECT_LE(std::abs(m.inverse(m.eval(ap, a, g), a, g, Branch::plus) - ap), 1e-9);
    const double q = ap + std::abs(pd(rng)) * 0.1;
    EXPECT_LE(m.eval(q, a, g), m.eval(ap, a, g));
    if (q - ap >= 1e-6) {
      EXPECT_LT(m.eval(q, a, g), m.eval(ap, a, g));
    }
    const double a2 = std::min(2.0, a + 0.1);
    const double g2 = std::min(2.0, g + 0.1);
    EXPECT_LE(m.eval(p, a, g), m.eval(p, a2, g));
    EXPECT_LE(m.eval(p, a, g), m.eval(p, a, g2));
  }
}

TEST(FluxModel, ValidateOffsetEikonalPasses) {
  const auto r = validate(eikonal(), 5, 10.0);
  for (const auto* c : r.checks()) {
    EXPECT_TRUE(c->pass) << c->name;
    EXPECT_TRUE(c->witnesses.empty()) << c->name;
  }
  EXPECT_LE(r.lipschitz_p_constant, 1.0 + 1e-12);
  EXPECT_GT(r.growth_constant, 0.0);
  EXPECT_GT(r.c0, 0.0);
  EXPECT_GE(r.C0, r.c0);
}

TEST(FluxModel, ValidateUnboundedQuadraticFailsLipschitz) {
  const auto c = HamiltonianModel::custom(
      "quadratic", [](double p, double a, double g) { return a + g - p * p; }, {1.0, 2.0, 1.0, 2.0});
  const auto r = validate(c, 4, 10.0);
  EXPECT_FALSE(r.lipschitz_p.pass);
  EXPECT_FALSE(r.lipschitz_p.witnesses.empty());
  EXPECT_FALSE(r.all_pass());
}

TEST(FluxModel, ValidateGuardedQuadraticReportsRestriction) {
  const auto q = HamiltonianModel::quadratic_cap({1.0, 2.0, 1.0, 2.0}, 2.0);
  const auto r = validate(q, 4, 10.0);
  EXPECT_TRUE(r.restricted_to_guard);
  EXPECT_DOUBLE_EQ(r.p_max, 2.0);
  EXPECT_TRUE(r.lipschitz_p.pass);
  EXPECT_TRUE(r.peak_curvature.pass);
}

TEST(FluxModel, ValidateNegativePeakFails) {
  const auto c = HamiltonianModel::custom(
      "neg", [](double p, double a, double g) { return -a + g - std::sqrt(1.0 + p * p); },
      {1.0, 2.0, 1.0, 1.0});
  const auto r = validate(c, 3, 10.0);
  EXPECT_FALSE(r.peak_nonzero.pass);
  ASSERT_FALSE(r.peak_nonzero.witnesses.empty());
}

TEST(FluxModel, ValidateRejectsTooFewSamples) {
  EXPECT_THROW(validate(eikonal(), 1), InputError);
}
