#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hjft/coeffs.hpp"

using namespace hjft;

TEST(Expression, Arithmetic) {
  EXPECT_DOUBLE_EQ(Expression::parse("1 + 2*3")(0.0), 7.0);
  EXPECT_DOUBLE_EQ(Expression::parse("(1 + 2)*3")(0.0), 9.0);
  EXPECT_DOUBLE_EQ(Expression::parse("2^3^2")(0.0), 512.0);
  EXPECT_DOUBLE_EQ(Expression::parse("-2^2")(0.0), -4.0);
  EXPECT_DOUBLE_EQ(Expression::parse("2^-1")(0.0), 0.5);
  EXPECT_DOUBLE_EQ(Expression::parse("8/4/2")(0.0), 1.0);
  EXPECT_DOUBLE_EQ(Expression::parse("1 - 2 - 3")(0.0), -4.0);
  EXPECT_DOUBLE_EQ(Expression::parse("1.5e1 + .5")(0.0), 15.5);
}

TEST(Expression, VariablesAndFunctions) {
  EXPECT_DOUBLE_EQ(Expression::parse("x")(0.3), 0.3);
  EXPECT_DOUBLE_EQ(Expression::parse("t*2")(0.3), 0.6);
  EXPECT_NEAR(Expression::parse("1 + 0.25*sin(x)")(1.0), 1.0 + 0.25 * std::sin(1.0), 1e-15);
  EXPECT_NEAR(Expression::parse("pi")(0.0), std::numbers::pi, 0.0);
  EXPECT_NEAR(Expression::parse("log(e)")(0.0), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(Expression::parse("min(x, 1)")(3.0), 1.0);
  EXPECT_DOUBLE_EQ(Expression::parse("max(x, 1)")(3.0), 3.0);
  EXPECT_DOUBLE_EQ(Expression::parse("step(x - 0.5)")(0.5), 1.0);
  EXPECT_DOUBLE_EQ(Expression::parse("step(x - 0.5)")(0.49), 0.0);
  EXPECT_DOUBLE_EQ(Expression::parse("sign(x)")(-2.0), -1.0);
  EXPECT_DOUBLE_EQ(Expression::parse("abs(x) + sqrt(4) + tanh(0) + atan(0) + cos(0) + tan(0) + exp(0)")(-1.0), 5.0);
}

TEST(Expression, Errors) {
  for (const char* bad : {"", "1 +", "(1", "foo", "sin(1, 2)", "min(1)", "bar(2)", "1 2", "3 $ 4", "x)"}) {
    EXPECT_THROW(Expression::parse(bad), SpecError) << bad;
  }
  EXPECT_THROW(Expression::parse("log(x)")(0.0), SpecError);
  EXPECT_THROW(Expression::parse("1/x")(0.0), SpecError);
}

TEST(Coeffs, PiecewiseConstantBasics) {
  const PiecewiseConstantFn f(0.0, 1.0, {0.25, 0.5}, {1.0, 3.0, 2.0});
  EXPECT_EQ(f(0.1), 1.0);
  EXPECT_EQ(f(0.25), 3.0);
  EXPECT_EQ(f.left_limit(0.25), 1.0);
  EXPECT_EQ(f(0.9), 2.0);
  EXPECT_DOUBLE_EQ(f.variation(), 3.0);
  EXPECT_DOUBLE_EQ(f.variation_on(0.3, 1.0), 1.0);
  const auto c = PiecewiseConstantFn::constant(0.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(f.l1_distance(c), 0.25 * 2.0 + 0.5 * 1.0);
  EXPECT_THROW(PiecewiseConstantFn(0.0, 1.0, {0.5, 0.5}, {1.0, 2.0, 3.0}), InputError);
  EXPECT_THROW(PiecewiseConstantFn(0.0, 1.0, {0.5}, {1.0}), InputError);
}

TEST(Coeffs, ConstantHasNoVariation) {
  for (double h : {0.3, 0.01}) {
    const auto f = discretize(CoefficientPiece::constant(1.0), 0.0, 3.0, h);
    EXPECT_TRUE(f.breaks().empty());
    ASSERT_EQ(f.values().size(), 1u);
    EXPECT_EQ(f.values()[0], 1.0);
    EXPECT_EQ(f.variation(), 0.0);
  }
}

TEST(Coeffs, StepCapturedExactly) {
  const CoefficientPiece g{{0.5}, {Expression::parse("1"), Expression::parse("2")}};
  const auto f = discretize(g, 0.0, 1.0, 0.3);
  ASSERT_EQ(f.breaks().size(), 1u);
  EXPECT_EQ(f.breaks()[0], 0.5);
  EXPECT_EQ(f.values().front(), 1.0);
  EXPECT_EQ(f.values().back(), 2.0);
  EXPECT_DOUBLE_EQ(f.variation(), 1.0);
  EXPECT_EQ(f.left_limit(0.5), 1.0);
  EXPECT_EQ(f(0.5), 2.0);
}

TEST(Coeffs, SmoothL1HalvesWithMesh) {
  const auto a = CoefficientPiece::smooth("1 + 0.25*sin(x)");
  const double two_pi = 2.0 * std::numbers::pi;
  double prev = 0.0;
  for (double h : {0.2, 0.1, 0.05, 0.025}) {
    const auto ah = discretize(a, 0.0, two_pi, h);
    const auto a2 = discretize(a, 0.0, two_pi, h / 2.0);
    const double d = ah.l1_distance(a2);
    if (prev > 0.0) EXPECT_NEAR(prev / d, 2.0, 0.2);
    prev = d;
    // Independent quadrature of the error against the expression.
    EXPECT_LE(l1_error(a, ah), variation_estimate(a, 0.0, two_pi) * h);
    EXPECT_LE(ah.variation(), variation_estimate(a, 0.0, two_pi) + 1e-12);
  }
}

TEST(Coeffs, RandomPiecesRespectBvAndL1) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const double j1 = 0.2 + 0.2 * ud(rng);
    const double j2 = 0.6 + 0.2 * ud(rng);
    std::ostringstream e1, e2, e3;
    e1 << 1.0 + ud(rng) << " + " << 0.3 * ud(rng) << "*sin(" << 1.0 + 10.0 * ud(rng) << "*x)";
    e2 << 1.5 + 0.2 * ud(rng) << " + " << 0.2 * ud(rng) << "*cos(" << 1.0 + 5.0 * ud(rng) << "*x)";
    e3 << 1.2 << " - " << 0.1 * ud(rng) << "*x^2";
    const CoefficientPiece f{{j1, j2}, {Expression::parse(e1.str()), Expression::parse(e2.str()),
                                        Expression::parse(e3.str())}};
    const double h = 0.005 + 0.05 * ud(rng);
    const auto fh = discretize(f, 0.0, 1.0, h);
    const double tv = variation_estimate(f, 0.0, 1.0, 20000.0);
    EXPECT_LE(fh.variation(), tv + 1e-9);
    EXPECT_LE(l1_error(f, fh), tv * h + 1e-12);
    // Declared jumps appear as breakpoints, values on either side are
    // samples of the owning piece.
    for (double j : {j1, j2}) {
      const auto& b = fh.breaks();
      EXPECT_NE(std::find(b.begin(), b.end(), j), b.end());
    }
    EXPECT_NEAR(fh.left_limit(j1), f.pieces[0](j1), tv * h);
    EXPECT_NEAR(fh(j1), f.pieces[1](j1), tv * h);
  }
}

TEST(Coeffs, JumpValidation) {
  const CoefficientPiece bad{{1.5}, {Expression::parse("1"), Expression::parse("2")}};
  EXPECT_THROW(discretize(bad, 0.0, 1.0, 0.1), SpecError);
  const CoefficientPiece count{{0.5}, {Expression::parse("1")}};
  EXPECT_THROW(discretize(count, 0.0, 1.0, 0.1), SpecError);
  EXPECT_THROW(discretize(CoefficientPiece::constant(1.0), 0.0, 1.0, 0.0), InputError);
}

TEST(Coeffs, SlopeFromPotentialInterpolatesNodes) {
  const CoefficientPiece u0{{0.3}, {Expression::parse("x^2"), Expression::parse("0.09 + 2*(x - 0.3)")}};
  const double h = 0.07;
  const auto p0 = slope_from_potential(u0, -1.0, 1.0, h);
  // Integrate the slope from -1 and compare with u0 at nodes.
  double u = u0(-1.0);
  double s = -1.0;
  std::vector<double> pts = p0.breaks();
  pts.push_back(1.0);
  for (double b : pts) {
    u += p0(0.5 * (s + b)) * (b - s);
    s = b;
    EXPECT_NEAR(u, u0(s), 1e-12);
  }
  EXPECT_NEAR(p0(0.5), 2.0, 1e-12);
  EXPECT_NEAR(p0(-0.99), -2.0 + 0.07, 1e-9);
}
