#include <gtest/gtest.h>

#include <cmath>

#include "sparsenet/activation.hpp"

using namespace sparsenet;

TEST(Activation, ReluIsExactMax) {
  const auto r = Activation::relu();
  EXPECT_EQ(r(-2.5), 0.0);
  EXPECT_EQ(r(0.0), 0.0);
  EXPECT_EQ(r(3.25), 3.25);
  EXPECT_EQ(r.derivative(0.0), 0.0);
  EXPECT_EQ(r.derivative(1e-9), 1.0);
  EXPECT_TRUE(r.has_exact_identity_pair());
}

TEST(Activation, ReluIdentityPair) {
  const auto r = Activation::relu();
  for (double x : {-7.0, -1e-3, 0.0, 0.5, 123.0}) EXPECT_EQ(r(x) - r(-x), x);
}

TEST(Activation, SmoothReluMatchesOutsideKnee) {
  for (double k : {0.25, 1.0, 3.0}) {
    const auto s = Activation::smooth_relu(k);
    EXPECT_EQ(s(-1.0), 0.0);
    EXPECT_EQ(s(0.0), 0.0);
    EXPECT_EQ(s(k), k);
    EXPECT_EQ(s(k + 2.0), k + 2.0);
  }
}

TEST(Activation, SmoothReluIsC1AndMonotone) {
  const double k = 1.5;
  const auto s = Activation::smooth_relu(k);
  // Derivative continuity at both splice points.
  EXPECT_NEAR(s.derivative(1e-12), 0.0, 1e-9);
  EXPECT_NEAR(s.derivative(k - 1e-12), 1.0, 1e-9);
  double prev = s(0.0);
  for (int i = 1; i <= 1000; ++i) {
    const double x = k * i / 1000.0;
    const double v = s(x);
    EXPECT_GE(v, prev);
    prev = v;
  }
  // Value continuity at the splice points.
  EXPECT_NEAR(s(k * (1 - 1e-12)), k, 1e-9);
}

TEST(Activation, SmoothReluDerivativeMatchesFiniteDifference) {
  const auto s = Activation::smooth_relu(2.0);
  for (double x : {-0.5, 0.3, 1.0, 1.7, 2.5}) {
    const double h = 1e-6;
    EXPECT_NEAR(s.derivative(x), (s(x + h) - s(x - h)) / (2 * h), 1e-6);
  }
}

TEST(Activation, SigmoidalGrowthBound) {
  const auto sg = Activation::sigmoidal(3, 0.7);
  double worst = 0.0;
  for (int i = -2000; i <= 2000; ++i) {
    const double x = i / 20.0;
    worst = std::max(worst, std::abs(sg(x)) / std::pow(1.0 + std::abs(x), 3));
  }
  EXPECT_LE(worst, 1.0);
  EXPECT_NEAR(sg(60.0) / std::pow(60.0, 3), 1.0, 1e-12);
  EXPECT_LT(std::abs(sg(-60.0)), 1e-10);
  EXPECT_FALSE(sg.has_exact_identity_pair());
  EXPECT_FALSE(sg.vanishes_on_negatives());
}

TEST(Activation, SigmoidalDerivativeMatchesFiniteDifference) {
  const auto sg = Activation::sigmoidal(2, 1.3);
  for (double x : {-3.0, -0.2, 0.4, 2.0, 5.0}) {
    const double h = 1e-6;
    EXPECT_NEAR(sg.derivative(x), (sg(x + h) - sg(x - h)) / (2 * h), 1e-5);
  }
}

TEST(Activation, RejectsBadParameters) {
  EXPECT_THROW(Activation::smooth_relu(0.0), ValidationError);
  EXPECT_THROW(Activation::sigmoidal(1), ValidationError);
  EXPECT_THROW(Activation::sigmoidal(2, -1.0), ValidationError);
  EXPECT_THROW(parse_activation("tanh"), ValidationError);
}

TEST(Activation, ParseRoundTrip) {
  EXPECT_EQ(parse_activation("relu"), Activation::relu());
  EXPECT_EQ(parse_activation("smooth_relu", 0.5), Activation::smooth_relu(0.5));
  EXPECT_EQ(parse_activation("sigmoidal", 4, 2.0), Activation::sigmoidal(4, 2.0));
}
