#include "slope.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace pshsym;

TEST(WeightedLineFit, ExactLine) {
  const std::vector<double> t = {-4, -3, -2, -1};
  std::vector<double> y, w;
  for (double x : t) {
    y.push_back(2.5 * x - 1.0);
    w.push_back(std::fabs(x));
  }
  const auto f = weighted_line_fit(t, y, w);
  EXPECT_NEAR(f.slope, 2.5, 1e-14);
  EXPECT_NEAR(f.intercept, -1.0, 1e-13);
  EXPECT_NEAR(f.std_error, 0.0, 1e-12);
}

TEST(WeightedLineFit, WeightsPullTowardHeavyPoints) {
  const std::vector<double> t = {0, 1, 2};
  const std::vector<double> y = {0, 1, 3};
  const std::vector<double> flat = {1, 1, 1};
  const std::vector<double> heavy = {1, 1, 100};
  EXPECT_GT(weighted_line_fit(t, y, heavy).slope, weighted_line_fit(t, y, flat).slope);
}

TEST(SlopeWindow, EndpointsAndOrder) {
  const auto w = slope_window(-300, 64);
  ASSERT_EQ(w.size(), 64u);
  EXPECT_DOUBLE_EQ(w.front(), -300);
  EXPECT_NEAR(w.back(), -100, 1e-12);
  for (std::size_t i = 1; i < w.size(); ++i) EXPECT_GT(w[i], w[i - 1]);
}

TEST(FitAsymptoticSlope, LinearProfile) {
  const auto t = slope_window(-1000, 64);
  std::vector<double> y;
  for (double x : t) y.push_back(0.8 * x + 3.0);
  const auto s = fit_asymptotic_slope(t, y, SlopeMethod::ProfileDerivative, 0.01);
  EXPECT_NEAR(s.slope, 0.8, 1e-12);
  EXPECT_NEAR(s.refit_slope, 0.8, 1e-12);
  EXPECT_FALSE(s.unstable);
  EXPECT_EQ(s.points_used, 64);
  EXPECT_DOUBLE_EQ(s.t_lo, -1000);
  EXPECT_NEAR(s.t_hi, -1000.0 / 3, 1e-9);
}

TEST(FitAsymptoticSlope, DriftingSlopeIsUnstable) {
  const auto t = slope_window(-100, 64);
  std::vector<double> y;
  // local slope 1 + 20 / |t| still moving across the window
  for (double x : t) y.push_back(x - 20.0 * std::log(-x));
  const auto s = fit_asymptotic_slope(t, y, SlopeMethod::ProfileDerivative, 0.01);
  EXPECT_TRUE(s.unstable);
}

TEST(FitAsymptoticSlope, SlowCorrectionIsStable) {
  const auto t = slope_window(-10000, 64);
  std::vector<double> y;
  for (double x : t) y.push_back(x + std::log1p(std::exp(x)));
  EXPECT_FALSE(fit_asymptotic_slope(t, y, SlopeMethod::ProfileDerivative, 0.01).unstable);
}

TEST(FitAsymptoticSlope, ClampsSmallNegative) {
  const auto t = slope_window(-100, 16);
  std::vector<double> y;
  for (double x : t) y.push_back(-1e-9 * x);
  const auto s = fit_asymptotic_slope(t, y, SlopeMethod::MaxOnSpheres, 0.01);
  EXPECT_EQ(s.slope, 0.0);
  const auto raw = fit_asymptotic_slope(t, y, SlopeMethod::MaxOnSpheres, 0.01, false);
  EXPECT_LT(raw.slope, 0.0);
}

TEST(FitAsymptoticSlope, JsonFields) {
  const auto t = slope_window(-100, 16);
  std::vector<double> y(t.begin(), t.end());
  const auto j = to_json(fit_asymptotic_slope(t, y, SlopeMethod::VolumeLogRatio, 0.01));
  for (const char* k : {"slope", "stderr", "window", "points_used", "method", "unstable"}) EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["method"], "VOLUME_LOG_RATIO");
}
