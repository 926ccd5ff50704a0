#include "volume_engine.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "catalog.hpp"

using namespace pshsym;

namespace {

constexpr double kPi = std::numbers::pi;

// |{log|z1| < log R}| in the unit ball of C^2
double ex41_volume(double R) { return kPi * kPi * (R * R - std::pow(R, 4) / 2); }

// composite Simpson on [a, b]
template <class F>
double simpson(F f, double a, double b, int m = 2000) {
  const double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4 : 2) * f(a + i * h);
  return s * h / 3;
}

}  // namespace

TEST(BallCoefficient, LowDimensions) {
  EXPECT_NEAR(ball_coefficient(2), kPi, 1e-12);
  EXPECT_NEAR(ball_coefficient(4), kPi * kPi / 2, 1e-12);
  EXPECT_NEAR(ball_coefficient(1), 2.0, 1e-12);
  EXPECT_NEAR(std::exp(log_ball_coefficient(6)), kPi * kPi * kPi / 6, 1e-12);
}

TEST(SublevelVolume, Ex41ClosedForm) {
  RunConfig c;
  const auto v = sublevel_volume(catalog_entry("ex-4.1").spec, std::log(0.5), c);
  EXPECT_EQ(v.method, VolumeMethod::ToricQuadrature);
  EXPECT_NEAR(v.value, kPi * kPi * 0.21875, 1e-6 * v.value);
  EXPECT_NEAR(v.value, 2.15898, 1e-5);
}

TEST(SublevelVolume, LogNormBall) {
  RunConfig c;
  const auto v = sublevel_volume(catalog_entry("log-norm-n2").spec, std::log(0.5), c);
  EXPECT_EQ(v.method, VolumeMethod::RadialExact);
  EXPECT_NEAR(v.value, (kPi * kPi / 2) / 16, 1e-12);
  EXPECT_NEAR(v.value, 0.30843, 1e-5);
}

TEST(SublevelVolume, Ex42AgainstOneDimensionalIntegral) {
  RunConfig c;
  const double R = 0.3;
  const auto v = sublevel_volume(catalog_entry("ex-4.2").spec, 2 * std::log(R), c);
  // {r2 < (R^2 - r1^2)^2}: 4 pi^2 int r1 (R^2 - r1^2)^4 / 2 dr1
  const double oracle = 2 * kPi * kPi * simpson([&](double r) { return std::pow(R * R - r * r, 4) * r; }, 0.0, R);
  EXPECT_NEAR(oracle, kPi * kPi * std::pow(R, 10) / 5, 1e-12);
  EXPECT_NEAR(v.value, oracle, 1e-5 * oracle);
  EXPECT_NEAR(v.value, 1.1655e-5, 1e-8);
}

TEST(SublevelVolume, RadialExactness) {
  RunConfig c;
  for (int n = 1; n <= 3; ++n) {
    const auto s = catalog_entry("log-norm-n" + std::to_string(n)).spec;
    for (double t = -10; t <= -1; t += 0.75) {
      const double want = ball_coefficient(2 * n) * std::exp(2 * n * t);
      EXPECT_NEAR(sublevel_volume(s, t, c).value, want, 1e-10 * want) << n << " " << t;
    }
  }
}

TEST(SublevelVolume, FullMeasureCap) {
  RunConfig c;
  for (const auto& e : builtin_catalog()) {
    if (e.name == "ex-4.3") continue;  // only its polar hyperplane matters; checked separately below
    const auto s = e.spec.normalized();
    const auto v = sublevel_volume(s, 0.5, c);
    EXPECT_NEAR(v.value, domain_volume(s), 1e-6 * domain_volume(s) + v.abs_error) << e.name;
  }
  const auto s = catalog_entry("ex-4.3").spec.normalized();
  const auto v = sublevel_volume(s, 0.5, c);
  EXPECT_NEAR(v.value, ball_coefficient(4) * std::pow(0.5, 4), 1e-5 + v.abs_error);
}

TEST(SublevelVolume, DeepLevelsInLogDomain) {
  RunConfig c;
  const auto v = sublevel_volume(catalog_entry("ex-4.1").spec, -500, c);
  // pi^2 (e^{2t} - e^{4t}/2) with t = -500
  EXPECT_NEAR(v.log_value, -1000 + 2 * std::log(kPi), 1e-6);
  EXPECT_FALSE(v.empty);
}

TEST(SublevelVolume, Monotone) {
  RunConfig c;
  for (const char* name : {"ex-4.1", "ex-4.2", "demailly-0.5", "ex-4.4"}) {
    const auto s = catalog_entry(name).spec;
    double prev = 0;
    for (double t = -12; t <= 0; t += 0.5) {
      const auto v = sublevel_volume(s, t, c);
      EXPECT_GE(v.value + v.abs_error, prev) << name << " " << t;
      prev = v.value - v.abs_error;
    }
  }
}

TEST(VolumeProfile, Ex41TwoLevels) {
  RunConfig c;
  const double grid[] = {std::log(0.5), std::log(0.25)};
  const auto p = volume_profile(catalog_entry("ex-4.1").spec, grid, c);
  ASSERT_EQ(p.points.size(), 2u);
  EXPECT_NEAR(p.points[0].estimate.value, ex41_volume(0.5), 1e-6 * ex41_volume(0.5));
  EXPECT_NEAR(p.points[1].estimate.value, ex41_volume(0.25), 1e-6 * ex41_volume(0.25));
}

TEST(VolumeProfile, EmptyGrid) {
  RunConfig c;
  const auto p = volume_profile(catalog_entry("ex-4.1").spec, std::span<const double>{}, c);
  EXPECT_TRUE(p.points.empty());
}

TEST(VolumeProfile, EnforceMonotoneRecordsAdjustment) {
  VolumeProfile p;
  for (double v : {1.0, 0.5, 0.6, 0.2}) {
    ProfilePoint q;
    q.estimate.value = v;
    q.estimate.log_value = std::log(v);
    p.points.push_back(q);
  }
  enforce_monotone(p);
  EXPECT_DOUBLE_EQ(p.points[2].estimate.value, 0.5);
  EXPECT_NEAR(p.max_adjustment, 0.1, 1e-15);
  EXPECT_EQ(p.adjusted_points, 1);
}

TEST(VolumeProfile, CsvFormat) {
  RunConfig c;
  const double grid[] = {std::log(0.5)};
  const auto csv = volume_profile_csv(volume_profile(catalog_entry("ex-4.1").spec, grid, c));
  EXPECT_EQ(csv.rfind("t,volume,abs_error,method,nodes", 0), 0u);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  EXPECT_NE(csv.find("-0.69314718055994529,"), std::string::npos);  // 17 significant digits
}

// quadrature against stratified Monte Carlo at 1e7 samples
TEST(MonteCarlo, Ex44AgreesWithQuadrature) {
  RunConfig c;
  c.mc_samples = 10000000;
  const auto s = catalog_entry("ex-4.4").spec;
  const double levels[] = {-4, -6, -8};
  const auto mc = monte_carlo_volumes(s, levels, c);
  for (int i = 0; i < 3; ++i) {
    const auto q = sublevel_volume(s, levels[i], c);
    EXPECT_EQ(mc[i].method, VolumeMethod::MonteCarlo);
    EXPECT_NEAR(q.value, mc[i].value, mc[i].abs_error + q.abs_error) << levels[i];
  }
}

TEST(MonteCarlo, ToricMethodsAgreeOnTwentyPairs) {
  RunConfig c;
  c.mc_samples = 1000000;
  int pairs = 0;
  for (const char* name : {"ex-4.1", "ex-4.2", "demailly-0.5", "ex-4.4"}) {
    const auto s = catalog_entry(name).spec;
    const double levels[] = {-0.3, -1.0, -2.0, -3.5, -5.0};
    const auto mc = monte_carlo_volumes(s, levels, c);
    for (int i = 0; i < 5; ++i, ++pairs) {
      const auto q = sublevel_volume(s, levels[i], c);
      EXPECT_NEAR(q.value, mc[i].value, mc[i].abs_error + q.abs_error + c.quad_rel_tol * q.value)
          << name << " " << levels[i];
    }
  }
  EXPECT_EQ(pairs, 20);
}

TEST(MonteCarlo, IndependentOfWorkerCount) {
  RunConfig a;
  a.mc_samples = 200000;
  a.workers = 1;
  RunConfig b = a;
  b.workers = 3;
  const auto s = catalog_entry("ex-4.2").spec;
  const double levels[] = {-1.0, -2.0};
  const auto x = monte_carlo_volumes(s, levels, a);
  const auto y = monte_carlo_volumes(s, levels, b);
  for (int i = 0; i < 2; ++i) EXPECT_EQ(x[i].value, y[i].value);
  const auto xs = sublevel_volume(s, -3.0, a, VolumeMethod::MonteCarlo);
  const auto ys = sublevel_volume(s, -3.0, b, VolumeMethod::MonteCarlo);
  EXPECT_EQ(xs.value, ys.value);
}
