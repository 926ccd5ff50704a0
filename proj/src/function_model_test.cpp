#include "function_model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "catalog.hpp"
#include "error.hpp"

using namespace pshsym;

namespace {

struct Draw {
  explicit Draw(unsigned seed) : g(seed) {}
  double uniform() { return u(g); }
  double normal() { return n(g); }
  std::mt19937_64 g;
  std::uniform_real_distribution<double> u{0.0, 1.0};
  std::normal_distribution<double> n;
};

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Io;
}

// point of C^n with given moduli and phases, interleaved
std::vector<double> polar(std::vector<double> r, std::vector<double> th) {
  std::vector<double> z;
  for (std::size_t k = 0; k < r.size(); ++k) {
    z.push_back(r[k] * std::cos(th[k]));
    z.push_back(r[k] * std::sin(th[k]));
  }
  return z;
}

}  // namespace

TEST(ExtendedValue, NegInfinityOrdering) {
  const auto m = ExtendedValue::neg_infinity();
  EXPECT_TRUE(m < ExtendedValue(-1e300));
  EXPECT_TRUE((m + 5.0).is_neg_infinity());
  EXPECT_THROW(ExtendedValue(std::numeric_limits<double>::infinity()), Error);
  EXPECT_THROW(ExtendedValue(std::nan("")), Error);
}

TEST(Evaluate, Ex41) {
  const auto s = catalog_entry("ex-4.1").spec;
  const double z[] = {0.5, 0.0, 0.3, 0.0};
  EXPECT_NEAR(s.evaluate(z).value(), std::log(0.5), 1e-14);
  const double w[] = {0.0, 0.0, 0.3, 0.0};
  EXPECT_TRUE(s.evaluate(w).is_neg_infinity());
}

TEST(Evaluate, Ex42) {
  const auto s = catalog_entry("ex-4.2").spec;
  const double z[] = {0.1, 0.0, 0.2, 0.0};
  EXPECT_NEAR(s.evaluate(z).value(), std::log(0.01 + std::sqrt(0.2)), 1e-13);
  EXPECT_NEAR(s.evaluate(z).value(), -0.782605, 1e-6);
}

TEST(Evaluate, OutOfDomain) {
  const auto s = catalog_entry("ex-4.1").spec;
  const double z[] = {1.2, 0.0, 0.0, 0.0};
  EXPECT_EQ(code_of([&] { s.evaluate(z); }), ErrorCode::OutOfDomain);
  const double ok[] = {1.05, 0.0, 0.0, 0.0};  // inside the extension margin
  EXPECT_NO_THROW(s.evaluate(ok));
}

TEST(Evaluate, DeepCoordinatesAgreeWithFastPath) {
  const auto s = catalog_entry("ex-4.2").spec;
  const double z[] = {0.1, 0.05, 0.02, -0.01};
  std::vector<LogReal> deep;
  for (double v : z) deep.push_back(LogReal::from_double(v));
  EXPECT_NEAR(s.value_deep(deep), s.value(z), 1e-13);
  // |z| = e^{-2000}: far below double range
  const LogReal tiny = LogReal::from_log(-2000.0);
  std::vector<LogReal> far = {tiny, LogReal::zero(), tiny, LogReal::zero()};
  // log(e^{-4000} + e^{-1000}) = -1000 to double precision
  EXPECT_NEAR(s.value_deep(far), -1000.0, 1e-9);
}

TEST(Catalog, ShapesOfEntries) {
  const auto a = catalog_entry("ex-4.1").spec;
  EXPECT_EQ(a.dimension(), 2);
  EXPECT_EQ(a.symmetry(), Symmetry::Toric);
  const double x[] = {-0.7, -3.0};
  EXPECT_DOUBLE_EQ(a.toric(x), -0.7);

  const auto b = catalog_entry("log-norm").spec;
  EXPECT_EQ(b.dimension(), 2);
  EXPECT_EQ(b.symmetry(), Symmetry::Radial);
  EXPECT_NEAR(b.radial(-2.5), -2.5, 1e-14);
}

TEST(Catalog, Ex43LivesOnHalfBall) {
  EXPECT_DOUBLE_EQ(catalog_entry("ex-4.3").spec.domain_radius(), 0.5);
}

TEST(LoadSpec, DecreasingToricProfileRejected) {
  const char* doc = R"({"dimension": 2, "symmetry": "toric",
    "body": {"kind": "closed_form", "expr": ["*", -1, ["log", ["abs_coord", 1]]]}})";
  EXPECT_EQ(code_of([&] { load_spec_text(doc); }), ErrorCode::NotPshProfile);
}

TEST(LoadSpec, MalformedDocuments) {
  EXPECT_EQ(code_of([] { load_spec_text("{"); }), ErrorCode::SchemaError);
  EXPECT_EQ(code_of([] { load_spec_text(R"({"dimension": 2})"); }), ErrorCode::SchemaError);
  EXPECT_EQ(code_of([] {
              load_spec_text(R"({"dimension": 2, "symmetry": "toric", "colour": 1,
                "body": {"kind": "closed_form", "expr": ["log", ["abs_coord", 1]]}})");
            }),
            ErrorCode::SchemaError);
  EXPECT_EQ(code_of([] {
              load_spec_text(R"({"dimension": 2, "symmetry": "toric",
                "body": {"kind": "closed_form", "expr": ["log", ["abs_coord", 3]]}})");
            }),
            ErrorCode::SchemaError);
}

TEST(LoadSpec, WrongSymmetryDeclarationCaught) {
  // log|z1 + z2| is S1-invariant but not toric
  const char* doc = R"({"dimension": 2, "symmetry": "toric",
    "body": {"kind": "closed_form", "expr": ["log", ["+", ["re", 1], ["re", 2]]]}})";
  EXPECT_ANY_THROW(load_spec_text(doc));
}

TEST(LoadSpec, NotRadialCaught) {
  const char* doc = R"({"dimension": 2, "symmetry": "radial",
    "body": {"kind": "closed_form", "expr": ["log", ["abs_coord", 1]]}})";
  EXPECT_EQ(code_of([&] { load_spec_text(doc); }), ErrorCode::SymmetryViolation);
}

TEST(LoadSpec, TableProfile) {
  const char* doc = R"({"name": "tab", "dimension": 1, "symmetry": "radial",
    "body": {"kind": "table", "knots": [[-10, -20], [-1, -2], [0, 0]]}})";
  const auto s = load_spec_text(doc);
  EXPECT_NEAR(s.radial(-5.5), -11.0, 1e-12);
  EXPECT_NEAR(s.radial(-20.0), -40.0, 1e-12);  // linear extrapolation with the end slope

  const char* concave = R"({"dimension": 1, "symmetry": "radial",
    "body": {"kind": "table", "knots": [[-10, -20], [-1, -1.5], [0, 0]]}})";
  EXPECT_EQ(code_of([&] { load_spec_text(concave); }), ErrorCode::NotPshProfile);
}

TEST(LoadSpec, NormalizationShift) {
  const char* doc = R"({"dimension": 1, "symmetry": "radial",
    "body": {"kind": "closed_form", "expr": ["+", ["log", ["norm"]], ["const", 3]]}})";
  const auto s = load_spec_text(doc);
  EXPECT_NEAR(s.boundary_sup(), 3.0, 1e-12);
  const auto n = s.normalized();
  EXPECT_NEAR(n.boundary_sup(), 0.0, 1e-12);
  const double z[] = {0.25, 0.0};
  EXPECT_NEAR(n.evaluate(z).value(), std::log(0.25), 1e-12);
}

// per-coordinate phase rotation leaves every toric entry unchanged
TEST(Properties, ToricPhaseInvariance) {
  Draw rng(99);
  for (const auto& e : builtin_catalog()) {
    const auto& s = e.spec;
    const int n = s.dimension();
    for (int i = 0; i < 30; ++i) {
      std::vector<double> r(n), th(n), ph(n);
      for (int k = 0; k < n; ++k) {
        r[k] = rng.uniform() * s.domain_radius() / std::sqrt(double(n));
        th[k] = 2 * std::numbers::pi * rng.uniform();
        ph[k] = 2 * std::numbers::pi * rng.uniform();
      }
      const double a = s.value(polar(r, th));
      std::vector<double> th2(n);
      for (int k = 0; k < n; ++k) th2[k] = th[k] + ph[k];
      const double b = s.value(polar(r, th2));
      if (std::isinf(a)) {
        EXPECT_TRUE(std::isinf(b));
      } else {
        EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(a))) << e.name;
      }
    }
  }
}

TEST(Properties, RadialDependsOnlyOnNorm) {
  Draw rng(5);
  for (const char* name : {"log-norm-n1", "log-norm-n2", "log-norm-n3", "log-norm-n2-g2"}) {
    const auto s = catalog_entry(name).spec;
    const int n = s.dimension();
    for (int i = 0; i < 20; ++i) {
      std::vector<double> z(2 * n), w(2 * n);
      double nz = 0, nw = 0;
      for (int k = 0; k < 2 * n; ++k) {
        z[k] = rng.normal();
        w[k] = rng.normal();
        nz += z[k] * z[k];
        nw += w[k] * w[k];
      }
      const double rho = 0.9 * rng.uniform();
      for (int k = 0; k < 2 * n; ++k) {
        z[k] *= rho / std::sqrt(nz);
        w[k] *= rho / std::sqrt(nw);
      }
      EXPECT_NEAR(s.value(z), s.value(w), 1e-12) << name;
    }
  }
}

// u(s z) is nondecreasing in s on (0, 1] for entries with a polar set
TEST(Properties, MonotoneAlongRays) {
  Draw rng(11);
  for (const auto& e : builtin_catalog()) {
    if (e.spec.pole_structure() != PoleStructure::NontrivialPolarSet) continue;
    const int n = e.spec.dimension();
    for (int ray = 0; ray < 100; ++ray) {
      std::vector<double> z(2 * n);
      double nz = 0;
      for (auto& v : z) {
        v = rng.normal();
        nz += v * v;
      }
      for (auto& v : z) v *= e.spec.domain_radius() / std::sqrt(nz);
      double prev = -std::numeric_limits<double>::infinity();
      for (int i = 1; i <= 50; ++i) {
        std::vector<double> p(z);
        for (auto& v : p) v *= i / 50.0;
        const double u = e.spec.value(p);
        EXPECT_GE(u, prev - 1e-12) << e.name << " ray " << ray << " step " << i;
        prev = u;
      }
    }
  }
}
