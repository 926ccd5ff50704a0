// Cross-module properties over the catalog.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "catalog.hpp"
#include "invariants.hpp"
#include "rearrangement.hpp"

using namespace pshsym;

namespace {

std::vector<CatalogEntry> toric_entries() {
  std::vector<CatalogEntry> out;
  for (auto& e : builtin_catalog())
    if (e.spec.symmetry() != Symmetry::S1Invariant) out.push_back(std::move(e));
  return out;
}

std::vector<double> random_direction(std::mt19937_64& g, int n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> a(n);
  for (auto& x : a) x = u(g);
  return a;
}

}  // namespace

TEST(Homogeneity, ScalingByGamma) {
  RunConfig c;
  const double gamma = 2.0;
  for (const char* name : {"ex-4.2", "demailly-0.5"}) {
    const auto u = catalog_entry(name).spec;
    const auto v = u.transformed([gamma](double x) { return gamma * x; }, std::string(name) + "-x2");
    const int n = u.dimension();

    EXPECT_NEAR(lelong_origin(v, c).slope, gamma * lelong_origin(u, c).slope, 1e-6) << name;
    const double a[] = {0.3, 0.7};
    EXPECT_NEAR(refined_lelong(v, a, c).slope, gamma * refined_lelong(u, a, c).slope, 1e-6) << name;
    EXPECT_NEAR(integrability_index_volume(v, c).slope, gamma * integrability_index_volume(u, c).slope, 0.02) << name;

    const auto ku = integrability_index_kiselman(u, c);
    const auto kv = integrability_index_kiselman(v, c);
    EXPECT_NEAR(kv.value, gamma * ku.value, 1e-6) << name;
    for (int k = 0; k < n; ++k) EXPECT_NEAR(kv.a[k], ku.a[k], 1e-9) << name;

    const double tu = std::pow(lelong_symmetrized(schwarz_symmetrize(u, c), c).slope, n);
    const double tv = std::pow(lelong_symmetrized(schwarz_symmetrize(v, c), c).slope, n);
    EXPECT_NEAR(tv, std::pow(gamma, n) * tu, 0.02 * tv) << name;
  }
}

TEST(RefinedLelong, MonotoneInEachDirectionComponent) {
  RunConfig c;
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> bump(0.0, 0.5);
  for (const auto& e : toric_entries()) {
    const int n = e.spec.dimension();
    for (int i = 0; i < 20; ++i) {
      const auto a = random_direction(g, n);
      auto b = a;
      for (auto& x : b) x += bump(g);
      EXPECT_LE(refined_lelong(e.spec, a, c).slope, refined_lelong(e.spec, b, c).slope + 1e-9) << e.name;
    }
  }
}

TEST(RefinedLelong, MidpointConcavity) {
  RunConfig c;
  std::mt19937_64 g(2);
  for (const auto& e : toric_entries()) {
    const int n = e.spec.dimension();
    for (int i = 0; i < 20; ++i) {
      const auto a = random_direction(g, n);
      const auto b = random_direction(g, n);
      std::vector<double> m(n);
      for (int k = 0; k < n; ++k) m[k] = 0.5 * (a[k] + b[k]);
      const double va = refined_lelong(e.spec, a, c).slope;
      const double vb = refined_lelong(e.spec, b, c).slope;
      const double vm = refined_lelong(e.spec, m, c).slope;
      EXPECT_GE(vm, 0.5 * (va + vb) - 1e-6) << e.name;
    }
  }
}

// symmetrization can only increase the Lelong number
TEST(Symmetrization, IncreasesLelongNumber) {
  RunConfig c;
  for (const auto& e : builtin_catalog()) {
    const auto res = schwarz_symmetrize(e.spec, c);
    const auto nu = lelong_origin(e.spec, c);
    const auto nu_hat = lelong_symmetrized(res, c);
    const double tol = std::max(c.pass_tol, 3 * std::hypot(nu.std_error, nu_hat.std_error));
    EXPECT_LE(nu.slope, nu_hat.slope + tol) << e.name;
    EXPECT_TRUE(res.convexity.ok) << e.name;
  }
}
