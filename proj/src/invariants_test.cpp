#include "invariants.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "catalog.hpp"
#include "error.hpp"

using namespace pshsym;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Io;
}

const TheoremCheck& check_named(const TheoremReport& r, const std::string& id) {
  for (const auto& c : r.checks)
    if (c.id == id) return c;
  throw std::runtime_error("no check " + id);
}

FunctionSpec spec(const char* name) { return catalog_entry(name).spec; }

}  // namespace

TEST(LelongOrigin, CatalogValues) {
  RunConfig c;
  EXPECT_NEAR(lelong_origin(spec("ex-4.1"), c).slope, 1.0, 0.01);
  EXPECT_NEAR(lelong_origin(spec("ex-4.2"), c).slope, 0.5, 0.01);
  EXPECT_NEAR(lelong_origin(spec("log-norm-n2-g2"), c).slope, 2.0, 1e-9);
  EXPECT_EQ(lelong_origin(spec("log-norm-n2"), c).method, SlopeMethod::ProfileDerivative);
}

TEST(LelongOrigin, S1SpecUsesSpheres) {
  RunConfig c;
  c.sphere_samples = 512;
  const auto s = load_spec_text(R"({"name": "s1", "dimension": 2, "symmetry": "s1",
    "body": {"kind": "closed_form", "expr": ["log", ["norm"]]}})");
  const auto e = lelong_origin(s, c);
  EXPECT_EQ(e.method, SlopeMethod::MaxOnSpheres);
  EXPECT_NEAR(e.slope, 1.0, 1e-6);
}

TEST(LelongAtPoint, Ex41OnPolarHyperplane) {
  // max of log|z1| on the sphere |z - x| = r with x1 = 0 is log r
  const double x[] = {0, 0, 0.5, 0};
  EXPECT_NEAR(lelong_at_point(spec("ex-4.1"), x, RunConfig{}).slope, 1.0, 0.05);
}

TEST(LelongAtPoint, RegularPoints) {
  const double x[] = {0.3, 0, 0, 0};
  EXPECT_NEAR(lelong_at_point(spec("ex-4.1"), x, RunConfig{}).slope, 0.0, 0.02);
  const double y[] = {0.2, 0, 0.1, 0};
  EXPECT_NEAR(lelong_at_point(spec("ex-4.2"), y, RunConfig{}).slope, 0.0, 0.02);
}

TEST(RefinedLelong, CornerOracles) {
  RunConfig c;
  const double a[] = {0.3, 0.7};
  EXPECT_NEAR(refined_lelong(spec("ex-4.1"), a, c).slope, 0.3, 1e-9);
  for (auto [a1, a2] : {std::pair{0.2, 0.8}, {0.5, 0.5}, {1.5, 0.25}}) {
    const double b[] = {a1, a2};
    EXPECT_NEAR(refined_lelong(spec("ex-4.4"), b, c).slope, 2 * (a1 + a2), 1e-9);
  }
  for (double eps : {0.25, 0.5, 0.75}) {
    const double d[] = {eps * eps / (1 + eps * eps), 1 / (1 + eps * eps)};
    const double oracle = std::min(d[0] / eps, eps * d[1]);
    EXPECT_NEAR(oracle, eps / (1 + eps * eps), 1e-15);
    EXPECT_NEAR(refined_lelong(spec(("demailly-" + format_parameter(eps)).c_str()), d, c).slope, oracle, 1e-9);
  }
  // radial: f(t min a)
  const double r[] = {0.6, 0.9, 0.3};
  EXPECT_NEAR(refined_lelong(spec("log-norm-n3"), r, c).slope, 0.3, 1e-9);
}

TEST(RefinedLelong, Errors) {
  RunConfig c;
  const double bad[] = {0.0, 1.0};
  EXPECT_EQ(code_of([&] { refined_lelong(spec("ex-4.1"), bad, c); }), ErrorCode::InvalidArgument);
  const auto s = load_spec_text(R"({"dimension": 2, "symmetry": "s1",
    "body": {"kind": "closed_form", "expr": ["log", ["norm"]]}})");
  const double a[] = {0.5, 0.5};
  EXPECT_EQ(code_of([&] { refined_lelong(s, a, c); }), ErrorCode::SymmetryRequired);
}

TEST(IntegrabilityIndexVolume, CatalogValues) {
  RunConfig c;
  EXPECT_NEAR(integrability_index_volume(spec("ex-4.1"), c).slope, 1.0, 0.02);
  EXPECT_NEAR(integrability_index_volume(spec("ex-4.2"), c).slope, 0.4, 0.02);
  EXPECT_NEAR(integrability_index_volume(spec("ex-4.4"), c).slope, 2.0, 0.04);
  EXPECT_EQ(integrability_index_volume(spec("ex-4.1"), c).method, SlopeMethod::VolumeLogRatio);
}

TEST(IntegrabilityIndexKiselman, CatalogValues) {
  RunConfig c;
  const auto a = integrability_index_kiselman(spec("ex-4.1"), c);
  EXPECT_NEAR(a.value, 1.0, 0.02);
  EXPECT_TRUE(a.boundary);
  EXPECT_GT(a.a[0], 0.9);

  const auto d = integrability_index_kiselman(spec("demailly-0.5"), c);
  EXPECT_NEAR(d.value, 0.4, 1e-3);
  EXPECT_FALSE(d.boundary);

  EXPECT_NEAR(integrability_index_kiselman(spec("ex-4.4"), c).value, 2.0, 1e-6);
}

TEST(RashkovskiiLowerBound, CatalogValues) {
  RunConfig c;
  const auto d = rashkovskii_lower_bound(spec("demailly-0.5"), c);
  EXPECT_NEAR(d.value, 1.0, 2e-3);
  // maximizer proportional to (eps, 1/eps)
  EXPECT_NEAR(d.a[0], 0.2, 0.01);
  const auto e = rashkovskii_lower_bound(spec("ex-4.2"), c);
  EXPECT_NEAR(e.value, 1.0, 2e-3);
  EXPECT_NEAR(e.a[0], 0.2, 0.01);
  EXPECT_NEAR(rashkovskii_lower_bound(spec("log-norm-n2"), c).value, 1.0, 2e-3);
  EXPECT_EQ(code_of([&] { rashkovskii_lower_bound(spec("ex-4.1"), c); }), ErrorCode::SinglePoleRequired);
}

TEST(ResidueMassRadial, Values) {
  RunConfig c;
  const auto id = RadialProfile::closed_form([](double t) { return t; }, c.t_min);
  EXPECT_NEAR(residue_mass_radial(id, 2, c).value, 1.0, 1e-12);
  const auto a = schwarz_symmetrize(spec("ex-4.1"), c);
  EXPECT_NEAR(residue_mass_radial(a.profile(), 2, c).value, 4.0, 0.1);
  const auto b = schwarz_symmetrize(spec("ex-4.2"), c);
  EXPECT_NEAR(residue_mass_radial(b.profile(), 2, c).value, 0.64, 0.05);
}

TEST(RadialMaConsistency, IdentityProfile) {
  RunConfig c;
  const auto id = RadialProfile::closed_form([](double t) { return t; }, c.t_min);
  for (double R : {0.2, 0.5, 1.0}) {
    const auto r = radial_ma_consistency(id, 2, R, c);
    EXPECT_NEAR(r.lhs, 1.0, 1e-6);
    EXPECT_NEAR(r.rhs, 1.0, 1e-12);
    EXPECT_NEAR(r.atom, 1.0, 1e-12);
  }
}

TEST(RadialMaConsistency, SmoothedLogNorm) {
  RunConfig c;
  const double eps2 = 1e-6;
  const auto f = RadialProfile::closed_form([eps2](double t) { return 0.5 * std::log(std::exp(2 * t) + eps2); },
                                            c.t_min);
  const double R = 0.5;
  const auto r = radial_ma_consistency(f, 2, R, c);
  // r y'(r) = f'(t) = e^{2t} / (e^{2t} + eps2); the total mass is its square at R
  const double slope = R * R / (R * R + eps2);
  EXPECT_NEAR(r.rhs, slope * slope, 1e-6);
  EXPECT_NEAR(r.atom, 0.0, 1e-9);
  EXPECT_LT(r.rel_gap, 0.01);
  EXPECT_NEAR(r.lhs, slope * slope, 0.01);
}

TEST(RadialMaConsistency, SmoothedDemaillyAtTwoResolutions) {
  RunConfig c;
  const double eps = 0.5;
  const auto f = RadialProfile::closed_form(
      [eps](double t) {
        const double a = t / eps, b = eps * t, m = std::max(a, b);
        return m + std::log(std::exp(a - m) + std::exp(b - m));
      },
      c.t_min);
  const auto r0 = radial_ma_consistency(f, 2, 0.5, c, 0);
  const auto r1 = radial_ma_consistency(f, 2, 0.5, c, 1);
  EXPECT_LT(r0.rel_gap, 0.02);
  EXPECT_LT(r1.rel_gap, 0.02);
  EXPECT_NEAR(r0.lhs, r1.lhs, 0.02 * r1.lhs);
  EXPECT_NEAR(r0.atom, eps * eps, 1e-6);
}

TEST(ComputeInvariants, TauHatIsNuHatPower) {
  RunConfig c;
  const auto res = schwarz_symmetrize(spec("ex-4.2"), c);
  const auto inv = compute_invariants(res, c, TauKind::Value, 1.0);
  EXPECT_EQ(inv.tau_hat, std::pow(inv.nu_hat.slope, 2));
  EXPECT_EQ(inv.bounds_ok.size(), 5u);
  EXPECT_TRUE(inv.rashkovskii_lb.has_value());
  EXPECT_TRUE(inv.iota_kiselman.has_value());
}

TEST(ComputeInvariants, IndependentOfWorkerCount) {
  RunConfig a;
  a.workers = 1;
  RunConfig b = a;
  b.workers = 3;
  const auto s = spec("demailly-0.5");
  const auto ra = schwarz_symmetrize(s, a);
  const auto rb = schwarz_symmetrize(s, b);
  const auto ja = to_json(verify_theorems(compute_invariants(ra, a, TauKind::Value, 1.0), ra, a)).dump();
  const auto jb = to_json(verify_theorems(compute_invariants(rb, b, TauKind::Value, 1.0), rb, b)).dump();
  EXPECT_EQ(ja, jb);
}

TEST(VerifyTheorems, Ex41Sandwich) {
  const auto r = verify_theorems(spec("ex-4.1"), RunConfig{}, TauKind::Unknown);
  const auto& c = check_named(r, "lelong_sandwich");
  EXPECT_EQ(c.status, CheckStatus::Pass);
  EXPECT_EQ(c.tolerance, 0.05);
  EXPECT_TRUE(r.all_pass());
  EXPECT_EQ(r.points.size(), 16u);
}

TEST(VerifyTheorems, Ex42MassDomination) {
  const auto r = verify_theorems(spec("ex-4.2"), RunConfig{}, TauKind::Value, 1.0);
  const auto& c = check_named(r, "mass_domination");
  EXPECT_EQ(c.status, CheckStatus::Pass);
  EXPECT_NEAR(c.margin, 1.0 - 0.64, 0.05);
}

TEST(VerifyTheorems, Ex44MassDominationInapplicable) {
  const auto r = verify_theorems(spec("ex-4.4"), RunConfig{}, TauKind::Undefined);
  EXPECT_EQ(check_named(r, "mass_domination").status, CheckStatus::Inapplicable);
  EXPECT_TRUE(r.all_pass());
}

TEST(VerifyTheorems, RegistryOrderIsFixed) {
  const auto r = verify_theorems(spec("log-norm-n2"), RunConfig{}, TauKind::Value, 1.0);
  const std::vector<std::string> want = {"lelong_sandwich",   "skoda",          "symmetrization_identity",
                                         "kiselman_identity", "residue_mass_symmetrized", "radial_identity",
                                         "mass_domination",   "rashkovskii_chain", "residue_identity",
                                         "am_gm",             "origin_maximum"};
  ASSERT_EQ(r.checks.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(r.checks[i].id, want[i]);
    EXPECT_EQ(r.checks[i].status, CheckStatus::Pass) << want[i];
  }
}
