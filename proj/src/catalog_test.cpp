#include "catalog.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "error.hpp"

using namespace pshsym;

TEST(Catalog, ContainsRequiredEntries) {
  const auto names = catalog_names();
  const std::set<std::string> have(names.begin(), names.end());
  for (const char* n : {"ex-4.1", "ex-4.2", "ex-4.3", "ex-4.4", "demailly-0.25", "demailly-0.5", "demailly-0.75",
                        "log-norm-n1", "log-norm-n2", "log-norm-n3", "log-norm-n2-g0.5", "log-norm-n2-g2"})
    EXPECT_TRUE(have.count(n)) << n;
  EXPECT_EQ(builtin_catalog().size(), names.size());
}

TEST(Catalog, EveryEntryCarriesProvenance) {
  for (const auto& e : builtin_catalog()) {
    EXPECT_FALSE(e.expected.provenance.empty()) << e.name;
    EXPECT_EQ(e.spec.name(), e.name);
  }
}

TEST(Catalog, PaperValues) {
  EXPECT_EQ(*catalog_entry("ex-4.4").expected.nu, 4.0);
  EXPECT_EQ(*catalog_entry("ex-4.3").expected.nu, 0.0);
  EXPECT_EQ(catalog_entry("ex-4.3").expected.tau_kind, TauKind::Unbounded);
  EXPECT_EQ(catalog_entry("ex-4.4").expected.tau_kind, TauKind::Undefined);

  const auto e = catalog_entry("ex-4.2").expected;
  EXPECT_EQ(*e.nu, 0.5);
  EXPECT_EQ(*e.nu_hat, 0.8);
  EXPECT_EQ(*e.iota, 0.4);
  EXPECT_EQ(*e.tau_hat, 0.64);
  EXPECT_EQ(e.tau, 1.0);
}

TEST(Catalog, LogNormIdentityCase) {
  const auto e = catalog_entry("log-norm-n2").expected;
  EXPECT_EQ(*e.nu, 1.0);
  EXPECT_EQ(*e.iota, 0.5);
  EXPECT_EQ(e.tau_kind, TauKind::Value);
  EXPECT_EQ(e.tau, 1.0);
  EXPECT_EQ(catalog_entry("log-norm").spec.dimension(), 2);
}

TEST(Catalog, DemaillyFamily) {
  for (double eps : {0.25, 0.5, 0.75, 0.3}) {
    const auto e = catalog_entry("demailly-" + format_parameter(eps));
    const double s = eps + 1.0 / eps;
    EXPECT_DOUBLE_EQ(*e.expected.nu, eps);
    EXPECT_NEAR(*e.expected.iota, 1.0 / s, 1e-15);
    EXPECT_NEAR(*e.expected.nu_hat, 2.0 / s, 1e-15);
    EXPECT_NEAR(*e.expected.tau_hat, 4.0 / (s * s), 1e-15);
    EXPECT_LT(*e.expected.tau_hat, 1.0);
    // u = max(log|z1| / eps, eps log|z2|) read through the toric profile
    const double x[] = {-2.0, -3.0};
    EXPECT_DOUBLE_EQ(e.spec.toric(x), std::max(-2.0 / eps, -3.0 * eps));
  }
}

TEST(Catalog, GeneratedNames) {
  EXPECT_EQ(catalog_entry("log-norm-n4").spec.dimension(), 4);
  EXPECT_EQ(catalog_entry("log-norm-n3-g2").expected.tau, 8.0);
  EXPECT_EQ(format_parameter(0.5), "0.5");
  EXPECT_EQ(format_parameter(2.0), "2");
}

TEST(Catalog, UnknownName) {
  try {
    catalog_entry("ex-9.9");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownName);
  }
  EXPECT_THROW(catalog_entry("demailly-x"), Error);
  EXPECT_THROW(catalog_entry("log-norm-n2.5"), Error);
}
