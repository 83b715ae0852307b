#include <gtest/gtest.h>

#include <cmath>

#include "cachint/errors.hpp"
#include "cachint/numeric.hpp"
#include "cachint/zipf.hpp"
#include "oracles.hpp"

using namespace cachint;

TEST(ZipfPmf, SingleFileCatalog) { EXPECT_DOUBLE_EQ(zipf_pmf({1, 2.0}, 1), 1.0); }

TEST(ZipfPmf, ThreeFilesHarmonic) { EXPECT_NEAR(zipf_pmf({3, 1.0}, 1), 6.0 / 11.0, 1e-15); }

TEST(ZipfPmf, UniformWhenExponentIsZero) { EXPECT_NEAR(zipf_pmf({5, 0.0}, 3), 0.2, 1e-15); }

TEST(ZipfPmf, RankOutOfRange) {
  EXPECT_THROW(zipf_pmf({5, 1.0}, 0), DomainError);
  EXPECT_THROW(zipf_pmf({5, 1.0}, 6), DomainError);
}

TEST(ZipfPmf, SumsToOne) {
  for (std::uint64_t f : {1u, 7u, 100u, 5000u}) {
    for (double nu : {0.0, 0.5, 1.0, 1.5, 2.5}) {
      const ZipfCatalog c{f, nu};
      CompensatedSum s;
      for (std::uint64_t d = 1; d <= f; ++d) s += zipf_pmf(c, d);
      EXPECT_NEAR(s.value(), 1.0, 1e-12) << "F=" << f << " nu=" << nu;
    }
  }
}

TEST(Harmonic, SmallExactValues) {
  EXPECT_DOUBLE_EQ(harmonic_exact(1, 7.3), 1.0);
  EXPECT_NEAR(harmonic_exact(3, 1.0), 11.0 / 6.0, 1e-15);
  EXPECT_DOUBLE_EQ(harmonic_exact(4, 0.0), 4.0);
  EXPECT_DOUBLE_EQ(harmonic_exact(0, 1.3), 0.0);
}

TEST(Harmonic, MatchesLongDoubleSums) {
  for (std::uint64_t s : {10u, 1000u, 123457u}) {
    for (double nu : {0.3, 1.0, 1.7}) {
      const double ref = static_cast<double>(oracle::direct_harmonic(s, nu));
      EXPECT_NEAR(harmonic_exact(s, nu), ref, 1e-13 * ref);
    }
  }
}

TEST(Harmonic, ZetaDifferenceIdentity) {
  for (double nu : {1.1, 1.5, 2.0, 3.0}) {
    for (std::uint64_t s : {1u, 10u, 1000u, 100000u}) {
      const double lhs = harmonic_exact(s, nu);
      const double rhs = riemann_zeta(nu) - hurwitz_zeta(nu, static_cast<double>(s) + 1.0);
      EXPECT_NEAR(lhs, rhs, 1e-9) << "nu=" << nu << " S=" << s;
    }
  }
}

TEST(Harmonic, LargeCountsUseZetaIdentity) {
  const std::uint64_t big = 20'000'000;
  const double nu = 1.5;
  const double expected = riemann_zeta(nu) - hurwitz_zeta(nu, static_cast<double>(big) + 1.0);
  EXPECT_DOUBLE_EQ(harmonic_exact(big, nu), expected);
  // Continuity across the switch.
  const double below = harmonic_exact(kDirectSumLimit, nu);
  const double above = harmonic_exact(kDirectSumLimit + 1, nu);
  EXPECT_NEAR(above - below, std::pow(static_cast<double>(kDirectSumLimit + 1), -nu), 1e-12);
  const double h1 = harmonic_exact(big, 1.0);
  EXPECT_NEAR(h1, std::log(static_cast<double>(big)) + 0.5772156649015329 + 0.5 / big, 1e-12);
}

TEST(Harmonic, AsymptoticExamples) {
  const double e6 = harmonic_exact(1'000'000, 2.0);
  EXPECT_NEAR(harmonic_asymptotic(1e6, 2.0), e6, 1e-6 * e6);
  const double e100 = harmonic_exact(100, 1.5);
  EXPECT_NEAR(harmonic_asymptotic(100.0, 1.5), e100, 1e-3 * e100);
  EXPECT_NEAR(harmonic_asymptotic(1e300, 2.0), kPi * kPi / 6.0, 1e-12);
  EXPECT_THROW(harmonic_asymptotic(10.0, 1.0), PoleError);
}

TEST(Harmonic, AsymptoticErrorBoundedByFirstDroppedTerm) {
  for (double nu : {0.3, 0.7, 1.3, 2.0, 3.5}) {
    for (std::uint64_t s : {10u, 31u, 100u, 1000u, 10000u}) {
      const double err = std::abs(harmonic_asymptotic(static_cast<double>(s), nu) - harmonic_exact(s, nu));
      EXPECT_LE(err, std::pow(static_cast<double>(s) + 1.0, -nu)) << "nu=" << nu << " S=" << s;
    }
  }
}

TEST(Zeta, KnownValues) {
  EXPECT_NEAR(hurwitz_zeta(2.0, 1.0), kPi * kPi / 6.0, 1e-12);
  EXPECT_NEAR(hurwitz_zeta(2.0, 2.0), kPi * kPi / 6.0 - 1.0, 1e-12);
  EXPECT_NEAR(hurwitz_zeta(3.0, 1.0) - hurwitz_zeta(3.0, 4.0), 1.0 + 1.0 / 8.0 + 1.0 / 27.0, 1e-14);
  EXPECT_NEAR(riemann_zeta(2.0), 1.6449340668482264, 1e-12);
  EXPECT_NEAR(riemann_zeta(4.0), std::pow(kPi, 4) / 90.0, 1e-12);
  EXPECT_NEAR(riemann_zeta(0.5), -1.4603545088095868, 1e-10);
}

TEST(Zeta, AgreesWithIndependentOracles) {
  for (double s : {1.1, 1.5, 2.5, 4.0}) {
    const double ref = static_cast<double>(oracle::zeta_tail_sum(s));
    EXPECT_NEAR(riemann_zeta(s), ref, 1e-10 * std::abs(ref)) << "s=" << s;
  }
  for (double s : {0.1, 0.5, 0.9, 1.5, 3.0}) {
    const double ref = oracle::zeta_via_eta(s);
    EXPECT_NEAR(riemann_zeta(s), ref, 1e-10 * std::abs(ref)) << "s=" << s;
  }
  EXPECT_NEAR(riemann_zeta(0.0), -0.5, 1e-12);
}

TEST(Zeta, ShiftIdentity) {
  for (double s : {0.4, 1.3, 2.2}) {
    for (double a : {0.25, 1.0, 3.7, 50.0}) {
      EXPECT_NEAR(hurwitz_zeta(s, a + 1.0), hurwitz_zeta(s, a) - std::pow(a, -s), 1e-10 * std::abs(hurwitz_zeta(s, a)));
    }
  }
}

TEST(Zeta, Errors) {
  EXPECT_THROW(hurwitz_zeta(1.0, 2.0), PoleError);
  EXPECT_THROW(riemann_zeta(1.0), PoleError);
  EXPECT_THROW(hurwitz_zeta(2.0, 0.0), DomainError);
  EXPECT_THROW(hurwitz_zeta(2.0, -1.0), DomainError);
}

TEST(HitProbability, ExactExamples) {
  EXPECT_DOUBLE_EQ(hit_probability_exact({100000, 0.8}, {100000}), 1.0);
  EXPECT_NEAR(hit_probability_exact({4, 1.0}, {2}), 0.72, 1e-15);
  EXPECT_NEAR(hit_probability_exact({3, 0.0}, {1}), 1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(hit_probability_exact({10, 1.0}, {0}), 0.0);
  EXPECT_THROW(hit_probability_exact({10, 1.0}, {11}), DomainError);
}

TEST(HitProbability, ExactIsCumulativePmfAndMonotone) {
  const ZipfCatalog c{2000, 1.2};
  CompensatedSum cdf;
  double prev = 0.0;
  for (std::uint64_t s = 1; s <= c.files; ++s) {
    cdf += zipf_pmf(c, s);
    const double p = hit_probability_exact(c, {s});
    EXPECT_NEAR(p, cdf.value(), 1e-12);
    EXPECT_GE(p, prev);
    prev = p;
  }
}

TEST(HitProbability, IncreasesWithSkew) {
  double prev = 0.0;
  for (double nu : {0.5, 0.8, 1.2, 2.0}) {
    const double p = hit_probability_exact({10000, nu}, {100});
    EXPECT_GT(p, prev);
    prev = p;
  }
}

TEST(HitProbability, AsymptoticExamples) {
  const ZipfCatalog c15{100000, 1.5}, c05{100000, 0.5};
  const double e15 = hit_probability_exact(c15, {10000});
  EXPECT_NEAR(hit_probability_asymptotic(c15, CacheConfig{10000}).value, e15, 1e-4 * e15);
  const double e05 = hit_probability_exact(c05, {10000});
  EXPECT_NEAR(hit_probability_asymptotic(c05, CacheConfig{10000}).value, e05, 1e-3 * e05);
  const auto full = hit_probability_asymptotic(ZipfCatalog{100, 2.0}, CacheConfig{100});
  EXPECT_NEAR(full.unclamped, 1.0, 5e-3);
  EXPECT_THROW(hit_probability_asymptotic(ZipfCatalog{100, 1.0}, CacheConfig{10}), PoleError);
}

TEST(HitProbability, AsymptoticClampIsReported) {
  // For nu > 1 the leading-order sum overshoots near S = F.
  const auto h = hit_probability_asymptotic(ZipfCatalog{50, 3.0}, CacheConfig{50});
  EXPECT_LE(h.value, 1.0);
  EXPECT_GE(h.value, 0.0);
  EXPECT_EQ(h.clamped, h.unclamped != h.value);
  // zeta(nu) + 1/(1-nu) stays positive, so the floor never binds at S = 0.
  for (double nu : {0.2, 0.5, 0.9, 1.1, 2.0, 4.0}) {
    const auto low = hit_probability_asymptotic(ZipfCatalog{100000, nu}, 0.0);
    EXPECT_FALSE(low.clamped) << nu;
    EXPECT_GT(low.unclamped, 0.0) << nu;
  }
}
