#include <gtest/gtest.h>

#include <cmath>

#include "cachint/errors.hpp"
#include "cachint/numeric.hpp"
#include "cachint/radio.hpp"

using namespace cachint;

namespace {

RadioParams baseline() {
  RadioParams p;
  p.lambda = 20.0 / (kPi * 500.0 * 500.0);
  p.xi = 60.0 / (kPi * 500.0 * 500.0);
  p.eta = 0.014;
  p.power_w = dbm_to_watts(10.0);
  p.noise_w = dbm_to_watts(-150.0);
  p.alpha = 5.0;
  p.threshold = db_to_linear(10.0);
  p.bandwidth_hz = 300e6;
  p.subchannels = 6;
  return p;
}

}  // namespace

TEST(Beta, AlphaFourClosedForm) {
  EXPECT_NEAR(beta_factor(1.0, 4.0), 1.0 + kPi / 4.0, 1e-10);
  EXPECT_NEAR(beta_factor(10.0, 4.0), 1.0 + std::sqrt(10.0) * std::atan(std::sqrt(10.0)), 1e-10);
  EXPECT_NEAR(beta_factor(10.0, 4.0), 4.99876, 1e-5);
  for (double t : {0.01, 0.3, 3.0, 100.0}) {
    EXPECT_NEAR(beta_factor(t, 4.0), 1.0 + std::sqrt(t) * std::atan(std::sqrt(t)), 1e-10) << t;
  }
}

TEST(Beta, VanishingThreshold) {
  EXPECT_NEAR(beta_factor(1e-12, 5.0), 1.0, 1e-4);
  EXPECT_LT(beta_factor(1e-6, 5.0), beta_factor(1e-3, 5.0));
}

TEST(Beta, RejectsBadInputs) {
  EXPECT_THROW(beta_factor(1.0, 2.0), DomainError);
  EXPECT_THROW(beta_factor(0.0, 4.0), DomainError);
}

TEST(Coverage, InterferenceLimitedExamples) {
  EXPECT_DOUBLE_EQ(coverage_interference_limited(6, 1.0), 1.0);
  EXPECT_GT(coverage_interference_limited(1'000'000, 5.05), 0.999995);
  EXPECT_NEAR(coverage_interference_limited(1, 1.0 + kPi / 4.0), 1.0 / (1.0 + kPi / 4.0), 1e-15);
  EXPECT_NEAR(coverage_interference_limited(1, 1.0 + kPi / 4.0), 0.5601, 1e-4);
}

TEST(Coverage, NoiselessIntegralMatchesClosedForm) {
  for (double alpha : {2.5, 4.0, 5.0}) {
    for (std::uint32_t l : {1u, 3u, 6u}) {
      RadioParams p = baseline();
      p.noise_w = 0.0;
      p.alpha = alpha;
      p.subchannels = l;
      const CoverageResult r = coverage_integral(p);
      EXPECT_NEAR(r.p_c, coverage_interference_limited(l, r.beta), 1e-12);
      EXPECT_NEAR(coverage_closed_form(p).p_c, coverage_interference_limited(l, r.beta), 1e-15);
    }
  }
}

TEST(Coverage, NoiselessInvariantInLambda) {
  RadioParams p = baseline();
  p.noise_w = 0.0;
  const double base_int = coverage_integral(p).p_c;
  const double base_cf = coverage_closed_form(p).p_c;
  for (double c : {1e-3, 0.5, 10.0, 1e4}) {
    RadioParams q = p;
    q.lambda *= c;
    EXPECT_NEAR(coverage_integral(q).p_c, base_int, 1e-12);
    EXPECT_NEAR(coverage_closed_form(q).p_c, base_cf, 1e-12);
  }
}

TEST(Coverage, BaselineClosedFormNearIntegral) {
  const RadioParams p = baseline();
  const double a = coverage_integral(p).p_c;
  const double b = coverage_closed_form(p).p_c;
  EXPECT_LT(std::abs(b - a) / a, 0.02);
}

TEST(Coverage, ClosedFormApproachesNoiselessAsLambdaGrows) {
  RadioParams p = baseline();
  p.noise_w = dbm_to_watts(-90.0);
  const double limit = coverage_interference_limited(p.subchannels, beta_factor(p.threshold, p.alpha));
  double prev = 0.0;
  for (double lam : {1e-7, 1e-6, 1e-5, 1e-4, 1e-2, 1.0}) {
    p.lambda = lam;
    const double pc = coverage_closed_form(p).p_c;
    EXPECT_GT(pc, 0.0);
    EXPECT_LE(pc, 1.0);
    EXPECT_GE(pc, prev);
    prev = pc;
  }
  EXPECT_NEAR(prev, limit, 1e-3);
}

TEST(Coverage, MonotoneInThresholdAndSubchannels) {
  RadioParams p = baseline();
  double prev = 1.0;
  for (double t_db : {-10.0, 0.0, 5.0, 10.0, 20.0}) {
    p.threshold = db_to_linear(t_db);
    const double pc = coverage_closed_form(p).p_c;
    EXPECT_LE(pc, prev);
    prev = pc;
  }
  p = baseline();
  prev = 0.0;
  for (std::uint32_t l : {1u, 2u, 4u, 8u, 16u}) {
    p.subchannels = l;
    const double pc = coverage_closed_form(p).p_c;
    EXPECT_GE(pc, prev);
    prev = pc;
  }
}

TEST(Coverage, MonteCarloMethodIsNotAnalytic) {
  EXPECT_THROW(coverage(baseline(), CoverageMethod::monte_carlo), DomainError);
}

TEST(Coverage, ValidationRejectsBadParams) {
  RadioParams p = baseline();
  p.alpha = 2.0;
  EXPECT_THROW(coverage_closed_form(p), DomainError);
  p = baseline();
  p.power_max_w = p.power_w / 2.0;
  EXPECT_THROW(coverage_integral(p), DomainError);
  p = baseline();
  p.subchannels = 0;
  EXPECT_THROW(coverage_closed_form(p), DomainError);
}

TEST(Goodput, UnitExample) { EXPECT_DOUBLE_EQ(goodput_from_coverage(1.0, 6.0, 6, 1.0), 1.0); }

TEST(Goodput, BaselineComposition) {
  const RadioParams p = baseline();
  const double pc = coverage_closed_form(p).p_c;
  EXPECT_DOUBLE_EQ(goodput(p), pc * 5e7 * std::log2(11.0));
  EXPECT_DOUBLE_EQ(goodput(p, CoverageMethod::integral),
                   coverage_integral(p).p_c * p.bandwidth_hz / 6.0 * std::log2(1.0 + p.threshold));
}

TEST(Goodput, ProportionalToBandwidth) {
  RadioParams p = baseline();
  const double g = goodput(p);
  p.bandwidth_hz *= 2.0;
  EXPECT_DOUBLE_EQ(goodput(p), 2.0 * g);
}
