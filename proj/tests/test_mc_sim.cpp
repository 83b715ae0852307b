#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cachint/delay.hpp"
#include "cachint/mc_sim.hpp"
#include "cachint/numeric.hpp"
#include "cachint/radio.hpp"
#include "oracles.hpp"

using namespace cachint;

namespace {

RadioParams noiseless(double alpha, double threshold, std::uint32_t l) {
  RadioParams p;
  p.lambda = 1e-5;
  p.xi = 3e-5;
  p.eta = 0.1;
  p.power_w = 1.0;
  p.noise_w = 0.0;
  p.alpha = alpha;
  p.threshold = threshold;
  p.bandwidth_hz = 1e6;
  p.subchannels = l;
  return p;
}

SimConfig sim(std::uint64_t trials, std::uint64_t seed, unsigned workers = 0) {
  SimConfig s;
  s.trials = trials;
  s.seed = seed;
  s.workers = workers;
  return s;
}

// One paired draw: coverage with the full disk of radius 2R and with only
// the points inside R.
std::pair<bool, bool> paired_trial(const RadioParams& p, double radius, std::mt19937_64& rng) {
  const double r2 = 4.0 * radius * radius;
  std::poisson_distribution<int> count(p.lambda * kPi * r2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::exponential_distribution<double> h(1.0);
  int n = 0;
  do n = count(rng); while (n == 0);
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (auto& d : d2) d = r2 * u(rng);
  const auto nearest = static_cast<std::size_t>(std::min_element(d2.begin(), d2.end()) - d2.begin());
  double inner = 0.0, outer = 0.0;
  for (std::size_t j = 0; j < d2.size(); ++j) {
    if (j == nearest || u(rng) >= 1.0 / p.subchannels) continue;
    const double i = h(rng) * std::pow(d2[j], -0.5 * p.alpha);
    (d2[j] <= radius * radius ? inner : outer) += i;
  }
  const double s = h(rng) * std::pow(d2[nearest], -0.5 * p.alpha);
  const bool inside = d2[nearest] <= radius * radius;
  return {s > p.threshold * (inner + outer), inside && s > p.threshold * inner};
}

}  // namespace

TEST(Substream, DistinctAndReproducible) {
  auto a = substream(1, 0, 7), b = substream(1, 0, 7), c = substream(1, 1, 7), d = substream(2, 0, 7);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(x, d());
}

TEST(CoverageSim, MatchesIntegralNoiseless) {
  const RadioParams p = noiseless(4.0, 1.0, 1);
  const CoverageEstimate e = simulate_coverage(p, sim(100000, 17));
  const double ref = coverage_integral(p).p_c;
  EXPECT_EQ(e.estimate.n, 100000u);
  EXPECT_LT(std::abs(e.estimate.mean - ref), 3.0 * e.estimate.std_error);
}

TEST(CoverageSim, VanishingThresholdCoversEveryone) {
  const CoverageEstimate e = simulate_coverage(noiseless(4.0, 1e-9, 1), sim(20000, 3));
  EXPECT_GT(e.estimate.mean, 0.999);
}

TEST(CoverageSim, NoiselessLambdaInvariance) {
  const RadioParams p = noiseless(4.0, 1.0, 2);
  RadioParams q = p;
  q.lambda *= 4.0;
  const auto a = simulate_coverage(p, sim(100000, 101)).estimate;
  const auto b = simulate_coverage(q, sim(100000, 202)).estimate;
  const double z = (a.mean - b.mean) / std::hypot(a.std_error, b.std_error);
  EXPECT_LT(std::abs(z), 2.5758);  // 1% two-sided
}

TEST(CoverageSim, BitIdenticalAcrossWorkerCounts) {
  const RadioParams p = noiseless(3.5, 2.0, 3);
  std::vector<CoverageBlock> b1, b4;
  const auto a = simulate_coverage(p, sim(30000, 9, 1), &b1);
  const auto b = simulate_coverage(p, sim(30000, 9, 4), &b4);
  EXPECT_EQ(a.estimate.mean, b.estimate.mean);
  EXPECT_EQ(a.estimate.std_error, b.estimate.std_error);
  ASSERT_EQ(b1.size(), b4.size());
  for (std::size_t i = 0; i < b1.size(); ++i) EXPECT_EQ(b1[i].covered, b4[i].covered);
  std::uint64_t total = 0;
  for (const auto& blk : b1) total += blk.trials;
  EXPECT_EQ(total, 30000u);
}

TEST(CoverageSim, DefaultWindowTruncationIsNegligible) {
  // Paired realizations: the default disk against the same PPP on twice the radius.
  const RadioParams p = noiseless(4.0, 1.0, 1);
  const double radius = default_window_radius(p.lambda);
  std::mt19937_64 rng(77);
  const int n = 20000;
  int big = 0, small = 0;
  for (int i = 0; i < n; ++i) {
    const auto [b, s] = paired_trial(p, radius, rng);
    big += b;
    small += s;
  }
  const double ps = static_cast<double>(small) / n;
  const double se = std::sqrt(ps * (1.0 - ps) / n);
  EXPECT_LT(std::abs(static_cast<double>(big - small) / n), se);

  const auto a = simulate_coverage(p, sim(100000, 5)).estimate;
  SimConfig doubled = sim(100000, 6);
  doubled.window_radius = 2.0 * radius;
  const auto b = simulate_coverage(p, doubled).estimate;
  EXPECT_LT(std::abs(a.mean - b.mean), 3.0 * std::hypot(a.std_error, b.std_error));
}

TEST(CoverageSim, ProportionStdError) {
  const auto e = detail::proportion_estimate(250, 1000);
  EXPECT_DOUBLE_EQ(e.mean, 0.25);
  EXPECT_NEAR(e.std_error, std::sqrt(0.25 * 0.75 / 999.0), 1e-15);
}

TEST(Sampler, MomentsMatch) {
  std::mt19937_64 rng(4);
  for (double cv : {0.0, 0.3, 0.5, 1.0, 2.0, 3.0}) {
    const TwoMomentSampler s(2.5, cv);
    CompensatedSum m1, m2;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
      const double x = s(rng);
      ASSERT_GE(x, 0.0);
      m1 += x;
      m2 += x * x;
    }
    const double mean = m1.value() / n;
    const double var = m2.value() / n - mean * mean;
    EXPECT_NEAR(mean, 2.5, 0.02 * 2.5) << "cv=" << cv;
    EXPECT_NEAR(std::sqrt(std::max(0.0, var)) / mean, s.realized_cv(), 0.03 + 0.03 * cv) << "cv=" << cv;
  }
  EXPECT_EQ(TwoMomentSampler(1.0, 0.0).family(), Family::deterministic);
  EXPECT_EQ(TwoMomentSampler(1.0, 0.5).family(), Family::erlang);
  EXPECT_NEAR(TwoMomentSampler(1.0, 0.5).realized_cv(), 0.5, 1e-15);
  EXPECT_EQ(TwoMomentSampler(1.0, 1.0).family(), Family::exponential);
  EXPECT_EQ(TwoMomentSampler(1.0, 2.0).family(), Family::hyperexponential);
  EXPECT_THROW(TwoMomentSampler(1.0, 2.0, Family::erlang), DomainError);
  EXPECT_THROW(TwoMomentSampler(0.0, 1.0), DomainError);
}

TEST(QueueSim, MM1Sojourn) {
  const BackhaulQueue q{0.5, 1.0, 1, 1.0, 1.0};
  const QueueEstimate e = simulate_backhaul_queue(q, {}, sim(1'000'000, 8));
  EXPECT_LT(std::abs(e.sojourn.mean - 2.0), 3.0 * e.sojourn.std_error);
  EXPECT_LT(std::abs(e.waiting.mean - 1.0), 3.0 * e.waiting.std_error);
  EXPECT_EQ(e.batches, 50u);
  EXPECT_EQ(e.warmup, 50000u);
}

TEST(QueueSim, DeterministicNeverWaits) {
  const BackhaulQueue q{0.8, 1.0, 1, 0.0, 0.0};
  const QueueEstimate e = simulate_backhaul_queue(q, {}, sim(10000, 1));
  EXPECT_NEAR(e.sojourn.mean, 1.0, 1e-12);
  EXPECT_NEAR(e.waiting.mean, 0.0, 1e-12);
  EXPECT_EQ(e.interarrival_family, Family::deterministic);
}

TEST(QueueSim, MultiServerErlangC) {
  const double tau = 2.0;
  const unsigned m = 2;
  const double phi = 0.6 * m * m / tau;  // rho = 0.6
  const BackhaulQueue q{phi, tau, m, 1.0, 1.0};
  const QueueEstimate e = simulate_backhaul_queue(q, {}, sim(1'000'000, 12));
  const double ref = oracle::erlang_c_sojourn(m, phi, tau);
  EXPECT_LT(std::abs(e.sojourn.mean - ref), 3.0 * e.sojourn.std_error);
}

TEST(QueueSim, Reproducible) {
  const BackhaulQueue q{0.8, 5e-3, 1, 2.0, 1.0};
  const auto a = simulate_backhaul_queue(q, {}, sim(100000, 3));
  const auto b = simulate_backhaul_queue(q, {}, sim(100000, 3));
  EXPECT_EQ(a.sojourn.mean, b.sojourn.mean);
  EXPECT_EQ(a.sojourn.std_error, b.sojourn.std_error);
}

TEST(QueueSim, Errors) {
  EXPECT_THROW(simulate_backhaul_queue({1.0, 1.0, 1, 1.0, 1.0}, {}, sim(1000, 1)), InstabilityError);
  EXPECT_THROW(simulate_backhaul_queue({0.5, 1.0, 1, 1.0, 1.0}, {}, sim(10, 1)), DomainError);
}

TEST(TotalDelaySim, FullHitDeterministicLoad) {
  DelayModel m;
  m.traffic = {1e6, 0.1, 2e-4};
  m.lambda = 1e-4;
  m.goodput_bps = 1e8;
  m.queue = {0.8, 5e-3, 1, 2.0, 1.0};
  m.constraint = {1e-3, 0.1};
  m.cell_load = CellLoad::deterministic;
  const TailEstimate t = sample_total_delay(m, 1.0, sim(5000, 2));
  const double fh = expected_fronthaul_delay(m.traffic, m.lambda, m.goodput_bps);
  EXPECT_NEAR(t.delay.mean, fh, 1e-15);
  EXPECT_NEAR(t.delay.std_error, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(t.expected_delay, fh);
}

TEST(TotalDelaySim, TailBelowMarkovBound) {
  for (double p_hit : {0.0, 0.5, 0.95}) {
    for (CellLoad load : {CellLoad::poisson, CellLoad::deterministic}) {
      DelayModel m;
      m.traffic = {2e5, 0.05, 2e-4};
      m.lambda = 5e-5;
      m.goodput_bps = 1e8;
      m.queue = {50.0, 5e-3, 1, 1.5, 1.0};
      m.constraint = {5e-3, 0.1};
      m.cell_load = load;
      const TailEstimate t = sample_total_delay(m, p_hit, sim(50000, 6));
      EXPECT_LE(t.tail.mean, t.markov_bound + 3.0 * t.tail.std_error);
      EXPECT_NEAR(t.empirical_markov_bound, t.delay.mean / m.constraint.threshold_s, 1e-15);
    }
  }
}

TEST(TotalDelaySim, MeanMatchesAnalytic) {
  DelayModel m;
  m.traffic = {2e5, 0.05, 2e-4};
  m.lambda = 5e-5;
  m.goodput_bps = 1e8;
  m.queue = {20.0, 5e-3, 1, 1.0, 1.0};
  m.constraint = {5e-3, 0.1};
  const TailEstimate t = sample_total_delay(m, 0.4, sim(200000, 10));
  // Exponential/exponential: the two-moment sojourn is the exact M/M/1 value.
  EXPECT_LT(std::abs(t.delay.mean - t.expected_delay), 4.0 * t.delay.std_error);
}
