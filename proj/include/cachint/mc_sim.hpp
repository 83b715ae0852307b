#pragma once

// Monte Carlo validation of the analytic chain: PPP/Rayleigh SINR draws for
// coverage, a FIFO multi-server discrete-event queue for the backhaul, and
// sampled end-to-end delays for the Markov-bound check.
//
// Reproducibility: trials are grouped in fixed-size blocks and block b draws
// from mt19937_64 seeded by seed_seq{seed_lo, seed_hi, b_lo, b_hi, tag}.
// Blocks are reduced in index order, so estimates do not depend on the
// number of worker threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <queue>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "cachint/delay.hpp"
#include "cachint/errors.hpp"
#include "cachint/numeric.hpp"
#include "cachint/parallel.hpp"
#include "cachint/radio.hpp"

namespace cachint {

struct SimConfig {
  std::uint64_t trials = 100'000;
  double window_radius = 0.0;  // meters; 0 picks one holding ~2000 BSs on average
  std::uint64_t seed = 1;
  std::uint64_t block_size = 4096;
  unsigned workers = 0;  // 0: worker_count()
};

struct EmpiricalEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample std / sqrt(n)
  std::uint64_t n = 0;
};

/// mt19937_64 for substream `index` of stream family `tag`.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), tag};
  return std::mt19937_64(seq);
}

namespace detail {

inline constexpr std::uint32_t kCoverageStream = 0xC0;
inline constexpr std::uint32_t kQueueStream = 0xB4;
inline constexpr std::uint32_t kDelayStream = 0xDE;

inline EmpiricalEstimate proportion_estimate(std::uint64_t hits, std::uint64_t n) {
  EmpiricalEstimate e;
  e.n = n;
  if (n == 0) return e;
  e.mean = static_cast<double>(hits) / static_cast<double>(n);
  if (n > 1) {
    const double var = e.mean * (1.0 - e.mean) * static_cast<double>(n) / static_cast<double>(n - 1);
    e.std_error = std::sqrt(var / static_cast<double>(n));
  }
  return e;
}

}  // namespace detail

struct CoverageEstimate {
  EmpiricalEstimate estimate;
  std::uint64_t resampled = 0;  // realizations with no BS in the window
  double window_radius = 0.0;
};

/// Per-block raw counts, for CSV emission.
struct CoverageBlock {
  std::uint64_t index = 0;
  std::uint64_t trials = 0;
  std::uint64_t covered = 0;
  std::uint64_t resampled = 0;
};

inline double default_window_radius(double lambda) { return std::sqrt(2000.0 / (kPi * lambda)); }

/// Estimates Pr(SINR > T) for the typical user at the origin.
///
/// Each trial drops a PPP of intensity lambda on the disk, serves the user
/// from the nearest BS, keeps each other BS as a co-channel interferer with
/// probability 1/L, and draws unit-mean exponential gains.
inline CoverageEstimate simulate_coverage(const RadioParams& params, const SimConfig& sim,
                                          std::vector<CoverageBlock>* blocks_out = nullptr) {
  params.validate();
  if (sim.trials < 1) throw DomainError("simulate_coverage: trials must be >= 1");
  const double radius = sim.window_radius > 0.0 ? sim.window_radius : default_window_radius(params.lambda);
  const double r2max = radius * radius;
  const double mean_count = params.lambda * kPi * r2max;
  const double keep = 1.0 / static_cast<double>(params.subchannels);
  const double half_alpha = 0.5 * params.alpha;

  const std::uint64_t block = std::max<std::uint64_t>(1, sim.block_size);
  const std::uint64_t n_blocks = (sim.trials + block - 1) / block;
  std::vector<CoverageBlock> blocks(n_blocks);

  parallel_for(
      n_blocks,
      [&](std::size_t b) {
        auto rng = substream(sim.seed, b, detail::kCoverageStream);
        std::poisson_distribution<std::uint64_t> count_dist(mean_count);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::exponential_distribution<double> fading(1.0);
        std::vector<double> dist2;
        CoverageBlock& out = blocks[b];
        out.index = b;
        out.trials = std::min(block, sim.trials - b * block);
        for (std::uint64_t trial = 0; trial < out.trials; ++trial) {
          std::uint64_t n = count_dist(rng);
          while (n == 0) {
            ++out.resampled;
            n = count_dist(rng);
          }
          dist2.resize(n);
          std::size_t nearest = 0;
          for (std::size_t j = 0; j < n; ++j) {
            dist2[j] = r2max * unif(rng);
            if (dist2[j] < dist2[nearest]) nearest = j;
          }
          double interference = 0.0;
          for (std::size_t j = 0; j < n; ++j) {
            if (j == nearest) continue;
            if (keep < 1.0 && unif(rng) >= keep) continue;
            interference += fading(rng) * std::pow(dist2[j], -half_alpha);
          }
          interference *= params.power_w;
          const double signal = fading(rng) * std::pow(dist2[nearest], -half_alpha) * params.power_w;
          if (signal > params.threshold * (interference + params.noise_w)) ++out.covered;
        }
      },
      sim.workers == 0 ? worker_count() : sim.workers);

  std::uint64_t covered = 0;
  std::uint64_t resampled = 0;
  for (const auto& b : blocks) {
    covered += b.covered;
    resampled += b.resampled;
  }
  if (blocks_out) *blocks_out = blocks;
  return {detail::proportion_estimate(covered, sim.trials), resampled, radius};
}

enum class Family { automatic, exponential, erlang, hyperexponential, deterministic };

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::automatic: return "automatic";
    case Family::exponential: return "exponential";
    case Family::erlang: return "erlang";
    case Family::hyperexponential: return "hyperexponential";
    case Family::deterministic: return "deterministic";
  }
  return "unknown";
}

/// Positive random variable matched to (mean, coefficient of variation).
///
/// automatic: deterministic for c = 0, Erlang-k with k = round(1/c^2) for
/// c < 1, exponential for c = 1, balanced-means two-phase hyperexponential
/// for c > 1.
class TwoMomentSampler {
 public:
  TwoMomentSampler(double mean, double cv, Family family = Family::automatic) : mean_(mean) {
    if (!(mean > 0.0)) throw DomainError("TwoMomentSampler: mean must be > 0");
    if (!(cv >= 0.0)) throw DomainError("TwoMomentSampler: cv must be >= 0");
    if (family == Family::automatic) {
      if (cv == 0.0) family = Family::deterministic;
      else if (cv < 1.0) family = Family::erlang;
      else if (cv == 1.0) family = Family::exponential;
      else family = Family::hyperexponential;
    }
    family_ = family;
    switch (family_) {
      case Family::deterministic: realized_cv_ = 0.0; break;
      case Family::exponential: realized_cv_ = 1.0; break;
      case Family::erlang: {
        if (!(cv > 0.0 && cv <= 1.0)) throw DomainError("TwoMomentSampler: Erlang needs 0 < cv <= 1");
        phases_ = std::max<long>(1, std::lround(1.0 / (cv * cv)));
        realized_cv_ = 1.0 / std::sqrt(static_cast<double>(phases_));
        break;
      }
      case Family::hyperexponential: {
        if (!(cv >= 1.0)) throw DomainError("TwoMomentSampler: hyperexponential needs cv >= 1");
        const double c2 = cv * cv;
        p1_ = 0.5 * (1.0 + std::sqrt((c2 - 1.0) / (c2 + 1.0)));
        rate1_ = 2.0 * p1_ / mean;
        rate2_ = 2.0 * (1.0 - p1_) / mean;
        realized_cv_ = cv;
        break;
      }
      case Family::automatic: break;
    }
  }

  template <typename Rng>
  double operator()(Rng& rng) const {
    switch (family_) {
      case Family::deterministic: return mean_;
      case Family::exponential: return std::exponential_distribution<double>(1.0 / mean_)(rng);
      case Family::erlang: {
        const auto k = static_cast<double>(phases_);
        return std::gamma_distribution<double>(k, mean_ / k)(rng);
      }
      case Family::hyperexponential: {
        const bool first = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p1_;
        return std::exponential_distribution<double>(first ? rate1_ : rate2_)(rng);
      }
      case Family::automatic: break;
    }
    return mean_;
  }

  Family family() const { return family_; }
  double mean() const { return mean_; }
  double realized_cv() const { return realized_cv_; }

 private:
  double mean_;
  Family family_ = Family::exponential;
  long phases_ = 1;
  double p1_ = 0.5, rate1_ = 1.0, rate2_ = 1.0;
  double realized_cv_ = 1.0;
};

struct QueueFamilies {
  Family interarrival = Family::automatic;
  Family service = Family::automatic;
};

/// FIFO queue with m identical servers fed by renewal arrivals. Each server
/// works at rate mu = m/tau, so the mean service time is tau/m and the
/// utilization matches BackhaulQueue::utilization().
class QueueSimulator {
 public:
  QueueSimulator(const BackhaulQueue& queue, QueueFamilies families, std::mt19937_64 rng)
      : interarrival_(1.0 / queue.arrival_rate, queue.cv_arrival, families.interarrival),
        service_(1.0 / queue.service_rate(), queue.cv_service, families.service),
        rng_(std::move(rng)) {
    queue.validate();
    for (std::uint32_t i = 0; i < queue.servers; ++i) free_at_.push(0.0);
  }

  /// Sojourn (wait + service) of the next arriving customer.
  double next_sojourn() {
    clock_ += interarrival_(rng_);
    const double free = free_at_.top();
    free_at_.pop();
    const double start = std::max(clock_, free);
    const double done = start + service_(rng_);
    free_at_.push(done);
    last_wait_ = start - clock_;
    return done - clock_;
  }

  double last_wait() const { return last_wait_; }
  const TwoMomentSampler& interarrival() const { return interarrival_; }
  const TwoMomentSampler& service() const { return service_; }

 private:
  TwoMomentSampler interarrival_;
  TwoMomentSampler service_;
  std::mt19937_64 rng_;
  std::priority_queue<double, std::vector<double>, std::greater<>> free_at_;
  double clock_ = 0.0;
  double last_wait_ = 0.0;
};

struct QueueEstimate {
  EmpiricalEstimate sojourn;  // batch-means standard error
  EmpiricalEstimate waiting;
  std::uint64_t warmup = 0;
  std::uint64_t batches = 0;
  Family interarrival_family = Family::automatic;
  Family service_family = Family::automatic;
  double realized_cv_arrival = 0.0;
  double realized_cv_service = 0.0;
};

/// Mean sojourn over `sim.trials` departures after a warm-up of trials/20
/// customers; the standard error comes from 50 batch means.
inline QueueEstimate simulate_backhaul_queue(const BackhaulQueue& queue, QueueFamilies families,
                                             const SimConfig& sim) {
  queue.validate();
  if (sim.trials < 50) throw DomainError("simulate_backhaul_queue: need at least 50 departures");
  QueueSimulator server(queue, families, substream(sim.seed, 0, detail::kQueueStream));

  QueueEstimate out;
  out.warmup = sim.trials / 20;
  out.batches = 50;
  out.interarrival_family = server.interarrival().family();
  out.service_family = server.service().family();
  out.realized_cv_arrival = server.interarrival().realized_cv();
  out.realized_cv_service = server.service().realized_cv();
  for (std::uint64_t i = 0; i < out.warmup; ++i) server.next_sojourn();

  const std::uint64_t per_batch = sim.trials / out.batches;
  std::vector<double> soj_means(out.batches), wait_means(out.batches);
  for (std::uint64_t b = 0; b < out.batches; ++b) {
    CompensatedSum soj, wait;
    for (std::uint64_t i = 0; i < per_batch; ++i) {
      soj += server.next_sojourn();
      wait += server.last_wait();
    }
    soj_means[b] = soj.value() / static_cast<double>(per_batch);
    wait_means[b] = wait.value() / static_cast<double>(per_batch);
  }
  const auto summarize = [&](const std::vector<double>& means) {
    CompensatedSum s;
    for (double m : means) s += m;
    const double mean = s.value() / static_cast<double>(means.size());
    CompensatedSum ss;
    for (double m : means) ss += (m - mean) * (m - mean);
    const double var = ss.value() / static_cast<double>(means.size() - 1);
    return EmpiricalEstimate{mean, std::sqrt(var / static_cast<double>(means.size())), per_batch * means.size()};
  };
  out.sojourn = summarize(soj_means);
  out.waiting = summarize(wait_means);
  return out;
}

/// Distribution of the number of active users sharing a cell.
enum class CellLoad {
  poisson,        // N ~ Poisson(eta xi / lambda)
  deterministic,  // N = eta xi / lambda
};

inline std::string_view to_string(CellLoad c) { return c == CellLoad::poisson ? "poisson" : "deterministic"; }

struct DelayModel {
  TrafficParams traffic;
  double lambda = 0.0;
  double goodput_bps = 0.0;
  BackhaulQueue queue;
  QueueFamilies families;
  DelayConstraint constraint;
  CellLoad cell_load = CellLoad::poisson;
};

struct TailEstimate {
  EmpiricalEstimate tail;          // Pr(D >= D_th)
  EmpiricalEstimate delay;         // sample mean of D
  double expected_delay = 0.0;     // analytic E[D]
  double markov_bound = 0.0;       // analytic E[D] / D_th
  double empirical_markov_bound = 0.0;  // sample mean / D_th
};

/// Draws D = N x_f / G, plus a simulated backhaul sojourn on a cache miss,
/// and compares the empirical tail at D_th with the Markov bound E[D]/D_th.
inline TailEstimate sample_total_delay(const DelayModel& model, double p_hit, const SimConfig& sim) {
  model.traffic.validate();
  model.constraint.validate();
  model.queue.validate();
  if (!(p_hit >= 0.0 && p_hit <= 1.0)) throw DomainError("sample_total_delay: p_hit must lie in [0, 1]");
  if (!(model.goodput_bps > 0.0)) throw DomainError("sample_total_delay: goodput must be > 0");

  const double mean_users = expected_users_per_bs(model.traffic.xi, model.traffic.eta, model.lambda);
  const double per_user = model.traffic.file_bits / model.goodput_bps;
  auto rng = substream(sim.seed, 0, detail::kDelayStream);
  QueueSimulator backhaul(model.queue, model.families, substream(sim.seed, 1, detail::kDelayStream));
  for (std::uint64_t i = 0; i < std::min<std::uint64_t>(sim.trials / 20, 100'000); ++i) backhaul.next_sojourn();
  std::poisson_distribution<std::uint64_t> users(mean_users);
  std::bernoulli_distribution miss(1.0 - p_hit);

  std::uint64_t exceed = 0;
  CompensatedSum sum, sum_sq;
  for (std::uint64_t i = 0; i < sim.trials; ++i) {
    const double n = model.cell_load == CellLoad::poisson ? static_cast<double>(users(rng)) : mean_users;
    double d = n * per_user;
    if (miss(rng)) d += backhaul.next_sojourn();
    if (d >= model.constraint.threshold_s) ++exceed;
    sum += d;
    sum_sq += d * d;
  }

  TailEstimate out;
  out.tail = detail::proportion_estimate(exceed, sim.trials);
  const double n = static_cast<double>(sim.trials);
  const double mean = sum.value() / n;
  const double var = sim.trials > 1 ? std::max(0.0, (sum_sq.value() - n * mean * mean) / (n - 1.0)) : 0.0;
  out.delay = {mean, std::sqrt(var / n), sim.trials};
  out.expected_delay = expected_total_delay(mean_users * per_user, expected_backhaul_delay(model.queue), p_hit);
  out.markov_bound = out.expected_delay / model.constraint.threshold_s;
  out.empirical_markov_bound = mean / model.constraint.threshold_s;
  return out;
}

}  // namespace cachint
