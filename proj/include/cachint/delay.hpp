#pragma once

// Expected fronthaul, backhaul and total file-delivery delay, plus the
// fronthaul feasibility condition on the delay cap.

#include <cmath>
#include <cstdint>
#include <string>

#include "cachint/errors.hpp"

namespace cachint {

struct TrafficParams {
  double file_bits = 0.0;  // x_f
  double eta = 0.0;        // UE activity probability
  double xi = 0.0;         // UE intensity, per m^2

  void validate() const {
    if (!(file_bits > 0.0) || !std::isfinite(file_bits)) throw DomainError("TrafficParams: file size must be > 0");
    if (!(eta > 0.0 && eta < 1.0)) throw DomainError("TrafficParams: eta must lie in (0, 1)");
    if (!(xi > 0.0) || !std::isfinite(xi)) throw DomainError("TrafficParams: xi must be > 0");
  }
};

/// Cloud server seen by base stations on a cache miss, a G/G/m queue.
///
/// Service rate is mu = m / tau and utilization rho = phi / (m mu).
struct BackhaulQueue {
  double arrival_rate = 0.0;  // phi, requests/s
  double service_time = 0.0;  // tau, s
  std::uint32_t servers = 1;  // m
  double cv_arrival = 1.0;    // c_a
  double cv_service = 1.0;    // c_s

  double service_rate() const { return static_cast<double>(servers) / service_time; }
  double utilization() const { return arrival_rate / (static_cast<double>(servers) * service_rate()); }

  void validate() const {
    if (!(arrival_rate > 0.0) || !std::isfinite(arrival_rate)) throw DomainError("BackhaulQueue: arrival rate must be > 0");
    if (!(service_time > 0.0) || !std::isfinite(service_time)) throw DomainError("BackhaulQueue: service time must be > 0");
    if (servers < 1) throw DomainError("BackhaulQueue: server count must be >= 1");
    if (!(cv_arrival >= 0.0) || !(cv_service >= 0.0)) {
      throw DomainError("BackhaulQueue: coefficients of variation must be >= 0");
    }
    const double rho = utilization();
    if (!(rho < 1.0)) {
      throw InstabilityError("BackhaulQueue: utilization rho = " + std::to_string(rho) + " must be < 1");
    }
  }
};

/// Pr(D >= d_th) <= gamma.
struct DelayConstraint {
  double threshold_s = 0.0;  // D_th
  double gamma = 0.0;

  void validate() const {
    if (!(threshold_s > 0.0) || !std::isfinite(threshold_s)) throw DomainError("DelayConstraint: D_th must be > 0");
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("DelayConstraint: gamma must lie in (0, 1)");
  }

  /// Expected-delay cap gamma * D_th obtained from Markov's inequality.
  double expected_delay_cap() const { return gamma * threshold_s; }
};

struct DelayBreakdown {
  double fronthaul = 0.0;
  double backhaul = 0.0;
  double total = 0.0;
  double p_hit = 0.0;
};

/// E[N] = eta xi / lambda, mean active users sharing a cell.
inline double expected_users_per_bs(double xi, double eta, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("expected_users_per_bs: lambda must be > 0");
  if (!(xi > 0.0) || !(eta > 0.0)) throw DomainError("expected_users_per_bs: xi and eta must be > 0");
  return eta * xi / lambda;
}

inline double expected_fronthaul_delay(const TrafficParams& traffic, double lambda, double goodput_bps) {
  traffic.validate();
  if (!(goodput_bps > 0.0)) throw DomainError("expected_fronthaul_delay: goodput must be > 0");
  return expected_users_per_bs(traffic.xi, traffic.eta, lambda) * traffic.file_bits / goodput_bps;
}

/// Waiting-time approximation for M/M/m: tau rho^{sqrt(2(m+1)) - 1} / (m (1 - rho)).
inline double mmm_waiting_time(const BackhaulQueue& queue) {
  queue.validate();
  const double rho = queue.utilization();
  const double m = static_cast<double>(queue.servers);
  const double expo = queue.servers == 1 ? 1.0 : std::sqrt(2.0 * (m + 1.0)) - 1.0;
  return queue.service_time * std::pow(rho, expo) / (m * (1.0 - rho));
}

/// Two-moment G/G/m sojourn approximation ((c_a^2 + c_s^2)/2) E[W(M/M/m)] + tau.
inline double expected_backhaul_delay(const BackhaulQueue& queue) {
  const double w = mmm_waiting_time(queue);
  const double variability =
      0.5 * (queue.cv_arrival * queue.cv_arrival + queue.cv_service * queue.cv_service);
  return variability * w + queue.service_time;
}

/// E[D] = E[D_fh] + E[D_bh] (1 - P_hit).
inline double expected_total_delay(double fronthaul, double backhaul, double p_hit) {
  if (!(p_hit >= 0.0 && p_hit <= 1.0)) throw DomainError("expected_total_delay: p_hit must lie in [0, 1]");
  return fronthaul + backhaul * (1.0 - p_hit);
}

inline DelayBreakdown delay_breakdown(double fronthaul, double backhaul, double p_hit) {
  return {fronthaul, backhaul, expected_total_delay(fronthaul, backhaul, p_hit), p_hit};
}

struct Feasibility {
  bool feasible = false;
  double slack = 0.0;               // gamma D_th - E[D_fh]
  bool requires_full_cache = false;  // slack is zero: only S = F meets the cap

  std::string describe() const {
    if (!feasible) {
      return "infeasible: fronthaul delay exceeds gamma*D_th by " + std::to_string(-slack) + " s";
    }
    if (requires_full_cache) return "feasible only with the full catalog cached (S = F)";
    return "feasible with slack " + std::to_string(slack) + " s";
  }
};

/// E[D_fh] <= gamma D_th is sufficient for some S <= F to meet the cap.
inline Feasibility feasibility_check(double fronthaul, const DelayConstraint& constraint) {
  constraint.validate();
  const double cap = constraint.expected_delay_cap();
  const double slack = cap - fronthaul;
  Feasibility out;
  out.feasible = fronthaul <= cap;
  out.slack = slack;
  out.requires_full_cache = out.feasible && slack <= 1e-12 * cap;
  return out;
}

/// Smallest lambda meeting E[D_fh] <= gamma D_th: eta xi x_f / (gamma D_th G).
inline double lambda_lower_bound(const TrafficParams& traffic, double goodput_bps,
                                 const DelayConstraint& constraint) {
  traffic.validate();
  constraint.validate();
  if (!(goodput_bps > 0.0)) throw DomainError("lambda_lower_bound: goodput must be > 0");
  return traffic.eta * traffic.xi * traffic.file_bits / (constraint.expected_delay_cap() * goodput_bps);
}

}  // namespace cachint
