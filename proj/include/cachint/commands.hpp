#pragma once

// The four CLI subcommands as library functions returning CSV tables, so
// the emitted output can be tested without spawning the binary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cachint/csv.hpp"
#include "cachint/delay.hpp"
#include "cachint/errors.hpp"
#include "cachint/mc_sim.hpp"
#include "cachint/optimizer.hpp"
#include "cachint/parallel.hpp"
#include "cachint/radio.hpp"
#include "cachint/scenario.hpp"
#include "cachint/zipf.hpp"

namespace cachint {

enum class OptimizeMode { fixed_lambda, fixed_cache, joint };
enum class SweepAxis { nu, cache_size, lambda, bandwidth, files };

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int infeasible = 2;
inline constexpr int numerical = 3;
}  // namespace exit_code

inline std::string_view to_string(OptimizeMode m) {
  switch (m) {
    case OptimizeMode::fixed_lambda: return "fixed-lambda";
    case OptimizeMode::fixed_cache: return "fixed-cache";
    case OptimizeMode::joint: return "joint";
  }
  return "unknown";
}

inline std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::nu: return "nu";
    case SweepAxis::cache_size: return "S";
    case SweepAxis::lambda: return "lambda";
    case SweepAxis::bandwidth: return "W";
    case SweepAxis::files: return "F";
  }
  return "unknown";
}

inline std::optional<OptimizeMode> parse_mode(std::string_view s) {
  for (auto m : {OptimizeMode::fixed_lambda, OptimizeMode::fixed_cache, OptimizeMode::joint}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

inline std::optional<SweepAxis> parse_axis(std::string_view s) {
  for (auto a : {SweepAxis::nu, SweepAxis::cache_size, SweepAxis::lambda, SweepAxis::bandwidth, SweepAxis::files}) {
    if (s == to_string(a)) return a;
  }
  return std::nullopt;
}

struct CommandResult {
  CsvTable table;
  int exit_code = exit_code::ok;
};

namespace detail {

// Row keyed by column name, emitted in schema order; unset columns are blank.
class Row {
 public:
  void set(const std::string& key, double v) { values_[key] = csv_number(v); }
  void set(const std::string& key, std::uint64_t v) { values_[key] = csv_number(v); }
  void set(const std::string& key, std::uint32_t v) { values_[key] = csv_number(static_cast<std::uint64_t>(v)); }
  void set(const std::string& key, bool v) { values_[key] = v ? "true" : "false"; }
  void set(const std::string& key, std::string_view v) { values_[key] = std::string(v); }
  void set(const std::string& key, const char* v) { values_[key] = v; }

  std::string get(const std::string& key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? std::string() : it->second;
  }

  std::vector<std::string> emit(const std::vector<std::string>& schema) const {
    std::vector<std::string> out;
    out.reserve(schema.size());
    for (const auto& k : schema) out.push_back(get(k));
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
};

enum class Status { ok, infeasible, domain_error, unstable, numerical_error };

inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::ok: return "ok";
    case Status::infeasible: return "infeasible";
    case Status::domain_error: return "domain_error";
    case Status::unstable: return "unstable";
    case Status::numerical_error: return "numerical_error";
  }
  return "unknown";
}

// Runs fn(row); exceptions become a status and a detail message.
template <typename Fn>
Status guarded(Row& row, Fn&& fn) {
  Status status = Status::ok;
  try {
    fn(row);
  } catch (const InfeasibleError& e) {
    status = Status::infeasible;
    row.set("detail", e.diagnostics().empty() ? std::string(e.what()) : std::string(e.what()) + "; " + e.diagnostics());
  } catch (const InstabilityError& e) {
    status = Status::unstable;
    row.set("detail", e.what());
  } catch (const NumericalError& e) {
    status = Status::numerical_error;
    row.set("detail", e.what());
  } catch (const std::domain_error& e) {
    status = Status::domain_error;
    row.set("detail", e.what());
  }
  row.set("status", to_string(status));
  return status;
}

inline int exit_for(const std::vector<Status>& statuses) {
  bool any_ok = false;
  for (auto s : statuses) {
    if (s == Status::numerical_error) return exit_code::numerical;
    if (s == Status::ok) any_ok = true;
  }
  if (any_ok) return exit_code::ok;
  for (auto s : statuses) {
    if (s == Status::infeasible) return exit_code::infeasible;
  }
  return exit_code::usage;
}

inline const std::vector<std::string>& eval_schema() {
  static const std::vector<std::string> s = {
      "param_hash", "scenario", "status", "detail", "coverage_method", "beta", "p_c_integral", "p_c_closed_form",
      "p_c_interference_limited", "p_c", "goodput_bps", "users_per_bs", "e_d_fh", "rho", "e_w_mmm", "e_d_bh",
      "cache_size", "p_hit_exact", "p_hit_asymptotic", "p_hit_asymptotic_raw", "hit_model", "p_hit", "e_d_total",
      "delay_cap", "feasible", "slack", "requires_full_cache", "lambda_min", "constant_c"};
  return s;
}

inline std::vector<std::string> optimize_schema(OptimizeMode mode) {
  std::vector<std::string> s = {"param_hash", "scenario", "mode", "status", "detail", "nu", "files", "lambda", "W",
                                "cache_size", "goodput_bps", "e_d_fh", "e_d_bh", "delay_cap", "lambda_min", "constant_c"};
  std::vector<std::string> extra;
  switch (mode) {
    case OptimizeMode::fixed_lambda:
      extra = {"s_star", "s_star_files", "s_over_f", "clamped_to_catalog", "no_cache_needed", "p_hit_asymptotic_at_s_star",
               "p_hit_exact_at_s_star_files"};
      break;
    case OptimizeMode::fixed_cache:
      extra = {"hit_model", "p_hit", "lambda_star", "ue_per_bs", "cache_intensity"};
      break;
    case OptimizeMode::joint:
      extra = {"c1", "c2", "c3", "q_const", "v_const", "r_const", "monotonicity_condition", "r_star", "q_star",
               "boundary", "lambda_star", "t_star", "s_star", "s_star_files", "s_over_f", "ue_per_bs", "cache_intensity",
               "residual_main", "residual_bound", "duality_gap", "polished", "clamped_to_catalog", "literal_lambda",
               "literal_t", "literal_residual_main", "literal_residual_bound", "printed_dual_max", "oracle_lambda",
               "oracle_s", "oracle_objective", "oracle_gap", "oracle_objective_exact", "corrected_dual_gap",
               "printed_dual_gap"};
      break;
  }
  s.insert(s.end(), extra.begin(), extra.end());
  return s;
}

inline double hit_probability(const Scenario& s, double cache_size, double harmonic_f) {
  if (s.hit_model == HitModel::asymptotic) return hit_probability_asymptotic(s.catalog.nu, harmonic_f, cache_size).value;
  const auto size = static_cast<std::uint64_t>(std::llround(cache_size));
  return hit_probability_exact(s.catalog, {size});
}

inline Status optimize_row(const Scenario& s, OptimizeMode mode, const OracleGrid& grid, Row& row) {
  row.set("param_hash", parameter_hash(s));
  row.set("scenario", s.name);
  row.set("mode", to_string(mode));
  row.set("nu", s.catalog.nu);
  row.set("files", s.catalog.files);
  row.set("lambda", s.radio.lambda);
  row.set("W", s.radio.bandwidth_hz);
  row.set("cache_size", s.cache.size);
  return guarded(row, [&](Row& r) {
    s.radio.validate();
    s.queue.validate();
    if (s.cache.size > s.catalog.files) throw DomainError("cache_size exceeds files");
    const double g = s.goodput();
    const double fronthaul = expected_fronthaul_delay(s.traffic, s.radio.lambda, g);
    const double backhaul = expected_backhaul_delay(s.queue);
    const double harmonic_f = harmonic_total(s.catalog);
    const double c = constant_C(fronthaul, backhaul, s.constraint);
    r.set("goodput_bps", g);
    r.set("e_d_fh", fronthaul);
    r.set("e_d_bh", backhaul);
    r.set("delay_cap", markov_linearize(s.constraint));
    r.set("lambda_min", lambda_lower_bound(s.traffic, g, s.constraint));
    r.set("constant_c", c);
    const double files = static_cast<double>(s.catalog.files);

    switch (mode) {
      case OptimizeMode::fixed_lambda: {
        const CacheSolution sol = optimal_cache_fixed_lambda(c, s.catalog, harmonic_f);
        r.set("s_star", sol.size);
        r.set("s_star_files", sol.size_files);
        r.set("s_over_f", std::clamp(sol.size, 0.0, files) / files);
        r.set("clamped_to_catalog", sol.clamped_to_catalog);
        r.set("no_cache_needed", sol.no_cache_needed);
        if (!sol.no_cache_needed) {
          r.set("p_hit_asymptotic_at_s_star", hit_probability_asymptotic(s.catalog.nu, harmonic_f, sol.size).unclamped);
        }
        r.set("p_hit_exact_at_s_star_files", hit_probability_exact(s.catalog, {sol.size_files}));
        break;
      }
      case OptimizeMode::fixed_cache: {
        const double p_hit = hit_probability(s, static_cast<double>(s.cache.size), harmonic_f);
        r.set("hit_model", to_string(s.hit_model));
        r.set("p_hit", p_hit);
        const double lambda_star = optimal_lambda_fixed_cache(s.traffic, g, backhaul, p_hit, s.constraint);
        r.set("lambda_star", lambda_star);
        r.set("ue_per_bs", s.traffic.xi / lambda_star);
        r.set("cache_intensity", lambda_star * static_cast<double>(s.cache.size));
        break;
      }
      case OptimizeMode::joint: {
        const GPConstants k = gp_constants(s.catalog, s.traffic, g, backhaul, s.constraint);
        r.set("c1", k.c1);
        r.set("c2", k.c2);
        r.set("c3", k.c3);
        r.set("q_const", k.q_const);
        r.set("v_const", k.v_const);
        r.set("r_const", k.r_const);
        if (!(s.catalog.nu > 1.0)) {
          throw DomainError("joint mode needs nu > 1 (got " + csv_number(s.catalog.nu) + ")");
        }
        r.set("monotonicity_condition", monotonicity_condition(k, s.catalog.nu));
        const JointSolution sol = solve_joint(k, s.catalog.nu, s.catalog.files);
        r.set("r_star", sol.r_star);
        r.set("q_star", sol.q_star);
        r.set("boundary", to_string(sol.boundary));
        r.set("lambda_star", sol.lambda_star);
        r.set("t_star", sol.t_star);
        r.set("s_star", sol.s_star);
        r.set("s_star_files", sol.s_star_files);
        r.set("s_over_f", sol.s_star / files);
        r.set("ue_per_bs", s.traffic.xi / sol.lambda_star);
        r.set("cache_intensity", sol.cache_intensity);
        r.set("residual_main", sol.residual_main);
        r.set("residual_bound", sol.residual_bound);
        r.set("duality_gap", sol.duality_gap);
        r.set("polished", sol.polished);
        r.set("clamped_to_catalog", sol.clamped_to_catalog);
        r.set("literal_lambda", sol.literal_lambda);
        r.set("literal_t", sol.literal_t);
        r.set("literal_residual_main", sol.literal_residual_main);
        r.set("literal_residual_bound", sol.literal_residual_bound);

        double printed_max = 0.0;
        for (int i = 0; i <= 1000; ++i) {
          printed_max = std::max(printed_max, dual_objective(i / 1000.0, k, s.catalog.nu, DualForm::printed));
        }
        r.set("printed_dual_max", printed_max);

        const JointProblem problem{s.catalog, s.traffic, g, backhaul, s.constraint};
        const OracleResult oracle = brute_force_oracle(problem, HitModel::asymptotic, grid);
        if (oracle.feasible) {
          r.set("oracle_lambda", oracle.lambda);
          r.set("oracle_s", oracle.cache);
          r.set("oracle_objective", oracle.objective);
          r.set("oracle_gap", sol.cache_intensity / oracle.objective - 1.0);
          // The dual bounds min lambda t, so compare it against lambda (S + 1).
          const double oracle_t = oracle.lambda * (static_cast<double>(oracle.cache) + 1.0);
          r.set("corrected_dual_gap", sol.q_star / oracle_t - 1.0);
          r.set("printed_dual_gap", printed_max / oracle_t - 1.0);
        }
        const OracleResult exact = brute_force_oracle(problem, HitModel::exact, grid);
        if (exact.feasible) r.set("oracle_objective_exact", exact.objective);
        break;
      }
    }
  });
}

inline Scenario with_axis(Scenario s, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::nu: s.catalog.nu = value; break;
    case SweepAxis::cache_size: s.cache.size = static_cast<std::uint64_t>(std::llround(value)); break;
    case SweepAxis::lambda: s.radio.lambda = value; break;
    case SweepAxis::bandwidth: s.radio.bandwidth_hz = value; break;
    case SweepAxis::files: s.catalog.files = static_cast<std::uint64_t>(std::llround(value)); break;
  }
  return s;
}

}  // namespace detail

/// One row of every derived quantity at the scenario's operating point.
inline CommandResult cmd_eval(const Scenario& s) {
  detail::Row row;
  row.set("param_hash", parameter_hash(s));
  row.set("scenario", s.name);
  row.set("coverage_method", to_string(s.coverage_method));
  row.set("cache_size", s.cache.size);
  row.set("hit_model", to_string(s.hit_model));
  const auto status = detail::guarded(row, [&](detail::Row& r) {
    const CoverageResult integral = coverage_integral(s.radio);
    const CoverageResult closed = coverage_closed_form(s.radio);
    const double limited = coverage_interference_limited(s.radio.subchannels, closed.beta);
    const CoverageResult used = coverage(s.radio, s.coverage_method);
    r.set("beta", closed.beta);
    r.set("p_c_integral", integral.p_c);
    r.set("p_c_closed_form", closed.p_c);
    r.set("p_c_interference_limited", limited);
    r.set("p_c", used.p_c);
    const double g = goodput_from_coverage(used.p_c, s.radio.bandwidth_hz, s.radio.subchannels, s.radio.threshold);
    r.set("goodput_bps", g);
    r.set("users_per_bs", expected_users_per_bs(s.traffic.xi, s.traffic.eta, s.radio.lambda));
    const double fronthaul = expected_fronthaul_delay(s.traffic, s.radio.lambda, g);
    r.set("e_d_fh", fronthaul);
    r.set("rho", s.queue.utilization());
    r.set("e_w_mmm", mmm_waiting_time(s.queue));
    const double backhaul = expected_backhaul_delay(s.queue);
    r.set("e_d_bh", backhaul);
    const double harmonic_f = harmonic_total(s.catalog);
    r.set("p_hit_exact", hit_probability_exact(s.catalog, s.cache));
    if (s.catalog.nu != 1.0 && s.catalog.nu > 0.0) {
      const auto asym = hit_probability_asymptotic(s.catalog.nu, harmonic_f, static_cast<double>(s.cache.size));
      r.set("p_hit_asymptotic", asym.value);
      r.set("p_hit_asymptotic_raw", asym.unclamped);
    }
    const double p_hit = detail::hit_probability(s, static_cast<double>(s.cache.size), harmonic_f);
    r.set("p_hit", p_hit);
    r.set("e_d_total", expected_total_delay(fronthaul, backhaul, p_hit));
    r.set("delay_cap", markov_linearize(s.constraint));
    const Feasibility f = feasibility_check(fronthaul, s.constraint);
    r.set("feasible", f.feasible);
    r.set("slack", f.slack);
    r.set("requires_full_cache", f.requires_full_cache);
    r.set("lambda_min", lambda_lower_bound(s.traffic, g, s.constraint));
    r.set("constant_c", constant_C(fronthaul, backhaul, s.constraint));
  });
  CommandResult out;
  out.table.header = detail::eval_schema();
  out.table.rows.push_back(row.emit(out.table.header));
  out.exit_code = status == detail::Status::numerical_error ? exit_code::numerical
                  : status == detail::Status::ok           ? exit_code::ok
                                                           : exit_code::usage;
  return out;
}

inline CommandResult cmd_optimize(const Scenario& s, OptimizeMode mode, const OracleGrid& grid = {}) {
  detail::Row row;
  const auto status = detail::optimize_row(s, mode, grid, row);
  CommandResult out;
  out.table.header = detail::optimize_schema(mode);
  out.table.rows.push_back(row.emit(out.table.header));
  out.exit_code = detail::exit_for({status});
  return out;
}

struct SweepSpec {
  SweepAxis axis = SweepAxis::nu;
  double from = 0.0;
  double to = 0.0;
  int points = 10;
  bool log_scale = false;

  std::vector<double> values() const {
    if (points < 1) throw DomainError("sweep: points must be >= 1");
    if (log_scale && !(from > 0.0 && to > 0.0)) throw DomainError("sweep: log spacing needs positive bounds");
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
      const double f = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
      v[static_cast<std::size_t>(i)] = log_scale ? from * std::pow(to / from, f) : from + (to - from) * f;
    }
    if (points > 1) v.back() = to;
    return v;
  }
};

/// Default spacing per axis: linear for nu, logarithmic for the others.
inline bool default_log_scale(SweepAxis axis) { return axis != SweepAxis::nu; }

/// One optimize row per sweep value, in sweep order regardless of which
/// worker finished first. Points that fail keep their row with a status.
inline CommandResult cmd_sweep(const Scenario& base, const SweepSpec& spec, OptimizeMode mode,
                               const OracleGrid& grid = {}) {
  const auto values = spec.values();
  std::vector<detail::Row> rows(values.size());
  std::vector<detail::Status> statuses(values.size());
  parallel_for(values.size(), [&](std::size_t i) {
    const Scenario s = detail::with_axis(base, spec.axis, values[i]);
    rows[i].set("index", static_cast<std::uint64_t>(i));
    rows[i].set("axis", to_string(spec.axis));
    rows[i].set("value", values[i]);
    statuses[i] = detail::optimize_row(s, mode, grid, rows[i]);
  });
  CommandResult out;
  out.table.header = {"index", "axis", "value"};
  const auto schema = detail::optimize_schema(mode);
  out.table.header.insert(out.table.header.end(), schema.begin(), schema.end());
  for (const auto& r : rows) out.table.rows.push_back(r.emit(out.table.header));
  out.exit_code = detail::exit_for(statuses);
  return out;
}

struct SimulateOptions {
  SimConfig coverage;            // PPP trials
  std::uint64_t departures = 1'000'000;
  std::uint64_t delay_samples = 200'000;
};

/// Monte Carlo cross-checks of coverage, backhaul sojourn and the delay tail.
inline CommandResult cmd_simulate(const Scenario& s, const SimulateOptions& opt,
                                  std::vector<CoverageBlock>* raw_blocks = nullptr) {
  static const std::vector<std::string> schema = {
      "param_hash", "scenario", "experiment", "status", "detail", "seed", "n", "estimate", "std_error", "reference",
      "reference_kind", "z_score", "relative_error", "markov_bound", "empirical_markov_bound", "mean_delay",
      "expected_delay", "resampled", "window_radius"};
  CommandResult out;
  out.table.header = schema;
  std::vector<detail::Status> statuses;
  const std::string hash = parameter_hash(s);
  const auto base_row = [&](std::string_view experiment) {
    detail::Row r;
    r.set("param_hash", hash);
    r.set("scenario", s.name);
    r.set("experiment", experiment);
    r.set("seed", opt.coverage.seed);
    return r;
  };

  detail::Row cov = base_row("coverage");
  statuses.push_back(detail::guarded(cov, [&](detail::Row& r) {
    const CoverageEstimate est = simulate_coverage(s.radio, opt.coverage, raw_blocks);
    const double ref = coverage_integral(s.radio).p_c;
    r.set("n", est.estimate.n);
    r.set("estimate", est.estimate.mean);
    r.set("std_error", est.estimate.std_error);
    r.set("reference", ref);
    r.set("reference_kind", "coverage_integral");
    if (est.estimate.std_error > 0.0) r.set("z_score", (est.estimate.mean - ref) / est.estimate.std_error);
    r.set("relative_error", est.estimate.mean / ref - 1.0);
    r.set("resampled", est.resampled);
    r.set("window_radius", est.window_radius);
  }));
  out.table.rows.push_back(cov.emit(schema));

  detail::Row queue = base_row("backhaul_sojourn");
  statuses.push_back(detail::guarded(queue, [&](detail::Row& r) {
    SimConfig qs = opt.coverage;
    qs.trials = opt.departures;
    const QueueEstimate est = simulate_backhaul_queue(s.queue, {}, qs);
    const double ref = expected_backhaul_delay(s.queue);
    r.set("n", est.sojourn.n);
    r.set("estimate", est.sojourn.mean);
    r.set("std_error", est.sojourn.std_error);
    r.set("reference", ref);
    r.set("reference_kind", "two_moment_approximation");
    if (est.sojourn.std_error > 0.0) r.set("z_score", (est.sojourn.mean - ref) / est.sojourn.std_error);
    r.set("relative_error", ref / est.sojourn.mean - 1.0);
  }));
  out.table.rows.push_back(queue.emit(schema));

  detail::Row tail = base_row("delay_tail");
  statuses.push_back(detail::guarded(tail, [&](detail::Row& r) {
    const double g = s.goodput();
    const double p_hit = detail::hit_probability(s, static_cast<double>(s.cache.size), harmonic_total(s.catalog));
    SimConfig ts = opt.coverage;
    ts.trials = opt.delay_samples;
    const DelayModel model{s.traffic, s.radio.lambda, g, s.queue, {}, s.constraint, s.cell_load};
    const TailEstimate est = sample_total_delay(model, p_hit, ts);
    r.set("n", est.tail.n);
    r.set("estimate", est.tail.mean);
    r.set("std_error", est.tail.std_error);
    r.set("reference", est.markov_bound);
    r.set("reference_kind", "markov_bound");
    r.set("markov_bound", est.markov_bound);
    r.set("empirical_markov_bound", est.empirical_markov_bound);
    r.set("mean_delay", est.delay.mean);
    r.set("expected_delay", est.expected_delay);
  }));
  out.table.rows.push_back(tail.emit(schema));

  out.exit_code = detail::exit_for(statuses);
  return out;
}

/// Per-block raw coverage counts.
inline CsvTable coverage_blocks_table(const std::vector<CoverageBlock>& blocks) {
  CsvTable t;
  t.header = {"block", "trials", "covered", "resampled"};
  for (const auto& b : blocks) {
    t.rows.push_back({csv_number(b.index), csv_number(b.trials), csv_number(b.covered), csv_number(b.resampled)});
  }
  return t;
}

}  // namespace cachint
