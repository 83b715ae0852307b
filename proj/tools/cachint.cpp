// cachint: evaluate, optimize, sweep and simulate cache-enabled cellular
// network scenarios. Results go to stdout (or --out) as CSV.

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "cachint/cachint.hpp"

namespace {

constexpr const char* kColumns = R"(Columns
  every table   param_hash (FNV-1a of the resolved canonical scenario), scenario, status, detail
  status        ok | infeasible | domain_error | unstable | numerical_error
  eval          beta, p_c_integral, p_c_closed_form, p_c_interference_limited, p_c, goodput_bps,
                users_per_bs, e_d_fh, rho, e_w_mmm, e_d_bh, p_hit_exact, p_hit_asymptotic(_raw),
                p_hit, e_d_total, delay_cap, feasible, slack, requires_full_cache, lambda_min,
                constant_c
  optimize      nu, files, lambda, W, cache_size, goodput_bps, e_d_fh, e_d_bh, delay_cap,
                lambda_min, constant_c, then per mode:
    fixed-lambda  s_star, s_star_files, s_over_f, clamped_to_catalog, no_cache_needed,
                  p_hit_asymptotic_at_s_star, p_hit_exact_at_s_star_files
    fixed-cache   hit_model, p_hit, lambda_star, ue_per_bs, cache_intensity
    joint         c1..c3, q_const, v_const, r_const, monotonicity_condition, r_star, q_star,
                  boundary, lambda_star, t_star, s_star, s_star_files, s_over_f, ue_per_bs,
                  cache_intensity, residual_main, residual_bound, duality_gap, polished,
                  clamped_to_catalog, literal_* (verbatim recovery), printed_dual_max,
                  oracle_lambda, oracle_s, oracle_objective, oracle_gap,
                  oracle_objective_exact, corrected_dual_gap, printed_dual_gap
  sweep         index, axis, value, then the optimize columns of --mode
  simulate      experiment (coverage | backhaul_sojourn | delay_tail), seed, n, estimate,
                std_error, reference, reference_kind, z_score, relative_error, markov_bound,
                empirical_markov_bound, mean_delay, expected_delay, resampled, window_radius
  --raw FILE    block, trials, covered, resampled (coverage trials per RNG block)

Exit codes: 0 success, 1 usage error, 2 infeasible everywhere, 3 numerical failure.
Environment: CACHINT_THREADS caps the worker count.)";

int emit(const cachint::CsvTable& table, const std::string& out) {
  if (out.empty() || out == "-") {
    table.write(std::cout);
    return 0;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) {
    std::cerr << "cachint: cannot open " << out << " for writing\n";
    return cachint::exit_code::usage;
  }
  table.write(f);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cache-enabled cellular network analysis"};
  app.footer(kColumns);
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out;
  std::string mode_name = "joint";
  std::string axis_name;
  double from = 0.0, to = 0.0;
  int points = 10;
  std::optional<bool> log_spacing;
  std::uint64_t seed = 1;
  std::uint64_t trials = 100'000;
  std::uint64_t departures = 1'000'000;
  std::uint64_t delay_samples = 200'000;
  std::string raw_path;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", scenario_path, "Scenario file, or preset:NAME (" +
                                                     std::string("paper-baseline, feasible-demo)"))
        ->required();
    cmd->add_option("--out", out, "Output CSV path (default stdout)");
  };

  auto* eval = app.add_subcommand("eval", "Evaluate coverage, goodput, delays and feasibility");
  add_common(eval);

  auto* optimize = app.add_subcommand("optimize", "Optimal cache size and/or base-station intensity");
  add_common(optimize);
  optimize->add_option("--mode", mode_name, "fixed-lambda | fixed-cache | joint")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Optimize over a range of one parameter");
  add_common(sweep);
  sweep->add_option("--mode", mode_name, "fixed-lambda | fixed-cache | joint")->capture_default_str();
  sweep->add_option("--axis", axis_name, "nu | S | lambda | W | F")->required();
  sweep->add_option("--from", from, "First value (SI units)")->required();
  sweep->add_option("--to", to, "Last value (SI units)")->required();
  sweep->add_option("--points", points, "Number of points")->capture_default_str();
  sweep->add_flag("--log,!--linear", log_spacing, "Log spacing (default for all axes but nu)");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo checks of coverage, backhaul and delay tail");
  add_common(simulate);
  simulate->add_option("--seed", seed, "RNG seed")->capture_default_str();
  simulate->add_option("--trials", trials, "Coverage trials")->capture_default_str();
  simulate->add_option("--departures", departures, "Backhaul queue departures")->capture_default_str();
  simulate->add_option("--delay-samples", delay_samples, "Total-delay samples")->capture_default_str();
  simulate->add_option("--raw", raw_path, "Also write per-block coverage counts to this CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cachint::exit_code::usage;
  }

  try {
    const cachint::Scenario scenario = cachint::load_scenario(scenario_path);
    const auto mode = cachint::parse_mode(mode_name);
    if (!mode) {
      std::cerr << "cachint: unknown mode '" << mode_name << "'\n";
      return cachint::exit_code::usage;
    }

    cachint::CommandResult result;
    if (*eval) {
      result = cachint::cmd_eval(scenario);
    } else if (*optimize) {
      result = cachint::cmd_optimize(scenario, *mode);
    } else if (*sweep) {
      const auto axis = cachint::parse_axis(axis_name);
      if (!axis) {
        std::cerr << "cachint: unknown axis '" << axis_name << "'\n";
        return cachint::exit_code::usage;
      }
      cachint::SweepSpec spec{*axis, from, to, points, log_spacing.value_or(cachint::default_log_scale(*axis))};
      result = cachint::cmd_sweep(scenario, spec, *mode);
    } else {
      cachint::SimulateOptions opt;
      opt.coverage.seed = seed;
      opt.coverage.trials = trials;
      opt.departures = departures;
      opt.delay_samples = delay_samples;
      std::vector<cachint::CoverageBlock> blocks;
      result = cachint::cmd_simulate(scenario, opt, raw_path.empty() ? nullptr : &blocks);
      if (!raw_path.empty()) {
        if (const int rc = emit(cachint::coverage_blocks_table(blocks), raw_path)) return rc;
      }
    }
    if (const int rc = emit(result.table, out)) return rc;
    return result.exit_code;
  } catch (const cachint::ConfigError& e) {
    for (const auto& issue : e.issues()) std::cerr << "cachint: " << issue << '\n';
    return cachint::exit_code::usage;
  } catch (const cachint::NumericalError& e) {
    std::cerr << "cachint: numerical failure: " << e.what() << '\n';
    return cachint::exit_code::numerical;
  } catch (const std::domain_error& e) {
    std::cerr << "cachint: " << e.what() << '\n';
    return cachint::exit_code::usage;
  } catch (const std::exception& e) {
    std::cerr << "cachint: " << e.what() << '\n';
    return cachint::exit_code::numerical;
  }
}
