#pragma once

// Cache-intensity (lambda * S) minimization under the Markov-linearized delay
// cap: single-variable closed forms, the degree-of-difficulty-one geometric
// program solved through its dual, and a brute-force grid oracle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cachint/delay.hpp"
#include "cachint/errors.hpp"
#include "cachint/golden_section.hpp"
#include "cachint/numeric.hpp"
#include "cachint/parallel.hpp"
#include "cachint/zipf.hpp"

namespace cachint {

/// E[D] <= gamma D_th replaces Pr(D >= D_th) <= gamma.
inline double markov_linearize(const DelayConstraint& constraint) {
  constraint.validate();
  return constraint.expected_delay_cap();
}

/// C = 1 - (gamma D_th - E[D_fh]) / E[D_bh]; the cap holds iff P_hit(S) >= C.
inline double constant_C(double fronthaul, double backhaul, const DelayConstraint& constraint) {
  if (!(backhaul > 0.0)) throw DomainError("constant_C: backhaul delay must be > 0");
  return 1.0 - (markov_linearize(constraint) - fronthaul) / backhaul;
}

struct CacheSolution {
  double size = 0.0;             // real-valued S* before rounding
  std::uint64_t size_files = 0;  // ceil(S*), clamped to [0, F]
  bool clamped_to_catalog = false;
  bool no_cache_needed = false;  // C <= 0
};

/// Smallest S with asymptotic P_hit(S) = C:
///   S* = [(nu - 1)(zeta(nu) - C H_{F,nu})]^{1/(1-nu)} - 1.
inline CacheSolution optimal_cache_fixed_lambda(double c, const ZipfCatalog& catalog, double harmonic_f) {
  catalog.validate();
  const double nu = catalog.nu;
  if (nu == 1.0) throw PoleError("optimal_cache_fixed_lambda: nu = 1 is not supported");
  if (c > 1.0) {
    std::ostringstream diag;
    diag << "C = " << c << " > 1: E[D_fh] > gamma*D_th at this lambda, so no cache size meets the cap";
    throw InfeasibleError("optimal_cache_fixed_lambda: infeasible base-station intensity", diag.str());
  }
  CacheSolution out;
  if (c <= 0.0) {
    out.no_cache_needed = true;
    return out;
  }
  const double base = (nu - 1.0) * (riemann_zeta(nu) - c * harmonic_f);
  if (!(base > 0.0)) {
    std::ostringstream diag;
    diag << "(nu-1)(zeta(nu) - C H_F) = " << base << " <= 0 for nu = " << nu << ", C = " << c;
    throw DomainError("optimal_cache_fixed_lambda: negative base with fractional exponent; " + diag.str());
  }
  const double s = std::pow(base, 1.0 / (1.0 - nu)) - 1.0;
  const double files = static_cast<double>(catalog.files);
  out.size = s;
  if (s <= 0.0) {
    out.size_files = 0;
  } else if (s >= files) {
    out.size_files = catalog.files;
    out.clamped_to_catalog = s > files;
  } else {
    out.size_files = static_cast<std::uint64_t>(std::ceil(s));
  }
  return out;
}

inline CacheSolution optimal_cache_fixed_lambda(double c, const ZipfCatalog& catalog) {
  return optimal_cache_fixed_lambda(c, catalog, harmonic_total(catalog));
}

/// lambda* = eta xi x_f / (G [gamma D_th - E[D_bh](1 - P_hit(S))]).
inline double optimal_lambda_fixed_cache(const TrafficParams& traffic, double goodput_bps, double backhaul,
                                         double p_hit, const DelayConstraint& constraint) {
  traffic.validate();
  if (!(goodput_bps > 0.0)) throw DomainError("optimal_lambda_fixed_cache: goodput must be > 0");
  if (!(p_hit >= 0.0 && p_hit <= 1.0)) throw DomainError("optimal_lambda_fixed_cache: p_hit must lie in [0, 1]");
  const double cap = markov_linearize(constraint);
  const double margin = cap - backhaul * (1.0 - p_hit);
  if (!(margin > 0.0)) {
    std::ostringstream diag;
    diag << "P_hit(S) = " << p_hit << " must exceed 1 - gamma*D_th/E[D_bh] = " << 1.0 - cap / backhaul;
    throw InfeasibleError("optimal_lambda_fixed_cache: hit probability too low for the delay cap", diag.str());
  }
  return traffic.eta * traffic.xi * traffic.file_bits / (goodput_bps * margin);
}

/// Everything the joint problem needs besides the grid.
struct JointProblem {
  ZipfCatalog catalog;
  TrafficParams traffic;
  double goodput_bps = 0.0;
  double backhaul_delay = 0.0;  // E[D_bh]
  DelayConstraint constraint;
};

/// E[D] = c1 + c2/lambda + c3 (S+1)^{1-nu}, normalized into
/// q/lambda + v t^{1-nu} <= 1 and r/lambda <= 1 with t = S + 1.
struct GPConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double q_const = 0.0;
  double v_const = 0.0;
  double r_const = 0.0;
  double nu = 0.0;
  double harmonic_f = 0.0;
};

inline GPConstants gp_constants(const ZipfCatalog& catalog, const TrafficParams& traffic, double goodput_bps,
                                double backhaul, const DelayConstraint& constraint) {
  catalog.validate();
  traffic.validate();
  const double nu = catalog.nu;
  if (nu == 1.0) throw PoleError("gp_constants: nu = 1 is not supported");
  if (!(goodput_bps > 0.0)) throw DomainError("gp_constants: goodput must be > 0");
  if (!(backhaul > 0.0)) throw DomainError("gp_constants: backhaul delay must be > 0");
  const double cap = markov_linearize(constraint);

  GPConstants k;
  k.nu = nu;
  k.harmonic_f = harmonic_total(catalog);
  k.c1 = backhaul * (1.0 - riemann_zeta(nu) / k.harmonic_f);
  k.c2 = traffic.eta * traffic.xi * traffic.file_bits / goodput_bps;
  k.c3 = backhaul / ((nu - 1.0) * k.harmonic_f);
  const double room = cap - k.c1;
  if (!(room > 0.0)) {
    std::ostringstream diag;
    diag << "gamma*D_th = " << cap << " <= C1 = " << k.c1;
    throw InfeasibleError("gp_constants: delay cap below the irreducible backhaul offset", diag.str());
  }
  k.q_const = k.c2 / room;
  k.v_const = k.c3 / room;
  k.r_const = k.c2 / cap;
  return k;
}

inline GPConstants gp_constants(const JointProblem& p) {
  return gp_constants(p.catalog, p.traffic, p.goodput_bps, p.backhaul_delay, p.constraint);
}

enum class DualForm {
  corrected,  // derived from the dual with delta = (1, r, 1/(nu-1), 1 - r)
  printed,    // as typeset in the source, kept for comparison runs
};

/// log of the one-variable dual function q(r).
inline double log_dual_objective(double r, const GPConstants& k, double nu,
                                 DualForm form = DualForm::corrected) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("dual_objective: r must lie in [0, 1]");
  const double inv = 1.0 / (nu - 1.0);
  const auto xlogy = [](double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); };
  double out = xlogy(r, k.q_const / r) + xlogy(r + inv, r + inv);
  if (form == DualForm::corrected) {
    out += xlogy(1.0 - r, k.r_const) + inv * std::log(k.v_const * (nu - 1.0));
  } else {
    out += (nu - 1.0) * std::log(k.v_const / (nu - 1.0)) + xlogy(1.0 - r, 1.0 - r);
  }
  return out;
}

/// q(r) = (Q/r)^r R^{1-r} (V(nu-1))^{1/(nu-1)} (r + 1/(nu-1))^{r + 1/(nu-1)}.
inline double dual_objective(double r, const GPConstants& k, double nu, DualForm form = DualForm::corrected) {
  if (!(nu > 1.0)) throw DomainError("dual_objective: nu must be > 1");
  if (!(k.q_const > 0.0 && k.v_const > 0.0 && k.r_const > 0.0)) {
    throw DomainError("dual_objective: Q, V, R must be > 0");
  }
  return std::exp(log_dual_objective(r, k, nu, form));
}

/// d log q / dr = log(Q/R) + log(1 + 1/(r (nu - 1))).
inline double dual_log_derivative(double r, const GPConstants& k, double nu) {
  return std::log(k.q_const / k.r_const) + std::log1p(1.0 / (r * (nu - 1.0)));
}

/// log(nu Q / (R (nu - 1))): positive means q increases all the way to r = 1.
inline double monotonicity_condition(const GPConstants& k, double nu) {
  return std::log(nu * k.q_const / (k.r_const * (nu - 1.0)));
}

struct BoundarySolution {
  double r = 1.0;
  double q = 0.0;
};

inline std::optional<BoundarySolution> monotonicity_shortcut(const GPConstants& k, double nu) {
  if (!(nu > 1.0)) throw DomainError("monotonicity_shortcut: nu must be > 1");
  if (monotonicity_condition(k, nu) > 0.0) return BoundarySolution{1.0, dual_objective(1.0, k, nu)};
  return std::nullopt;
}

enum class JointBoundary { interior, r_equals_1 };

inline std::string_view to_string(JointBoundary b) {
  return b == JointBoundary::interior ? "interior" : "r_equals_1";
}

struct JointSolution {
  double lambda_star = 0.0;
  double t_star = 0.0;
  double s_star = 0.0;             // t* - 1 after clamping to [0, F]
  std::uint64_t s_star_files = 0;  // ceil(s_star)
  double q_star = 0.0;
  double r_star = 0.0;
  double cache_intensity = 0.0;    // lambda* s_star
  JointBoundary boundary = JointBoundary::interior;
  bool clamped_to_catalog = false;
  bool polished = false;           // literal recovery was rejected

  double residual_main = 0.0;      // Q/lambda + V t^{1-nu}
  double residual_bound = 0.0;     // R/lambda
  double duality_gap = 0.0;        // lambda t / q - 1

  // Recovery taken verbatim from lambda = (Q+R)/q, t = (V(nu-1)/q)^{1/(nu-1)}.
  double literal_lambda = 0.0;
  double literal_t = 0.0;
  double literal_residual_main = 0.0;
  double literal_residual_bound = 0.0;
};

namespace detail {

inline bool residuals_ok(double main, double bound) {
  return main >= 1.0 - 1e-6 && main <= 1.0 + 1e-9 && bound <= 1.0 + 1e-9;
}

}  // namespace detail

/// Maximizes the dual over r in [0, 1] (closed-form boundary when the
/// derivative at r = 1 is positive, golden-section on log q otherwise) and
/// recovers the primal (lambda*, t*).
///
/// The literal recovery relations are evaluated and reported. When their
/// residuals are off, the primal is recovered from the standard GP
/// relations instead: lambda t = q, Q/lambda = delta_2/(delta_2+delta_3) and,
/// for delta_4 > 0, R/lambda = 1. Finally t is held and lambda re-solved so
/// the delay constraint is tight (and lambda >= R).
inline JointSolution solve_joint(const GPConstants& k, double nu, std::uint64_t files) {
  if (!(nu > 1.0)) {
    throw DomainError("solve_joint: unsupported regime, the joint solution needs nu > 1 for t* > 0");
  }
  if (!(k.q_const > 0.0 && k.v_const > 0.0 && k.r_const > 0.0)) {
    throw InfeasibleError("solve_joint: Q, V, R must all be > 0");
  }
  const double inv = 1.0 / (nu - 1.0);
  JointSolution sol;

  if (auto boundary = monotonicity_shortcut(k, nu)) {
    sol.r_star = boundary->r;
    sol.q_star = boundary->q;
    sol.boundary = JointBoundary::r_equals_1;
  } else {
    const auto best = golden_section_maximize(
        [&](double r) { return log_dual_objective(r, k, nu); }, 1e-9, 1.0 - 1e-9, 1e-10);
    sol.r_star = best.x;
    sol.q_star = std::exp(best.fx);
    sol.boundary = JointBoundary::interior;
  }

  const auto residual_main = [&](double lambda, double t) {
    return k.q_const / lambda + k.v_const * std::pow(t, 1.0 - nu);
  };

  sol.literal_lambda = (k.q_const + k.r_const) / sol.q_star;
  sol.literal_t = std::pow(k.v_const * (nu - 1.0) / sol.q_star, inv);
  sol.literal_residual_main = residual_main(sol.literal_lambda, sol.literal_t);
  sol.literal_residual_bound = k.r_const / sol.literal_lambda;

  double lambda = sol.literal_lambda;
  double t = sol.literal_t;
  const bool literal_ok = detail::residuals_ok(sol.literal_residual_main, sol.literal_residual_bound) &&
                          std::abs(lambda * t / sol.q_star - 1.0) < 1e-6;
  if (!literal_ok) {
    sol.polished = true;
    lambda = k.q_const * (sol.r_star + inv) / sol.r_star;
    if (sol.boundary == JointBoundary::interior) lambda = std::max(lambda, k.r_const);
    // Make the main constraint tight at this lambda. Going the other way (t = q/lambda, then
    // lambda from t) amplifies the dual's error by 1/(1 - V t^{1-nu}) when Q/lambda is small.
    const double slack = 1.0 - k.q_const / lambda;
    t = slack > 0.0 ? std::pow(k.v_const / slack, inv) : sol.q_star / lambda;
  }

  const double files_d = static_cast<double>(files);
  bool raised = false;
  if (t - 1.0 > files_d) {
    t = files_d + 1.0;
    sol.clamped_to_catalog = true;
  } else if (t < 1.0) {
    t = 1.0;
    raised = true;
  }
  if (sol.clamped_to_catalog || raised || (sol.polished && !(k.q_const / lambda < 1.0))) {
    const double room = 1.0 - k.v_const * std::pow(t, 1.0 - nu);
    if (!(room > 0.0)) {
      throw InfeasibleError("solve_joint: no base-station intensity meets the cap at the recovered cache size");
    }
    lambda = std::max(k.q_const / room, k.r_const);
  }

  sol.lambda_star = lambda;
  sol.t_star = t;
  sol.s_star = t - 1.0;
  sol.s_star_files = static_cast<std::uint64_t>(std::ceil(sol.s_star - 1e-9));
  sol.cache_intensity = lambda * sol.s_star;
  sol.residual_main = residual_main(lambda, t);
  sol.residual_bound = k.r_const / lambda;
  sol.duality_gap = lambda * t / sol.q_star - 1.0;
  if (!std::isfinite(sol.lambda_star) || !std::isfinite(sol.t_star)) {
    throw NumericalError("solve_joint: non-finite primal recovery");
  }
  return sol;
}

enum class HitModel { exact, asymptotic };

inline std::string_view to_string(HitModel m) { return m == HitModel::exact ? "exact" : "asymptotic"; }

struct OracleGrid {
  int lambda_points = 400;
  double lambda_span = 1e3;                     // lambda_max / lambda_min
  std::uint64_t max_cache_points = 2'000'000;   // every integer S while F fits, strided beyond
  int zoom_points = 200;
  int zoom_cells = 2;                           // half-width of the zoom window, in coarse cells
};

struct OracleResult {
  bool feasible = false;
  double lambda = 0.0;
  std::uint64_t cache = 0;
  double objective = std::numeric_limits<double>::infinity();  // lambda * S
  double residual = 0.0;  // (E[D] - gamma D_th) / (gamma D_th), <= 0 when feasible
  std::uint64_t cache_stride = 1;
  std::string diagnosis;
};

namespace detail {

inline std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double step = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  out.back() = hi;
  return out;
}

// Cache sizes lo, lo + stride, ..., capped at hi (always included).
struct Lattice {
  std::uint64_t lo = 1;
  std::uint64_t hi = 1;
  std::uint64_t stride = 1;

  std::size_t size() const { return static_cast<std::size_t>((hi - lo + stride - 1) / stride + 1); }
  std::uint64_t at(std::size_t j) const { return std::min(hi, lo + static_cast<std::uint64_t>(j) * stride); }
};

inline Lattice make_lattice(std::uint64_t lo, std::uint64_t hi, std::uint64_t max_points) {
  const std::uint64_t count = hi - lo + 1;
  const std::uint64_t stride = std::max<std::uint64_t>(1, (count + max_points - 1) / max_points);
  return {lo, hi, stride};
}

// Hit probability at every lattice point, nondecreasing in the index.
inline std::vector<double> hit_table(const ZipfCatalog& catalog, double harmonic_f, const Lattice& lat,
                                     HitModel model) {
  std::vector<double> out(lat.size());
  if (model == HitModel::asymptotic) {
    for (std::size_t j = 0; j < out.size(); ++j) {
      out[j] = hit_probability_asymptotic(catalog.nu, harmonic_f, static_cast<double>(lat.at(j))).value;
    }
    return out;
  }
  CompensatedSum acc;
  acc += harmonic_exact(lat.lo - 1, catalog.nu);
  std::uint64_t n = lat.lo - 1;
  for (std::size_t j = 0; j < out.size(); ++j) {
    const std::uint64_t s = lat.at(j);
    while (n < s) {
      ++n;
      acc += std::pow(static_cast<double>(n), -catalog.nu);
    }
    out[j] = s == catalog.files ? 1.0 : std::min(1.0, acc.value() / harmonic_f);
  }
  return out;
}

struct GridBest {
  bool found = false;
  double lambda = 0.0;
  std::uint64_t cache = 0;
  std::size_t li = 0;
  double objective = std::numeric_limits<double>::infinity();
};

// Deterministic argmin: objective, then lambda, then S.
inline bool better(const GridBest& a, const GridBest& b) {
  if (!a.found) return false;
  if (!b.found) return true;
  if (a.objective != b.objective) return a.objective < b.objective;
  if (a.lambda != b.lambda) return a.lambda < b.lambda;
  return a.cache < b.cache;
}

}  // namespace detail

/// Exhaustive search of min lambda*S subject to E[D] <= gamma D_th, S <= F
/// over a log-spaced lambda grid on [lambda_min, span*lambda_min] (lambda_min
/// from the fronthaul bound) times the integer S lattice on [1, F], followed
/// by one zoomed lambda pass around the coarse optimum.
///
/// P_hit is nondecreasing in S, so in each lambda row the feasible sizes form
/// a suffix of the lattice; the row minimum is its first element and is found
/// by bisection, which visits the same optimum as scanning the whole row.
inline OracleResult brute_force_oracle(const JointProblem& problem, HitModel model,
                                       const OracleGrid& grid = {}) {
  problem.catalog.validate();
  const double cap = markov_linearize(problem.constraint);
  const double c2 = problem.traffic.eta * problem.traffic.xi * problem.traffic.file_bits / problem.goodput_bps;
  const double harmonic_f = harmonic_total(problem.catalog);
  const double lambda_min = lambda_lower_bound(problem.traffic, problem.goodput_bps, problem.constraint);
  const double lambda_max = lambda_min * grid.lambda_span;
  const double backhaul = problem.backhaul_delay;

  auto search = [&](const std::vector<double>& lams, const detail::Lattice& lat) {
    const std::vector<double> hits = detail::hit_table(problem.catalog, harmonic_f, lat, model);
    std::vector<detail::GridBest> rows(lams.size());
    parallel_for(lams.size(), [&](std::size_t li) {
      const double fronthaul = c2 / lams[li];
      const auto first = std::partition_point(hits.begin(), hits.end(), [&](double h) {
        return fronthaul + backhaul * (1.0 - h) > cap;
      });
      if (first == hits.end()) return;
      const std::uint64_t s = lat.at(static_cast<std::size_t>(first - hits.begin()));
      rows[li] = {true, lams[li], s, li, lams[li] * static_cast<double>(s)};
    });
    detail::GridBest best;
    for (const auto& row : rows) {
      if (detail::better(row, best)) best = row;
    }
    return best;
  };

  const auto lams = detail::log_grid(lambda_min, lambda_max, grid.lambda_points);
  const detail::Lattice lattice = detail::make_lattice(1, problem.catalog.files, grid.max_cache_points);
  const auto coarse = search(lams, lattice);

  OracleResult out;
  out.cache_stride = lattice.stride;
  if (!coarse.found) {
    const double fh_at_max = c2 / lambda_max;
    std::ostringstream diag;
    diag << "no feasible (lambda, S) in the search box; E[D_fh] at lambda_max = " << fh_at_max
         << " s vs gamma*D_th = " << cap << " s; E[D] at (lambda_max, S=F) = " << fh_at_max << " s";
    out.diagnosis = diag.str();
    return out;
  }

  const auto at = [&](std::ptrdiff_t i) {
    return lams[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(lams.size()) - 1))];
  };
  const auto li = static_cast<std::ptrdiff_t>(coarse.li);
  const auto zlams = detail::log_grid(at(li - grid.zoom_cells), at(li + grid.zoom_cells), grid.zoom_points);
  detail::Lattice zlat = lattice;
  if (lattice.stride > 1) {
    const std::uint64_t span = lattice.stride * static_cast<std::uint64_t>(grid.zoom_cells);
    const std::uint64_t lo = coarse.cache > span ? coarse.cache - span : 1;
    const std::uint64_t hi = std::min(problem.catalog.files, coarse.cache + span);
    zlat = detail::make_lattice(lo, hi, grid.max_cache_points);
  }
  const auto fine = search(zlams, zlat);
  const detail::GridBest best = detail::better(fine, coarse) ? fine : coarse;

  const ZipfCatalog& cat = problem.catalog;
  const double hit = detail::hit_table(cat, harmonic_f, {best.cache, best.cache, 1}, model)[0];
  const double total = c2 / best.lambda + backhaul * (1.0 - hit);

  out.feasible = true;
  out.lambda = best.lambda;
  out.cache = best.cache;
  out.objective = best.objective;
  out.residual = (total - cap) / cap;
  return out;
}

}  // namespace cachint
