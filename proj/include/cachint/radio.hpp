#pragma once

// Downlink SINR coverage of a typical user associated with its nearest base
// station in a Poisson network with Rayleigh fading and random subchannel
// reuse, plus the resulting per-slot goodput.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "cachint/errors.hpp"
#include "cachint/numeric.hpp"
#include "cachint/quadrature.hpp"

namespace cachint {

/// All quantities in linear SI units (W, Hz, per m^2).
struct RadioParams {
  double lambda = 0.0;        // BS intensity
  double xi = 0.0;            // UE intensity
  double eta = 0.0;           // UE activity probability
  double power_w = 0.0;       // BS transmit power
  double power_max_w = std::numeric_limits<double>::infinity();
  double noise_w = 0.0;       // sigma^2
  double alpha = 4.0;         // path-loss exponent
  double threshold = 1.0;     // SINR threshold T (linear)
  double bandwidth_hz = 0.0;  // W
  std::uint32_t subchannels = 1;  // L

  double interferer_intensity() const { return lambda / static_cast<double>(subchannels); }

  void validate() const {
    auto require = [](bool ok, const char* msg) {
      if (!ok) throw DomainError(std::string("RadioParams: ") + msg);
    };
    require(lambda > 0.0 && std::isfinite(lambda), "lambda must be > 0");
    require(xi > 0.0 && std::isfinite(xi), "xi must be > 0");
    require(eta > 0.0 && eta < 1.0, "eta must lie in (0, 1)");
    require(power_w > 0.0 && power_w <= power_max_w, "power must lie in (0, p_max]");
    require(noise_w >= 0.0 && std::isfinite(noise_w), "noise power must be >= 0");
    require(alpha > 2.0 && std::isfinite(alpha), "path-loss exponent must be > 2");
    require(threshold > 0.0 && std::isfinite(threshold), "SINR threshold must be > 0");
    require(bandwidth_hz > 0.0 && std::isfinite(bandwidth_hz), "bandwidth must be > 0");
    require(subchannels >= 1, "subchannel count must be >= 1");
  }
};

enum class CoverageMethod { integral, closed_form, interference_limited, monte_carlo };

inline std::string_view to_string(CoverageMethod m) {
  switch (m) {
    case CoverageMethod::integral: return "integral";
    case CoverageMethod::closed_form: return "closed_form";
    case CoverageMethod::interference_limited: return "interference_limited";
    case CoverageMethod::monte_carlo: return "monte_carlo";
  }
  return "unknown";
}

struct CoverageResult {
  double p_c = 0.0;
  CoverageMethod method = CoverageMethod::closed_form;
  double beta = 1.0;
};

/// Interference factor beta = 1 + T^{2/a} * int_{T^{-2/a}}^inf du / (1 + u^{a/2}).
///
/// The finite part is integrated in log(u); beyond U = max(1e4, 10 u0) the
/// integrand is expanded as sum_k (-1)^{k+1} u^{-k a/2} and integrated
/// termwise.
inline double beta_factor(double threshold, double alpha) {
  if (!(alpha > 2.0) || !std::isfinite(alpha)) throw DomainError("beta_factor: alpha must be > 2");
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    throw DomainError("beta_factor: threshold must be > 0");
  }
  const double half_alpha = 0.5 * alpha;
  const double lower = std::pow(threshold, -2.0 / alpha);
  const double upper = std::max(1e4, 10.0 * lower);

  auto integrand = [half_alpha](double y) {
    return 1.0 / (std::exp(-y) + std::exp((half_alpha - 1.0) * y));
  };
  const double body = integrate(integrand, std::log(lower), std::log(upper), 1e-14, 1e-13).value;

  CompensatedSum tail;
  for (int k = 1; k < 200; ++k) {
    const double expo = 1.0 - k * half_alpha;
    const double term = std::pow(upper, expo) / (k * half_alpha - 1.0);
    tail += (k % 2 == 1) ? term : -term;
    if (term < 1e-20) break;
  }
  return 1.0 + std::pow(threshold, 2.0 / alpha) * (body + tail.value());
}

/// L / (beta + L - 1): coverage with noise neglected.
inline double coverage_interference_limited(std::uint32_t subchannels, double beta) {
  if (subchannels < 1) throw DomainError("coverage_interference_limited: L must be >= 1");
  if (!(beta >= 1.0)) throw DomainError("coverage_interference_limited: beta must be >= 1");
  const double l = static_cast<double>(subchannels);
  return l / (beta + l - 1.0);
}

/// pi*lambda * int_0^inf exp(-(A z + B z^{a/2})) dz with
/// A = pi (lambda_I (beta - 1) + lambda), B = T sigma^2 / p.
///
/// Integrated in x = A z, truncated where the integrand falls below 1e-15.
inline CoverageResult coverage_integral(const RadioParams& params) {
  params.validate();
  const double beta = beta_factor(params.threshold, params.alpha);
  const double a_coef = kPi * (params.interferer_intensity() * (beta - 1.0) + params.lambda);
  const double b_coef = params.threshold * params.noise_w / params.power_w;
  const double half_alpha = 0.5 * params.alpha;
  const double noise_scale = b_coef / std::pow(a_coef, half_alpha);
  if (!std::isfinite(a_coef) || !std::isfinite(noise_scale)) {
    throw NumericalError("coverage_integral: non-finite coefficients (A=" + std::to_string(a_coef) +
                         ", B=" + std::to_string(b_coef) + ")");
  }

  const double cutoff = 35.0;  // exp(-35) < 1e-15
  double upper = cutoff;
  if (noise_scale > 0.0) upper = std::min(upper, std::pow(cutoff / noise_scale, 1.0 / half_alpha));
  auto integrand = [noise_scale, half_alpha](double x) {
    return std::exp(-x - noise_scale * std::pow(x, half_alpha));
  };
  const double integral = integrate(integrand, 0.0, upper, 1e-15, 1e-14).value;
  const double p_c = kPi * params.lambda / a_coef * integral;
  if (!std::isfinite(p_c)) throw NumericalError("coverage_integral: non-finite result");
  return {std::clamp(p_c, 0.0, 1.0), CoverageMethod::integral, beta};
}

/// [1 + (beta-1)/L + a/(2 pi lambda Gamma(2/a)) (T sigma^2/p)^{2/a}]^{-1}
inline CoverageResult coverage_closed_form(const RadioParams& params) {
  params.validate();
  const double beta = beta_factor(params.threshold, params.alpha);
  const double l = static_cast<double>(params.subchannels);
  const double snr_term = params.noise_w == 0.0
      ? 0.0
      : params.alpha / (2.0 * kPi * params.lambda * std::tgamma(2.0 / params.alpha)) *
            std::pow(params.threshold * params.noise_w / params.power_w, 2.0 / params.alpha);
  return {1.0 / (1.0 + (beta - 1.0) / l + snr_term), CoverageMethod::closed_form, beta};
}

/// Analytic coverage by the selected method (monte_carlo is not analytic).
inline CoverageResult coverage(const RadioParams& params, CoverageMethod method) {
  switch (method) {
    case CoverageMethod::integral: return coverage_integral(params);
    case CoverageMethod::closed_form: return coverage_closed_form(params);
    case CoverageMethod::interference_limited: {
      params.validate();
      const double beta = beta_factor(params.threshold, params.alpha);
      return {coverage_interference_limited(params.subchannels, beta),
              CoverageMethod::interference_limited, beta};
    }
    case CoverageMethod::monte_carlo: break;
  }
  throw DomainError("coverage: monte_carlo is estimated by simulate_coverage, not evaluated");
}

/// G = P_c (W / L) log2(1 + T), bits per second.
inline double goodput_from_coverage(double p_c, double bandwidth_hz, std::uint32_t subchannels,
                                    double threshold) {
  return p_c * bandwidth_hz / static_cast<double>(subchannels) * std::log2(1.0 + threshold);
}

inline double goodput(const RadioParams& params,
                      CoverageMethod method = CoverageMethod::closed_form) {
  const CoverageResult cov = coverage(params, method);
  return goodput_from_coverage(cov.p_c, params.bandwidth_hz, params.subchannels, params.threshold);
}

}  // namespace cachint
