#pragma once

// Zipf popularity, generalized harmonic numbers, zeta functions and the
// static most-popular cache hit probability.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "cachint/errors.hpp"
#include "cachint/numeric.hpp"

namespace cachint {

/// Library of `files` equal-size files with Zipf exponent `nu`.
struct ZipfCatalog {
  std::uint64_t files = 1;
  double nu = 1.0;

  void validate() const {
    if (files < 1) throw DomainError("catalog must hold at least one file");
    if (!(nu >= 0.0) || !std::isfinite(nu)) throw DomainError("Zipf exponent must be finite and >= 0");
  }
};

/// Number of most-popular files stored at each base station.
struct CacheConfig {
  std::uint64_t size = 0;
};

/// Direct-sum threshold above which harmonic_exact switches to the zeta identity.
inline constexpr std::uint64_t kDirectSumLimit = 10'000'000;

namespace detail {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// B_{2k} / (2k)!, k = 1..5.
inline constexpr std::array<double, 5> kBernoulliOverFactorial = {
    1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0, 1.0 / 47900160.0};

inline constexpr double kHurwitzShiftTarget = 20.0;

inline void reject_pole(double s, const char* where) {
  if (s == 1.0) throw PoleError(std::string(where) + ": exponent 1 is the zeta pole");
}

// Sum_{n=1..count} n^{-nu}, smallest terms first.
inline double direct_harmonic(std::uint64_t count, double nu) {
  CompensatedSum acc;
  for (std::uint64_t n = count; n >= 1; --n) {
    acc += std::pow(static_cast<double>(n), -nu);
  }
  return acc.value();
}

// H_S for nu = 1 and huge S: ln S + gamma + 1/2S - sum B_{2k}/(2k S^{2k}).
inline double harmonic_one_asymptotic(std::uint64_t count) {
  const double s = static_cast<double>(count);
  const double inv2 = 1.0 / (s * s);
  return std::log(s) + kEulerGamma + 0.5 / s - inv2 / 12.0 + inv2 * inv2 / 120.0 -
         inv2 * inv2 * inv2 / 252.0;
}

}  // namespace detail

/// Hurwitz zeta(s, a) = sum_{n>=0} (n + a)^{-s}, analytically continued in s.
///
/// Shifts `a` up by direct summation until it reaches 20, then applies the
/// large-argument Euler-Maclaurin expansion
///   b^{1-s}/(s-1) + b^{-s}/2 + sum_{k=1..5} B_{2k}/(2k)! (s)_{2k-1} b^{1-s-2k}.
/// Absolute accuracy is better than 1e-10 for s in [0.1, 10].
inline double hurwitz_zeta(double s, double a) {
  detail::reject_pole(s, "hurwitz_zeta");
  if (!(a > 0.0)) throw DomainError("hurwitz_zeta: offset a must be > 0");
  if (!std::isfinite(s) || !std::isfinite(a)) throw DomainError("hurwitz_zeta: non-finite argument");

  CompensatedSum acc;
  double b = a;
  while (b < detail::kHurwitzShiftTarget) {
    acc += std::pow(b, -s);
    b += 1.0;
  }

  const double b_pow = std::pow(b, -s);
  CompensatedSum tail;
  tail += b * b_pow / (s - 1.0);
  tail += 0.5 * b_pow;
  double rising = s;           // (s)_{2k-1}
  double b_scale = b_pow / b;  // b^{1-s-2k}
  for (std::size_t k = 0; k < detail::kBernoulliOverFactorial.size(); ++k) {
    tail += detail::kBernoulliOverFactorial[k] * rising * b_scale;
    const double next = 2.0 * static_cast<double>(k) + 1.0;
    rising *= (s + next) * (s + next + 1.0);
    b_scale /= b * b;
  }
  acc += tail.value();
  return acc.value();
}

/// Riemann zeta(nu) = hurwitz_zeta(nu, 1); negative on (0, 1).
inline double riemann_zeta(double nu) {
  detail::reject_pole(nu, "riemann_zeta");
  if (!(nu >= 0.0)) throw DomainError("riemann_zeta: exponent must be >= 0");
  return hurwitz_zeta(nu, 1.0);
}

/// H_{S,nu} = sum_{n=1..S} n^{-nu}. Exact for every nu >= 0 including 1.
inline double harmonic_exact(std::uint64_t count, double nu) {
  if (!(nu >= 0.0)) throw DomainError("harmonic_exact: exponent must be >= 0");
  if (count == 0) return 0.0;
  if (count <= kDirectSumLimit) return detail::direct_harmonic(count, nu);
  if (nu == 1.0) return detail::harmonic_one_asymptotic(count);
  return riemann_zeta(nu) - hurwitz_zeta(nu, static_cast<double>(count) + 1.0);
}

/// Leading-order approximation zeta(nu) - (S+1)^{1-nu}/(nu-1).
inline double harmonic_asymptotic(double count, double nu) {
  detail::reject_pole(nu, "harmonic_asymptotic");
  if (!(count >= 0.0)) throw DomainError("harmonic_asymptotic: count must be >= 0");
  if (!(nu > 0.0)) throw DomainError("harmonic_asymptotic: exponent must be > 0");
  return riemann_zeta(nu) - std::pow(count + 1.0, 1.0 - nu) / (nu - 1.0);
}

inline double harmonic_total(const ZipfCatalog& catalog) {
  catalog.validate();
  return harmonic_exact(catalog.files, catalog.nu);
}

/// Request probability of the file at popularity rank d (1-based).
inline double zipf_pmf(const ZipfCatalog& catalog, std::uint64_t rank) {
  catalog.validate();
  if (rank < 1 || rank > catalog.files) {
    throw DomainError("zipf_pmf: rank " + std::to_string(rank) + " outside [1, " +
                      std::to_string(catalog.files) + "]");
  }
  return std::pow(static_cast<double>(rank), -catalog.nu) / harmonic_total(catalog);
}

/// Zipf CDF at the cache size: H_{S,nu} / H_{F,nu}.
inline double hit_probability_exact(const ZipfCatalog& catalog, CacheConfig cache) {
  catalog.validate();
  if (cache.size > catalog.files) {
    throw DomainError("hit_probability_exact: cache size exceeds catalog size");
  }
  if (cache.size == 0) return 0.0;
  if (cache.size == catalog.files) return 1.0;
  return harmonic_exact(cache.size, catalog.nu) / harmonic_total(catalog);
}

struct HitProbability {
  double value = 0.0;      // clamped to [0, 1]
  double unclamped = 0.0;  // raw asymptotic value
  bool clamped = false;
};

/// Asymptotic hit probability for a real-valued cache size, given a
/// precomputed normalization H_{F,nu}.
inline HitProbability hit_probability_asymptotic(double nu, double harmonic_f, double cache_size) {
  const double raw = harmonic_asymptotic(cache_size, nu) / harmonic_f;
  const double value = std::clamp(raw, 0.0, 1.0);
  return {value, raw, value != raw};
}

inline HitProbability hit_probability_asymptotic(const ZipfCatalog& catalog, double cache_size) {
  catalog.validate();
  detail::reject_pole(catalog.nu, "hit_probability_asymptotic");
  return hit_probability_asymptotic(catalog.nu, harmonic_total(catalog), cache_size);
}

inline HitProbability hit_probability_asymptotic(const ZipfCatalog& catalog, CacheConfig cache) {
  if (cache.size < 1) throw DomainError("hit_probability_asymptotic: cache size must be >= 1");
  return hit_probability_asymptotic(catalog, static_cast<double>(cache.size));
}

}  // namespace cachint
