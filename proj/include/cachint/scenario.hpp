#pragma once

// Scenario files: flat `key = value [unit]` lines with `#` comments. Every
// dimensioned key carries an explicit unit; dB/dBm values are converted to
// linear SI units here and nowhere else.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cachint/delay.hpp"
#include "cachint/errors.hpp"
#include "cachint/mc_sim.hpp"
#include "cachint/numeric.hpp"
#include "cachint/optimizer.hpp"
#include "cachint/radio.hpp"
#include "cachint/zipf.hpp"

namespace cachint {

struct Scenario {
  std::string name = "unnamed";
  ZipfCatalog catalog;
  CacheConfig cache;
  RadioParams radio;  // radio.xi / radio.eta mirror traffic
  TrafficParams traffic;
  BackhaulQueue queue;
  DelayConstraint constraint;
  CoverageMethod coverage_method = CoverageMethod::closed_form;
  HitModel hit_model = HitModel::asymptotic;
  CellLoad cell_load = CellLoad::poisson;
  std::map<std::string, std::string> units;  // key -> unit as written in the source

  void set_xi(double xi) { radio.xi = traffic.xi = xi; }
  void set_eta(double eta) { radio.eta = traffic.eta = eta; }

  double goodput() const { return cachint::goodput(radio, coverage_method); }
};

namespace detail {

enum class Kind { number, integer, word };

struct KeySpec {
  std::string_view key;
  Kind kind;
  std::vector<std::string_view> units;  // empty: dimensionless
  bool required;
};

// Multiplier (or converter) from the written unit to SI.
inline std::optional<double> to_si(std::string_view unit, double v) {
  if (unit.empty() || unit == "files" || unit == "linear" || unit == "s" || unit == "w" || unit == "hz" ||
      unit == "bits" || unit == "per_m2" || unit == "per_s") {
    return v;
  }
  if (unit == "dbm") return dbm_to_watts(v);
  if (unit == "db") return db_to_linear(v);
  if (unit == "ms") return v * 1e-3;
  if (unit == "mhz") return v * 1e6;
  if (unit == "per_km2") return v * 1e-6;
  return std::nullopt;
}

inline const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = {
      {"name", Kind::word, {}, false},
      {"files", Kind::integer, {}, true},
      {"nu", Kind::number, {}, true},
      {"cache_size", Kind::integer, {"files"}, true},
      {"lambda", Kind::number, {"per_m2", "per_km2"}, true},
      {"xi", Kind::number, {"per_m2", "per_km2"}, true},
      {"eta", Kind::number, {}, true},
      {"p", Kind::number, {"dbm", "w"}, true},
      {"p_max", Kind::number, {"dbm", "w"}, false},
      {"sigma2", Kind::number, {"dbm", "w"}, true},
      {"alpha", Kind::number, {}, true},
      {"T", Kind::number, {"db", "linear"}, true},
      {"W", Kind::number, {"hz", "mhz"}, true},
      {"L", Kind::integer, {}, true},
      {"x_f", Kind::number, {"bits"}, true},
      {"phi", Kind::number, {"per_s", "hz"}, true},
      {"tau", Kind::number, {"s", "ms"}, true},
      {"m", Kind::integer, {}, true},
      {"c_a", Kind::number, {}, true},
      {"c_s", Kind::number, {}, true},
      {"d_th", Kind::number, {"s", "ms"}, true},
      {"gamma", Kind::number, {}, true},
      {"coverage", Kind::word, {}, false},
      {"hit_model", Kind::word, {}, false},
      {"cell_load", Kind::word, {}, false},
  };
  return specs;
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::string join_units(const std::vector<std::string_view>& units) {
  std::string out;
  for (auto u : units) {
    if (!out.empty()) out += "|";
    out += u;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace detail

/// Parses scenario text. Collects every problem (unknown or duplicate keys,
/// missing keys, bad units, invalid values, unstable queue) before throwing
/// a single ConfigError.
inline Scenario parse_scenario(std::string_view text, std::string_view source = "<scenario>") {
  using detail::Kind;
  std::vector<std::string> issues;
  std::map<std::string, double, std::less<>> numbers;
  std::map<std::string, std::string, std::less<>> words;
  std::map<std::string, std::string> units;
  std::set<std::string, std::less<>> seen;
  const auto where = [&](int line) { return std::string(source) + ":" + std::to_string(line) + ": "; };

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      issues.push_back(where(line_no) + "expected 'key = value [unit]'");
      continue;
    }
    const std::string_view key = detail::trim(line.substr(0, eq));
    const std::string_view rhs = detail::trim(line.substr(eq + 1));
    const auto& specs = detail::key_specs();
    const auto spec = std::find_if(specs.begin(), specs.end(), [&](const auto& s) { return s.key == key; });
    if (spec == specs.end()) {
      issues.push_back(where(line_no) + "unknown key '" + std::string(key) + "'");
      continue;
    }
    if (!seen.insert(std::string(key)).second) {
      issues.push_back(where(line_no) + "duplicate key '" + std::string(key) + "'");
      continue;
    }
    if (spec->kind == Kind::word) {
      if (rhs.empty() || rhs.find_first_of(" \t") != std::string_view::npos) {
        issues.push_back(where(line_no) + "key '" + std::string(key) + "' expects a single word");
        continue;
      }
      words[std::string(key)] = std::string(rhs);
      continue;
    }

    const auto space = rhs.find_first_of(" \t");
    const std::string_view value_text = rhs.substr(0, space);
    const std::string_view unit =
        space == std::string_view::npos ? std::string_view{} : detail::trim(rhs.substr(space));
    if (spec->units.empty() && !unit.empty()) {
      issues.push_back(where(line_no) + "key '" + std::string(key) + "' is dimensionless, got unit '" +
                       std::string(unit) + "'");
      continue;
    }
    if (!spec->units.empty() &&
        std::find(spec->units.begin(), spec->units.end(), unit) == spec->units.end()) {
      issues.push_back(where(line_no) + "key '" + std::string(key) + "' needs a unit (" +
                       detail::join_units(spec->units) + ")" +
                       (unit.empty() ? std::string() : ", got '" + std::string(unit) + "'"));
      continue;
    }
    double value = 0.0;
    if (spec->kind == Kind::integer) {
      std::uint64_t iv = 0;
      if (!detail::parse_number(value_text, iv)) {
        // Accept integral values written in floating notation (1e5).
        double dv = 0.0;
        if (!detail::parse_number(value_text, dv) || dv < 0 || dv != std::floor(dv) || dv > 1.8e19) {
          issues.push_back(where(line_no) + "key '" + std::string(key) + "' expects a non-negative integer");
          continue;
        }
        value = dv;
      } else {
        value = static_cast<double>(iv);
      }
    } else if (!detail::parse_number(value_text, value) || !std::isfinite(value)) {
      issues.push_back(where(line_no) + "key '" + std::string(key) + "' expects a number, got '" +
                       std::string(value_text) + "'");
      continue;
    }
    numbers[std::string(key)] = *detail::to_si(unit, value);
    if (!unit.empty()) units[std::string(key)] = std::string(unit);
  }

  for (const auto& spec : detail::key_specs()) {
    if (spec.required && !seen.count(spec.key)) {
      issues.push_back(std::string(source) + ": missing required key '" + std::string(spec.key) + "'");
    }
  }
  if (!issues.empty()) throw ConfigError(issues);

  Scenario s;
  s.units = units;
  const auto num = [&](std::string_view k) { return numbers.find(k)->second; };
  if (auto it = words.find("name"); it != words.end()) s.name = it->second;
  s.catalog.files = static_cast<std::uint64_t>(num("files"));
  s.catalog.nu = num("nu");
  s.cache.size = static_cast<std::uint64_t>(num("cache_size"));
  s.radio.lambda = num("lambda");
  s.set_xi(num("xi"));
  s.set_eta(num("eta"));
  s.radio.power_w = num("p");
  if (auto it = numbers.find("p_max"); it != numbers.end()) s.radio.power_max_w = it->second;
  s.radio.noise_w = num("sigma2");
  s.radio.alpha = num("alpha");
  s.radio.threshold = num("T");
  s.radio.bandwidth_hz = num("W");
  s.radio.subchannels = static_cast<std::uint32_t>(num("L"));
  s.traffic.file_bits = num("x_f");
  s.queue.arrival_rate = num("phi");
  s.queue.service_time = num("tau");
  s.queue.servers = static_cast<std::uint32_t>(num("m"));
  s.queue.cv_arrival = num("c_a");
  s.queue.cv_service = num("c_s");
  s.constraint.threshold_s = num("d_th");
  s.constraint.gamma = num("gamma");

  const auto choose = [&](std::string_view key, auto& target, auto... options) {
    const auto it = words.find(key);
    if (it == words.end()) return;
    bool matched = false;
    ((it->second == to_string(options) ? (target = options, matched = true) : false), ...);
    if (!matched) issues.push_back(std::string(source) + ": key '" + std::string(key) + "' has unknown value '" + it->second + "'");
  };
  choose("coverage", s.coverage_method, CoverageMethod::integral, CoverageMethod::closed_form,
         CoverageMethod::interference_limited);
  choose("hit_model", s.hit_model, HitModel::exact, HitModel::asymptotic);
  choose("cell_load", s.cell_load, CellLoad::poisson, CellLoad::deterministic);

  const auto check = [&](auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      issues.push_back(std::string(source) + ": " + e.what());
    }
  };
  check([&] { s.catalog.validate(); });
  check([&] {
    if (s.cache.size > s.catalog.files) throw DomainError("cache_size exceeds files");
  });
  check([&] { s.radio.validate(); });
  check([&] { s.traffic.validate(); });
  check([&] { s.queue.validate(); });
  check([&] { s.constraint.validate(); });
  if (!issues.empty()) throw ConfigError(issues);
  return s;
}

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline constexpr std::string_view kPaperBaseline = R"(# Baseline network. Zipf exponent is swept in the studies; 1.5 is the default.
name = paper-baseline
files = 100000
nu = 1.5
cache_size = 1000 files
lambda = 2.5464790894703257e-05 per_m2   # 20 / (pi 500^2)
xi = 7.639437268410977e-05 per_m2        # 60 / (pi 500^2)
eta = 0.014
p = 10 dbm
sigma2 = -150 dbm
alpha = 5
T = 10 db
W = 300e6 hz
L = 6
x_f = 1e9 bits
phi = 0.8 per_s
tau = 5e-3 s
m = 1
c_a = 2
c_s = 1
d_th = 1e-3 s
gamma = 0.1
coverage = closed_form
hit_model = asymptotic
cell_load = poisson
)";

// Same network with a smaller file and a looser threshold, so that the
// fronthaul bound holds at the baseline intensity.
inline constexpr std::string_view kFeasibleDemo = R"(name = feasible-demo
files = 100000
nu = 1.5
cache_size = 1000 files
lambda = 2.5464790894703257e-05 per_m2
xi = 7.639437268410977e-05 per_m2
eta = 0.014
p = 10 dbm
sigma2 = -150 dbm
alpha = 5
T = 10 db
W = 300e6 hz
L = 6
x_f = 1e5 bits
phi = 0.8 per_s
tau = 5e-3 s
m = 1
c_a = 2
c_s = 1
d_th = 2e-3 s
gamma = 0.1
coverage = closed_form
hit_model = asymptotic
cell_load = poisson
)";

}  // namespace detail

inline std::vector<std::string_view> preset_names() { return {"paper-baseline", "feasible-demo"}; }

inline std::optional<std::string_view> preset_text(std::string_view name) {
  if (name == "paper-baseline") return detail::kPaperBaseline;
  if (name == "feasible-demo") return detail::kFeasibleDemo;
  return std::nullopt;
}

inline Scenario preset(std::string_view name) {
  const auto text = preset_text(name);
  if (!text) throw ConfigError({"unknown preset '" + std::string(name) + "'"});
  return parse_scenario(*text, "preset:" + std::string(name));
}

/// Reads a scenario file, or a built-in preset given as `preset:NAME`.
inline Scenario load_scenario(const std::string& path) {
  if (path.rfind("preset:", 0) == 0) return preset(std::string_view(path).substr(7));
  std::ifstream in(path);
  if (!in) throw ConfigError({path + ": cannot open scenario file"});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

/// Canonical text in linear SI units; parse_scenario(to_config(s)) == s.
inline std::string to_config(const Scenario& s) {
  using detail::fmt_double;
  std::ostringstream o;
  o << "name = " << s.name << "\n"
    << "files = " << s.catalog.files << "\n"
    << "nu = " << fmt_double(s.catalog.nu) << "\n"
    << "cache_size = " << s.cache.size << " files\n"
    << "lambda = " << fmt_double(s.radio.lambda) << " per_m2\n"
    << "xi = " << fmt_double(s.traffic.xi) << " per_m2\n"
    << "eta = " << fmt_double(s.traffic.eta) << "\n"
    << "p = " << fmt_double(s.radio.power_w) << " w\n";
  if (std::isfinite(s.radio.power_max_w)) o << "p_max = " << fmt_double(s.radio.power_max_w) << " w\n";
  o << "sigma2 = " << fmt_double(s.radio.noise_w) << " w\n"
    << "alpha = " << fmt_double(s.radio.alpha) << "\n"
    << "T = " << fmt_double(s.radio.threshold) << " linear\n"
    << "W = " << fmt_double(s.radio.bandwidth_hz) << " hz\n"
    << "L = " << s.radio.subchannels << "\n"
    << "x_f = " << fmt_double(s.traffic.file_bits) << " bits\n"
    << "phi = " << fmt_double(s.queue.arrival_rate) << " per_s\n"
    << "tau = " << fmt_double(s.queue.service_time) << " s\n"
    << "m = " << s.queue.servers << "\n"
    << "c_a = " << fmt_double(s.queue.cv_arrival) << "\n"
    << "c_s = " << fmt_double(s.queue.cv_service) << "\n"
    << "d_th = " << fmt_double(s.constraint.threshold_s) << " s\n"
    << "gamma = " << fmt_double(s.constraint.gamma) << "\n"
    << "coverage = " << to_string(s.coverage_method) << "\n"
    << "hit_model = " << to_string(s.hit_model) << "\n"
    << "cell_load = " << to_string(s.cell_load) << "\n";
  return o.str();
}

/// 16-hex-digit FNV-1a of the canonical parameter text.
inline std::string parameter_hash(const Scenario& s) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_config(s))));
  return buf;
}

}  // namespace cachint
