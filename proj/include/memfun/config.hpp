#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "memfun/csv.hpp"
#include "memfun/error.hpp"
#include "memfun/kernel.hpp"
#include "memfun/random.hpp"
#include "memfun/sensitivity.hpp"
#include "memfun/trajectory.hpp"

namespace memfun {

using json = nlohmann::json;

namespace detail {

inline std::string where(const std::string& context) { return context.empty() ? "" : context + ": "; }

inline const json& require_key(const json& j, const std::string& key, const std::string& context) {
  if (!j.is_object()) throw ConfigError(where(context) + "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(where(context) + "missing '" + key + "'");
  return *it;
}

inline double number(const json& j, const std::string& key, const std::string& context) {
  const json& v = require_key(j, key, context);
  if (!v.is_number()) throw ConfigError(where(context) + "'" + key + "' must be a number");
  return v.get<double>();
}

inline double number_or(const json& j, const std::string& key, double fallback, const std::string& context) {
  return j.contains(key) ? number(j, key, context) : fallback;
}

inline std::string text(const json& j, const std::string& key, const std::string& context) {
  const json& v = require_key(j, key, context);
  if (!v.is_string()) throw ConfigError(where(context) + "'" + key + "' must be a string");
  return v.get<std::string>();
}

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& file) {
  const std::filesystem::path p(file);
  return p.is_absolute() || base.empty() ? p : base / p;
}

inline std::vector<double> numbers(const json& j, const std::string& key, const std::string& context) {
  if (!j.contains(key)) return {};
  const json& v = j.at(key);
  if (!v.is_array()) throw ConfigError(where(context) + "'" + key + "' must be an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(where(context) + "'" + key + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

/// Turns constructor precondition failures into configuration errors.
template <typename Build>
auto guarded(const std::string& context, Build&& build) {
  try {
    return build();
  } catch (const InvalidParameter& e) {
    throw ConfigError(where(context) + e.what());
  }
}

}  // namespace detail

inline TrajectorySpec parse_trajectory_spec(const json& j, const std::string& context = "trajectory") {
  TrajectorySpec spec;
  spec.kind = parse_trajectory_kind(detail::text(j, "kind", context));
  spec.amplitude = detail::number_or(j, "amplitude", 1.0, context);
  if (!(spec.amplitude > 0.0)) throw ConfigError(detail::where(context) + "amplitude must be positive");
  spec.breakpoint_count = static_cast<int>(detail::number_or(j, "breakpoints", 1.0, context));
  spec.cuts = detail::numbers(j, "cuts", context);
  spec.levels = detail::numbers(j, "levels", context);
  return spec;
}

/// Trajectory source: {"file": path}, {"constant": c}, {"indicator": cut} or
/// {"kind": fourier|polynomial|piecewise_step|zero, ..., "seed": n}.
inline Trajectory parse_trajectory(const json& j, const TimeDomain& domain, const std::filesystem::path& base = {},
                                   const std::string& context = "trajectory") {
  if (!j.is_object()) throw ConfigError(detail::where(context) + "expected an object");
  if (j.contains("file")) {
    const auto path = detail::resolve(base, detail::text(j, "file", context));
    Trajectory f = read_trajectory_csv(path.string(), domain.size());
    if (f.domain().horizon() != domain.horizon()) {
      throw ConfigError(path.string() + ": last time " + format_double(f.domain().horizon()) +
                        " does not match the horizon " + format_double(domain.horizon()));
    }
    return f;
  }
  if (j.contains("constant")) return Trajectory::constant(domain, detail::number(j, "constant", context));
  if (j.contains("indicator")) {
    return detail::guarded(context, [&] { return Trajectory::indicator(domain, detail::number(j, "indicator", context)); });
  }
  if (j.contains("kind")) {
    const auto spec = parse_trajectory_spec(j, context);
    Rng rng(static_cast<std::uint64_t>(detail::number_or(j, "seed", 0.0, context)));
    return detail::guarded(context, [&] { return random_trajectory(rng, spec, domain); });
  }
  throw ConfigError(detail::where(context) + "expected one of 'file', 'constant', 'indicator' or 'kind'");
}

/// {"type": exponential|power_law|finite_memory|sampled, parameters...}.
inline Kernel parse_kernel(const json& j, const TimeDomain& domain, const std::filesystem::path& base = {},
                           const std::string& context = "kernel") {
  const std::string type = detail::text(j, "type", context);
  return detail::guarded(context, [&]() -> Kernel {
    if (type == "exponential") return exponential_kernel(detail::number(j, "alpha", context), domain);
    if (type == "power_law") {
      return power_law_kernel(detail::number(j, "gamma", context), detail::number(j, "epsilon", context), domain);
    }
    if (type == "finite_memory") return finite_memory_kernel(detail::number(j, "delta", context), domain);
    if (type == "sampled") {
      const auto path = detail::resolve(base, detail::text(j, "file", context));
      const Trajectory profile = read_trajectory_csv(path.string(), domain.size());
      if (profile.domain().horizon() != domain.horizon()) {
        throw ConfigError(path.string() + ": kernel samples must span [0, " + format_double(domain.horizon()) + "]");
      }
      return Kernel::from_trajectory(profile, "sampled:" + path.filename().string());
    }
    throw ConfigError(detail::where(context) + "unknown kernel type '" + type + "'");
  });
}

/// {"kind": instantaneous|historical, "lambda_min", "lambda_max", "gamma0",
/// "alpha0", "beta0", "reference": trajectory source}. An instantaneous model
/// with lambda_min == lambda_max is the constant sensitivity.
inline SensitivityModel parse_sensitivity(const json& j, const TimeDomain& domain,
                                          const std::filesystem::path& base = {},
                                          const std::string& context = "sensitivity") {
  const std::string kind = detail::text(j, "kind", context);
  const double lambda_min = detail::number(j, "lambda_min", context);
  const double lambda_max = detail::number(j, "lambda_max", context);
  const auto reference = [&] {
    return j.contains("reference") ? parse_trajectory(j.at("reference"), domain, base, context + ".reference")
                                   : Trajectory::constant(domain, 0.0);
  };
  return detail::guarded(context, [&]() -> SensitivityModel {
    if (kind == "instantaneous") {
      if (lambda_min == lambda_max) {
        if (!(lambda_min > 0.0)) throw ConfigError(detail::where(context) + "lambda_min must be positive");
        return constant_sensitivity(lambda_min);
      }
      return instantaneous_sensitivity(reference(), detail::number(j, "gamma0", context), lambda_min, lambda_max);
    }
    if (kind == "historical") {
      return historical_sensitivity(reference(), detail::number(j, "alpha0", context),
                                    detail::number(j, "gamma0", context), detail::number_or(j, "beta0", 0.0, context),
                                    lambda_min, lambda_max);
    }
    throw ConfigError(detail::where(context) + "unknown sensitivity kind '" + kind + "'");
  });
}

/// Horizon and grid shared by every command.
struct GridSettings {
  double horizon = 1.0;
  std::size_t grid_points = TimeDomain::default_grid_points;
  double tolerance = 1e-8;

  TimeDomain domain() const { return TimeDomain(horizon, grid_points); }
};

inline void validate_grid(const GridSettings& g) {
  if (!(g.horizon > 0.0) || !std::isfinite(g.horizon)) {
    throw ConfigError("horizon T must be positive and finite, got " + format_double(g.horizon));
  }
  if (g.grid_points < 3 || g.grid_points % 2 == 0) {
    throw ConfigError("grid N must be odd and at least 3, got " + std::to_string(g.grid_points));
  }
  if (!(g.tolerance > 0.0)) throw ConfigError("tolerance must be positive, got " + format_double(g.tolerance));
}

inline GridSettings parse_grid(const json& j, std::optional<std::size_t> grid_override = {},
                               std::optional<double> tol_override = {}) {
  GridSettings g;
  g.horizon = detail::number_or(j, "horizon", g.horizon, "config");
  if (j.contains("grid")) {
    const json& n = j.at("grid");
    if (!n.is_number_integer() && !n.is_number_unsigned()) throw ConfigError("config: 'grid' must be an integer");
    if (n.get<long long>() < 0) throw ConfigError("config: 'grid' must be positive");
    g.grid_points = n.get<std::size_t>();
  }
  g.tolerance = detail::number_or(j, "tolerance", g.tolerance, "config");
  if (grid_override) g.grid_points = *grid_override;
  if (tol_override) g.tolerance = *tol_override;
  validate_grid(g);
  return g;
}

/// Every "file" entry anywhere in the config must exist when it is parsed.
inline void require_files_exist(const json& j, const std::filesystem::path& base) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() == "file" && it.value().is_string()) {
        const auto path = detail::resolve(base, it.value().get<std::string>());
        if (!std::filesystem::exists(path)) throw ConfigError("referenced file '" + path.string() + "' does not exist");
      } else {
        require_files_exist(it.value(), base);
      }
    }
  } else if (j.is_array()) {
    for (const auto& x : j) require_files_exist(x, base);
  }
}

inline json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

/// Configuration of a single evaluation: T, N, kernel, sensitivity and the
/// trajectory to measure.
struct RunConfig {
  GridSettings grid;
  json kernel;
  json sensitivity;
  json trajectory;
  std::filesystem::path base;

  TimeDomain domain() const { return grid.domain(); }
  Kernel make_kernel() const { return parse_kernel(kernel, domain(), base); }
  SensitivityModel make_sensitivity() const { return parse_sensitivity(sensitivity, domain(), base); }
  Trajectory make_trajectory() const { return parse_trajectory(trajectory, domain(), base); }
};

inline RunConfig parse_run_config(const json& j, const std::filesystem::path& base = {},
                                  std::optional<std::size_t> grid_override = {},
                                  std::optional<double> tol_override = {}) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  RunConfig cfg;
  cfg.grid = parse_grid(j, grid_override, tol_override);
  cfg.base = base;
  if (j.contains("kernel")) cfg.kernel = j.at("kernel");
  if (j.contains("sensitivity")) cfg.sensitivity = j.at("sensitivity");
  if (j.contains("trajectory")) cfg.trajectory = j.at("trajectory");
  require_files_exist(j, base);
  return cfg;
}

}  // namespace memfun
