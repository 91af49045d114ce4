#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "memfun/config.hpp"
#include "memfun/csv.hpp"
#include "memfun/functional.hpp"
#include "memfun/kernel.hpp"
#include "memfun/random.hpp"
#include "memfun/sensitivity.hpp"

namespace memfun {

/// A failing input, replayable through the CLI: every trajectory involved is
/// stored in the trajectory CSV format.
struct Witness {
  std::string note;
  std::vector<std::pair<std::string, std::string>> trajectories;
};

struct VerificationEntry {
  std::string theorem_id;
  std::string description;
  int trials = 0;
  int failures = 0;
  /// Smallest slack over all trials (bound minus measured quantity); a trial
  /// fails when its margin is below -tolerance.
  double worst_margin = std::numeric_limits<double>::infinity();
  double tolerance = 0.0;
  std::vector<Witness> witnesses;
};

struct VerificationReport {
  std::vector<VerificationEntry> entries;
  std::uint64_t seed = 0;
  std::string config_digest;

  bool passed() const {
    return std::all_of(entries.begin(), entries.end(), [](const VerificationEntry& e) { return e.failures == 0; });
  }
  int total_failures() const {
    int n = 0;
    for (const auto& e : entries) n += e.failures;
    return n;
  }
  const VerificationEntry& at(const std::string& id) const {
    for (const auto& e : entries) {
      if (e.theorem_id == id) return e;
    }
    throw InvalidParameter("no verification entry named " + id);
  }
};

/// The checks run by the suite, in report order, with their descriptions.
inline const std::vector<std::pair<std::string, std::string>>& suite_checks() {
  static const std::vector<std::pair<std::string, std::string>> checks = {
      {"cumulative_weight", "int_0^t kappa <= 1 for regular kernels"},
      {"weighted_supremum", "int_0^t kappa(t-s) |f(s)| ds <= ||f||_inf for regular kernels"},
      {"difference_control", "|int_0^t kappa(t-s) (f-g)(s) ds| <= ||f-g||_inf for regular kernels"},
      {"generalized_estimate", "|int_0^t kappa(t-s) f(s) ds| <= ||f||_inf int_0^T |kappa| for generalized kernels"},
      {"tanh_lipschitz", "|tanh(g|x-p|) - tanh(g|y-p|)| <= g |x-y|"},
      {"induced_bounds", "lambda_min <= Lambda_f <= lambda_max at every node"},
      {"induced_lipschitz", "||Lambda_f - Lambda_g||_inf <= L_Lambda ||f-g||_inf"},
      {"induced_continuity", "max consecutive-node change of Lambda_f at least halves under grid refinement (continuous f)"},
      {"induced_positivity", "Lambda_0 >= lambda_min"},
      {"instantaneous_reduction", "beta0 = 0 gives Lambda_f(s) = Lambda(s, f(s)) node-wise"},
      {"J_finiteness", "0 <= J_f(t) <= Lambda_inf kappa_inf T ||f||_inf"},
      {"positive_definiteness", "S(0) = 0 and S(f) >= ||f||_inf > 0 otherwise"},
      {"norm_comparison", "||f||_inf <= S(f)"},
      {"strict_comparison", "S(f) - ||f||_inf exceeds the quadrature tolerance when max |f| is attained in (0, T]"},
      {"two_sided_embedding", "||f||_inf <= S(f) <= (1 + Lambda_inf kappa_inf T) ||f||_inf (continuous f)"},
      {"inclusion_lipschitz", "S(f - g) <= (1 + Lambda_inf kappa_inf T) ||f - g||_inf (continuous f, g)"},
      {"discontinuous_membership", "step trajectories have finite S <= (1 + Lambda_inf kappa_inf T) ||f||_inf"},
  };
  return checks;
}

/// Parsed verification configuration.
struct SuiteConfig {
  GridSettings grid{1.0, 257, 1e-8};
  json kernels = json::array();
  json sensitivities = json::array();
  json trajectories = json::array();
  int trials = 20;
  std::vector<std::string> checks;
  /// Multiplies the closed-form L_Lambda in the induced_lipschitz check; values
  /// below 1 understate the constant and are expected to be caught.
  double lipschitz_scale = 1.0;
  std::map<std::string, double> tolerances;
  std::filesystem::path base;

  /// Normalized form with every default filled in; its digest identifies the run.
  json canonical() const {
    json j;
    j["horizon"] = grid.horizon;
    j["grid"] = grid.grid_points;
    j["tolerance"] = grid.tolerance;
    j["kernels"] = kernels;
    j["sensitivities"] = sensitivities;
    j["trajectories"] = trajectories;
    j["trials"] = trials;
    j["checks"] = checks;
    j["lipschitz_scale"] = lipschitz_scale;
    j["tolerances"] = tolerances;
    return j;
  }
};

/// 64-bit FNV-1a of the compact canonical JSON, as 16 hex digits.
inline std::string config_digest(const json& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline json default_suite_json() {
  return json::parse(R"({
    "horizon": 1.0,
    "grid": 257,
    "tolerance": 1e-8,
    "trials": 20,
    "kernels": [
      {"type": "exponential", "alpha": 0.5},
      {"type": "exponential", "alpha": 1.0},
      {"type": "exponential", "alpha": 5.0},
      {"type": "finite_memory", "delta": 1.0},
      {"type": "power_law", "gamma": 0.5, "epsilon": 0.25},
      {"type": "finite_memory", "delta": 0.5}
    ],
    "sensitivities": [
      {"kind": "instantaneous", "lambda_min": 1.0, "lambda_max": 1.0},
      {"kind": "instantaneous", "lambda_min": 0.5, "lambda_max": 1.5, "gamma0": 2.0,
       "reference": {"kind": "fourier", "amplitude": 1.0, "seed": 7}},
      {"kind": "historical", "lambda_min": 0.5, "lambda_max": 1.5, "gamma0": 2.0, "alpha0": 1.0, "beta0": 1.0,
       "reference": {"kind": "fourier", "amplitude": 1.0, "seed": 7}},
      {"kind": "historical", "lambda_min": 0.25, "lambda_max": 2.0, "gamma0": 1.0, "alpha0": 3.0, "beta0": 0.0,
       "reference": {"kind": "polynomial", "amplitude": 0.5, "seed": 11}}
    ],
    "trajectories": [
      {"kind": "fourier", "amplitude": 1.0},
      {"kind": "polynomial", "amplitude": 2.0},
      {"kind": "piecewise_step", "amplitude": 1.0, "breakpoints": 2},
      {"kind": "zero"}
    ]
  })");
}

inline SuiteConfig parse_suite_config(const json& j, const std::filesystem::path& base = {},
                                      std::optional<std::size_t> grid_override = {},
                                      std::optional<double> tol_override = {}) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  const json defaults = default_suite_json();
  json merged = defaults;
  for (auto it = j.begin(); it != j.end(); ++it) merged[it.key()] = it.value();

  SuiteConfig cfg;
  cfg.base = base;
  cfg.grid = parse_grid(merged, grid_override, tol_override);
  for (const char* key : {"kernels", "sensitivities", "trajectories"}) {
    if (!merged.at(key).is_array() || merged.at(key).empty()) {
      throw ConfigError(std::string("config: '") + key + "' must be a non-empty array");
    }
  }
  cfg.kernels = merged.at("kernels");
  cfg.sensitivities = merged.at("sensitivities");
  cfg.trajectories = merged.at("trajectories");
  cfg.trials = static_cast<int>(detail::number(merged, "trials", "config"));
  if (cfg.trials < 1) throw ConfigError("config: 'trials' must be at least 1");
  cfg.lipschitz_scale = detail::number_or(merged, "lipschitz_scale", 1.0, "config");
  if (!(cfg.lipschitz_scale > 0.0)) throw ConfigError("config: 'lipschitz_scale' must be positive");

  std::set<std::string> known;
  for (const auto& [id, _] : suite_checks()) known.insert(id);
  if (merged.contains("checks")) {
    for (const auto& c : merged.at("checks")) {
      if (!c.is_string() || !known.count(c.get<std::string>())) throw ConfigError("config: unknown check " + c.dump());
      cfg.checks.push_back(c.get<std::string>());
    }
  } else {
    for (const auto& [id, _] : suite_checks()) cfg.checks.push_back(id);
  }
  if (merged.contains("tolerances")) {
    for (auto it = merged.at("tolerances").begin(); it != merged.at("tolerances").end(); ++it) {
      if (!known.count(it.key())) throw ConfigError("config: tolerance for unknown check '" + it.key() + "'");
      if (!it.value().is_number()) throw ConfigError("config: tolerance for '" + it.key() + "' must be a number");
      cfg.tolerances[it.key()] = it.value().get<double>();
    }
  }
  require_files_exist(merged, base);

  // build everything once so unknown names fail before any check runs
  const TimeDomain domain = cfg.grid.domain();
  for (std::size_t i = 0; i < cfg.kernels.size(); ++i) {
    parse_kernel(cfg.kernels[i], domain, base, "kernels[" + std::to_string(i) + "]");
  }
  for (std::size_t i = 0; i < cfg.sensitivities.size(); ++i) {
    parse_sensitivity(cfg.sensitivities[i], domain, base, "sensitivities[" + std::to_string(i) + "]");
  }
  for (std::size_t i = 0; i < cfg.trajectories.size(); ++i) {
    parse_trajectory_spec(cfg.trajectories[i], "trajectories[" + std::to_string(i) + "]");
  }
  return cfg;
}

inline SuiteConfig default_suite_config() { return parse_suite_config(json::object()); }

namespace detail {

inline std::string trajectory_csv(const Trajectory& f) {
  std::ostringstream out;
  write_trajectory_csv(out, f);
  return out.str();
}

/// Accumulates trial margins for one entry.
class EntryRecorder {
 public:
  static constexpr std::size_t max_witnesses = 3;

  EntryRecorder(std::string id, std::string description, double tolerance) {
    entry_.theorem_id = std::move(id);
    entry_.description = std::move(description);
    entry_.tolerance = tolerance;
  }

  /// Records one trial; make_witness is only called for failures.
  void record(double margin, const std::function<Witness()>& make_witness = {}) {
    ++entry_.trials;
    if (std::isnan(margin)) margin = -std::numeric_limits<double>::infinity();
    entry_.worst_margin = std::min(entry_.worst_margin, margin);
    if (margin < -entry_.tolerance) {
      ++entry_.failures;
      if (entry_.witnesses.size() < max_witnesses && make_witness) {
        Witness w = make_witness();
        w.note = "margin " + format_double(margin) + (w.note.empty() ? "" : "; " + w.note);
        entry_.witnesses.push_back(std::move(w));
      }
    }
  }

  VerificationEntry finish() && { return std::move(entry_); }

 private:
  VerificationEntry entry_;
};

struct NamedKernel {
  Kernel kernel;
  AdmissibilityReport admissibility;
  std::string label;
};

struct NamedSensitivity {
  SensitivityModel model;
  std::string label;
};

/// Everything a check needs, built once per run.
struct SuiteContext {
  const SuiteConfig& config;
  TimeDomain domain;
  std::vector<NamedKernel> kernels;
  std::vector<NamedSensitivity> sensitivities;
  std::vector<TrajectorySpec> specs;
  FunctionalOptions functional;

  explicit SuiteContext(const SuiteConfig& cfg) : config(cfg), domain(cfg.grid.domain()) {
    functional.quadrature.rel_tol = cfg.grid.tolerance;
    functional.induce.quadrature.rel_tol = cfg.grid.tolerance;
    for (std::size_t i = 0; i < cfg.kernels.size(); ++i) {
      Kernel k = parse_kernel(cfg.kernels[i], domain, cfg.base);
      auto report = classify(k, functional.classify);
      kernels.push_back({std::move(k), std::move(report), cfg.kernels[i].dump()});
    }
    for (std::size_t i = 0; i < cfg.sensitivities.size(); ++i) {
      sensitivities.push_back({parse_sensitivity(cfg.sensitivities[i], domain, cfg.base), cfg.sensitivities[i].dump()});
    }
    for (const auto& t : cfg.trajectories) specs.push_back(parse_trajectory_spec(t));
  }

  std::vector<const NamedKernel*> regular() const {
    std::vector<const NamedKernel*> out;
    for (const auto& k : kernels) {
      if (k.admissibility.class_regular) out.push_back(&k);
    }
    return out;
  }
  std::vector<const NamedKernel*> generalized() const {
    std::vector<const NamedKernel*> out;
    for (const auto& k : kernels) {
      if (k.admissibility.class_generalized) out.push_back(&k);
    }
    return out;
  }
  std::vector<const NamedSensitivity*> historical() const {
    std::vector<const NamedSensitivity*> out;
    for (const auto& s : sensitivities) {
      if (s.model.is_historical()) out.push_back(&s);
    }
    return out;
  }
  std::vector<const TrajectorySpec*> trajectory_specs(bool continuous_only) const {
    std::vector<const TrajectorySpec*> out;
    for (const auto& s : specs) {
      if (!continuous_only || s.kind != TrajectoryKind::piecewise_step) out.push_back(&s);
    }
    return out;
  }
};

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  return items[static_cast<std::size_t>(rng.integer(0, static_cast<int>(items.size()) - 1))];
}

inline Trajectory draw(Rng& rng, const SuiteContext& ctx, bool continuous_only) {
  const auto specs = ctx.trajectory_specs(continuous_only);
  if (specs.empty()) return Trajectory::constant(ctx.domain, 0.0);
  return random_trajectory(rng, *pick(rng, specs), ctx.domain);
}

inline std::vector<double> random_times(Rng& rng, const TimeDomain& domain, int count) {
  std::vector<double> times{domain.horizon()};
  for (int i = 1; i < count; ++i) times.push_back(rng.uniform(0.0, domain.horizon()));
  return times;
}

inline Witness witness(std::string note, std::vector<std::pair<std::string, Trajectory>> trajectories = {}) {
  Witness w;
  w.note = std::move(note);
  for (auto& [name, f] : trajectories) w.trajectories.emplace_back(name, trajectory_csv(f));
  return w;
}

inline void run_check(const std::string& id, const SuiteContext& ctx, Rng& rng, EntryRecorder& rec) {
  const int trials = ctx.config.trials;
  const double tol = ctx.config.grid.tolerance;
  QuadratureOptions qopts;
  qopts.rel_tol = tol;

  if (id == "cumulative_weight") {
    for (const auto* k : ctx.regular()) {
      for (double t : random_times(rng, ctx.domain, 16)) {
        const double w = cumulative_weight(k->kernel, t, qopts);
        rec.record(1.0 - w, [&] { return witness(k->label + " at t=" + format_double(t)); });
      }
    }
  } else if (id == "weighted_supremum" || id == "difference_control") {
    const auto kernels = ctx.regular();
    if (kernels.empty()) return;
    for (int trial = 0; trial < trials; ++trial) {
      const auto* k = pick(rng, kernels);
      Trajectory f = draw(rng, ctx, false);
      std::vector<std::pair<std::string, Trajectory>> inputs{{"f", f}};
      if (id == "difference_control") {
        Trajectory g = draw(rng, ctx, false);
        inputs.emplace_back("g", g);
        f = f - g;
      }
      const double bound = sup_norm(f);
      for (double t : random_times(rng, ctx.domain, 4)) {
        const double v = id == "weighted_supremum" ? weighted_convolution(k->kernel, f, t, {}, qopts)
                                                   : std::abs(signed_convolution(k->kernel, f, t, qopts));
        rec.record(bound - v, [&] { return witness(k->label + " at t=" + format_double(t), inputs); });
      }
    }
  } else if (id == "generalized_estimate") {
    const auto kernels = ctx.generalized();
    if (kernels.empty()) return;
    for (int trial = 0; trial < trials; ++trial) {
      const auto* k = pick(rng, kernels);
      const Trajectory f = draw(rng, ctx, false);
      const double bound = sup_norm(f) * k->admissibility.measurements.abs_integral;
      for (double t : random_times(rng, ctx.domain, 4)) {
        const double v = std::abs(signed_convolution(k->kernel, f, t, qopts));
        rec.record(bound - v, [&] { return witness(k->label + " at t=" + format_double(t), {{"f", f}}); });
      }
    }
  } else if (id == "tanh_lipschitz") {
    for (int trial = 0; trial < trials * 50; ++trial) {
      const double x = rng.uniform(-10, 10), y = rng.uniform(-10, 10), p = rng.uniform(-10, 10);
      const double g = std::exp(rng.uniform(-5, 5));
      const double diff = std::abs(tanh_deviation(x, p, g) - tanh_deviation(y, p, g));
      rec.record(g * std::abs(x - y) - diff, [&] {
        return witness("x=" + format_double(x) + ", y=" + format_double(y) + ", p=" + format_double(p) +
                       ", gamma0=" + format_double(g));
      });
    }
  } else if (id == "induced_bounds" || id == "induced_positivity" || id == "instantaneous_reduction") {
    const auto models = ctx.historical();
    if (models.empty()) return;
    for (int trial = 0; trial < trials; ++trial) {
      const auto* m = pick(rng, models);
      SensitivityModel model = m->model;
      Trajectory f = Trajectory::constant(ctx.domain, 0.0);
      if (id != "induced_positivity") f = draw(rng, ctx, false);
      if (id == "instantaneous_reduction") {
        const auto& p = model.parameters();
        model = historical_sensitivity(*model.reference(), p.alpha0, p.gamma0, 0.0, model.lambda_min(),
                                       model.lambda_max());
      }
      const auto induced = induce(model, f, ctx.functional.induce);
      double margin = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < ctx.domain.size(); ++i) {
        const double v = induced.values()[i];
        if (id == "induced_bounds") {
          margin = std::min({margin, v - model.lambda_min(), model.lambda_max() - v});
        } else if (id == "induced_positivity") {
          margin = std::min(margin, v - model.lambda_min());
        } else {
          const double s = ctx.domain.node(i);
          const Side side = i + 1 == ctx.domain.size() ? Side::left : Side::right;
          margin = std::min(margin, -std::abs(v - model.evaluate(s, f.evaluate(s, side), side)));
        }
      }
      rec.record(margin, [&] { return witness(m->label, {{"f", f}}); });
    }
  } else if (id == "induced_lipschitz") {
    const auto models = ctx.historical();
    if (models.empty()) return;
    for (int trial = 0; trial < trials; ++trial) {
      const auto* m = pick(rng, models);
      const Trajectory& r = *m->model.reference();
      // independent pairs, small perturbations, and shifts of the reference
      // where the deviation response is steepest
      Trajectory f = draw(rng, ctx, false);
      Trajectory g = draw(rng, ctx, false);
      const double eps = rng.uniform(1e-4, 1e-3) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
      if (trial % 3 == 1) {
        g = f + Trajectory::constant(ctx.domain, eps);
      } else if (trial % 3 == 2) {
        f = r;
        g = r + Trajectory::constant(ctx.domain, eps);
      }
      const double constant = ctx.config.lipschitz_scale * lipschitz_constant(m->model);
      const auto lf = induce(m->model, f, ctx.functional.induce);
      const auto lg = induce(m->model, g, ctx.functional.induce);
      double worst = 0.0;
      for (std::size_t i = 0; i < ctx.domain.size(); ++i) worst = std::max(worst, std::abs(lf.values()[i] - lg.values()[i]));
      rec.record(constant * sup_norm(f - g) - worst, [&] {
        return witness(m->label + ", L=" + format_double(constant) + ", max |dLambda|=" + format_double(worst),
                       {{"f", f}, {"g", g}});
      });
    }
  } else if (id == "induced_continuity") {
    const auto models = ctx.historical();
    if (models.empty()) return;
    const TimeDomain fine(ctx.domain.horizon(), 2 * ctx.domain.size() - 1);
    for (int trial = 0; trial < trials; ++trial) {
      const auto* m = pick(rng, models);
      const Trajectory f = draw(rng, ctx, true);
      const auto spread = [&](const TimeDomain& d) {
        const auto& p = m->model.parameters();
        const auto model = historical_sensitivity(m->model.reference()->with_domain(d), p.alpha0, p.gamma0, p.beta0,
                                                  m->model.lambda_min(), m->model.lambda_max());
        const auto values = induce(model, f.with_domain(d), ctx.functional.induce).values();
        double worst = 0.0;
        for (std::size_t i = 1; i < values.size(); ++i) worst = std::max(worst, std::abs(values[i] - values[i - 1]));
        return worst;
      };
      const double coarse = spread(ctx.domain);
      const double refined = spread(fine);
      rec.record(0.6 * coarse - refined, [&] {
        return witness(m->label + ", coarse " + format_double(coarse) + ", refined " + format_double(refined),
                       {{"f", f}});
      });
    }
  } else {
    // checks on the functional itself draw a random admissible (kernel, sensitivity) pair per trial
    const auto kernels = ctx.regular();
    if (kernels.empty()) return;
    const bool continuous = id == "two_sided_embedding" || id == "inclusion_lipschitz";
    for (int trial = 0; trial < trials; ++trial) {
      const auto* k = pick(rng, kernels);
      const auto& s = pick(rng, ctx.sensitivities);
      const MemoryFunctional functional(k->kernel, s.model, ctx.functional);
      const std::string label = k->label + " with " + s.label;
      const double C = functional.comparison_constant();

      if (id == "inclusion_lipschitz") {
        const Trajectory f = draw(rng, ctx, true);
        const Trajectory g = draw(rng, ctx, true);
        const auto out = inclusion_map_check(functional, f, g, tol);
        rec.record(out.margin, [&] { return witness(label, {{"f", f}, {"g", g}}); });
        continue;
      }
      Trajectory f = Trajectory::constant(ctx.domain, 0.0);
      if (id == "discontinuous_membership") {
        if (trial % 2 == 0) {
          const double cut = ctx.domain.horizon() * static_cast<double>(rng.integer(1, 1023)) / 1024.0;
          f = Trajectory::indicator(ctx.domain, cut);
        } else {
          TrajectorySpec spec;
          spec.kind = TrajectoryKind::piecewise_step;
          spec.breakpoint_count = rng.integer(1, 5);
          f = random_trajectory(rng, spec, ctx.domain);
        }
      } else if (!(id == "positive_definiteness" && trial == 0)) {
        f = draw(rng, ctx, continuous);
      }

      if (id == "J_finiteness") {
        double max_error = 0.0;
        const auto J = functional.J_nodes(functional.bind(f), &max_error);
        const double bound = (C - 1.0) * sup_norm(f);
        double margin = std::numeric_limits<double>::infinity();
        for (double v : J) margin = std::min({margin, v, bound - v});
        rec.record(margin, [&] { return witness(label, {{"f", f}}); });
        continue;
      }
      if (id == "strict_comparison") {
        if (!(sup_norm(f) > 1e-12)) continue;
        const auto out = strict_comparison_check(functional, f);
        if (!out.hypothesis_met) continue;
        rec.record(out.margin - tol, [&] { return witness(label + ", t*=" + format_double(out.t_star), {{"f", f}}); });
        continue;
      }
      const auto rep = functional.compute_S(f);
      double margin = 0.0;
      if (id == "positive_definiteness") {
        margin = rep.sup_norm_f == 0.0 ? -rep.S_value : rep.S_value - rep.sup_norm_f;
      } else if (id == "norm_comparison") {
        margin = rep.S_value - rep.sup_norm_f;
      } else if (id == "two_sided_embedding") {
        margin = std::min(rep.S_value - rep.sup_norm_f, rep.upper_bound - rep.S_value);
      } else if (id == "discontinuous_membership") {
        margin = std::isfinite(rep.S_value) ? rep.upper_bound - rep.S_value : -std::numeric_limits<double>::infinity();
      }
      rec.record(margin, [&] { return witness(label + ", S=" + format_double(rep.S_value), {{"f", f}}); });
    }
  }
}

inline double default_tolerance(const std::string& id, double quadrature_tol) {
  if (id == "tanh_lipschitz" || id == "instantaneous_reduction" || id == "induced_bounds" ||
      id == "induced_positivity") {
    return 1e-12;
  }
  if (id == "induced_lipschitz") return 2.0 * quadrature_tol;
  if (id == "strict_comparison") return 0.0;
  return 10.0 * quadrature_tol;
}

}  // namespace detail

/// Runs every configured check on inputs drawn from per-check streams of the
/// seeded generator, followed by a coverage self-check. Failures are recorded,
/// never thrown.
inline VerificationReport run_suite(const SuiteConfig& config, std::uint64_t seed) {
  const detail::SuiteContext ctx(config);
  VerificationReport report;
  report.seed = seed;
  report.config_digest = config_digest(config.canonical());

  const auto& checks = suite_checks();
  for (std::size_t index = 0; index < checks.size(); ++index) {
    const auto& [id, description] = checks[index];
    if (std::find(config.checks.begin(), config.checks.end(), id) == config.checks.end()) continue;
    const auto tol_it = config.tolerances.find(id);
    const double tol = tol_it != config.tolerances.end() ? tol_it->second
                                                          : detail::default_tolerance(id, config.grid.tolerance);
    detail::EntryRecorder rec(id, description, tol);
    Rng rng(seed, index + 1);
    detail::run_check(id, ctx, rng, rec);
    report.entries.push_back(std::move(rec).finish());
  }

  detail::EntryRecorder coverage("coverage", "every check is present and ran at least one trial", 0.0);
  for (const auto& [id, _] : checks) {
    const auto it = std::find_if(report.entries.begin(), report.entries.end(),
                                 [&](const VerificationEntry& e) { return e.theorem_id == id; });
    const bool ran = it != report.entries.end() && it->trials > 0;
    coverage.record(ran ? 0.0 : -1.0, [&] {
      return detail::witness(it == report.entries.end() ? id + " is not configured" : id + " ran no trials");
    });
  }
  report.entries.push_back(std::move(coverage).finish());
  return report;
}

inline json to_json(const VerificationReport& report) {
  json entries = json::array();
  for (const auto& e : report.entries) {
    json witnesses = json::array();
    for (const auto& w : e.witnesses) {
      json traj = json::object();
      for (const auto& [name, csv] : w.trajectories) traj[name] = csv;
      witnesses.push_back({{"note", w.note}, {"trajectories", traj}});
    }
    entries.push_back({{"theorem_id", e.theorem_id},
                       {"description", e.description},
                       {"trials", e.trials},
                       {"failures", e.failures},
                       {"worst_margin", std::isfinite(e.worst_margin) ? json(e.worst_margin) : json(nullptr)},
                       {"tolerance", e.tolerance},
                       {"witnesses", witnesses}});
  }
  return {{"seed", report.seed},
          {"config_digest", report.config_digest},
          {"passed", report.passed()},
          {"total_failures", report.total_failures()},
          {"entries", entries}};
}

}  // namespace memfun
