// Acceptance checks: one PASS/FAIL line per criterion.
//
//   acceptance [--criterion N] [--cli path/to/memfun]
//
// Without --criterion every criterion runs. Expected values are either closed
// forms evaluated here or 30-digit reference values computed independently.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "memfun/functional.hpp"
#include "memfun/kernel.hpp"
#include "memfun/random.hpp"
#include "memfun/sensitivity.hpp"

namespace {

using namespace memfun;

constexpr double kPowerLawHalf = 0.618033988749894848205;     // gamma 0.5, eps 0.25, T 1
constexpr double kPowerLawPoint3 = 0.911920226582497308;      // gamma 0.3, eps 0.1, T 2
constexpr double kIndicatorS = 1.62245933120185456464;        // 1 + (1 - e^{-1/2}) / (1 - e^{-1})

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(double x) { return format_double(x); }

std::string short_fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Trajectory smooth(Rng& rng, const TimeDomain& domain, double amplitude = 1.0) {
  TrajectorySpec spec;
  spec.kind = rng.uniform() < 0.5 ? TrajectoryKind::fourier : TrajectoryKind::polynomial;
  spec.amplitude = amplitude;
  return random_trajectory(rng, spec, domain);
}

Trajectory any_trajectory(Rng& rng, const TimeDomain& domain, double amplitude = 1.0) {
  TrajectorySpec spec;
  spec.kind = static_cast<TrajectoryKind>(rng.integer(0, 2));
  spec.amplitude = amplitude;
  spec.breakpoint_count = rng.integer(1, 4);
  return random_trajectory(rng, spec, domain);
}

Outcome kernel_normalization() {
  Outcome out;
  double worst = 0.0;
  for (double alpha : {0.5, 1.0, 5.0}) {
    for (double T : {1.0, 2.0}) {
      const double err = std::abs(cumulative_weight(exponential_kernel(alpha, TimeDomain(T)), T) - 1.0);
      worst = std::max(worst, err);
      out.require(err <= 1e-8, "alpha=" + fmt(alpha) + " T=" + fmt(T) + " error " + fmt(err));
    }
  }
  if (out.passed) out.detail = "max |integral - 1| = " + short_fmt(worst);
  return out;
}

Outcome power_law_closed_form() {
  Outcome out;
  struct Case {
    double gamma, eps, T, reference;
  };
  std::string summary;
  for (const Case& c : {Case{0.5, 0.25, 1.0, kPowerLawHalf}, Case{0.3, 0.1, 2.0, kPowerLawPoint3}}) {
    const double closed = (std::pow(c.T + c.eps, 1.0 - c.gamma) - std::pow(c.eps, 1.0 - c.gamma)) / std::pow(c.T, 1.0 - c.gamma);
    const double q = cumulative_weight(power_law_kernel(c.gamma, c.eps, TimeDomain(c.T)), c.T);
    out.require(std::abs(closed - c.reference) <= 1e-14, "closed form disagrees with reference value");
    out.require(std::abs(q - closed) <= 1e-7, "gamma=" + fmt(c.gamma) + " quadrature " + fmt(q) + " vs " + fmt(closed));
    out.require(q < 1.0, "integral not below 1");
    summary += (summary.empty() ? "" : ", ") + fmt(q);
  }
  if (out.passed) out.detail = "integrals " + summary;
  return out;
}

Outcome finite_memory_variation() {
  Outcome out;
  std::string summary;
  for (double delta : {0.25, 0.5, 1.0}) {
    const double tv = total_variation_estimate(finite_memory_kernel(delta, TimeDomain(1.0)));
    summary += (summary.empty() ? "" : ", ") + std::string("TV(") + fmt(delta) + ")=" + fmt(tv);
    out.require(std::abs(tv - 1.0 / delta) <= 1e-12,
                "Delta=" + fmt(delta) + ": TV " + fmt(tv) + " != " + fmt(1.0 / delta) +
                    (delta == 1.0 ? " (with Delta = T the kernel is constant on [0, T]; its drop to 0 lies outside the horizon)"
                                  : ""));
  }
  if (out.passed) out.detail = summary;
  return out;
}

Outcome classification_matrix() {
  Outcome out;
  const TimeDomain unit(1.0);
  const auto e = classify(exponential_kernel(1.0, unit));
  out.require(e.class_math && e.class_regular && e.class_generalized, "exponential not in every class");
  const auto p = classify(power_law_kernel(0.5, 0.25, unit));
  out.require(p.class_generalized && !p.class_regular && p.failed(Condition::R2), "power-law not generalized-only with R2");
  const auto f = classify(finite_memory_kernel(0.5, unit));
  out.require(!f.class_regular && f.failed(Condition::R3), "finite-memory not rejected on R3");
  if (out.passed) out.detail = "exponential regular; power-law fails R2; finite-memory fails R3";
  return out;
}

Outcome kernel_integral_estimates() {
  Outcome out;
  Rng rng(5);
  const TimeDomain unit(1.0);
  double worst_weight = -1.0, worst_conv = -1.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto k = exponential_kernel(rng.uniform(0.2, 8.0), unit);
    const auto f = smooth(rng, unit, rng.uniform(0.1, 3.0));
    const double bound = sup_norm(f);
    for (int i = 0; i < 64; ++i) {
      const double t = i == 0 ? 1.0 : rng.uniform();
      worst_weight = std::max(worst_weight, cumulative_weight(k, t) - 1.0);
      worst_conv = std::max(worst_conv, weighted_convolution(k, f, t) - bound);
    }
  }
  out.require(worst_weight <= 1e-8, "cumulative weight exceeds 1 by " + fmt(worst_weight));
  out.require(worst_conv <= 1e-8, "weighted convolution exceeds ||f|| by " + fmt(worst_conv));
  if (out.passed) {
    out.detail = "max excess: weight " + short_fmt(worst_weight) + ", convolution " + short_fmt(worst_conv);
  }
  return out;
}

Outcome sensitivity_properties() {
  Outcome out;
  Rng rng(6);
  const TimeDomain unit(1.0);
  const auto r = smooth(rng, unit);
  int bound_failures = 0, lipschitz_failures = 0, reduction_failures = 0;
  double worst_ratio = 0.0, worst_reduction = 0.0, min_zero = INFINITY;
  for (int trial = 0; trial < 200; ++trial) {
    const double lmin = rng.uniform(0.1, 1.0), lmax = lmin + rng.uniform(0.1, 2.0);
    const double alpha0 = rng.uniform(0.2, 5.0), gamma0 = rng.uniform(0.2, 4.0), beta0 = rng.uniform(0.0, 3.0);
    const auto model = historical_sensitivity(r, alpha0, gamma0, beta0, lmin, lmax);
    Trajectory f = any_trajectory(rng, unit, 2.0);
    Trajectory g = any_trajectory(rng, unit, 2.0);
    if (trial % 3 == 1) g = f + Trajectory::constant(unit, rng.uniform(-1e-3, 1e-3));
    if (trial % 3 == 2) {
      f = r;
      g = r + Trajectory::constant(unit, rng.uniform(-1e-3, 1e-3));
    }
    const auto lf = induce(model, f);
    const auto lg = induce(model, g);
    double diff = 0.0;
    for (std::size_t i = 0; i < unit.size(); ++i) {
      for (double v : {lf.values()[i], lg.values()[i]}) {
        if (v < lmin || v > lmax) ++bound_failures;
      }
      diff = std::max(diff, std::abs(lf.values()[i] - lg.values()[i]));
    }
    const double bound = lipschitz_constant(model) * sup_norm(f - g);
    if (diff > bound + 2e-8) ++lipschitz_failures;
    if (bound > 0.0) worst_ratio = std::max(worst_ratio, diff / bound);

    if (trial % 4 == 0) {
      const auto zero = induce(model, Trajectory::constant(unit, 0.0));
      for (double v : zero.values()) min_zero = std::min(min_zero, v - lmin);
      const auto plain = historical_sensitivity(r, alpha0, gamma0, 0.0, lmin, lmax);
      const auto pointwise = instantaneous_sensitivity(r, gamma0, lmin, lmax);
      const auto reduced = induce(plain, f);
      for (std::size_t i = 0; i < unit.size(); ++i) {
        const double s = unit.node(i);
        const Side side = i + 1 == unit.size() ? Side::left : Side::right;
        const double e = std::abs(reduced.values()[i] - pointwise.evaluate(s, f.evaluate(s, side), side));
        worst_reduction = std::max(worst_reduction, e);
        if (e > 1e-12) ++reduction_failures;
      }
    }
  }
  out.require(bound_failures == 0, std::to_string(bound_failures) + " node values outside [lambda_min, lambda_max]");
  out.require(lipschitz_failures == 0, std::to_string(lipschitz_failures) + " pairs exceed L ||f-g|| + 2e-8");
  out.require(min_zero >= 0.0, "Lambda_0 below lambda_min by " + fmt(-min_zero));
  out.require(reduction_failures == 0, "beta0 = 0 reduction off by " + fmt(worst_reduction));
  if (out.passed) {
    out.detail = "max |dLambda| / (L ||f-g||) = " + short_fmt(worst_ratio) + ", beta0 = 0 max error " +
                 short_fmt(worst_reduction);
  }
  return out;
}

Outcome tanh_lipschitz() {
  Outcome out;
  Rng rng(7);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.uniform(-10, 10), y = rng.uniform(-10, 10), p = rng.uniform(-10, 10);
    const double g = std::exp(rng.uniform(-5, 5));
    const double lhs = std::abs(tanh_deviation(x, p, g) - tanh_deviation(y, p, g));
    const double rhs = g * std::abs(x - y);
    if (rhs > 0.0) worst = std::max(worst, lhs / rhs);
    out.require(lhs <= rhs, "violated at x=" + fmt(x) + " y=" + fmt(y));
    if (!out.passed) break;
  }
  if (out.passed) out.detail = "max ratio " + short_fmt(worst);
  return out;
}

/// A random admissible (kernel, sensitivity) pair on the domain.
MemoryFunctional random_functional(Rng& rng, const TimeDomain& domain, const Trajectory& reference) {
  Kernel k = rng.uniform() < 0.8 ? exponential_kernel(rng.uniform(0.2, 8.0), domain)
                                 : finite_memory_kernel(domain.horizon(), domain);
  const double lmin = rng.uniform(0.1, 1.0), lmax = lmin + rng.uniform(0.0, 2.0);
  SensitivityModel s = rng.uniform() < 0.25 ? constant_sensitivity(lmin)
                                            : instantaneous_sensitivity(reference, rng.uniform(0.2, 4.0), lmin, lmax + 0.01);
  return MemoryFunctional(std::move(k), std::move(s));
}

Outcome two_sided_bound() {
  Outcome out;
  Rng rng(8);
  const TimeDomain unit(1.0);
  const auto reference = smooth(rng, unit);
  double lower = INFINITY, upper = INFINITY;
  for (int trial = 0; trial < 200; ++trial) {
    const auto functional = random_functional(rng, unit, reference);
    out.require(functional.uses_fast_path(), "fast path unavailable");
    const auto rep = functional.compute_S(smooth(rng, unit, rng.uniform(0.1, 3.0)));
    lower = std::min(lower, rep.S_value - rep.sup_norm_f);
    upper = std::min(upper, rep.upper_bound - rep.S_value);
  }
  out.require(lower >= -1e-8, "S below ||f|| by " + fmt(-lower));
  out.require(upper >= -1e-8, "S above the upper bound by " + fmt(-upper));
  if (out.passed) out.detail = "min lower slack " + short_fmt(lower) + ", min upper slack " + short_fmt(upper);
  return out;
}

Outcome strict_comparison() {
  Outcome out;
  Rng rng(9);
  const TimeDomain unit(1.0);
  const auto reference = smooth(rng, unit);
  const auto zero = random_functional(rng, unit, reference).compute_S(Trajectory::constant(unit, 0.0));
  out.require(zero.S_value == 0.0, "S(0) = " + fmt(zero.S_value));
  int accepted = 0, draws = 0;
  double worst = INFINITY;
  while (accepted < 50 && draws < 500) {
    ++draws;
    const auto functional = random_functional(rng, unit, reference);
    const auto f = any_trajectory(rng, unit, rng.uniform(0.1, 3.0));
    if (!(sup_norm(f) > 1e-12)) continue;
    const auto check = strict_comparison_check(functional, f);
    if (!check.hypothesis_met) continue;
    ++accepted;
    worst = std::min(worst, check.margin);
  }
  out.require(accepted == 50, "only " + std::to_string(accepted) + " trajectories met the hypothesis");
  out.require(worst > 1e-6, "S - ||f|| = " + fmt(worst));
  if (out.passed) out.detail = "S(0) = 0; min S - ||f|| over 50 = " + short_fmt(worst);
  return out;
}

Outcome discontinuous_membership() {
  Outcome out;
  const TimeDomain unit(1.0);
  const auto rep = compute_S(Trajectory::indicator(unit, 0.5), exponential_kernel(1.0, unit), constant_sensitivity(1.0));
  out.require(std::abs(rep.S_value - kIndicatorS) <= 1e-7, "S = " + fmt(rep.S_value) + " vs " + fmt(kIndicatorS));
  const double bound = 1.0 + rep.lambda_inf * rep.kappa_inf * rep.horizon;
  out.require(rep.S_value <= bound, "S above 1 + Lambda_inf kappa_inf T = " + fmt(bound));
  if (out.passed) out.detail = "S = " + fmt(rep.S_value) + " <= " + fmt(bound);
  return out;
}

Outcome fast_path_equivalence() {
  Outcome out;
  Rng rng(11);
  const TimeDomain unit(1.0);
  const auto reference = smooth(rng, unit);
  double worst_d = 0.0, worst_j = 0.0;
  FunctionalOptions direct;
  direct.fast_path = false;
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = any_trajectory(rng, unit, rng.uniform(0.1, 3.0));
    const auto model = historical_sensitivity(reference, rng.uniform(0.2, 5.0), rng.uniform(0.2, 4.0),
                                              rng.uniform(0.0, 3.0), 0.5, 1.5);
    const auto a = induce(model, f, {AccumulatorMethod::recurrence});
    const auto b = induce(model, f, {AccumulatorMethod::direct});
    for (std::size_t i = 0; i < unit.size(); ++i) {
      worst_d = std::max(worst_d, std::abs(a.deviation_accumulator()[i] - b.deviation_accumulator()[i]));
    }
    const auto kernel = exponential_kernel(rng.uniform(0.2, 8.0), unit);
    const auto sensitivity = instantaneous_sensitivity(reference, 2.0, 0.5, 1.5);
    const MemoryFunctional fast(kernel, sensitivity);
    const MemoryFunctional slow(kernel, sensitivity, direct);
    const auto jf = fast.J_nodes(fast.bind(f));
    const auto js = slow.J_nodes(slow.bind(f));
    for (std::size_t i = 0; i < jf.size(); ++i) worst_j = std::max(worst_j, std::abs(jf[i] - js[i]));
  }
  out.require(worst_d <= 1e-8, "accumulator recurrence off by " + fmt(worst_d));
  out.require(worst_j <= 1e-8, "convolution recurrence off by " + fmt(worst_j));
  if (out.passed) out.detail = "max differences: D_f " + short_fmt(worst_d) + ", J_f " + short_fmt(worst_j);
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism(const std::string& cli) {
  Outcome out;
  if (cli.empty()) {
    out.require(false, "no --cli binary given");
    return out;
  }
  const auto base = std::filesystem::temp_directory_path() / ("memfun_acceptance_" + std::to_string(::getpid()));
  std::filesystem::remove_all(base);
  std::string reports[2];
  for (int run = 0; run < 2; ++run) {
    const auto dir = base / ("run" + std::to_string(run));
    const std::string cmd = "\"" + cli + "\" verify --seed 42 --out \"" + dir.string() + "\" > /dev/null";
    const int status = std::system(cmd.c_str());
    out.require(status == 0, "verify run " + std::to_string(run) + " exited with status " + std::to_string(status));
    reports[run] = slurp(dir / "verification.json");
  }
  std::filesystem::remove_all(base);
  out.require(!reports[0].empty(), "no report written");
  out.require(reports[0] == reports[1], "reports differ");
  if (out.passed) out.detail = "two reports of " + std::to_string(reports[0].size()) + " bytes are identical";
  return out;
}

struct Criterion {
  const char* title;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  std::string cli;
  app.add_option("--criterion", only, "Run a single criterion (1-12)")->check(CLI::Range(1, 12));
  app.add_option("--cli", cli, "Path to the memfun command-line tool");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {"exponential kernel normalization", 1, kernel_normalization},
      {"power-law closed-form integral", 1, power_law_closed_form},
      {"finite-memory total variation = 1/Delta", 1, finite_memory_variation},
      {"classification matrix", 1, classification_matrix},
      {"kernel integral estimates", 10, kernel_integral_estimates},
      {"induced sensitivity bounds, Lipschitz, positivity, reduction", 30, sensitivity_properties},
      {"tanh Lipschitz", 1, tanh_lipschitz},
      {"two-sided functional bound", 60, two_sided_bound},
      {"positive definiteness and strict comparison", 30, strict_comparison},
      {"indicator membership", 1, discontinuous_membership},
      {"fast-path equivalence", 30, fast_path_equivalence},
      {"verify determinism", 120, [&cli] { return determinism(cli); }},
  };

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    const auto& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.require(seconds < c.budget_seconds, "took " + short_fmt(seconds) + " s, budget " + short_fmt(c.budget_seconds) + " s");
    std::cout << (out.passed ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << c.title << " (" << out.detail
              << ", " << short_fmt(seconds) << " s)" << std::endl;
    all = all && out.passed;
  }
  return all ? 0 : 1;
}
