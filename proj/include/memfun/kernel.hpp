#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "memfun/error.hpp"
#include "memfun/format.hpp"
#include "memfun/quadrature.hpp"
#include "memfun/time_domain.hpp"
#include "memfun/trajectory.hpp"

namespace memfun {

/// Analytic constants a kernel constructor can certify in closed form.
struct KernelConstants {
  std::optional<double> lower_bound;      // m_kappa
  std::optional<double> upper_bound;      // M_kappa
  std::optional<double> lipschitz;        // L_kappa
  std::optional<double> ess_bound;        // C_kappa
  std::optional<double> nondegeneracy;    // delta_kappa
  std::optional<double> total_variation;  // Var_I(kappa)
  std::optional<double> integral;
};

/// kappa(tau) = scale * exp(-rate * tau); enables the O(N) recurrence paths.
struct ExponentialForm {
  double scale;
  double rate;
};

/// A stationary memory kernel: a weight on elapsed time tau in [0, T].
class Kernel {
 public:
  /// Sided evaluation; the side only matters at a breakpoint.
  using Function = std::function<double(double, Side)>;

  Kernel(TimeDomain domain, std::string name, Function fn, std::vector<double> breakpoints = {},
         KernelConstants constants = {}, std::optional<ExponentialForm> exponential = std::nullopt,
         std::vector<double> knots = {})
      : domain_(std::move(domain)),
        name_(std::move(name)),
        fn_(std::move(fn)),
        breakpoints_(std::move(breakpoints)),
        constants_(constants),
        exponential_(exponential),
        knots_(std::move(knots)) {
    std::sort(breakpoints_.begin(), breakpoints_.end());
    breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
    for (double b : breakpoints_) {
      if (!(b > 0.0 && b < domain_.horizon())) {
        throw InvalidParameter("kernel breakpoints must lie strictly inside (0, T)");
      }
    }
  }

  /// Kernel from a plain callable with no discontinuities.
  static Kernel from_function(TimeDomain domain, std::string name, std::function<double(double)> fn,
                              KernelConstants constants = {}) {
    return Kernel(std::move(domain), std::move(name),
                  [fn = std::move(fn)](double tau, Side) { return fn(tau); }, {}, constants);
  }

  /// Kernel whose lag profile is a (possibly sampled) trajectory on [0, T].
  static Kernel from_trajectory(const Trajectory& profile, std::string name = "sampled") {
    return Kernel(profile.domain(), std::move(name),
                  [profile](double tau, Side side) { return profile.evaluate(tau, side); },
                  profile.breakpoints(), {}, std::nullopt, profile.knots());
  }

  const TimeDomain& domain() const noexcept { return domain_; }
  const std::string& name() const noexcept { return name_; }
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const KernelConstants& constants() const noexcept { return constants_; }
  const std::optional<ExponentialForm>& exponential_form() const noexcept { return exponential_; }
  /// Interior points where the kernel is continuous but not smooth.
  const std::vector<double>& knots() const noexcept { return knots_; }

  /// Breakpoints and knots together: the kernel is smooth between them.
  std::vector<double> smoothness_splits() const {
    std::vector<double> out = breakpoints_;
    out.insert(out.end(), knots_.begin(), knots_.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  double evaluate(double tau, Side side) const {
    const double horizon = domain_.horizon();
    const double snap = 8.0 * std::numeric_limits<double>::epsilon() * horizon;
    if (tau < 0.0 && tau > -snap) tau = 0.0;
    if (tau > horizon && tau < horizon + snap) tau = horizon;
    domain_.require_contains(tau);
    // lags computed as t - s may miss a breakpoint by an ulp or two
    for (double b : breakpoints_) {
      if (std::abs(tau - b) <= snap) return fn_(b, side);
    }
    return fn_(tau, side);
  }

  /// Value at tau using the kernel's own definition at a breakpoint.
  double operator()(double tau) const { return evaluate(tau, Side::left); }

  /// Same kernel with its constants replaced (used to build falsification cases).
  Kernel with_constants(KernelConstants constants) const {
    Kernel out = *this;
    out.constants_ = constants;
    return out;
  }

 private:
  TimeDomain domain_;
  std::string name_;
  Function fn_;
  std::vector<double> breakpoints_;
  KernelConstants constants_;
  std::optional<ExponentialForm> exponential_;
  std::vector<double> knots_;
};

/// kappa(tau) = alpha e^{-alpha tau} / (1 - e^{-alpha T}).
inline Kernel exponential_kernel(double alpha, TimeDomain domain) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidParameter("exponential kernel rate must be positive, got " + std::to_string(alpha));
  }
  const double horizon = domain.horizon();
  const double norm = -std::expm1(-alpha * horizon);  // 1 - e^{-alpha T}
  const double scale = alpha / norm;
  KernelConstants c;
  c.lower_bound = scale * std::exp(-alpha * horizon);
  c.upper_bound = scale;
  c.lipschitz = alpha * alpha / norm;
  c.ess_bound = scale;
  c.integral = 1.0;
  c.nondegeneracy = 1.0;
  c.total_variation = *c.upper_bound - *c.lower_bound;
  return Kernel(std::move(domain), "exponential(alpha=" + std::to_string(alpha) + ")",
                [scale, alpha](double tau, Side) { return scale * std::exp(-alpha * tau); }, {}, c,
                ExponentialForm{scale, alpha});
}

/// kappa(tau) = ((1-gamma)/T^{1-gamma}) (T - tau + eps)^{-gamma}.
inline Kernel power_law_kernel(double gamma, double eps, TimeDomain domain) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw InvalidParameter("power-law exponent must lie in (0, 1), got " + std::to_string(gamma));
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw InvalidParameter("power-law offset must be positive, got " + std::to_string(eps));
  }
  const double horizon = domain.horizon();
  const double prefactor = (1.0 - gamma) / std::pow(horizon, 1.0 - gamma);
  KernelConstants c;
  c.upper_bound = prefactor * std::pow(eps, -gamma);
  c.lower_bound = prefactor * std::pow(horizon + eps, -gamma);
  c.lipschitz = gamma * prefactor * std::pow(eps, -gamma - 1.0);
  c.ess_bound = c.upper_bound;
  c.integral = (std::pow(horizon + eps, 1.0 - gamma) - std::pow(eps, 1.0 - gamma)) / std::pow(horizon, 1.0 - gamma);
  c.nondegeneracy = c.integral;
  c.total_variation = *c.upper_bound - *c.lower_bound;
  return Kernel(std::move(domain),
                "power_law(gamma=" + std::to_string(gamma) + ", eps=" + std::to_string(eps) + ")",
                [prefactor, gamma, eps, horizon](double tau, Side) {
                  return prefactor * std::pow(horizon - tau + eps, -gamma);
                },
                {}, c);
}

/// kappa = 1/Delta on [0, Delta], 0 on (Delta, T].
inline Kernel finite_memory_kernel(double window, TimeDomain domain) {
  const double horizon = domain.horizon();
  if (!(window > 0.0 && window <= horizon)) {
    throw InvalidParameter("finite-memory window must lie in (0, T], got " + std::to_string(window));
  }
  const double height = 1.0 / window;
  KernelConstants c;
  c.upper_bound = height;
  c.ess_bound = height;
  c.integral = 1.0;
  c.nondegeneracy = 1.0;
  std::vector<double> breaks;
  std::optional<ExponentialForm> exponential;
  if (window < horizon) {
    c.total_variation = height;
    breaks.push_back(window);
  } else {
    // constant on all of I: no jump inside the horizon
    c.lower_bound = height;
    c.lipschitz = 0.0;
    c.total_variation = 0.0;
    exponential = ExponentialForm{height, 0.0};
  }
  return Kernel(std::move(domain), "finite_memory(delta=" + std::to_string(window) + ")",
                [window, height](double tau, Side side) {
                  if (tau < window) return height;
                  if (tau > window) return 0.0;
                  return side == Side::left ? height : 0.0;
                },
                std::move(breaks), c, exponential);
}

// ---------------------------------------------------------------------------
// Admissibility classification

enum class Condition { M1, M2, M3, R1, R2, R3, G1, G2, G3 };

inline const char* to_string(Condition c) {
  switch (c) {
    case Condition::M1: return "M1";
    case Condition::M2: return "M2";
    case Condition::M3: return "M3";
    case Condition::R1: return "R1";
    case Condition::R2: return "R2";
    case Condition::R3: return "R3";
    case Condition::G1: return "G1";
    case Condition::G2: return "G2";
    case Condition::G3: return "G3";
  }
  return "?";
}

struct ClassifyTolerances {
  double zero = 1e-12;          // M1: min value >= -zero
  double positivity = 1e-12;    // R1: min value >= positivity
  double normalization = 1e-6;  // R2: |integral - 1| <= normalization
  double nondegeneracy = 1e-12; // G2: |integral| >= nondegeneracy
  QuadratureOptions quadrature{};
};

struct KernelMeasurements {
  double integral = 0.0;
  double min_value = 0.0;
  double max_value = 0.0;
  double lipschitz_estimate = 0.0;
  double total_variation_estimate = 0.0;
  double abs_integral = 0.0;
};

struct ConditionFailure {
  Condition condition;
  std::string message;
};

struct AdmissibilityReport {
  bool class_math = false;
  bool class_regular = false;
  bool class_generalized = false;
  KernelMeasurements measurements;
  std::vector<ConditionFailure> failures;
  /// R3 was judged from grid slopes rather than a declared constant.
  bool lipschitz_empirical = false;

  bool failed(Condition c) const {
    return std::any_of(failures.begin(), failures.end(),
                       [c](const ConditionFailure& f) { return f.condition == c; });
  }
};

/// Sequence of kernel values in time order: grid nodes, with both one-sided
/// values inserted at every breakpoint.
inline std::vector<double> kernel_profile(const Kernel& kernel) {
  const auto nodes = kernel.domain().nodes();
  const auto& breaks = kernel.breakpoints();
  std::vector<double> values;
  values.reserve(nodes.size() + 2 * breaks.size());
  std::size_t b = 0;
  for (double t : nodes) {
    while (b < breaks.size() && breaks[b] < t) {
      values.push_back(kernel.evaluate(breaks[b], Side::left));
      values.push_back(kernel.evaluate(breaks[b], Side::right));
      ++b;
    }
    if (b < breaks.size() && breaks[b] == t) {
      values.push_back(kernel.evaluate(t, Side::left));
      values.push_back(kernel.evaluate(t, Side::right));
      ++b;
    } else {
      values.push_back(kernel(t));
    }
  }
  return values;
}

/// Grid estimate of Var_I(kappa): sum of absolute increments over the node
/// sequence, breakpoint jumps included.
inline double total_variation_estimate(const Kernel& kernel) {
  const auto values = kernel_profile(kernel);
  double tv = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) tv += std::abs(values[i] - values[i - 1]);
  return tv;
}

inline double cumulative_weight(const Kernel& kernel, double t, const QuadratureOptions& opts = {}) {
  kernel.domain().require_contains(t);
  return integrate([&kernel](double tau, Side side) { return kernel.evaluate(tau, side); }, 0.0, t,
                   kernel.smoothness_splits(), opts)
      .value;
}

inline AdmissibilityReport classify(const Kernel& kernel, const ClassifyTolerances& tol = {}) {
  AdmissibilityReport report;
  auto& m = report.measurements;
  const auto sided = [&kernel](double tau, Side side) { return kernel.evaluate(tau, side); };
  const double horizon = kernel.domain().horizon();

  const auto profile = kernel_profile(kernel);
  m.min_value = *std::min_element(profile.begin(), profile.end());
  m.max_value = *std::max_element(profile.begin(), profile.end());
  double max_abs = 0.0;
  for (double v : profile) max_abs = std::max(max_abs, std::abs(v));
  for (std::size_t i = 1; i < profile.size(); ++i) {
    m.total_variation_estimate += std::abs(profile[i] - profile[i - 1]);
  }
  const auto nodes = kernel.domain().nodes();
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    m.lipschitz_estimate =
        std::max(m.lipschitz_estimate, std::abs(kernel(nodes[i]) - kernel(nodes[i - 1])) / (nodes[i] - nodes[i - 1]));
  }
  const auto splits = kernel.smoothness_splits();
  m.integral = integrate(sided, 0.0, horizon, splits, tol.quadrature).value;
  m.abs_integral =
      integrate([&](double tau, Side side) { return std::abs(kernel.evaluate(tau, side)); }, 0.0, horizon, splits,
                tol.quadrature)
          .value;

  auto fail = [&report](Condition c, std::string msg) { report.failures.push_back({c, std::move(msg)}); };
  const auto num = [](double x) { return format_double(x); };

  if (!(m.min_value >= -tol.zero)) fail(Condition::M1, "negative value " + num(m.min_value));
  if (!std::isfinite(m.abs_integral)) fail(Condition::M2, "integral of |kappa| is not finite");
  // M3 holds structurally: every representation is piecewise continuous.

  if (!(m.min_value >= tol.positivity)) {
    fail(Condition::R1, "sampled minimum " + num(m.min_value) + " is not bounded away from zero");
  } else if (!std::isfinite(m.max_value)) {
    fail(Condition::R1, "kernel is unbounded on the grid");
  }
  if (!(std::abs(m.integral - 1.0) <= tol.normalization)) {
    fail(Condition::R2, "integral " + num(m.integral) + " differs from 1");
  }
  bool jump_found = false;
  for (double b : kernel.breakpoints()) {
    const double jump = kernel.evaluate(b, Side::right) - kernel.evaluate(b, Side::left);
    if (jump != 0.0) {
      fail(Condition::R3, "jump discontinuity of size " + num(std::abs(jump)) + " at tau = " + num(b));
      jump_found = true;
    }
  }
  if (!jump_found) {
    if (!kernel.constants().lipschitz) {
      report.lipschitz_empirical = true;
      if (!std::isfinite(m.lipschitz_estimate)) fail(Condition::R3, "grid slopes are not finite");
    }
  }

  if (!std::isfinite(max_abs)) fail(Condition::G1, "kernel is not bounded on the grid");
  if (!std::isfinite(m.abs_integral)) {
    fail(Condition::G2, "integral of |kappa| is not finite");
  } else if (!(std::abs(m.integral) >= tol.nondegeneracy)) {
    fail(Condition::G2, "total integral " + num(m.integral) + " vanishes (non-degeneracy)");
  }
  if (!std::isfinite(m.total_variation_estimate)) fail(Condition::G3, "total variation is not finite");

  report.class_math = !report.failed(Condition::M1) && !report.failed(Condition::M2);
  report.class_regular = report.class_math && !report.failed(Condition::R1) && !report.failed(Condition::R2) &&
                         !report.failed(Condition::R3);
  report.class_generalized =
      !report.failed(Condition::G1) && !report.failed(Condition::G2) && !report.failed(Condition::G3);
  return report;
}

// ---------------------------------------------------------------------------
// Convolution integrals

/// Split points for an integrand s -> kappa(t - s) g(s) on [0, t].
inline std::vector<double> lag_splits(const Kernel& kernel, double t, std::span<const double> trajectory_splits) {
  std::vector<double> splits;
  splits.reserve(trajectory_splits.size() + kernel.breakpoints().size());
  for (double s : trajectory_splits) {
    if (s > 0.0 && s < t) splits.push_back(s);
  }
  for (double b : kernel.smoothness_splits()) {
    if (b < t) splits.push_back(t - b);
  }
  return splits;
}

/// int_0^t weight(s) kappa(t - s) |f(s)| ds. An empty weight means 1.
inline double weighted_convolution(const Kernel& kernel, const Trajectory& f, double t,
                                   const std::function<double(double)>& weight = {},
                                   const QuadratureOptions& opts = {}) {
  kernel.domain().require_contains(t);
  const auto splits = lag_splits(kernel, t, smoothness_splits(f));
  const auto integrand = [&](double s, Side side) {
    const double w = weight ? weight(s) : 1.0;
    return w * kernel.evaluate(t - s, opposite(side)) * std::abs(f.evaluate(s, side));
  };
  return integrate(integrand, 0.0, t, splits, opts).value;
}

/// int_0^t kappa(t - s) f(s) ds, without absolute values.
inline double signed_convolution(const Kernel& kernel, const Trajectory& f, double t,
                                 const QuadratureOptions& opts = {}) {
  kernel.domain().require_contains(t);
  std::vector<double> base = f.breakpoints();
  base.insert(base.end(), f.knots().begin(), f.knots().end());
  const auto splits = lag_splits(kernel, t, base);
  const auto integrand = [&](double s, Side side) {
    return kernel.evaluate(t - s, opposite(side)) * f.evaluate(s, side);
  };
  return integrate(integrand, 0.0, t, splits, opts).value;
}

}  // namespace memfun
