#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "memfun/error.hpp"
#include "memfun/kernel.hpp"
#include "memfun/parallel.hpp"
#include "memfun/quadrature.hpp"
#include "memfun/sensitivity.hpp"
#include "memfun/supremum.hpp"
#include "memfun/trajectory.hpp"

namespace memfun {

struct FunctionalOptions {
  QuadratureOptions quadrature{};
  /// Use the O(N) recurrence for kernels of the form c e^{-a tau}.
  bool fast_path = true;
  InduceOptions induce{};
  ClassifyTolerances classify{};
};

/// One-sided values of M_f at a breakpoint of f.
struct BreakpointValues {
  double t;
  double left;
  double right;
};

struct MemoryFunctionalReport {
  std::vector<double> nodes;
  std::vector<double> J_values;
  std::vector<double> M_values;
  std::vector<BreakpointValues> breakpoints;
  double S_value = 0.0;
  double argmax_t = 0.0;
  bool argmax_interior = false;
  double sup_norm_f = 0.0;
  double sup_norm_argmax = 0.0;
  double lambda_inf = 0.0;
  double kappa_inf = 0.0;
  double horizon = 0.0;
  /// (1 + Lambda_inf kappa_inf T) ||f||_inf.
  double upper_bound = 0.0;
  /// ||f||_inf, the lower comparison bound.
  double lower_bound = 0.0;
  bool member = false;
  double quadrature_tolerance = 0.0;
  double max_error_estimate = 0.0;
  bool fast_path = false;
  /// Sensitivity is the history-dependent operator (beta0 > 0).
  bool operator_mode = false;
  std::string jump_convention = "max of one-sided values";
};

/// Evaluates J_f, M_f and S_{kappa,Lambda}(f) for a fixed regular kernel and
/// sensitivity.
class MemoryFunctional {
 public:
  MemoryFunctional(Kernel kernel, SensitivityModel sensitivity, FunctionalOptions opts = {})
      : kernel_(std::move(kernel)), sensitivity_(std::move(sensitivity)), opts_(opts) {
    admissibility_ = classify(kernel_, opts_.classify);
    if (!admissibility_.class_regular) {
      std::string why;
      for (const auto& f : admissibility_.failures) why += std::string(" ") + to_string(f.condition) + ": " + f.message + ";";
      throw UnsupportedKernelClass("the memory functional needs a regular kernel; " + kernel_.name() + " fails" + why);
    }
  }

  const Kernel& kernel() const noexcept { return kernel_; }
  const SensitivityModel& sensitivity() const noexcept { return sensitivity_; }
  const AdmissibilityReport& admissibility() const noexcept { return admissibility_; }
  const FunctionalOptions& options() const noexcept { return opts_; }

  double lambda_inf() const noexcept { return sensitivity_.lambda_max(); }
  double kappa_inf() const noexcept {
    return kernel_.constants().upper_bound.value_or(admissibility_.measurements.max_value);
  }
  /// C = 1 + Lambda_inf kappa_inf T.
  double comparison_constant() const noexcept {
    return 1.0 + lambda_inf() * kappa_inf() * kernel_.domain().horizon();
  }
  bool uses_fast_path() const noexcept { return opts_.fast_path && kernel_.exponential_form().has_value(); }

  /// Trajectory bound to the sensitivity: s -> Lambda(s, f(s)) |f(s)| with the
  /// split points that keep it smooth.
  class Source {
   public:
    Source(const MemoryFunctional& owner, const Trajectory& f) : f_(f) {
      if (!f.domain().same_interval(owner.kernel_.domain())) {
        throw InvalidParameter("trajectory and kernel live on different horizons");
      }
      splits_ = smoothness_splits(f);
      const auto& model = owner.sensitivity_;
      std::vector<double> extra;
      if (model.is_historical()) {
        induced_ = std::make_shared<InducedSensitivity>(model, f, owner.opts_.induce);
        extra = induced_->splits();
      } else if (model.reference()) {
        extra = smoothness_splits(f - *model.reference());
      }
      splits_.insert(splits_.end(), extra.begin(), extra.end());
      std::sort(splits_.begin(), splits_.end());
      splits_.erase(std::unique(splits_.begin(), splits_.end()), splits_.end());
      model_ = &model;
    }

    double weight(double s, Side side) const {
      if (induced_) return induced_->evaluate(s, side);
      return model_->evaluate(s, f_.evaluate(s, side), side);
    }
    double operator()(double s, Side side) const {
      const double x = f_.evaluate(s, side);
      if (x == 0.0) return 0.0;
      const double w = induced_ ? induced_->evaluate(s, side) : model_->evaluate(s, x, side);
      return w * std::abs(x);
    }

    const Trajectory& trajectory() const noexcept { return f_; }
    const std::vector<double>& splits() const noexcept { return splits_; }
    const InducedSensitivity* induced() const noexcept { return induced_.get(); }

   private:
    Trajectory f_;
    const SensitivityModel* model_ = nullptr;
    std::shared_ptr<InducedSensitivity> induced_;
    std::vector<double> splits_;
  };

  Source bind(const Trajectory& f) const { return Source(*this, f); }

  /// J_f(t) by direct quadrature over [0, t].
  QuadratureResult J_direct(const Source& src, double t) const { return J_partial(src, 0.0, t); }

  /// int_a^t kappa(t - s) Lambda(s, f(s)) |f(s)| ds.
  QuadratureResult J_partial(const Source& src, double a, double t) const {
    kernel_.domain().require_contains(t);
    std::vector<double> splits = lag_splits(kernel_, t, src.splits());
    const auto integrand = [&](double s, Side side) {
      const double g = src(s, side);
      return g == 0.0 ? 0.0 : kernel_.evaluate(t - s, opposite(side)) * g;
    };
    return integrate(integrand, a, t, splits, opts_.quadrature);
  }

  /// J_f at every grid node, using the recurrence when the kernel allows it.
  std::vector<double> J_nodes(const Source& src, double* max_error = nullptr) const {
    const auto nodes = kernel_.domain().nodes();
    std::vector<double> values(nodes.size(), 0.0);
    std::vector<double> errors(nodes.size(), 0.0);
    if (uses_fast_path()) {
      const auto form = *kernel_.exponential_form();
      std::vector<double> increments(nodes.size(), 0.0);
      parallel_for(nodes.size() - 1, [&](std::size_t i) {
        const auto r = J_partial(src, nodes[i], nodes[i + 1]);
        increments[i + 1] = r.value;
        errors[i + 1] = r.error_estimate;
      });
      for (std::size_t i = 1; i < nodes.size(); ++i) {
        values[i] = std::exp(-form.rate * (nodes[i] - nodes[i - 1])) * values[i - 1] + increments[i];
        errors[i] += errors[i - 1];
      }
      (void)form.scale;
    } else {
      parallel_for(nodes.size(), [&](std::size_t i) {
        const auto r = J_direct(src, nodes[i]);
        values[i] = r.value;
        errors[i] = r.error_estimate;
      }, 8);
    }
    if (max_error) *max_error = *std::max_element(errors.begin(), errors.end());
    return values;
  }

  /// J_f(t) for arbitrary t, reusing node values on the fast path.
  double J_at(const Source& src, std::span<const double> node_values, double t) const {
    const auto nodes = kernel_.domain().nodes();
    auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
    const auto i = static_cast<std::size_t>(it - nodes.begin()) - 1;
    if (nodes[i] == t) return node_values[i];
    if (uses_fast_path()) {
      const auto form = *kernel_.exponential_form();
      return std::exp(-form.rate * (t - nodes[i])) * node_values[i] + J_partial(src, nodes[i], t).value;
    }
    return J_direct(src, t).value;
  }

  MemoryFunctionalReport compute_S(const Trajectory& f) const {
    const Source src = bind(f);
    MemoryFunctionalReport rep;
    const auto nodes = kernel_.domain().nodes();
    rep.nodes.assign(nodes.begin(), nodes.end());
    rep.J_values = J_nodes(src, &rep.max_error_estimate);
    rep.M_values.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) rep.M_values[i] = std::abs(f(nodes[i])) + rep.J_values[i];

    const auto M = [&](double t, Side side) { return std::abs(f.evaluate(t, side)) + J_at(src, rep.J_values, t); };
    const auto abs_sup = abs_supremum(f);
    const double extra[] = {abs_sup.argmax};
    const auto sup = supremum(kernel_.domain(), M, f.breakpoints(), extra);
    for (double b : f.breakpoints()) {
      const double j = J_at(src, rep.J_values, b);
      rep.breakpoints.push_back({b, std::abs(f.left_value(b)) + j, std::abs(f.right_value(b)) + j});
    }

    rep.S_value = sup.value;
    rep.argmax_t = sup.argmax;
    rep.argmax_interior = sup.is_interior;
    rep.sup_norm_f = abs_sup.value;
    rep.sup_norm_argmax = abs_sup.argmax;
    rep.lambda_inf = lambda_inf();
    rep.kappa_inf = kappa_inf();
    rep.horizon = kernel_.domain().horizon();
    rep.lower_bound = rep.sup_norm_f;
    rep.upper_bound = comparison_constant() * rep.sup_norm_f;
    rep.member = std::isfinite(rep.S_value);
    rep.quadrature_tolerance = opts_.quadrature.rel_tol;
    rep.fast_path = uses_fast_path();
    rep.operator_mode = sensitivity_.operator_mode();
    return rep;
  }

 private:
  Kernel kernel_;
  SensitivityModel sensitivity_;
  FunctionalOptions opts_;
  AdmissibilityReport admissibility_;
};

/// J_f(t) = int_0^t Lambda(s, f(s)) kappa(t - s) |f(s)| ds.
inline double compute_J(const Trajectory& f, const Kernel& kernel, const SensitivityModel& sensitivity, double t,
                        const FunctionalOptions& opts = {}) {
  const MemoryFunctional functional(kernel, sensitivity, opts);
  return functional.J_direct(functional.bind(f), t).value;
}

/// M_f(t) = |f(t)| + J_f(t), right value at a breakpoint.
inline double compute_M(const Trajectory& f, const Kernel& kernel, const SensitivityModel& sensitivity, double t,
                        const FunctionalOptions& opts = {}) {
  const MemoryFunctional functional(kernel, sensitivity, opts);
  return std::abs(f(t)) + functional.J_direct(functional.bind(f), t).value;
}

/// Both one-sided values of M_f at t.
inline BreakpointValues compute_M_sides(const Trajectory& f, const Kernel& kernel, const SensitivityModel& sensitivity,
                                        double t, const FunctionalOptions& opts = {}) {
  const MemoryFunctional functional(kernel, sensitivity, opts);
  const double j = functional.J_direct(functional.bind(f), t).value;
  return {t, std::abs(f.left_value(t)) + j, std::abs(f.right_value(t)) + j};
}

inline MemoryFunctionalReport compute_S(const Trajectory& f, const Kernel& kernel, const SensitivityModel& sensitivity,
                                        const FunctionalOptions& opts = {}) {
  return MemoryFunctional(kernel, sensitivity, opts).compute_S(f);
}

struct StrictComparison {
  bool strict = false;
  bool hypothesis_met = false;
  double margin = 0.0;
  double t_star = 0.0;
  double S_value = 0.0;
  double sup_norm_f = 0.0;
  std::string explanation;
};

/// Checks S > ||f||_inf when the maximum of |f| is attained in (0, T].
inline StrictComparison strict_comparison_check(const MemoryFunctional& functional, const Trajectory& f) {
  const auto abs_sup = abs_supremum(f);
  if (!(abs_sup.value > 1e-12)) {
    throw DegenerateInput("strict comparison needs a nonzero trajectory (||f|| = " + format_double(abs_sup.value) + ")");
  }
  // any maximizer in (0, T] satisfies the hypothesis, so prefer the latest one
  double t_star = abs_sup.argmax;
  const double level = abs_sup.value * (1.0 - 1e-12);
  for (double t : f.domain().nodes()) {
    if (t > t_star && std::abs(f(t)) >= level) t_star = t;
  }
  for (double b : f.breakpoints()) {
    if (b > t_star && std::max(std::abs(f.left_value(b)), std::abs(f.right_value(b))) >= level) t_star = b;
  }
  const auto rep = functional.compute_S(f);
  StrictComparison out;
  out.t_star = t_star;
  out.S_value = rep.S_value;
  out.sup_norm_f = rep.sup_norm_f;
  out.margin = rep.S_value - rep.sup_norm_f;
  out.hypothesis_met = out.t_star > 0.0;
  if (!out.hypothesis_met) {
    out.explanation = "max of |f| is attained only at t = 0; the strict inequality is not asserted";
  } else if (out.margin > functional.options().quadrature.rel_tol) {
    out.strict = true;
    out.explanation = "S exceeds ||f|| by " + format_double(out.margin);
  } else {
    out.explanation = "margin " + format_double(out.margin) + " does not exceed the quadrature tolerance";
  }
  return out;
}

inline StrictComparison strict_comparison_check(const Trajectory& f, const Kernel& kernel,
                                                const SensitivityModel& sensitivity,
                                                const FunctionalOptions& opts = {}) {
  return strict_comparison_check(MemoryFunctional(kernel, sensitivity, opts), f);
}

struct InclusionCheck {
  double S_difference = 0.0;
  double sup_norm_difference = 0.0;
  double constant = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  bool passed = false;
};

/// S(f - g) <= (1 + Lambda_inf kappa_inf T) ||f - g||_inf.
inline InclusionCheck inclusion_map_check(const MemoryFunctional& functional, const Trajectory& f, const Trajectory& g,
                                          double tolerance = 1e-8) {
  const Trajectory diff = f - g;
  const auto rep = functional.compute_S(diff);
  InclusionCheck out;
  out.S_difference = rep.S_value;
  out.sup_norm_difference = rep.sup_norm_f;
  out.constant = functional.comparison_constant();
  out.bound = out.constant * out.sup_norm_difference;
  out.margin = out.bound - out.S_difference;
  out.passed = out.margin >= -tolerance;
  return out;
}

inline InclusionCheck inclusion_map_check(const Trajectory& f, const Trajectory& g, const Kernel& kernel,
                                          const SensitivityModel& sensitivity, const FunctionalOptions& opts = {}) {
  return inclusion_map_check(MemoryFunctional(kernel, sensitivity, opts), f, g);
}

}  // namespace memfun
