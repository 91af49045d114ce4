#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "memfun/error.hpp"
#include "memfun/format.hpp"
#include "memfun/parallel.hpp"
#include "memfun/quadrature.hpp"
#include "memfun/random.hpp"
#include "memfun/trajectory.hpp"

namespace memfun {

/// psi(x) = tanh(gamma0 |x - p|), the compressed deviation from a reference.
inline double tanh_deviation(double x, double p, double gamma0) { return std::tanh(gamma0 * std::abs(x - p)); }

/// An adaptive sensitivity: either a pointwise map Lambda(s, x) or the
/// history-dependent operator f -> Lambda_f driven by accumulated deviations
/// from a reference trajectory.
class SensitivityModel {
 public:
  enum class Kind { instantaneous, historical };
  using Function = std::function<double(double s, double x, Side side)>;

  struct HistoricalParameters {
    double alpha0;
    double gamma0;
    double beta0;
  };

  /// Pointwise sensitivity with declared constants L_Lambda and rho.
  static SensitivityModel instantaneous(std::string name, Function fn, double lambda_min, double lambda_max,
                                        double lipschitz, double rho, std::optional<Trajectory> reference = {}) {
    check_bounds(lambda_min, lambda_max);
    SensitivityModel m(Kind::instantaneous, std::move(name), lambda_min, lambda_max);
    m.fn_ = std::move(fn);
    m.lipschitz_ = lipschitz;
    m.rho_ = rho;
    m.reference_ = std::move(reference);
    return m;
  }

  static SensitivityModel historical(Trajectory reference, HistoricalParameters params, double lambda_min,
                                     double lambda_max) {
    check_bounds(lambda_min, lambda_max);
    if (!(lambda_max > lambda_min)) throw InvalidParameter("historical sensitivity needs lambda_max > lambda_min");
    if (!(params.alpha0 > 0.0)) throw InvalidParameter("alpha0 must be positive");
    if (!(params.gamma0 > 0.0)) throw InvalidParameter("gamma0 must be positive");
    if (!(params.beta0 >= 0.0)) throw InvalidParameter("beta0 must be nonnegative");
    SensitivityModel m(Kind::historical, "historical", lambda_min, lambda_max);
    m.params_ = params;
    m.reference_ = std::move(reference);
    m.lipschitz_ = operator_lipschitz(params, lambda_min, lambda_max, m.reference_->domain().horizon());
    m.rho_ = lambda_min;
    return m;
  }

  Kind kind() const noexcept { return kind_; }
  bool is_historical() const noexcept { return kind_ == Kind::historical; }
  /// Historical with beta0 > 0: an operator on trajectories, not a member of A(I).
  bool operator_mode() const noexcept { return is_historical() && params_->beta0 > 0.0; }
  const std::string& name() const noexcept { return name_; }
  double lambda_min() const noexcept { return lambda_min_; }
  double lambda_max() const noexcept { return lambda_max_; }
  /// Declared L_Lambda; for historical models the closed-form operator constant.
  double lipschitz() const noexcept { return lipschitz_; }
  double rho() const noexcept { return rho_; }
  const std::optional<Trajectory>& reference() const noexcept { return reference_; }
  const HistoricalParameters& parameters() const {
    if (!params_) throw InvalidParameter("instantaneous sensitivity has no historical parameters");
    return *params_;
  }

  /// Lambda(s, x). Historical models evaluate their purely instantaneous
  /// (beta0 = 0) form.
  double evaluate(double s, double x, Side side = Side::right) const {
    if (kind_ == Kind::instantaneous) return fn_(s, x, side);
    const double r = reference_->evaluate(s, side);
    return lambda_min_ + (lambda_max_ - lambda_min_) * tanh_deviation(x, r, params_->gamma0);
  }

  /// Same model with a different declared Lipschitz constant.
  SensitivityModel with_declared_lipschitz(double lipschitz) const {
    SensitivityModel copy = *this;
    copy.lipschitz_ = lipschitz;
    return copy;
  }

  /// The beta0 = 0 reduction as a pointwise model in A(I).
  SensitivityModel instantaneous_form() const {
    if (kind_ == Kind::instantaneous) return *this;
    auto self = std::make_shared<const SensitivityModel>(*this);
    return instantaneous(
        "instantaneous_tanh", [self](double s, double x, Side side) { return self->evaluate(s, x, side); },
        lambda_min_, lambda_max_, (lambda_max_ - lambda_min_) * params_->gamma0, lambda_min_, reference_);
  }

  static double operator_lipschitz(const HistoricalParameters& p, double lambda_min, double lambda_max,
                                   double horizon) {
    const double memory = -std::expm1(-p.alpha0 * horizon) / p.alpha0;  // (1 - e^{-alpha0 T}) / alpha0
    return (lambda_max - lambda_min) * p.gamma0 * (1.0 + p.beta0 * memory);
  }

 private:
  SensitivityModel(Kind kind, std::string name, double lambda_min, double lambda_max)
      : kind_(kind), name_(std::move(name)), lambda_min_(lambda_min), lambda_max_(lambda_max) {}

  static void check_bounds(double lambda_min, double lambda_max) {
    if (!(lambda_min > 0.0) || !(lambda_max >= lambda_min) || !std::isfinite(lambda_max)) {
      throw InvalidParameter("sensitivity bounds need 0 < lambda_min <= lambda_max < inf, got [" +
                             format_double(lambda_min) + ", " + format_double(lambda_max) + "]");
    }
  }

  Kind kind_;
  std::string name_;
  double lambda_min_;
  double lambda_max_;
  double lipschitz_ = 0.0;
  double rho_ = 0.0;
  Function fn_;
  std::optional<Trajectory> reference_;
  std::optional<HistoricalParameters> params_;
};

/// Lambda(s, x) = lambda_min + (lambda_max - lambda_min) tanh(gamma0 |x - r(s)|).
inline SensitivityModel instantaneous_sensitivity(const Trajectory& reference, double gamma0, double lambda_min,
                                                  double lambda_max) {
  if (!(gamma0 > 0.0)) throw InvalidParameter("gamma0 must be positive");
  if (!(lambda_min > 0.0 && lambda_max > lambda_min)) {
    throw InvalidParameter("instantaneous sensitivity needs lambda_max > lambda_min > 0");
  }
  const double spread = lambda_max - lambda_min;
  return SensitivityModel::instantaneous(
      "instantaneous_tanh",
      [reference, gamma0, lambda_min, spread](double s, double x, Side side) {
        return lambda_min + spread * tanh_deviation(x, reference.evaluate(s, side), gamma0);
      },
      lambda_min, lambda_max, spread * gamma0, lambda_min, reference);
}

/// Lambda == c.
inline SensitivityModel constant_sensitivity(double c) {
  return SensitivityModel::instantaneous(
      "constant", [c](double, double, Side) { return c; }, c, c, 0.0, c);
}

inline SensitivityModel historical_sensitivity(const Trajectory& reference, double alpha0, double gamma0,
                                               double beta0, double lambda_min, double lambda_max) {
  return SensitivityModel::historical(reference, {alpha0, gamma0, beta0}, lambda_min, lambda_max);
}

/// Closed-form operator constant (lambda_max - lambda_min) gamma0 (1 + beta0 (1 - e^{-alpha0 T}) / alpha0).
inline double lipschitz_constant(const SensitivityModel& model) {
  if (!model.is_historical()) throw InvalidParameter("lipschitz_constant expects a historical sensitivity");
  return SensitivityModel::operator_lipschitz(model.parameters(), model.lambda_min(), model.lambda_max(),
                                              model.reference()->domain().horizon());
}

/// lambda_min + (lambda_max - lambda_min) * deviation / (1 + beta0 * accumulator).
inline double damped_sensitivity(const SensitivityModel& model, double deviation, double accumulator) {
  const double spread = model.lambda_max() - model.lambda_min();
  return model.lambda_min() + spread * deviation / (1.0 + model.parameters().beta0 * accumulator);
}

// ---------------------------------------------------------------------------
// Induced sensitivity Lambda_f

enum class AccumulatorMethod {
  /// Independent quadrature over [0, s] at every node.
  direct,
  /// D(s + h) = e^{-alpha0 h} D(s) + local increment.
  recurrence,
};

struct InduceOptions {
  AccumulatorMethod method = AccumulatorMethod::recurrence;
  QuadratureOptions quadrature{};
};

/// Lambda_f for a fixed trajectory f, together with the deviation accumulator
/// D_f(s) = int_0^s e^{-alpha0 (s - tau)} tanh(gamma0 |f(tau) - r(tau)|) dtau.
///
/// D_f is stored on the grid nodes merged with every breakpoint of f and r;
/// between them it is reconstructed by cubic Hermite interpolation using
/// D' = -alpha0 D + psi.
class InducedSensitivity {
 public:
  InducedSensitivity(SensitivityModel model, Trajectory f, const InduceOptions& opts = {})
      : model_(std::move(model)), f_(std::move(f)) {
    if (!model_.is_historical()) throw InvalidParameter("induce expects a historical sensitivity");
    const Trajectory& r = *model_.reference();
    if (!f_.domain().same_interval(r.domain())) {
      throw InvalidParameter("trajectory and reference live on different horizons");
    }
    const auto& p = model_.parameters();
    const Trajectory deviation = f_ - r;
    splits_ = smoothness_splits(deviation);

    positions_.assign(f_.domain().nodes().begin(), f_.domain().nodes().end());
    positions_.insert(positions_.end(), deviation.breakpoints().begin(), deviation.breakpoints().end());
    std::sort(positions_.begin(), positions_.end());
    positions_.erase(std::unique(positions_.begin(), positions_.end()), positions_.end());

    accumulator_.assign(positions_.size(), 0.0);
    if (opts.method == AccumulatorMethod::direct) {
      parallel_for(positions_.size(), [&](std::size_t i) {
        accumulator_[i] = accumulate(0.0, positions_[i], opts.quadrature);
      }, 16);
    } else {
      std::vector<double> increments(positions_.size(), 0.0);
      parallel_for(positions_.size() - 1, [&](std::size_t i) {
        increments[i + 1] = accumulate(positions_[i], positions_[i + 1], opts.quadrature);
      });
      for (std::size_t i = 1; i < positions_.size(); ++i) {
        const double decay = std::exp(-p.alpha0 * (positions_[i] - positions_[i - 1]));
        accumulator_[i] = decay * accumulator_[i - 1] + increments[i];
      }
    }

    const auto nodes = f_.domain().nodes();
    values_.resize(nodes.size());
    deviation_nodes_.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      deviation_nodes_[i] = accumulator_at(nodes[i], Side::right);
      values_[i] = evaluate(nodes[i], nodes[i] >= f_.domain().horizon() ? Side::left : Side::right);
    }
  }

  const SensitivityModel& model() const noexcept { return model_; }
  const Trajectory& trajectory() const noexcept { return f_; }
  /// Lambda_f at the grid nodes.
  const std::vector<double>& values() const noexcept { return values_; }
  /// D_f at the grid nodes.
  const std::vector<double>& deviation_accumulator() const noexcept { return deviation_nodes_; }
  /// Points where Lambda_f may fail to be smooth.
  const std::vector<double>& splits() const noexcept { return splits_; }

  double psi(double s, Side side) const {
    return tanh_deviation(f_.evaluate(s, side), model_.reference()->evaluate(s, side), model_.parameters().gamma0);
  }

  double accumulator_at(double s, Side side) const {
    f_.domain().require_contains(s);
    auto it = std::lower_bound(positions_.begin(), positions_.end(), s);
    auto j = static_cast<std::size_t>(it - positions_.begin());
    if (j < positions_.size() && positions_[j] == s) return accumulator_[j];
    const std::size_t i = j - 1;
    const double a = positions_[i];
    const double b = positions_[j];
    const double h = b - a;
    const double alpha0 = model_.parameters().alpha0;
    const double da = -alpha0 * accumulator_[i] + psi(a, Side::right);
    const double db = -alpha0 * accumulator_[j] + psi(b, Side::left);
    const double u = (s - a) / h;
    const double u2 = u * u;
    const double u3 = u2 * u;
    (void)side;
    return (2 * u3 - 3 * u2 + 1) * accumulator_[i] + (u3 - 2 * u2 + u) * h * da + (-2 * u3 + 3 * u2) * accumulator_[j] +
           (u3 - u2) * h * db;
  }

  /// Lambda_f(s).
  double evaluate(double s, Side side = Side::right) const {
    return damped_sensitivity(model_, psi(s, side), accumulator_at(s, side));
  }

  /// D_f(s) by direct quadrature, independent of the stored grid values.
  double accumulator_by_quadrature(double s, const QuadratureOptions& opts = {}) const {
    f_.domain().require_contains(s);
    return accumulate(0.0, s, opts);
  }

 private:
  double accumulate(double a, double b, const QuadratureOptions& opts) const {
    const double alpha0 = model_.parameters().alpha0;
    return integrate([&](double tau, Side side) { return std::exp(-alpha0 * (b - tau)) * psi(tau, side); }, a, b,
                     splits_, opts)
        .value;
  }

  SensitivityModel model_;
  Trajectory f_;
  std::vector<double> splits_;
  std::vector<double> positions_;
  std::vector<double> accumulator_;
  std::vector<double> values_;
  std::vector<double> deviation_nodes_;
};

inline InducedSensitivity induce(const SensitivityModel& model, const Trajectory& f, const InduceOptions& opts = {}) {
  return InducedSensitivity(model, f, opts);
}

// ---------------------------------------------------------------------------
// Axiom verification

struct AxiomCheck {
  std::string axiom;  // AS1..AS4
  bool passed = true;
  int trials = 0;
  /// Smallest slack observed; negative means violated.
  double worst_margin = 0.0;
  std::string witness;
  std::string note;
};

struct AxiomReport {
  std::vector<AxiomCheck> checks;
  double state_lo = 0.0;
  double state_hi = 0.0;
  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return c.passed; });
  }
  const AxiomCheck& at(const std::string& axiom) const {
    for (const auto& c : checks) {
      if (c.axiom == axiom) return c;
    }
    throw InvalidParameter("no check named " + axiom);
  }
};

struct ProbePlan {
  /// State range; unset means [-3 ||r|| - 1, 3 ||r|| + 1] (||r|| = 0 without a reference).
  std::optional<double> state_lo;
  std::optional<double> state_hi;
  int uniform_states = 256;
  int random_states = 256;
  int time_samples = 65;
  int random_pairs = 4096;
  std::uint64_t seed = 0;
  double relative_slack = 1e-9;
};

/// Checks AS1-AS4 on a probe grid over I x [state_lo, state_hi]. Historical
/// models are checked through their beta0 = 0 pointwise form.
inline AxiomReport verify_axioms(const TimeDomain& domain, const SensitivityModel& input, const ProbePlan& plan = {}) {
  const SensitivityModel model = input.is_historical() ? input.instantaneous_form() : input;
  AxiomReport report;
  const double r_norm = model.reference() ? sup_norm(*model.reference()) : 0.0;
  report.state_lo = plan.state_lo.value_or(-3.0 * r_norm - 1.0);
  report.state_hi = plan.state_hi.value_or(3.0 * r_norm + 1.0);
  if (!(report.state_hi > report.state_lo)) throw InvalidParameter("empty state probe range");

  Rng rng(plan.seed, 0x5e45);
  std::vector<double> states;
  for (int i = 0; i < plan.uniform_states; ++i) {
    states.push_back(report.state_lo +
                     (report.state_hi - report.state_lo) * static_cast<double>(i) / std::max(1, plan.uniform_states - 1));
  }
  for (int i = 0; i < plan.random_states; ++i) states.push_back(rng.uniform(report.state_lo, report.state_hi));
  std::vector<double> times;
  const int nt = std::max(2, plan.time_samples);
  for (int i = 0; i < nt; ++i) times.push_back(domain.horizon() * static_cast<double>(i) / (nt - 1));

  AxiomCheck as1;
  as1.axiom = "AS1";
  as1.worst_margin = std::numeric_limits<double>::infinity();
  for (double s : times) {
    for (double x : states) {
      const double v = model.evaluate(s, x);
      const double margin = std::min(v - model.lambda_min(), model.lambda_max() - v);
      ++as1.trials;
      if (margin < as1.worst_margin) {
        as1.worst_margin = margin;
        if (margin < -plan.relative_slack * model.lambda_max()) {
          as1.witness = "s=" + format_double(s) + ", x=" + format_double(x) + ", Lambda=" + format_double(v);
        }
      }
    }
  }
  as1.passed = as1.worst_margin >= -plan.relative_slack * model.lambda_max();

  AxiomCheck as2;
  as2.axiom = "AS2";
  as2.worst_margin = std::numeric_limits<double>::infinity();
  const double declared = model.lipschitz();
  auto probe_pair = [&](double s, double x, double y) {
    const double diff = std::abs(model.evaluate(s, x) - model.evaluate(s, y));
    const double bound = declared * std::abs(x - y);
    const double margin = bound - diff;
    ++as2.trials;
    const bool violated = diff > bound * (1.0 + plan.relative_slack) + 1e-15;
    if (margin < as2.worst_margin || (violated && as2.passed)) {
      as2.worst_margin = std::min(as2.worst_margin, margin);
      if (violated && as2.passed) {
        as2.witness = "s=" + format_double(s) + ", x=" + format_double(x) + ", y=" + format_double(y) +
                      ", |dLambda|=" + format_double(diff) + " > L|x-y|=" + format_double(bound);
      }
    }
    if (violated) as2.passed = false;
  };
  for (double s : times) {
    // nearby pairs around the reference expose the steepest slope
    const double center = model.reference() ? model.reference()->evaluate(s, Side::right) : 0.0;
    for (double d : {1e-6, 1e-4, 1e-2}) probe_pair(s, center, center + d);
    for (int i = 0; i + 1 < plan.uniform_states; ++i) probe_pair(s, states[i], states[i + 1]);
  }
  for (int k = 0; k < plan.random_pairs; ++k) {
    const double s = rng.uniform(0.0, domain.horizon());
    probe_pair(s, rng.uniform(report.state_lo, report.state_hi), rng.uniform(report.state_lo, report.state_hi));
  }

  AxiomCheck as3;
  as3.axiom = "AS3";
  as3.note = "structural: every provided model is continuous in s between trajectory breakpoints";

  AxiomCheck as4;
  as4.axiom = "AS4";
  as4.worst_margin = std::numeric_limits<double>::infinity();
  for (double s : domain.nodes()) {
    const double v = model.evaluate(s, 0.0);
    ++as4.trials;
    if (v - model.rho() < as4.worst_margin) {
      as4.worst_margin = v - model.rho();
      as4.witness = "s=" + format_double(s) + ", Lambda(s,0)=" + format_double(v);
    }
  }
  as4.passed = model.rho() > 0.0 && as4.worst_margin >= -1e-12;
  if (as4.passed) as4.witness.clear();
  if (!(model.rho() > 0.0)) as4.note = "declared rho is not positive";

  report.checks = {as1, as2, as3, as4};
  if (input.is_historical()) {
    for (auto& c : report.checks) c.note += (c.note.empty() ? "" : "; ") + std::string("checked on the beta0 = 0 form");
  }
  return report;
}

}  // namespace memfun
