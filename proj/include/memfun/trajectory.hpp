#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "memfun/error.hpp"
#include "memfun/supremum.hpp"
#include "memfun/time_domain.hpp"

namespace memfun {

/// A bounded, piecewise-continuous function on [0, T].
///
/// The interval is covered by consecutive closed pieces. Every interior piece
/// boundary is a breakpoint: evaluating there with Side::left returns the limit
/// of the piece on its left, Side::right the limit of the piece on its right.
/// Piece functions are either closed-form callables or sampled arrays with
/// linear interpolation.
class Trajectory {
 public:
  using Function = std::function<double(double)>;

  /// A single continuous closed-form piece covering [0, T].
  static Trajectory from_function(TimeDomain domain, Function fn) {
    const double horizon = domain.horizon();
    return Trajectory(std::move(domain), {Piece{0.0, horizon, std::move(fn), {}}});
  }

  static Trajectory constant(TimeDomain domain, double value) {
    return from_function(std::move(domain), [value](double) { return value; });
  }

  /// Closed-form pieces separated by strictly increasing interior cuts.
  static Trajectory piecewise(TimeDomain domain, std::vector<double> cuts, std::vector<Function> fns) {
    if (fns.size() != cuts.size() + 1) {
      throw InvalidParameter("piecewise trajectory needs one more function than cuts");
    }
    std::vector<Piece> pieces;
    double lo = 0.0;
    for (std::size_t i = 0; i < fns.size(); ++i) {
      const double hi = i < cuts.size() ? cuts[i] : domain.horizon();
      if (!(hi > lo)) throw InvalidParameter("piecewise cuts must be strictly increasing inside (0, T)");
      pieces.push_back(Piece{lo, hi, std::move(fns[i]), {}});
      lo = hi;
    }
    return Trajectory(std::move(domain), std::move(pieces));
  }

  /// Indicator of [0, cut]: 1 up to and including the cut, 0 afterwards.
  static Trajectory indicator(TimeDomain domain, double cut) {
    return piecewise(std::move(domain), {cut}, {[](double) { return 1.0; }, [](double) { return 0.0; }});
  }

  /// Samples sorted by time. A time listed twice is a breakpoint: the first
  /// row holds the left value, the second the right value.
  static Trajectory sampled(TimeDomain domain, std::span<const double> times, std::span<const double> values) {
    if (times.size() != values.size() || times.size() < 2) {
      throw InvalidParameter("sampled trajectory needs at least two (t, value) pairs");
    }
    if (times.front() != 0.0 || times.back() != domain.horizon()) {
      throw InvalidParameter("sampled trajectory must start at t = 0 and end at t = T");
    }
    std::vector<Piece> pieces;
    std::size_t start = 0;
    for (std::size_t i = 1; i <= times.size(); ++i) {
      const bool end_of_piece = i == times.size() || times[i] == times[i - 1];
      if (i < times.size() && times[i] < times[i - 1]) {
        throw InvalidParameter("sampled trajectory times must be nondecreasing");
      }
      if (!end_of_piece) continue;
      if (i < times.size() && i + 1 < times.size() && times[i + 1] == times[i]) {
        throw InvalidParameter("a time may appear at most twice in a sampled trajectory");
      }
      if (i - start < 2) {
        throw InvalidParameter("every piece of a sampled trajectory needs at least two samples");
      }
      auto knots = std::make_shared<const Knots>(Knots{
          std::vector<double>(times.begin() + static_cast<long>(start), times.begin() + static_cast<long>(i)),
          std::vector<double>(values.begin() + static_cast<long>(start), values.begin() + static_cast<long>(i))});
      pieces.push_back(Piece{knots->t.front(), knots->t.back(),
                             [knots](double t) { return knots->interpolate(t); },
                             std::vector<double>(knots->t.begin() + 1, knots->t.end() - 1)});
      start = i;
    }
    return Trajectory(std::move(domain), std::move(pieces));
  }

  const TimeDomain& domain() const noexcept { return domain_; }

  /// Interior piece boundaries, increasing.
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }

  /// Interior knots of sampled pieces; the trajectory is smooth between them.
  const std::vector<double>& knots() const noexcept { return knots_; }

  double evaluate(double t, Side side) const {
    if (!domain_.contains(t)) {
      throw InvalidParameter("trajectory evaluated at t = " + std::to_string(t) + " outside [0, T]");
    }
    const auto& pieces = *pieces_;
    // first piece whose begin is > t, step back one
    auto it = std::upper_bound(pieces.begin(), pieces.end(), t,
                               [](double x, const Piece& p) { return x < p.begin; });
    std::size_t k = static_cast<std::size_t>(it - pieces.begin()) - 1;
    if (side == Side::left && k > 0 && pieces[k].begin == t) --k;
    return pieces[k].fn(t);
  }

  /// Right-continuous convention at breakpoints.
  double operator()(double t) const { return evaluate(t, t >= domain_.horizon() ? Side::left : Side::right); }

  double left_value(double t) const { return evaluate(t, Side::left); }
  double right_value(double t) const { return evaluate(t, Side::right); }

  /// True when every breakpoint has equal one-sided limits.
  bool is_continuous() const {
    return std::all_of(breakpoints_.begin(), breakpoints_.end(),
                       [this](double b) { return left_value(b) == right_value(b); });
  }

  /// Pointwise combination op(f(t), g(t)) on the common refinement of both
  /// piece structures.
  template <typename Op>
  static Trajectory combine(const Trajectory& f, const Trajectory& g, Op op) {
    if (!f.domain_.same_interval(g.domain_)) {
      throw InvalidParameter("trajectories live on different horizons");
    }
    std::vector<double> cuts = f.breakpoints_;
    cuts.insert(cuts.end(), g.breakpoints_.begin(), g.breakpoints_.end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<Piece> pieces;
    double lo = 0.0;
    for (std::size_t i = 0; i <= cuts.size(); ++i) {
      const double hi = i < cuts.size() ? cuts[i] : f.domain_.horizon();
      pieces.push_back(Piece{lo, hi, [f, g, op, lo, hi](double t) {
                               const Side side = t >= hi && t > lo ? Side::left : Side::right;
                               return op(f.evaluate(t, side), g.evaluate(t, side));
                             },
                             {}});
      lo = hi;
    }
    Trajectory out(f.domain_, std::move(pieces));
    out.knots_ = f.knots_;
    out.knots_.insert(out.knots_.end(), g.knots_.begin(), g.knots_.end());
    std::sort(out.knots_.begin(), out.knots_.end());
    out.knots_.erase(std::unique(out.knots_.begin(), out.knots_.end()), out.knots_.end());
    return out;
  }

  /// Pointwise map x -> op(x) preserving the piece structure.
  template <typename Op>
  Trajectory map(Op op) const {
    std::vector<Piece> pieces = *pieces_;
    for (auto& p : pieces) {
      p.fn = [fn = p.fn, op](double t) { return op(fn(t)); };
    }
    Trajectory out(domain_, std::move(pieces));
    return out;
  }

  Trajectory scaled(double c) const {
    return map([c](double x) { return c * x; });
  }

  friend Trajectory operator-(const Trajectory& f, const Trajectory& g) {
    return combine(f, g, [](double a, double b) { return a - b; });
  }
  friend Trajectory operator+(const Trajectory& f, const Trajectory& g) {
    return combine(f, g, [](double a, double b) { return a + b; });
  }

  /// Same function, sampled on a different grid.
  Trajectory with_domain(TimeDomain domain) const {
    if (!domain.same_interval(domain_)) throw InvalidParameter("regridding must keep the horizon");
    Trajectory out = *this;
    out.domain_ = std::move(domain);
    return out;
  }

 private:
  struct Knots {
    std::vector<double> t;
    std::vector<double> v;
    double interpolate(double x) const {
      auto it = std::upper_bound(t.begin(), t.end(), x);
      if (it == t.begin()) return v.front();
      if (it == t.end()) return v.back();
      const auto j = static_cast<std::size_t>(it - t.begin());
      const double w = (x - t[j - 1]) / (t[j] - t[j - 1]);
      return v[j - 1] + w * (v[j] - v[j - 1]);
    }
  };

  struct Piece {
    double begin;
    double end;
    Function fn;
    std::vector<double> knots;
  };

  Trajectory(TimeDomain domain, std::vector<Piece> pieces) : domain_(std::move(domain)) {
    for (std::size_t i = 1; i < pieces.size(); ++i) breakpoints_.push_back(pieces[i].begin);
    for (const auto& p : pieces) knots_.insert(knots_.end(), p.knots.begin(), p.knots.end());
    pieces_ = std::make_shared<const std::vector<Piece>>(std::move(pieces));
  }

  TimeDomain domain_;
  std::shared_ptr<const std::vector<Piece>> pieces_;
  std::vector<double> breakpoints_;
  std::vector<double> knots_;
};

/// Supremum of |f| over [0, T], one-sided breakpoint values included.
inline SupremumResult abs_supremum(const Trajectory& f) {
  return supremum(
      f.domain(), [&f](double t, Side side) { return std::abs(f.evaluate(t, side)); }, f.breakpoints());
}

inline double sup_norm(const Trajectory& f) { return abs_supremum(f).value; }

/// Times in (0, T) where the continuous pieces of f change sign or vanish on
/// a grid node. Sign changes between samples are located by bisection.
inline std::vector<double> sign_changes(const Trajectory& f) {
  std::vector<double> grid(f.domain().nodes().begin(), f.domain().nodes().end());
  grid.insert(grid.end(), f.breakpoints().begin(), f.breakpoints().end());
  grid.insert(grid.end(), f.knots().begin(), f.knots().end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  const double horizon = f.domain().horizon();
  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    double a = grid[i];
    double b = grid[i + 1];
    double fa = f.evaluate(a, Side::right);
    double fb = f.evaluate(b, Side::left);
    if (fa == 0.0 && a > 0.0) roots.push_back(a);
    if (fb == 0.0 && b < horizon) roots.push_back(b);
    if (!(fa * fb < 0.0)) continue;
    for (int it = 0; it < 200 && b - a > 4.0 * std::numeric_limits<double>::epsilon() * horizon; ++it) {
      const double m = 0.5 * (a + b);
      const double fm = f.evaluate(m, Side::right);
      if (fm == 0.0) {
        a = b = m;
        break;
      }
      if ((fa < 0.0) == (fm < 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    roots.push_back(0.5 * (a + b));
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

/// Quadrature split points that keep |f| smooth on every segment: breakpoints,
/// sampling knots and sign changes of f.
inline std::vector<double> smoothness_splits(const Trajectory& f) {
  std::vector<double> splits = f.breakpoints();
  splits.insert(splits.end(), f.knots().begin(), f.knots().end());
  const auto roots = sign_changes(f);
  splits.insert(splits.end(), roots.begin(), roots.end());
  std::sort(splits.begin(), splits.end());
  splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
  return splits;
}

}  // namespace memfun
