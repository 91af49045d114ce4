#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <sstream>
#include <vector>

#include "memfun/error.hpp"
#include "memfun/time_domain.hpp"

namespace memfun {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int refinement_levels = 1;
};

struct QuadratureOptions {
  double rel_tol = 1e-8;
  /// Maximum number of grid halvings per segment.
  int max_levels = 14;
  /// Panels of the coarsest composite Simpson rule on each segment (even).
  int base_panels = 8;
};

/// Integrand that can report one-sided limits at a discontinuity.
template <typename F>
concept SidedIntegrand = std::invocable<const F&, double, Side>;

namespace detail {

template <typename F>
double eval_endpoint(const F& f, double x, Side side, bool is_split, double toward) {
  if constexpr (SidedIntegrand<F>) {
    (void)is_split;
    (void)toward;
    return static_cast<double>(f(x, side));
  } else {
    (void)side;
    // Plain callables cannot see one-sided limits; step one ulp into the
    // segment so a jump at the split point is attributed to the correct side.
    return static_cast<double>(f(is_split ? std::nextafter(x, toward) : x));
  }
}

template <typename F>
double eval_interior(const F& f, double x) {
  if constexpr (SidedIntegrand<F>) {
    return static_cast<double>(f(x, Side::right));
  } else {
    return static_cast<double>(f(x));
  }
}

/// Sorted split points strictly inside (a, b), duplicates removed.
inline std::vector<double> interior_splits(double a, double b, std::span<const double> splits) {
  std::vector<double> out;
  out.reserve(splits.size());
  for (double s : splits) {
    if (s > a && s < b) out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

template <typename F>
QuadratureResult simpson_segment(const F& f, double a, double b, bool a_split, bool b_split,
                                 const QuadratureOptions& opts) {
  QuadratureResult result;
  const double width = b - a;
  if (width <= 0.0) return result;

  long panels = std::max(2, opts.base_panels + (opts.base_panels & 1));
  const double fa = eval_endpoint(f, a, Side::right, a_split, b);
  const double fb = eval_endpoint(f, b, Side::left, b_split, a);

  double h = width / static_cast<double>(panels);
  double odd = 0.0;
  double even = 0.0;
  for (long i = 1; i < panels; ++i) {
    const double fx = eval_interior(f, a + static_cast<double>(i) * h);
    (i % 2 == 1 ? odd : even) += fx;
  }
  double previous = h / 3.0 * (fa + fb + 4.0 * odd + 2.0 * even);
  // A single small difference can be a coincidence of two coarse rules on an
  // oscillating integrand, so two successive halvings must agree.
  bool settled = false;

  for (int level = 1; level <= opts.max_levels; ++level) {
    panels *= 2;
    h = width / static_cast<double>(panels);
    even += odd;
    odd = 0.0;
    for (long i = 1; i < panels; i += 2) {
      odd += eval_interior(f, a + static_cast<double>(i) * h);
    }
    const double current = h / 3.0 * (fa + fb + 4.0 * odd + 2.0 * even);
    const double diff = current - previous;
    const bool small = std::abs(diff) <= opts.rel_tol * (1.0 + std::abs(current));
    if (small && settled) {
      result.value = current + diff / 15.0;
      result.error_estimate = std::abs(diff);
      result.refinement_levels = level;
      return result;
    }
    settled = small;
    previous = current;
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "quadrature on [" << a << ", " << b << "] did not reach rel_tol " << opts.rel_tol
      << " within " << opts.max_levels << " halvings";
  throw NonConvergence(msg.str());
}

}  // namespace detail

/// Composite Simpson quadrature of f over [a, b], split at every listed point.
///
/// Each segment is refined by grid halving until two consecutive halvings
/// each change the Simpson estimate by at most rel_tol * (1 + |value|); the
/// returned value
/// carries the Richardson correction of the last halving.
template <typename F>
QuadratureResult integrate(const F& f, double a, double b, std::span<const double> splits = {},
                           const QuadratureOptions& opts = {}) {
  if (!(a <= b)) throw InvalidParameter("integrate: lower limit exceeds upper limit");
  if (!(opts.rel_tol > 0.0)) throw InvalidParameter("integrate: rel_tol must be positive");
  QuadratureResult total;
  if (a == b) return total;

  const auto cuts = detail::interior_splits(a, b, splits);
  double lo = a;
  bool lo_split = false;
  for (std::size_t i = 0; i <= cuts.size(); ++i) {
    const double hi = i < cuts.size() ? cuts[i] : b;
    const bool hi_split = i < cuts.size();
    const auto piece = detail::simpson_segment(f, lo, hi, lo_split, hi_split, opts);
    total.value += piece.value;
    total.error_estimate += piece.error_estimate;
    total.refinement_levels = std::max(total.refinement_levels, piece.refinement_levels);
    lo = hi;
    lo_split = hi_split;
  }
  return total;
}

}  // namespace memfun
