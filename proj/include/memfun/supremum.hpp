#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "memfun/quadrature.hpp"
#include "memfun/time_domain.hpp"

namespace memfun {

struct SupremumResult {
  double value = 0.0;
  double argmax = 0.0;
  /// True when the maximizer lies in (0, T].
  bool is_interior = false;
};

struct SupremumOptions {
  /// Golden-section refinement stops once the bracket is this fraction of T.
  double relative_width = 1e-10;
  /// Grid and extra samples within this distance of the best value count as
  /// ties; the smallest time among them is reported. Refinement samples only
  /// win outright, so a flat smooth peak does not drag the argmax sideways.
  double tie_tolerance = 1e-12;
};

namespace detail {

template <typename G>
double eval_sided(const G& g, double t, Side side) {
  if constexpr (std::invocable<const G&, double, Side>) {
    return static_cast<double>(g(t, side));
  } else {
    return static_cast<double>(g(t));
  }
}

/// Largest value of g at a point, including both one-sided limits when t is a
/// discontinuity of the representation.
template <typename G>
double eval_both_sides(const G& g, double t, double horizon) {
  if constexpr (std::invocable<const G&, double, Side>) {
    return std::max(static_cast<double>(g(t, Side::left)), static_cast<double>(g(t, Side::right)));
  } else {
    double v = static_cast<double>(g(t));
    if (t > 0.0) v = std::max(v, static_cast<double>(g(std::nextafter(t, 0.0))));
    if (t < horizon) v = std::max(v, static_cast<double>(g(std::nextafter(t, horizon))));
    return v;
  }
}

struct Sample {
  double t;
  double value;
};

/// Golden-section maximization inside the open interval (lo, hi), followed by
/// one parabolic step through three nearby points to pin down smooth peaks.
template <typename G>
void golden_refine(const G& g, double lo, double hi, double min_width, std::vector<Sample>& out) {
  if (!(hi - lo > 0.0)) return;
  constexpr double inv_phi = 0.6180339887498948482;
  auto eval = [&](double t) {
    const double v = eval_sided(g, t, Side::right);
    out.push_back({t, v});
    return v;
  };
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double gc = eval(c);
  double gd = eval(d);
  while (b - a > min_width) {
    if (gc >= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - inv_phi * (b - a);
      gc = eval(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + inv_phi * (b - a);
      gd = eval(d);
    }
  }
  const double x = gc >= gd ? c : d;
  const double gx = std::max(gc, gd);
  const double step = std::min({x - lo, hi - x, 0.25 * (hi - lo)});
  if (!(step > 0.0)) return;
  const double gm = eval(x - step);
  const double gp = eval(x + step);
  const double curvature = gp - 2.0 * gx + gm;
  if (curvature < 0.0) {
    const double vertex = x - 0.5 * step * (gp - gm) / curvature;
    if (vertex > lo && vertex < hi) eval(vertex);
  }
}

}  // namespace detail

/// Approximates sup of g over [0, T].
///
/// g is sampled at every grid node and at both one-sided limits of each
/// breakpoint, then refined by golden-section search in the two cells adjacent
/// to the best sample. extra_points are additional times known to be of
/// interest (their values only ever raise the result). The result is an
/// under-approximation of the true supremum whose gap is O(h^2 |g''|) for
/// smooth g.
template <typename G>
SupremumResult supremum(const TimeDomain& domain, const G& g, std::span<const double> breakpoints = {},
                        std::span<const double> extra_points = {}, const SupremumOptions& opts = {}) {
  const double horizon = domain.horizon();
  std::vector<double> positions(domain.nodes().begin(), domain.nodes().end());
  std::vector<double> jumps;
  for (double b : breakpoints) {
    if (b > 0.0 && b < horizon) jumps.push_back(b);
  }
  std::sort(jumps.begin(), jumps.end());
  positions.insert(positions.end(), jumps.begin(), jumps.end());
  std::sort(positions.begin(), positions.end());
  positions.erase(std::unique(positions.begin(), positions.end()), positions.end());

  std::vector<detail::Sample> samples;
  samples.reserve(positions.size() + 256);
  for (double t : positions) {
    const bool is_jump = std::binary_search(jumps.begin(), jumps.end(), t);
    double v;
    if (is_jump) {
      v = detail::eval_both_sides(g, t, horizon);
    } else {
      v = detail::eval_sided(g, t, t >= horizon ? Side::left : Side::right);
    }
    samples.push_back({t, v});
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].value > samples[best].value) best = i;
  }
  const double min_width = horizon * opts.relative_width;
  const std::size_t coarse_count = samples.size();
  if (best > 0) {
    detail::golden_refine(g, positions[best - 1], positions[best], min_width, samples);
  }
  if (best + 1 < positions.size()) {
    detail::golden_refine(g, positions[best], positions[best + 1], min_width, samples);
  }
  const std::size_t refined_end = samples.size();
  for (double t : extra_points) {
    if (domain.contains(t)) samples.push_back({t, detail::eval_both_sides(g, t, horizon)});
  }

  std::size_t top = 0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].value > samples[top].value) top = i;
  }
  const double value = samples[top].value;
  double arg = samples[top].t;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const bool refined = i >= coarse_count && i < refined_end;
    if (!refined && samples[i].value >= value - opts.tie_tolerance) arg = std::min(arg, samples[i].t);
  }
  return {value, arg, arg > 0.0};
}

}  // namespace memfun
