#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "memfun/error.hpp"

namespace memfun {

/// Which one-sided limit to take at a discontinuity.
enum class Side { left, right };

constexpr Side opposite(Side side) noexcept {
  return side == Side::left ? Side::right : Side::left;
}

/// The horizon [0, T] together with its uniform sampling grid.
///
/// Nodes always contain both endpoints exactly; interior nodes are i*T/(N-1).
class TimeDomain {
 public:
  static constexpr std::size_t default_grid_points = 2049;

  explicit TimeDomain(double horizon, std::size_t grid_points = default_grid_points)
      : horizon_(horizon) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
      throw InvalidParameter("time horizon must be positive and finite, got " +
                             std::to_string(horizon));
    }
    if (grid_points < 3) {
      throw InvalidParameter("time grid needs at least 3 points, got " +
                             std::to_string(grid_points));
    }
    nodes_.resize(grid_points);
    const auto last = grid_points - 1;
    for (std::size_t i = 0; i < grid_points; ++i) {
      nodes_[i] = horizon * static_cast<double>(i) / static_cast<double>(last);
    }
    nodes_.front() = 0.0;
    nodes_.back() = horizon;
  }

  double horizon() const noexcept { return horizon_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  double spacing() const noexcept {
    return horizon_ / static_cast<double>(nodes_.size() - 1);
  }
  std::span<const double> nodes() const noexcept { return nodes_; }
  double node(std::size_t i) const { return nodes_.at(i); }

  bool contains(double t) const noexcept { return t >= 0.0 && t <= horizon_; }

  void require_contains(double t) const {
    if (!contains(t)) {
      throw InvalidParameter("time " + std::to_string(t) + " lies outside [0, " +
                             std::to_string(horizon_) + "]");
    }
  }

  /// Domains are compatible when they describe the same interval.
  bool same_interval(const TimeDomain& other) const noexcept {
    return horizon_ == other.horizon_;
  }

  friend bool operator==(const TimeDomain& a, const TimeDomain& b) {
    return a.horizon_ == b.horizon_ && a.nodes_.size() == b.nodes_.size();
  }

 private:
  double horizon_;
  std::vector<double> nodes_;
};

}  // namespace memfun
