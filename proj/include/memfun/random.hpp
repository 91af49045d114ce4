#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "memfun/error.hpp"
#include "memfun/trajectory.hpp"

namespace memfun {

/// Seeded 64-bit generator with platform-independent real draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi].
  int integer(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

enum class TrajectoryKind { fourier, polynomial, piecewise_step, zero };

inline TrajectoryKind parse_trajectory_kind(const std::string& name) {
  if (name == "fourier") return TrajectoryKind::fourier;
  if (name == "polynomial") return TrajectoryKind::polynomial;
  if (name == "piecewise_step" || name == "piecewise-step") return TrajectoryKind::piecewise_step;
  if (name == "zero") return TrajectoryKind::zero;
  throw ConfigError("unknown trajectory kind '" + name + "'");
}

inline std::string to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::fourier: return "fourier";
    case TrajectoryKind::polynomial: return "polynomial";
    case TrajectoryKind::piecewise_step: return "piecewise_step";
    case TrajectoryKind::zero: return "zero";
  }
  return "?";
}

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::fourier;
  double amplitude = 1.0;
  /// Number of jumps for piecewise-step trajectories.
  int breakpoint_count = 1;
  /// Fixed jump times and levels; when empty they are drawn at random.
  std::vector<double> cuts;
  std::vector<double> levels;
};

/// Draws a trajectory from the seeded stream.
///
/// Fourier: constant plus at most 8 harmonics; polynomial: degree <= 5 in the
/// rescaled variable 2t/T - 1; both keep the sum of |coefficients| at or below
/// the amplitude. Piecewise-step: constant levels in [-amplitude, amplitude]
/// separated by declared breakpoints. Zero: f == 0, drawing nothing.
inline Trajectory random_trajectory(Rng& rng, const TrajectorySpec& spec, const TimeDomain& domain) {
  if (!(spec.amplitude > 0.0)) throw InvalidParameter("trajectory amplitude must be positive");
  const double horizon = domain.horizon();
  switch (spec.kind) {
    case TrajectoryKind::zero:
      return Trajectory::constant(domain, 0.0);
    case TrajectoryKind::fourier: {
      const int modes = rng.integer(1, 8);
      const double share = spec.amplitude / static_cast<double>(2 * modes + 1);
      auto coeffs = std::make_shared<std::vector<double>>();
      for (int k = 0; k < 2 * modes + 1; ++k) coeffs->push_back(rng.uniform(-share, share));
      const double omega = 2.0 * std::numbers::pi / horizon;
      return Trajectory::from_function(domain, [coeffs, modes, omega](double t) {
        const auto& c = *coeffs;
        double v = c[0];
        for (int k = 1; k <= modes; ++k) {
          v += c[2 * k - 1] * std::cos(k * omega * t) + c[2 * k] * std::sin(k * omega * t);
        }
        return v;
      });
    }
    case TrajectoryKind::polynomial: {
      const int degree = rng.integer(0, 5);
      const double share = spec.amplitude / static_cast<double>(degree + 1);
      auto coeffs = std::make_shared<std::vector<double>>();
      for (int k = 0; k <= degree; ++k) coeffs->push_back(rng.uniform(-share, share));
      return Trajectory::from_function(domain, [coeffs, horizon](double t) {
        const double x = 2.0 * t / horizon - 1.0;
        double v = 0.0;
        for (auto it = coeffs->rbegin(); it != coeffs->rend(); ++it) v = v * x + *it;
        return v;
      });
    }
    case TrajectoryKind::piecewise_step: {
      std::vector<double> cuts = spec.cuts;
      std::vector<double> levels = spec.levels;
      if (cuts.empty()) {
        const int count = std::max(1, spec.breakpoint_count);
        // jumps snapped to a 1/1024 lattice keep them distinct and away from 0 and T
        while (static_cast<int>(cuts.size()) < count) {
          const double c = horizon * static_cast<double>(rng.integer(1, 1023)) / 1024.0;
          if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
        }
        std::sort(cuts.begin(), cuts.end());
      }
      if (levels.empty()) {
        for (std::size_t i = 0; i <= cuts.size(); ++i) levels.push_back(rng.uniform(-spec.amplitude, spec.amplitude));
      }
      if (levels.size() != cuts.size() + 1) throw InvalidParameter("step trajectory needs one more level than cuts");
      std::vector<Trajectory::Function> fns;
      for (double level : levels) fns.emplace_back([level](double) { return level; });
      return Trajectory::piecewise(domain, std::move(cuts), std::move(fns));
    }
  }
  throw InvalidParameter("unknown trajectory kind");
}

}  // namespace memfun
