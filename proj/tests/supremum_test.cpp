#include <gtest/gtest.h>

#include <cmath>

#include "memfun/random.hpp"
#include "memfun/supremum.hpp"

namespace memfun {
namespace {

const TimeDomain unit(1.0);

TEST(Supremum, MonotoneMaxAtRightEndpoint) {
  const auto r = supremum(unit, [](double t) { return t; });
  EXPECT_EQ(r.value, 1.0);
  EXPECT_EQ(r.argmax, 1.0);
  EXPECT_TRUE(r.is_interior);
}

TEST(Supremum, ParabolaVertex) {
  const auto r = supremum(unit, [](double t) { return -(t - 0.3) * (t - 0.3) + 1.0; });
  EXPECT_NEAR(r.value, 1.0, 1e-9);
  EXPECT_NEAR(r.argmax, 0.3, 1e-9);
  EXPECT_TRUE(r.is_interior);
}

TEST(Supremum, ConstantTiesBreakToSmallestTime) {
  const auto r = supremum(unit, [](double) { return 0.0; });
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.argmax, 0.0);
  EXPECT_FALSE(r.is_interior);
}

TEST(Supremum, BreakpointOneSidedValueCounts) {
  // left limit 2 at 0.4 is only visible through the breakpoint
  const auto g = [](double t, Side side) {
    if (t < 0.4) return 1.0 + t * 2.5;
    if (t > 0.4) return 0.0;
    return side == Side::left ? 2.0 : 0.0;
  };
  const double breaks[] = {0.4};
  const auto r = supremum(TimeDomain(1.0, 11), g, breaks);
  EXPECT_EQ(r.value, 2.0);
  EXPECT_EQ(r.argmax, 0.4);
}

TEST(Supremum, FindsPeakBetweenCoarseNodes) {
  const auto r = supremum(TimeDomain(1.0, 5), [](double t) { return std::sin(3.0 * t); });
  EXPECT_NEAR(r.value, 1.0, 1e-12);
  EXPECT_NEAR(r.argmax, M_PI / 6.0, 1e-7);
}

TEST(Supremum, NeverBelowItsGridSamples) {
  Rng rng(3);
  const TimeDomain domain(2.0, 257);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = rng.uniform(-1, 1), w = rng.uniform(1, 40), p = rng.uniform(0, 6);
    const auto g = [&](double t) { return a * std::sin(w * t + p) + 0.1 * t; };
    const auto r = supremum(domain, g);
    for (double t : domain.nodes()) EXPECT_GE(r.value, g(t) - 1e-12);
  }
}

}  // namespace
}  // namespace memfun
