#include <cmath>

#include <gtest/gtest.h>

#include "fcsd/golden_section.hpp"

using fcsd::golden_section_maximize;

TEST(GoldenSection, InteriorMaximum) {
  const auto r = golden_section_maximize([](double x) { return -(x - 0.3) * (x - 0.3); }, 0.0, 1.0, 1e-10);
  EXPECT_NEAR(r.argmax, 0.3, 1e-8);
  EXPECT_NEAR(r.value, 0.0, 1e-15);
}

TEST(GoldenSection, IncreasingReturnsRightEndpoint) {
  const auto r = golden_section_maximize([](double x) { return std::log1p(x); }, 0.0, 2.0, 1e-9);
  EXPECT_EQ(r.argmax, 2.0);
  EXPECT_DOUBLE_EQ(r.value, std::log(3.0));
}

TEST(GoldenSection, DecreasingReturnsLeftEndpoint) {
  const auto r = golden_section_maximize([](double x) { return -x; }, 0.0, 5.0, 1e-9);
  EXPECT_EQ(r.argmax, 0.0);
  EXPECT_EQ(r.value, 0.0);
}
