#include <gtest/gtest.h>

#include "mixsig/capacity.hpp"

using namespace mixsig;

TEST(CavTimeGap, StringStabilityBoundBinds) {
  EXPECT_NEAR(cav_time_gap(1, VehicleParams{}), 4.0 * 0.5 / (1.2 * 2.0), 1e-15);
  EXPECT_NEAR(cav_time_gap(1, VehicleParams{}), 0.833333333333, 1e-12);
}

TEST(CavTimeGap, SafetyFloorBinds) {
  EXPECT_DOUBLE_EQ(cav_time_gap(5, VehicleParams{}), 0.3);
}

TEST(CavTimeGap, VanishingSpeedGainLeavesFloor) {
  VehicleParams v;
  v.omega_v = 0.0;
  for (int i = 1; i <= 6; ++i) {
    EXPECT_DOUBLE_EQ(cav_time_gap(i, v), v.tau_safe);
  }
}

TEST(CavTimeGap, RequiresAtLeastOneCav) {
  EXPECT_THROW(cav_time_gap(0, VehicleParams{}), DomainError);
}

TEST(CavTimeGap, NonIncreasingInRunLength) {
  for (int i = 1; i < 10; ++i) {
    EXPECT_GE(cav_time_gap(i, VehicleParams{}), cav_time_gap(i + 1, VehicleParams{}));
  }
}

TEST(ExpectedTimeGap, PureHdv) {
  EXPECT_DOUBLE_EQ(expected_time_gap(steady_state_closed_form(MarkovSpec(5, 0.0)), VehicleParams{}),
                   1.5);
}

TEST(ExpectedTimeGap, SingleLinkHalfPenetration) {
  const double g = expected_time_gap(steady_state_closed_form(MarkovSpec(1, 0.5)), VehicleParams{});
  EXPECT_NEAR(g, 0.5 * 1.5 + 0.5 * (2.0 / 2.4), 1e-12);
}

TEST(ExpectedTimeGap, FullPenetrationLimit) {
  EXPECT_NEAR(expected_time_gap(steady_state_closed_form(MarkovSpec(5, 1.0)), VehicleParams{}), 0.3,
              1e-15);
}

TEST(MixedCapacity, PureHdv) {
  const auto c = mixed_capacity(MarkovSpec(5, 0.0), VehicleParams{});
  EXPECT_NEAR(c.value, 1.0 / (1.5 + 5.0 / 15.0), 1e-12);
  EXPECT_NEAR(c.value, 0.545454545454, 1e-12);
}

TEST(MixedCapacity, FullPenetration) {
  EXPECT_NEAR(mixed_capacity(MarkovSpec(5, 1.0), VehicleParams{}).value, 1.0 / (0.3 + 1.0 / 3.0),
              1e-12);
}

TEST(MixedCapacity, SingleLinkHalfPenetration) {
  EXPECT_NEAR(mixed_capacity(MarkovSpec(1, 0.5), VehicleParams{}).value, 2.0 / 3.0, 1e-12);
}

TEST(MixedCapacity, NonDecreasingInPenetration) {
  for (int n = 1; n <= 10; ++n) {
    ASSERT_TRUE(cav_gaps_dominate(n, VehicleParams{}));
    double prev = 0.0;
    for (int k = 0; k <= 100; ++k) {
      const double c = mixed_capacity(MarkovSpec(n, 0.01 * k), VehicleParams{}).value;
      EXPECT_GE(c, prev) << "n=" << n << " p=" << 0.01 * k;
      prev = c;
    }
  }
}

TEST(MixedCapacity, DominanceCanFail) {
  VehicleParams v;
  v.omega_v = 2.0;  // 4*2/(1.2*2) = 3.33 s > 1.5 s
  EXPECT_FALSE(cav_gaps_dominate(3, v));
  EXPECT_LT(mixed_capacity(MarkovSpec(1, 0.9), v).value, mixed_capacity(MarkovSpec(1, 0.0), v).value);
}

TEST(VehicleParams, RejectsNonPositive) {
  VehicleParams v;
  v.v_free = 0.0;
  EXPECT_THROW(v.validate(), DomainError);
  EXPECT_THROW(mixed_capacity(MarkovSpec(2, 0.5), v), DomainError);
}
