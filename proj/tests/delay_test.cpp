#include <cmath>

#include <gtest/gtest.h>

#include "mixsig/delay.hpp"

using namespace mixsig;

namespace {

constexpr double c_hdv = 6.0 / 11.0;  // pure-HDV capacity with default vehicle parameters
const HdvStartupParams startup{2.0, 3.0};

SignalTiming timing(double red, double green) { return SignalTiming::from_red_green(red, green); }

} // namespace

TEST(QueueClearCav, NoArrivals) {
  EXPECT_EQ(queue_clear_time_cav({0.0}, 45.0, c_hdv), 0.0);
}

TEST(QueueClearCav, WorkedExample) {
  EXPECT_NEAR(queue_clear_time_cav({0.2}, 45.0, c_hdv), 9.0 / (c_hdv - 0.2), 1e-12);
  EXPECT_NEAR(queue_clear_time_cav({0.2}, 45.0, c_hdv), 26.053, 5e-4);
}

TEST(QueueClearCav, OverCapacity) {
  EXPECT_THROW(queue_clear_time_cav({0.6}, 45.0, c_hdv), OverCapacityError);
  EXPECT_THROW(queue_clear_time_cav({c_hdv}, 45.0, c_hdv), OverCapacityError);
}

TEST(QueueClearHdv, WorkedExample) {
  const double t = queue_clear_time_hdv({0.2}, 45.0, startup, c_hdv);
  EXPECT_NEAR(t, (10.0 - 1.5 * c_hdv) / (c_hdv - 0.2), 1e-12);
  EXPECT_NEAR(t, 26.579, 5e-4);
}

TEST(QueueClearHdv, ReducesToCavWithoutStartup) {
  EXPECT_NEAR(queue_clear_time_hdv({0.2}, 45.0, {0.0, 0.0}, c_hdv),
              queue_clear_time_cav({0.2}, 45.0, c_hdv), 1e-12);
}

TEST(QueueClearHdv, EarlyClearance) {
  EXPECT_THROW(queue_clear_time_hdv({0.01}, 5.0, startup, c_hdv), EarlyClearanceError);
}

TEST(CumulativeDepartures, HdvPhaseBoundaries) {
  EXPECT_EQ(cumulative_departures_hdv(47.0, 45.0, startup, c_hdv), 0.0);
  EXPECT_NEAR(cumulative_departures_hdv(50.0, 45.0, startup, c_hdv), c_hdv * 3.0 / 2.0, 1e-12);
  EXPECT_NEAR(cumulative_departures_hdv(48.5, 45.0, startup, c_hdv), c_hdv / 6.0 * 2.25, 1e-12);
  EXPECT_NEAR(cumulative_departures_hdv(48.5, 45.0, startup, c_hdv), 0.2045, 1e-4);
}

TEST(CumulativeDepartures, HdvIsContinuousAndSlopeMatches) {
  const double knee = 50.0;
  const double below = cumulative_departures_hdv(knee - 1e-9, 45.0, startup, c_hdv);
  const double above = cumulative_departures_hdv(knee + 1e-9, 45.0, startup, c_hdv);
  EXPECT_NEAR(below, above, 1e-8);
  const double slope = (cumulative_departures_hdv(knee + 1.0, 45.0, startup, c_hdv) -
                        cumulative_departures_hdv(knee, 45.0, startup, c_hdv));
  EXPECT_NEAR(slope, c_hdv, 1e-12);
}

TEST(CumulativeDepartures, Cav) {
  EXPECT_EQ(cumulative_departures_cav(30.0, 45.0, c_hdv), 0.0);
  EXPECT_NEAR(cumulative_departures_cav(55.0, 45.0, c_hdv), 10.0 * c_hdv, 1e-12);
}

TEST(DelayCav, NoArrivals) {
  const auto d = delay_cav({0.0}, timing(45, 55), c_hdv);
  EXPECT_EQ(d.total_delay, 0.0);
  EXPECT_EQ(d.avg_delay, 0.0);
}

TEST(DelayCav, WorkedExample) {
  const auto d = delay_cav({0.2}, timing(45, 55), c_hdv);
  EXPECT_NEAR(d.total_delay, 319.7368421052632, 1e-9);
  EXPECT_NEAR(d.n_total, 20.0, 1e-12);
  EXPECT_NEAR(d.avg_delay, 319.7368421052632 / 20.0, 1e-10);
  EXPECT_FALSE(d.saturated);
}

TEST(DelayCav, NoRedNoDelay) {
  EXPECT_EQ(delay_cav({0.2}, timing(0, 55), c_hdv).total_delay, 0.0);
}

TEST(DelayCav, SaturationBoundaryIsAccepted) {
  // t_d = q R / (c - q) = G exactly
  const double c = 0.5;
  const double q = 0.25;
  EXPECT_NO_THROW(delay_cav({q}, timing(40, 40), c));
  EXPECT_THROW(delay_cav({q}, timing(40, 39.9), c), SaturationError);
}

TEST(DelayCav, BreakdownAgrees) {
  const auto b = delay_breakdown_cav({0.2}, timing(45, 55), c_hdv);
  EXPECT_NEAR(b.delay(), delay_cav({0.2}, timing(45, 55), c_hdv).total_delay, 1e-9);
}

TEST(DelayHdv, WorkedExample) {
  const auto d = delay_hdv({0.2}, timing(45, 55), startup, c_hdv);
  EXPECT_NEAR(d.total_delay, 371.2033492822967, 1e-8);
  EXPECT_NEAR(45.0 + 5.0 + d.queue_clear_time, 76.579, 5e-4);
  EXPECT_NEAR(d.n1, 1.5 * c_hdv, 1e-12);
  EXPECT_NEAR(d.n2, 0.2 * (50.0 + d.queue_clear_time), 1e-12);
}

TEST(DelayHdv, ReducesToCav) {
  for (double q : {0.05, 0.2, 0.4}) {
    for (double red : {10.0, 45.0}) {
      const auto cav = delay_cav({q}, timing(red, 200), c_hdv);
      const auto hdv = delay_hdv({q}, timing(red, 200), {0.0, 0.0}, c_hdv);
      EXPECT_NEAR(hdv.total_delay, cav.total_delay, 1e-9 * cav.total_delay);
    }
  }
}

TEST(DelayHdv, Saturation) {
  EXPECT_THROW(delay_hdv({0.2}, timing(45, 25), startup, c_hdv), SaturationError);
}

TEST(DelayHdv, NoArrivals) {
  EXPECT_EQ(delay_hdv({0.0}, timing(45, 55), startup, c_hdv).total_delay, 0.0);
}

TEST(DelayHdv, BreakdownAgrees) {
  const auto b = delay_breakdown_hdv({0.2}, timing(45, 55), startup, c_hdv);
  EXPECT_NEAR(b.delay(), delay_hdv({0.2}, timing(45, 55), startup, c_hdv).total_delay, 1e-9);
}

TEST(DelayHdv, StartupOnlyAddsDelay) {
  for (double q : {0.1, 0.2, 0.25}) {
    EXPECT_GT(delay_hdv({q}, timing(45, 55), startup, c_hdv).total_delay,
              delay_cav({q}, timing(45, 55), c_hdv).total_delay);
  }
}

TEST(ExpectedDelay, Endpoints) {
  const auto cav = delay_cav({0.2}, timing(45, 55), c_hdv);
  const auto hdv = delay_hdv({0.2}, timing(45, 55), startup, c_hdv);
  EXPECT_EQ(expected_delay(1.0, cav, hdv).total, cav.total_delay);
  EXPECT_EQ(expected_delay(1.0, cav, hdv).avg, cav.avg_delay);
  EXPECT_EQ(expected_delay(0.0, cav, hdv).total, hdv.total_delay);
  EXPECT_NEAR(expected_delay(0.5, cav, hdv).total, 345.47, 1e-2);
}

TEST(SignalTiming, Construction) {
  const auto t = SignalTiming::from_cycle(100, 0.55);
  EXPECT_NEAR(t.red, 45.0, 1e-12);
  EXPECT_NEAR(t.green, 55.0, 1e-12);
  EXPECT_THROW(SignalTiming::from_cycle(100, 0.0), DomainError);
  EXPECT_THROW(SignalTiming::from_cycle(-1, 0.5), DomainError);
  EXPECT_THROW(SignalTiming::from_red_green(10, 0), DomainError);
}
