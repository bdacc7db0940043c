#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lfc/protection.hpp"
#include "lfc/rng.hpp"

using namespace lfc;

TEST_CASE("safe set per the relay thresholds") {
  const RelaySettings s;
  CHECK(in_safe_set(0.0, 0.0, s));
  CHECK_FALSE(in_safe_set(2.1 / 60.0, 0.0, s));   // 62.1 Hz > 62.0 Hz
  CHECK_FALSE(in_safe_set(0.0, 3.1 / 60.0, s));   // 3.1 Hz/s > 3 Hz/s
  CHECK_FALSE(in_safe_set(0.0, -3.1 / 60.0, s));  // rate bound is two-sided
  CHECK_FALSE(in_safe_set(-3.6 / 60.0, 0.0, s));  // 56.4 Hz < 56.5 Hz
  // just-inside points stay in the set (exact float boundaries are not
  // representable through the pu round-trip)
  CHECK(in_safe_set(1.99 / 60.0, 0.0, s));
  CHECK(in_safe_set(-3.49 / 60.0, 0.0, s));
  CHECK(in_safe_set(0.0, 0.0499, s));

  CHECK(safe_set_violation(0.0, 0.0, s) == std::nullopt);
  CHECK(*safe_set_violation(2.1 / 60.0, 0.0, s) == TripKind::OF);
  CHECK(*safe_set_violation(-3.6 / 60.0, 0.0, s) == TripKind::UF);
  CHECK(*safe_set_violation(0.0, 0.06, s) == TripKind::ROCOF);
  // rocof takes precedence when both bounds are violated at once
  CHECK(*safe_set_violation(2.1 / 60.0, 0.06, s) == TripKind::ROCOF);
}

TEST_CASE("relay settings validation") {
  RelaySettings s;
  s.uf_threshold_hz = 61.0;
  s.of_threshold_hz = 59.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = RelaySettings{};
  s.of_clearing_s = -0.1;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

namespace {

/// Drives the monitor with a square OF excursion of the given duration.
std::optional<TripEvent> square_excursion(double start_s, double duration_s, double dt,
                                          double total_s, double dw_high = 2.5 / 60.0) {
  RelayMonitor monitor;
  std::optional<TripEvent> trip;
  const int n = static_cast<int>(std::lround(total_s / dt));
  for (int i = 0; i < n; ++i) {
    const double t_end = (i + 1) * dt;                  // state at the end of the interval
    const bool high = t_end > start_s && t_end <= start_s + duration_s + 1e-12;
    trip = monitor.step(high ? dw_high : 0.0, 0.0, dt);
    if (trip) break;
  }
  return trip;
}

}  // namespace

TEST_CASE("clearing time straddle: 150 ms holds, 170 ms trips") {
  const double dt = 0.005;
  CHECK_FALSE(square_excursion(0.5, 0.150, dt, 3.0).has_value());

  const auto trip = square_excursion(0.5, 0.170, dt, 3.0);
  REQUIRE(trip.has_value());
  CHECK(trip->kind == TripKind::OF);
  CHECK(trip->time_s == doctest::Approx(0.5 + 0.160).epsilon(1e-9));
}

TEST_CASE("clearing exactness at T = clearing +- one dt") {
  const double dt = 0.005;
  CHECK_FALSE(square_excursion(0.25, 0.160 - dt, dt, 2.0).has_value());
  CHECK(square_excursion(0.25, 0.160, dt, 2.0).has_value());       // T >= clearing trips
  CHECK(square_excursion(0.25, 0.160 + dt, dt, 2.0).has_value());
}

TEST_CASE("rocof with zero clearing trips on the first violating sample") {
  RelayMonitor monitor;
  auto trip = monitor.step(0.0, 0.06, 0.005);
  REQUIRE(trip.has_value());
  CHECK(trip->kind == TripKind::ROCOF);
  CHECK(trip->time_s == doctest::Approx(0.005));
}

TEST_CASE("uf path and label collapse") {
  RelayMonitor monitor;
  std::optional<TripEvent> trip;
  for (int i = 0; i < 100 && !trip; ++i) trip = monitor.step(-4.0 / 60.0, 0.0, 0.01);
  REQUIRE(trip.has_value());
  CHECK(trip->kind == TripKind::UF);

  CHECK(classify_trip(std::optional<TripEvent>{}) == TripLabel::None);
  CHECK(classify_trip(trip) == TripLabel::UfOf);
  CHECK(classify_trip(std::optional<TripEvent>{TripEvent{TripKind::OF, 1.0}}) == TripLabel::UfOf);
  CHECK(classify_trip(std::optional<TripEvent>{TripEvent{TripKind::ROCOF, 1.0}}) ==
        TripLabel::Rocof);
}

TEST_CASE("monotone latching: the first trip is final") {
  RelayMonitor monitor;
  std::optional<TripEvent> first;
  for (int i = 0; i < 200 && !first; ++i) first = monitor.step(0.0, 0.08, 0.005);
  REQUIRE(first.has_value());
  // keep stepping with wildly different measurements; the event must not change
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const auto again = monitor.step(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), 0.005);
    REQUIRE(again.has_value());
    CHECK(again->kind == first->kind);
    CHECK(again->time_s == first->time_s);
  }
}

TEST_CASE("sub-clearing excursions reset the timer fully") {
  RelayMonitor monitor;
  // repeated 100 ms excursions with 50 ms gaps never trip a 160 ms clearing
  const double dt = 0.01;
  for (int cycle = 0; cycle < 30; ++cycle) {
    for (int i = 0; i < 10; ++i) CHECK_FALSE(monitor.step(2.5 / 60.0, 0.0, dt).has_value());
    for (int i = 0; i < 5; ++i) CHECK_FALSE(monitor.step(0.0, 0.0, dt).has_value());
  }
}

TEST_CASE("safe-set consistency: no trips while every sample is safe") {
  Rng rng(11);
  RelayMonitor monitor;
  const RelaySettings s;
  for (int i = 0; i < 5000; ++i) {
    const double dw = rng.uniform(-3.4 / 60.0, 1.9 / 60.0);
    const double rocof = rng.uniform(-0.049, 0.049);
    REQUIRE(in_safe_set(dw, rocof, s));
    CHECK_FALSE(monitor.step(dw, rocof, 0.005).has_value());
  }
}
