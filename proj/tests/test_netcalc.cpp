#include <catch_amalgamated.hpp>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace tsnac;

namespace {
const PortParams kPort{fx::kC, fx::kLmax};

Flow mk(double bits, double period) { return Flow{FlowId{1}, NodeId{0}, NodeId{1}, bits, period, 1.0, 1}; }
}  // namespace

TEST_CASE("aggregate arrival curve", "[netcalc]") {
  const auto empty = aggregate_arrival({});
  CHECK(empty.rate == 0.0);
  CHECK(empty.burst == 0.0);
  const std::vector<Flow> one{mk(12144, 2e-3)};
  CHECK(aggregate_arrival(one).rate == Catch::Approx(6.072e6).epsilon(1e-15));
  CHECK(aggregate_arrival(one).burst == 12144.0);
  const std::vector<Flow> two{mk(12144, 2e-3), mk(12144, 2e-3)};
  CHECK(aggregate_arrival(two).rate == Catch::Approx(1.2144e7).epsilon(1e-15));
  CHECK(aggregate_arrival(two).burst == 24288.0);
}

TEST_CASE("CBS service curve", "[netcalc]") {
  const std::vector<double> s1{1e7};
  auto c = cbs_service_curve(1, s1, kPort);
  REQUIRE(c);
  CHECK(c->rate == 1e7);
  CHECK(c->latency == Catch::Approx(1.2144e-4).epsilon(1e-14));

  const std::vector<double> s2{0.75 * fx::kC};
  c = cbs_service_curve(1, s2, kPort);
  REQUIRE(c);
  CHECK(c->rate == 7.5e7);
  CHECK(c->latency == Catch::Approx(fx::kLmax / fx::kC).epsilon(1e-14));

  const std::vector<double> sat{fx::kC, 1e6};
  auto bad = cbs_service_curve(2, sat, kPort);
  REQUIRE_FALSE(bad);
  CHECK(bad.error().kind == NcError::Kind::Saturated);
}

TEST_CASE("delay bound of a single class-1 flow", "[netcalc]") {
  const std::vector<double> s{1.2144e7};
  auto d = worst_case_delay(1, 12144.0, s, kPort);
  REQUIRE(d);
  CHECK(*d == Catch::Approx(1.12144e-3).epsilon(1e-14));
  // Class 1 carries no interference term.
  CHECK(*interference_latency(1, 5e7, kPort) == fx::kLmax / fx::kC);
}

TEST_CASE("delay bound equals the geometric horizontal deviation", "[netcalc][oracle]") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 100; ++n) {
    const int cls = 1 + static_cast<int>(u(gen) * 4);
    std::vector<double> slopes;
    for (int j = 1; j < cls; ++j) slopes.push_back(fx::kC * 0.15 * u(gen));
    const double burst = 512 + u(gen) * 40000;
    const double rate = 1e5 + u(gen) * 5e6;
    slopes.push_back(rate * (1.0 + 3.0 * u(gen)));
    auto d = worst_case_delay(cls, burst, slopes, kPort);
    REQUIRE(d);
    const auto rl = oracle::cbs_curve(cls, slopes, fx::kC, fx::kLmax);
    const double geo = oracle::horizontal_deviation(burst, rate, rl.rate, rl.latency, 4.0 * *d);
    CHECK(oracle::rel_close(*d, geo, 1e-9));
  }
}

TEST_CASE("minimum bandwidth", "[netcalc]") {
  const AffineArrivalCurve a{6.072e6, 12144.0};
  auto bw = min_bandwidth(1, a, 1.12144e-3, {}, kPort);
  REQUIRE(bw);
  CHECK(*bw == Catch::Approx(1.2144e7).epsilon(1e-12));
  CHECK(*min_bandwidth(1, AffineArrivalCurve{}, 1e-3, {}, kPort) == 0.0);
  CHECK(*min_bandwidth(1, a, 1e3, {}, kPort) == 6.072e6);
  auto infeasible = min_bandwidth(1, a, 1e-4, {}, kPort);
  REQUIRE_FALSE(infeasible);
  CHECK(infeasible.error().kind == NcError::Kind::InfeasibleDeadline);
}

TEST_CASE("whole-port allocation", "[netcalc]") {
  const std::vector<AffineArrivalCurve> none(2);
  const std::vector<double> dl{1e-3, 2e-3};
  CHECK(*allocate_port(none, dl, kPort) == std::vector<double>{0.0, 0.0});

  std::vector<AffineArrivalCurve> loads{{6.072e6, 12144.0}, {}};
  const std::vector<double> dl2{1.12144e-3, 5e-3};
  auto s = allocate_port(loads, dl2, kPort);
  REQUIRE(s);
  CHECK((*s)[0] == Catch::Approx(1.2144e7).epsilon(1e-12));
  CHECK((*s)[1] == 0.0);

  // Class 2 couples to class 1 through the interference term.
  loads[1] = {1e6, 20000.0};
  const std::vector<double> tight{1.12144e-3, 3e-3};
  const std::vector<double> loose{2e-3, 3e-3};
  auto hi = allocate_port(loads, tight, kPort);
  auto lo = allocate_port(loads, loose, kPort);
  REQUIRE(hi);
  REQUIRE(lo);
  CHECK((*hi)[0] > (*lo)[0]);
  CHECK((*hi)[1] > (*lo)[1]);
}

TEST_CASE("deadline-term allocation", "[netcalc]") {
  const std::vector<AffineArrivalCurve> loads{{6.072e6, 12144.0}, {}};
  const std::vector<double> dl{1.12144e-3, 5e-3};
  auto bar = already_allocated_bandwidth(loads, dl, kPort);
  REQUIRE(bar);
  CHECK((*bar)[0] == Catch::Approx(1.2144e7).epsilon(1e-12));
  CHECK((*bar)[1] == 0.0);

  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 200; ++n) {
    std::vector<AffineArrivalCurve> ld(3);
    std::vector<double> d(3);
    for (int k = 0; k < 3; ++k) {
      ld[k] = {1e5 + 5e6 * u(gen), 1000 + 20000 * u(gen)};
      d[k] = 2e-3 + 7e-3 * u(gen);
    }
    auto b = already_allocated_bandwidth(ld, d, kPort);
    auto s = allocate_port(ld, d, kPort);
    if (!b || !s) continue;
    // The deadline term alone never exceeds the full allocation of class 1.
    CHECK((*b)[0] <= (*s)[0]);
    const auto expect = oracle::deadline_allocation({ld[0].burst, ld[1].burst, ld[2].burst}, d, fx::kC, fx::kLmax);
    for (int k = 0; k < 3; ++k) CHECK(oracle::rel_close((*b)[k], expect[k], 1e-12));
  }
}

TEST_CASE("inversion meets the deadline", "[netcalc]") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int exact = 0;
  for (int n = 0; n < 300; ++n) {
    const int cls = 1 + static_cast<int>(u(gen) * 4);
    std::vector<double> higher;
    for (int j = 1; j < cls; ++j) higher.push_back(fx::kC * 0.1 * u(gen));
    const AffineArrivalCurve a{1e5 + 8e6 * u(gen), 512 + 30000 * u(gen)};
    const double deadline = 5e-4 + 9e-3 * u(gen);
    auto bw = min_bandwidth(cls, a, deadline, higher, kPort);
    if (!bw) continue;
    auto slopes = higher;
    slopes.push_back(*bw);
    auto d = worst_case_delay(cls, a.burst, slopes, kPort);
    REQUIRE(d);
    CHECK(*d <= deadline * (1 + 1e-12));
    if (*bw > a.rate) {
      CHECK(oracle::rel_close(*d, deadline, 1e-9));
      ++exact;
    }
  }
  CHECK(exact > 50);
}
