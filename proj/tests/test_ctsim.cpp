#include <doctest.h>

#include <cmath>
#include <vector>

#include "csma/ctsim.hpp"
#include "csma/exact.hpp"

using namespace csma;

namespace {

ConflictGraph path3() {
  std::vector<std::pair<unsigned, unsigned>> e = {{0, 1}, {1, 2}};
  return ConflictGraph(3, e);
}

}  // namespace

TEST_CASE("single link long-run service matches the two-state law") {
  ConflictGraph g(1, {});
  auto set = ScheduleSet::enumerate(g);
  std::vector<double> lambda = {2.0};
  Rng rng(1);
  ctsim::CtState state;
  double total = 0.0;
  const int slots = 4000;
  for (int i = 0; i < slots; ++i) {
    auto r = ctsim::run_slot(state, set, g, lambda, 1.0, 10.0, rng);
    total += r.service.service[0];
  }
  // lambda*mu = 2 -> busy fraction 2/3
  CHECK(total / slots == doctest::Approx(2.0 / 3.0).epsilon(0.02));
}

TEST_CASE("tiny activation rates leave the channel idle") {
  ConflictGraph g(1, {});
  auto set = ScheduleSet::enumerate(g);
  std::vector<double> lambda = {1e-12};
  Rng rng(2);
  ctsim::CtState state;
  auto r = ctsim::run_slot(state, set, g, lambda, 1.0, 10.0, rng);
  CHECK(r.service.service[0] == 0.0);
  CHECK(state.active.active == 0);
}

TEST_CASE("occupancy converges to the reversible law on the path") {
  auto g = path3();
  auto set = ScheduleSet::enumerate(g);
  std::vector<double> lambda = {1.0, 1.0, 1.0};
  auto reference = exact::stationary_distribution(set, lambda, 1.0);
  for (double slot_len : {1.0, 10.0, 100.0}) {
    Rng rng(42);
    auto occ =
        ctsim::simulate_occupancy(set, g, lambda, 1.0, slot_len, 300'000, rng);
    CHECK(exact::tv_distance(occ.distribution(), reference) < 0.01);
  }
}

TEST_CASE("occupancy converges on an 8-link random-ish graph") {
  std::vector<std::pair<unsigned, unsigned>> e = {{0, 1}, {1, 2}, {2, 3},
                                                  {3, 4}, {4, 5}, {5, 6},
                                                  {6, 7}, {0, 7}, {2, 6}};
  ConflictGraph g(8, e);
  auto set = ScheduleSet::enumerate(g);
  std::vector<double> lambda = {0.5, 1.5, 1.0, 2.0, 0.7, 1.2, 0.9, 1.1};
  auto reference = exact::stationary_distribution(set, lambda, 1.0);
  Rng rng(7);
  auto occ =
      ctsim::simulate_occupancy(set, g, lambda, 1.0, 10.0, 1'000'000, rng);
  CHECK(exact::tv_distance(occ.distribution(), reference) < 0.01);
}

TEST_CASE("same seed reproduces the slot exactly") {
  auto g = path3();
  auto set = ScheduleSet::enumerate(g);
  std::vector<double> lambda = {1.0, 2.0, 3.0};
  for (int rep = 0; rep < 2; ++rep) {
    Rng a(123), b(123);
    ctsim::CtState sa, sb;
    std::vector<ctsim::HoldInterval> ta, tb;
    auto ra = ctsim::run_slot(sa, set, g, lambda, 1.0, 25.0, a, &ta);
    auto rb = ctsim::run_slot(sb, set, g, lambda, 1.0, 25.0, b, &tb);
    CHECK(ra.events == rb.events);
    CHECK(sa.active.active == sb.active.active);
    REQUIRE(ta.size() == tb.size());
    for (std::size_t i = 0; i < ta.size(); ++i) {
      CHECK(ta[i].schedule_index == tb[i].schedule_index);
      CHECK(ta[i].duration == tb[i].duration);
    }
  }
}

TEST_CASE("run_slot validates inputs") {
  auto g = path3();
  auto set = ScheduleSet::enumerate(g);
  std::vector<double> lambda = {1.0, 1.0, 1.0};
  Rng rng(3);
  ctsim::CtState bad;
  bad.active.active = 0b011;  // infeasible
  CHECK_THROWS_AS(ctsim::run_slot(bad, set, g, lambda, 1.0, 1.0, rng),
                  std::invalid_argument);
  ctsim::CtState ok;
  std::vector<double> neg = {1.0, -1.0, 1.0};
  CHECK_THROWS_AS(ctsim::run_slot(ok, set, g, neg, 1.0, 1.0, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(ctsim::run_slot(ok, set, g, lambda, 1.0, -1.0, rng),
                  std::invalid_argument);
}

TEST_CASE("empirical distribution from explicit intervals") {
  auto set = ScheduleSet::enumerate(ConflictGraph(1, {}));
  std::vector<ctsim::HoldInterval> trace = {{0, 1.0}, {1, 1.0}};
  auto d = ctsim::empirical_distribution(set, trace);
  CHECK(d.probs[0] == doctest::Approx(0.5));
  CHECK(d.probs[1] == doctest::Approx(0.5));

  std::vector<ctsim::HoldInterval> only_idle = {{0, 2.5}};
  auto d2 = ctsim::empirical_distribution(set, only_idle);
  CHECK(d2.probs[0] == 1.0);

  std::vector<ctsim::HoldInterval> empty;
  CHECK_THROWS_AS(ctsim::empirical_distribution(set, empty),
                  std::invalid_argument);
}
