#include <doctest.h>

#include <cmath>

#include "csma/functions.hpp"

using namespace csma;

TEST_CASE("log utility derivatives and inverse") {
  auto u = Utility::log_utility();
  CHECK(u.value(1.0) == 0.0);
  CHECK(u.deriv(2.0) == doctest::Approx(0.5));
  CHECK(u.deriv_inv(2.0) == doctest::Approx(0.5));
  CHECK(u.deriv_at_one() == 1.0);
  CHECK(u.diverges_at_zero());
}

TEST_CASE("alpha-fair utility is consistent with its derivative") {
  for (double alpha : {0.5, 2.0, 3.0}) {
    auto u = Utility::alpha_fair(alpha);
    for (double x : {0.3, 0.7, 1.0}) {
      // finite-difference check of U'
      const double h = 1e-6;
      const double fd = (u.value(x + h) - u.value(x - h)) / (2 * h);
      CHECK(u.deriv(x) == doctest::Approx(fd).epsilon(1e-6));
      CHECK(u.deriv_inv(u.deriv(x)) == doctest::Approx(x));
    }
    CHECK(u.deriv_at_one() == 1.0);
  }
  CHECK_THROWS_AS(Utility::alpha_fair(1.0), std::invalid_argument);
  CHECK_THROWS_AS(Utility::alpha_fair(-1.0), std::invalid_argument);
}

TEST_CASE("weight functions are increasing with matching inverse") {
  for (auto w : {WeightFunction::linear(2.0), WeightFunction::log1p(1.5)}) {
    double prev = w.value(0.0);
    for (double x : {0.5, 1.0, 4.0, 9.0}) {
      CHECK(w.value(x) > prev);
      prev = w.value(x);
      CHECK(w.inverse(w.value(x)) == doctest::Approx(x));
      const double h = 1e-6;
      const double fd = (w.value(x + h) - w.value(x - h)) / (2 * h);
      CHECK(w.deriv(x) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("step schedules") {
  auto c = StepSchedule::constant(0.001);
  CHECK(c.at(0) == 0.001);
  CHECK(c.at(1000000) == 0.001);
  CHECK_FALSE(c.diminishing());

  auto p = StepSchedule::power(1.0, 100.0, 1.0);
  CHECK(p.at(0) == doctest::Approx(0.01));
  CHECK(p.at(900) == doctest::Approx(0.001));
  CHECK(p.diminishing());

  // sum b = inf, sum b^2 < inf requires p in (1/2, 1]
  CHECK_THROWS_AS(StepSchedule::power(1.0, 100.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(StepSchedule::power(1.0, 100.0, 1.2), std::invalid_argument);
  CHECK_NOTHROW(StepSchedule::power(1.0, 100.0, 0.6));
}

TEST_CASE("json round trips") {
  auto u = Utility::alpha_fair(2.0);
  auto u2 = Utility::from_json(u.to_json());
  CHECK(u2.value(0.5) == u.value(0.5));

  auto w = WeightFunction::log1p(3.0);
  auto w2 = WeightFunction::from_json(w.to_json());
  CHECK(w2.value(2.0) == w.value(2.0));

  auto s = StepSchedule::power(2.0, 50.0, 0.75);
  auto s2 = StepSchedule::from_json(s.to_json());
  CHECK(s2.at(17) == s.at(17));
}
