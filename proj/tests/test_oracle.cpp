#include <doctest.h>

#include <cmath>
#include <vector>

#include "csma/oracle.hpp"
#include "csma/rng.hpp"

using namespace csma;

namespace {

ScheduleSet path3_set() {
  std::vector<std::pair<unsigned, unsigned>> e = {{0, 1}, {1, 2}};
  return ScheduleSet::enumerate(ConflictGraph(3, e));
}

ScheduleSet full_set(unsigned links) {
  std::vector<std::pair<unsigned, unsigned>> e;
  for (unsigned a = 0; a < links; ++a)
    for (unsigned b = a + 1; b < links; ++b) e.push_back({a, b});
  return ScheduleSet::enumerate(ConflictGraph(links, e));
}

// Root of 1/p = log(p/(1-p)): the single-link regularized optimum for V=1,
// solved by bisection, independent of the subgradient code path.
double single_link_root() {
  double lo = 0.55, hi = 0.99;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (1.0 / mid - std::log(mid / (1.0 - mid)) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Independent primal oracle for the regularized problem: mirror descent
// (multiplicative updates) on the schedule simplex.
double mirror_descent_optimum(const ScheduleSet& set, double V,
                              std::vector<double>* pi_out = nullptr) {
  const std::size_t n = set.size();
  const unsigned links = set.links();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  std::vector<double> gamma(links), grad(n);
  const double eta = 0.05;
  for (int it = 0; it < 200'000; ++it) {
    std::fill(gamma.begin(), gamma.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (unsigned l = 0; l < links; ++l)
        if (set.at(i).contains(l)) gamma[l] += pi[i];
    for (std::size_t i = 0; i < n; ++i) {
      double g = -std::log(pi[i]) - 1.0;
      for (unsigned l = 0; l < links; ++l)
        if (set.at(i).contains(l)) g += V / gamma[l];
      grad[i] = g;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      pi[i] *= std::exp(eta * grad[i]);
      total += pi[i];
    }
    for (auto& p : pi) p /= total;
  }
  std::fill(gamma.begin(), gamma.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (unsigned l = 0; l < links; ++l)
      if (set.at(i).contains(l)) gamma[l] += pi[i];
  double value = 0.0;
  for (unsigned l = 0; l < links; ++l) value += V * std::log(gamma[l]);
  for (double p : pi)
    if (p > 0) value -= p * std::log(p);
  if (pi_out != nullptr) *pi_out = pi;
  return value;
}

}  // namespace

TEST_CASE("single-link regularized solution matches the 1-d root") {
  auto set = ScheduleSet::enumerate(ConflictGraph(1, {}));
  const double p_star = single_link_root();
  auto sol = oracle::solve_entropy_regularized(set, Utility::log_utility(),
                                               1.0, {0.1, 10.0});
  CHECK(p_star == doctest::Approx(0.7823).epsilon(2e-4));
  CHECK(sol.gamma.gamma[0] == doctest::Approx(p_star).epsilon(1e-6));
  CHECK(sol.pi.probs[1] == doctest::Approx(p_star).epsilon(1e-6));
  CHECK(sol.kkt_residual < 1e-8);
}

TEST_CASE("3-link path: symmetry, KKT, and the independent primal oracle") {
  auto set = path3_set();
  auto sol = oracle::solve_entropy_regularized(set, Utility::log_utility(),
                                               1.0, {0.1, 4.0});
  CHECK(sol.gamma.gamma[0] == doctest::Approx(sol.gamma.gamma[2]).epsilon(1e-7));
  CHECK(sol.nu[0] == doctest::Approx(sol.nu[2]).epsilon(1e-7));
  CHECK(sol.kkt_residual < 1e-8);
  const double primal = mirror_descent_optimum(set, 1.0);
  CHECK(sol.objective == doctest::Approx(primal).epsilon(1e-7));
}

TEST_CASE("two initializations reach the same multipliers") {
  auto set = path3_set();
  oracle::SolveOptions a, b;
  a.nu0.assign(3, 0.11);
  b.nu0.assign(3, 3.9);
  auto sa = oracle::solve_entropy_regularized(set, Utility::log_utility(), 1.0,
                                              {0.1, 4.0}, a);
  auto sb = oracle::solve_entropy_regularized(set, Utility::log_utility(), 1.0,
                                              {0.1, 4.0}, b);
  for (int l = 0; l < 3; ++l)
    CHECK(sa.nu[l] == doctest::Approx(sb.nu[l]).epsilon(1e-6));
}

TEST_CASE("inadmissible V is rejected") {
  auto set = path3_set();
  CHECK_THROWS_AS(oracle::solve_entropy_regularized(
                      set, Utility::log_utility(), 5.0, {0.1, 4.0}),
                  std::invalid_argument);
}

TEST_CASE("utility-optimal solution on the path") {
  auto set = path3_set();
  auto sol = oracle::solve_utility_optimal(set, Utility::log_utility(), 1e-10);
  // 1-d oracle over the support {{1,3}, {2}}: maximize 2 log p + log(1-p)
  // gives p = 2/3; first-order optimality over all five schedules confirms.
  CHECK(sol.pi.probs[4] == doctest::Approx(2.0 / 3.0).epsilon(1e-4));
  CHECK(sol.pi.probs[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-4));
  CHECK(sol.gamma.gamma[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-5));
  CHECK(sol.gamma.gamma[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-5));
  CHECK(sol.objective ==
        doctest::Approx(2 * std::log(2.0 / 3.0) + std::log(1.0 / 3.0))
            .epsilon(1e-9));
  // certificate: max_m sum_{l in m} U'(gamma_l) is attained on the support
  double best = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    double s = 0.0;
    for (unsigned l = 0; l < 3; ++l)
      if (set.at(i).contains(l)) s += 1.0 / sol.gamma.gamma[l];
    best = std::max(best, s);
  }
  double support_val = 1.0 / sol.gamma.gamma[1];
  CHECK(best == doctest::Approx(support_val).epsilon(1e-6));
}

TEST_CASE("utility-optimal degenerate cases") {
  auto single = ScheduleSet::enumerate(ConflictGraph(1, {}));
  auto sol = oracle::solve_utility_optimal(single, Utility::log_utility());
  CHECK(sol.gamma.gamma[0] == doctest::Approx(1.0).epsilon(1e-8));

  for (unsigned links : {2u, 3u, 4u}) {
    auto set = full_set(links);
    auto s = oracle::solve_utility_optimal(set, Utility::log_utility());
    for (unsigned l = 0; l < links; ++l)
      CHECK(s.gamma.gamma[l] == doctest::Approx(1.0 / links).epsilon(1e-6));
  }
}

TEST_CASE("gap certificate honors the entropy bound") {
  auto set = path3_set();
  auto opt = oracle::solve_utility_optimal(set, Utility::log_utility(), 1e-10);

  double prev_gap = 1e9;
  for (double V : {1.0, 5.0, 10.0, 20.0}) {
    oracle::SolveOptions opts;
    opts.step0 = std::max(1.0, V / 2.0);
    auto reg = oracle::solve_entropy_regularized(
        set, Utility::log_utility(), V, {0.01, 4.0 * V}, opts);
    auto cert =
        oracle::utility_gap_certificate(set, Utility::log_utility(), V, reg,
                                        opt);
    CHECK(cert.bound == doctest::Approx(std::log(5.0) / V));
    CHECK(cert.gap <= cert.bound);
    CHECK(cert.gap <= prev_gap + 1e-9);  // shrinks as V grows
    prev_gap = cert.gap;
  }
}

TEST_CASE("single-link gap value") {
  auto set = ScheduleSet::enumerate(ConflictGraph(1, {}));
  auto opt = oracle::solve_utility_optimal(set, Utility::log_utility());
  auto reg = oracle::solve_entropy_regularized(set, Utility::log_utility(),
                                               1.0, {0.1, 10.0});
  auto cert =
      oracle::utility_gap_certificate(set, Utility::log_utility(), 1.0, reg,
                                      opt);
  // gap = |0 - log p*| with p* from the 1-d root
  CHECK(cert.gap == doctest::Approx(-std::log(single_link_root())).epsilon(1e-5));
  CHECK(cert.gap == doctest::Approx(0.2456).epsilon(1e-3));
  CHECK(cert.bound == doctest::Approx(std::log(2.0)));
}

TEST_CASE("kkt residual detects perturbations") {
  auto set = path3_set();
  auto sol = oracle::solve_entropy_regularized(set, Utility::log_utility(),
                                               1.0, {0.1, 4.0});
  CHECK(oracle::kkt_residual(set, Utility::log_utility(), 1.0,
                             sol.gamma.gamma, sol.pi, sol.nu) < 1e-8);

  auto nu = sol.nu;
  nu[1] += 0.1;
  const double r = oracle::kkt_residual(set, Utility::log_utility(), 1.0,
                                        sol.gamma.gamma, sol.pi, nu);
  CHECK(r >= 0.1 - 1e-9);

  // nu = 0 kills the slackness block; the stationarity block shows V U'.
  exact::ScheduleDistribution uniform{std::vector<double>(5, 0.2)};
  auto tput = exact::link_throughputs(set, uniform);
  std::vector<double> zero(3, 0.0);
  const double r0 = oracle::kkt_residual(set, Utility::log_utility(), 1.0,
                                         tput.gamma, uniform, zero);
  double expect = 0.0;
  for (double gl : tput.gamma) expect = std::max(expect, 1.0 / gl);
  CHECK(r0 >= expect - 1e-12);

  exact::ScheduleDistribution degenerate{{1.0, 0.0, 0.0, 0.0, 0.0}};
  CHECK_THROWS_AS(oracle::kkt_residual(set, Utility::log_utility(), 1.0,
                                       tput.gamma, degenerate, zero),
                  std::invalid_argument);
}

TEST_CASE("dual value: strong duality on one link, log|N| at zero nu") {
  auto set = ScheduleSet::enumerate(ConflictGraph(1, {}));
  const double p_star = single_link_root();
  std::vector<double> nu = {1.0 / p_star};
  const double d =
      oracle::dual_value(set, Utility::log_utility(), 1.0, nu, {0.1, 10.0});
  const double primal = std::log(p_star) -
                        (p_star * std::log(p_star) +
                         (1 - p_star) * std::log(1 - p_star));
  CHECK(d == doctest::Approx(primal).epsilon(1e-9));

  auto path = path3_set();
  std::vector<double> tiny = {0.01, 0.01, 0.01};
  // at nu ~ 0 the log-sum-exp block approaches log |N|
  const double d0 =
      oracle::dual_value(path, Utility::log_utility(), 1.0, tiny, {0.005, 4.0});
  const double gamma_part = 3 * (std::log(1.0 / 0.01) - 1.0);
  CHECK(d0 == doctest::Approx(gamma_part + std::log(5.0)).epsilon(2e-3));

  std::vector<double> outside = {5.0, 1.0, 1.0};
  CHECK_THROWS_AS(
      oracle::dual_value(path, Utility::log_utility(), 1.0, outside, {0.1, 4.0}),
      std::invalid_argument);
}

TEST_CASE("weak duality against random feasible points") {
  auto set = path3_set();
  const double V = 1.0;
  auto sol = oracle::solve_entropy_regularized(set, Utility::log_utility(), V,
                                               {0.1, 4.0});
  const double dual_at_opt =
      oracle::dual_value(set, Utility::log_utility(), V, sol.nu, {0.1, 4.0});
  Rng rng(314);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> pi(set.size());
    double total = 0.0;
    for (auto& p : pi) {
      p = -std::log(1.0 - rng.uniform());
      total += p;
    }
    for (auto& p : pi) p /= total;
    exact::ScheduleDistribution d{pi};
    auto tput = exact::link_throughputs(set, d);
    double primal = exact::entropy(d);
    bool ok = true;
    for (double gl : tput.gamma) {
      const double g = gl * (0.2 + 0.8 * rng.uniform());  // any gamma <= tput
      if (g <= 0.0) ok = false;
      primal += V * std::log(g);
    }
    if (!ok) continue;
    CHECK(dual_at_opt >= primal - 1e-9);
  }
}

TEST_CASE("strong duality on graphs up to 12 links") {
  Rng rng(2718);
  std::vector<ScheduleSet> cases;
  cases.push_back(path3_set());
  cases.push_back(full_set(3));
  {
    std::vector<std::pair<unsigned, unsigned>> e;
    for (unsigned a = 0; a < 12; ++a)
      for (unsigned b = a + 1; b < 12; ++b)
        if (rng.bernoulli(0.3)) e.push_back({a, b});
    cases.push_back(ScheduleSet::enumerate(ConflictGraph(12, e)));
  }
  for (const auto& set : cases) {
    oracle::SolveOptions opts;
    opts.tol = 1e-10;
    auto sol = oracle::solve_entropy_regularized(set, Utility::log_utility(),
                                                 1.0, {0.1, 15.0}, opts);
    const double d = oracle::dual_value(set, Utility::log_utility(), 1.0,
                                        sol.nu, {0.1, 15.0});
    CHECK(std::abs(d - sol.objective) < 1e-6);
  }
}
