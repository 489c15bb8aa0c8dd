#pragma once

#include <cstdint>
#include <span>

#include "csma/exact.hpp"
#include "csma/functions.hpp"
#include "csma/graph.hpp"

namespace csma::oracle {

/// Box for the per-link dual multipliers; lo = W(q_min), hi = W(q_max) when
/// derived from algorithm parameters.
struct DualBounds {
  double lo;
  double hi;
};

struct OracleSolution {
  exact::ThroughputVector gamma;
  exact::ScheduleDistribution pi;
  std::vector<double> nu;
  double objective = 0.0;      // primal value of the solved problem
  double kkt_residual = 0.0;
  double utility_weight = 0.0; // 0 for the unregularized problem
  DualBounds bounds{0.0, 0.0};
  std::uint64_t iterations = 0;
};

struct SolveOptions {
  double tol = 1e-9;
  std::uint64_t max_iter = 1'000'000;
  double step0 = 1.0;           // subgradient step a_k = step0 / sqrt(k)
  std::vector<double> nu0;      // empty: start at the box midpoint
};

/// Maximizes V*sum U(gamma_l) + entropy(pi) subject to
/// gamma_l <= sum_{m: l in m} pi_m over the schedule simplex, via projected
/// subgradient iteration on the per-link multipliers:
///   pi(nu) prop. exp(sum_{l in m} nu_l),  gamma_l(nu) = U'^{-1}(nu_l / V),
///   nu <- clip(nu + a_k (gamma(nu) - throughput(pi(nu)))).
/// Throws if V > bounds.hi / U'(1) or on non-convergence.
OracleSolution solve_entropy_regularized(const ScheduleSet& set,
                                         const Utility& utility, double V,
                                         DualBounds bounds,
                                         SolveOptions opts = {});

/// Maximizes sum U(gamma_l) over the schedule polytope by projected gradient
/// ascent on the schedule distribution (exact at enumeration scale). The
/// reported kkt_residual is the Frank-Wolfe gap, an upper bound on the value
/// suboptimality.
OracleSolution solve_utility_optimal(const ScheduleSet& set,
                                     const Utility& utility, double tol = 1e-9,
                                     std::uint64_t max_iter = 500'000);

struct GapCertificate {
  double gap;    // |sum U(gamma_opt) - sum U(gamma_reg)|
  double bound;  // log |N| / V
};

/// Checks the approximation guarantee gap <= log|N|/V; throws if violated by
/// more than tol.
GapCertificate utility_gap_certificate(const ScheduleSet& set,
                                       const Utility& utility, double V,
                                       const OracleSolution& regularized,
                                       const OracleSolution& optimal,
                                       double tol = 1e-9);

/// Max violation of the stationarity, distribution, and complementary
/// slackness conditions at (gamma, pi, nu). The distribution multiplier is
/// chosen to zero the mean residual of its block. Throws when pi has zero
/// entries.
double kkt_residual(const ScheduleSet& set, const Utility& utility, double V,
                    std::span<const double> gamma,
                    const exact::ScheduleDistribution& pi,
                    std::span<const double> nu);

/// Dual function value
///   D(nu) = sum_l [V U(U'^{-1}(nu_l/V)) - nu_l U'^{-1}(nu_l/V)]
///         + log sum_m exp(sum_{l in m} nu_l).
/// Throws if nu leaves the box.
double dual_value(const ScheduleSet& set, const Utility& utility, double V,
                  std::span<const double> nu, DualBounds bounds);

}  // namespace csma::oracle
