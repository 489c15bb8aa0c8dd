#pragma once

#include <span>
#include <vector>

#include "csma/functions.hpp"
#include "csma/graph.hpp"

namespace csma::exact {

/// Probability vector over the schedules of a ScheduleSet, canonical order.
struct ScheduleDistribution {
  std::vector<double> probs;
};

/// Per-link long-term service rates, each in [0, 1].
struct ThroughputVector {
  std::vector<double> gamma;
};

/// Throws unless probs is nonnegative and sums to 1 within 1e-12.
void validate(const ScheduleDistribution& d);

/// pi(m) proportional to exp(sum of exponent[l] over active links l).
/// All arithmetic in log space: exponents are shifted by their max before
/// exponentiating, so the result is finite for any finite exponents.
ScheduleDistribution distribution_from_log_weights(
    const ScheduleSet& s, std::span<const double> per_link_exponent);

/// log of sum over schedules m of exp(sum of exponent[l] over l in m).
double log_partition(const ScheduleSet& s,
                     std::span<const double> per_link_exponent);

/// Stationary law of the collision-free CSMA chain:
/// pi(m) = prod_{l in m} rate[l]*holding / normalizer.
ScheduleDistribution stationary_distribution(const ScheduleSet& s,
                                             std::span<const double> rate,
                                             double holding_mean);

/// Per-link holding variant (validation only; the adaptive algorithm uses a
/// single holding parameter).
ScheduleDistribution stationary_distribution(
    const ScheduleSet& s, std::span<const double> rate,
    std::span<const double> holding_mean);

/// pi(m) proportional to exp(sum of W(q_l) over active l).
ScheduleDistribution distribution_from_queues(const ScheduleSet& s,
                                              std::span<const double> queue,
                                              const WeightFunction& weight);

/// gamma_l = sum of pi(m) over schedules with l active.
ThroughputVector link_throughputs(const ScheduleSet& s,
                                  const ScheduleDistribution& pi);

/// Total variation distance, (1/2) sum |a_i - b_i|.
double tv_distance(const ScheduleDistribution& a,
                   const ScheduleDistribution& b);

/// Shannon entropy -sum pi log pi (natural log, 0 log 0 = 0).
double entropy(const ScheduleDistribution& d);

}  // namespace csma::exact
