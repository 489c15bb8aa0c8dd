#include "csma/exact.hpp"

#include <cmath>
#include <stdexcept>

#include "csma/kernels.hpp"

namespace csma::exact {

void validate(const ScheduleDistribution& d) {
  double sum = 0.0;
  for (double p : d.probs) {
    if (!(p >= 0.0))
      throw std::invalid_argument("distribution has a negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("distribution does not sum to 1");
}

namespace {

void check_exponents(const ScheduleSet& s, std::span<const double> w) {
  if (w.size() != s.links())
    throw std::invalid_argument("per-link exponent length mismatch");
}

ScheduleDistribution normalize_log_weights(const ScheduleSet& s,
                                           std::vector<double>&& logw) {
  const std::size_t n = s.size();
  const double shift = kern::reduce_max(logw.data(), n);
  ScheduleDistribution d;
  d.probs.resize(n);
  const double total = kern::exp_shift_sum(logw.data(), n, shift,
                                           d.probs.data());
  kern::scale(d.probs.data(), n, 1.0 / total);
  return d;
}

std::vector<double> schedule_log_weights(const ScheduleSet& s,
                                         std::span<const double> w) {
  std::vector<double> logw(s.size());
  kern::mask_dot(s.masks().data(), s.size(), w.data(), s.links(), logw.data());
  return logw;
}

}  // namespace

ScheduleDistribution distribution_from_log_weights(
    const ScheduleSet& s, std::span<const double> per_link_exponent) {
  check_exponents(s, per_link_exponent);
  return normalize_log_weights(s, schedule_log_weights(s, per_link_exponent));
}

double log_partition(const ScheduleSet& s,
                     std::span<const double> per_link_exponent) {
  check_exponents(s, per_link_exponent);
  auto logw = schedule_log_weights(s, per_link_exponent);
  const double shift = kern::reduce_max(logw.data(), logw.size());
  std::vector<double> scratch(logw.size());
  const double total =
      kern::exp_shift_sum(logw.data(), logw.size(), shift, scratch.data());
  return shift + std::log(total);
}

ScheduleDistribution stationary_distribution(const ScheduleSet& s,
                                             std::span<const double> rate,
                                             double holding_mean) {
  std::vector<double> holding(s.links(), holding_mean);
  return stationary_distribution(s, rate, holding);
}

ScheduleDistribution stationary_distribution(
    const ScheduleSet& s, std::span<const double> rate,
    std::span<const double> holding_mean) {
  if (rate.size() != s.links() || holding_mean.size() != s.links())
    throw std::invalid_argument("rate/holding length mismatch");
  std::vector<double> exponent(s.links());
  for (unsigned l = 0; l < s.links(); ++l) {
    if (!(rate[l] > 0.0) || !(holding_mean[l] > 0.0))
      throw std::invalid_argument("rates and holding means must be positive");
    exponent[l] = std::log(rate[l]) + std::log(holding_mean[l]);
  }
  return distribution_from_log_weights(s, exponent);
}

ScheduleDistribution distribution_from_queues(const ScheduleSet& s,
                                              std::span<const double> queue,
                                              const WeightFunction& weight) {
  if (queue.size() != s.links())
    throw std::invalid_argument("queue length mismatch");
  std::vector<double> exponent(s.links());
  for (unsigned l = 0; l < s.links(); ++l) exponent[l] = weight.value(queue[l]);
  return distribution_from_log_weights(s, exponent);
}

ThroughputVector link_throughputs(const ScheduleSet& s,
                                  const ScheduleDistribution& pi) {
  if (pi.probs.size() != s.size())
    throw std::invalid_argument("distribution size mismatch");
  ThroughputVector t;
  t.gamma.resize(s.links());
  kern::bit_sums(s.masks().data(), s.size(), pi.probs.data(), s.links(),
                 t.gamma.data());
  return t;
}

double tv_distance(const ScheduleDistribution& a,
                   const ScheduleDistribution& b) {
  if (a.probs.size() != b.probs.size())
    throw std::invalid_argument("distribution size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.probs.size(); ++i)
    s += std::abs(a.probs[i] - b.probs[i]);
  return 0.5 * s;
}

double entropy(const ScheduleDistribution& d) {
  double h = 0.0;
  for (double p : d.probs)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

}  // namespace csma::exact
