#include "csma/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace csma::adaptive {

void AlgoParams::validate() const {
  if (!(utility_weight > 0.0))
    throw std::invalid_argument("utility weight must be positive");
  if (!(queue_min < queue_max))
    throw std::invalid_argument("queue bounds must satisfy q_min < q_max");
  if (!(queue_min >= 0.0))
    throw std::invalid_argument("queue_min must be >= 0");
  if (!(holding_mean > 0.0))
    throw std::invalid_argument("holding mean must be positive");
  if (!(slot_len > 0.0))
    throw std::invalid_argument("slot length must be positive");
  if (utility_weight > weight.value(queue_max) / utility.deriv_at_one())
    throw std::invalid_argument(
        "inadmissible parameters: V exceeds W(q_max)/U'(1)");
  // The target rate U'^{-1}(W(q_min)/V) must be finite at the lower bound.
  if (utility.diverges_at_zero() && !(weight.value(queue_min) > 0.0))
    throw std::invalid_argument(
        "W(q_min) must be positive when U'(0) diverges");
}

AlgoParams AlgoParams::from_json(const nlohmann::json& j) {
  AlgoParams p;
  p.utility_weight = j.value("V", 1.0);
  p.queue_min = j.value("q_min", 0.1);
  p.queue_max = j.value("q_max", 10.0);
  p.holding_mean = j.value("mu", 1.0);
  p.slot_len = j.value("slot_len", 10.0 * p.holding_mean);
  if (j.contains("step")) p.step = StepSchedule::from_json(j.at("step"));
  if (j.contains("W")) p.weight = WeightFunction::from_json(j.at("W"));
  if (j.contains("utility")) p.utility = Utility::from_json(j.at("utility"));
  p.validate();
  return p;
}

nlohmann::json AlgoParams::to_json() const {
  return {{"V", utility_weight},   {"q_min", queue_min},
          {"q_max", queue_max},    {"mu", holding_mean},
          {"slot_len", slot_len},  {"step", step.to_json()},
          {"W", weight.to_json()}, {"utility", utility.to_json()}};
}

double update_queue(double q, double service, double step,
                    const AlgoParams& p) {
  const double wprime = p.weight.deriv(q);
  if (!(wprime > 0.0))
    throw std::invalid_argument("weight function derivative must be positive");
  const double target =
      p.utility.deriv_inv(p.weight.value(q) / p.utility_weight);
  const double next = q + (step / wprime) * (target - service);
  return std::clamp(next, p.queue_min, p.queue_max);
}

double lambda_from_queue(double q, const AlgoParams& p) {
  return std::exp(p.weight.value(q)) / p.holding_mean;
}

double log_lambda_from_queue(double q, const AlgoParams& p) {
  return p.weight.value(q) - std::log(p.holding_mean);
}

SimTrace run(const ConflictGraph& g, const ScheduleSet& set,
             const AlgoParams& p, const QueueState& q0, std::uint64_t slots,
             Rng& rng) {
  p.validate();
  const unsigned links = g.links();
  if (q0.q.size() != links)
    throw std::invalid_argument("initial queue length mismatch");
  for (double q : q0.q)
    if (!(q >= p.queue_min && q <= p.queue_max))
      throw std::invalid_argument("initial queue outside [q_min, q_max]");

  SimTrace trace;
  trace.links = links;
  trace.queues.reserve(slots * links);
  trace.service.reserve(slots * links);
  trace.avg_throughput.reserve(slots * links);

  std::vector<double> q = q0.q;
  std::vector<double> rate(links);
  std::vector<double> sum_service(links, 0.0);
  ctsim::CtState state;

  for (std::uint64_t t = 0; t < slots; ++t) {
    for (unsigned l = 0; l < links; ++l)
      rate[l] = lambda_from_queue(q[l], p);
    ctsim::SlotResult r =
        ctsim::run_slot(state, set, g, rate, p.holding_mean, p.slot_len, rng);

    const double b = p.step.at(t);
    trace.queues.insert(trace.queues.end(), q.begin(), q.end());
    for (unsigned l = 0; l < links; ++l) {
      const double s = r.service.service[l];
      trace.service.push_back(s);
      sum_service[l] += s;
      trace.avg_throughput.push_back(sum_service[l] /
                                     static_cast<double>(t + 1));
      q[l] = update_queue(q[l], s, b, p);
    }
  }
  trace.final_queue = q;
  return trace;
}

exact::ThroughputVector gamma_running_average(const SimTrace& trace) {
  if (trace.slots() == 0) throw std::invalid_argument("empty trace");
  auto last = trace.avg_row(trace.slots() - 1);
  return exact::ThroughputVector{{last.begin(), last.end()}};
}

}  // namespace csma::adaptive
