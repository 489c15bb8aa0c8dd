#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "csma/ctsim.hpp"
#include "csma/exact.hpp"
#include "csma/functions.hpp"
#include "csma/graph.hpp"
#include "csma/rng.hpp"

namespace csma::adaptive {

/// Parameters of the adaptive CSMA loop. validate() enforces the
/// admissibility condition utility_weight <= W(queue_max) / U'(1); runs with
/// inadmissible parameters are rejected up front.
struct AlgoParams {
  double utility_weight = 1.0;  // V
  double queue_min = 0.1;
  double queue_max = 10.0;
  double holding_mean = 1.0;  // mu
  double slot_len = 10.0;     // continuous time per slot; default 10*mu
  StepSchedule step = StepSchedule::constant(0.001);
  WeightFunction weight = WeightFunction::linear();
  Utility utility = Utility::log_utility();

  void validate() const;

  static AlgoParams from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct QueueState {
  std::vector<double> q;
};

/// Per-slot history of a run: queue levels, slot services, and the running
/// average of service. Row t holds the queue used during slot t, the service
/// collected in slot t, and the average of service over slots 0..t.
struct SimTrace {
  unsigned links = 0;
  std::vector<double> queues;          // slot-major, slots * links
  std::vector<double> service;         // slot-major
  std::vector<double> avg_throughput;  // slot-major
  std::vector<double> final_queue;     // after the last update

  std::size_t slots() const { return links == 0 ? 0 : queues.size() / links; }
  std::span<const double> queue_row(std::size_t t) const {
    return {queues.data() + t * links, links};
  }
  std::span<const double> service_row(std::size_t t) const {
    return {service.data() + t * links, links};
  }
  std::span<const double> avg_row(std::size_t t) const {
    return {avg_throughput.data() + t * links, links};
  }
};

/// One queue update: clip(q + step/W'(q) * (U'^{-1}(W(q)/V) - service)).
double update_queue(double q, double service, double step,
                    const AlgoParams& p);

/// lambda = exp(W(q)) / mu. Large queue bounds can overflow this; use the log
/// form where only the exponent is needed.
double lambda_from_queue(double q, const AlgoParams& p);
double log_lambda_from_queue(double q, const AlgoParams& p);

/// Runs the slotted adaptation loop for the given number of slots over the
/// collision-free continuous-time channel.
SimTrace run(const ConflictGraph& g, const ScheduleSet& set,
             const AlgoParams& p, const QueueState& q0, std::uint64_t slots,
             Rng& rng);

/// Running-average throughput at the end of the trace. Throws if empty.
exact::ThroughputVector gamma_running_average(const SimTrace& trace);

}  // namespace csma::adaptive
