#include "csma/ctsim.hpp"

#include <limits>
#include <stdexcept>

namespace csma::ctsim {

namespace {

void check_inputs(const CtState& state, const ConflictGraph& g,
                  std::span<const double> rate, double holding_mean,
                  double slot_len) {
  if (rate.size() != g.links())
    throw std::invalid_argument("activation rate length mismatch");
  for (double r : rate)
    if (!(r > 0.0))
      throw std::invalid_argument("activation rates must be positive");
  if (!(holding_mean > 0.0))
    throw std::invalid_argument("holding mean must be positive");
  if (!(slot_len > 0.0))
    throw std::invalid_argument("slot length must be positive");
  if (!is_feasible(state.active, g))
    throw std::invalid_argument("initial schedule is infeasible");
}

}  // namespace

SlotResult run_slot(CtState& state, const ScheduleSet& set,
                    const ConflictGraph& g,
                    std::span<const double> activation_rate,
                    double holding_mean, double slot_len, Rng& rng,
                    std::vector<HoldInterval>* trace) {
  check_inputs(state, g, activation_rate, holding_mean, slot_len);

  const unsigned links = g.links();
  const double stop_rate = 1.0 / holding_mean;
  SlotResult out;
  out.service.service.assign(links, 0.0);

  LinkMask mask = state.active.active;
  state.clock = 0.0;
  double segment_start = 0.0;

  auto accrue = [&](double until) {
    LinkMask rest = mask;
    while (rest) {
      unsigned l = static_cast<unsigned>(__builtin_ctz(rest));
      rest &= rest - 1;
      out.service.service[l] += until - segment_start;
    }
    if (trace != nullptr && until > segment_start)
      trace->push_back({set.index_of(mask), until - segment_start});
    segment_start = until;
  };

  while (true) {
    // Fresh exponential race over all enabled transitions.
    const LinkMask addable = addable_links(Schedule{mask}, g);
    double best = std::numeric_limits<double>::infinity();
    unsigned best_link = 0;
    bool best_is_start = false;
    for (unsigned l = 0; l < links; ++l) {
      if (!((addable >> l) & 1u)) continue;
      const double t = rng.exponential(activation_rate[l]);
      if (t < best) {
        best = t;
        best_link = l;
        best_is_start = true;
      }
    }
    LinkMask rest = mask;
    while (rest) {
      unsigned l = static_cast<unsigned>(__builtin_ctz(rest));
      rest &= rest - 1;
      const double t = rng.exponential(stop_rate);
      if (t < best) {
        best = t;
        best_link = l;
        best_is_start = false;
      }
    }

    const double event_time = state.clock + best;
    if (event_time >= slot_len) {
      accrue(slot_len);
      break;
    }
    accrue(event_time);
    state.clock = event_time;
    if (best_is_start) {
      if (g.neighbors(best_link) & mask)
        throw std::logic_error("activation would violate feasibility");
      mask |= LinkMask{1} << best_link;
    } else {
      mask &= ~(LinkMask{1} << best_link);
    }
    ++out.events;
  }

  for (double& s : out.service.service) s /= slot_len;
  state.active.active = mask;
  state.clock = 0.0;
  return out;
}

exact::ScheduleDistribution empirical_distribution(
    const ScheduleSet& set, std::span<const HoldInterval> trace) {
  if (trace.empty()) throw std::invalid_argument("empty trace");
  exact::ScheduleDistribution d;
  d.probs.assign(set.size(), 0.0);
  double total = 0.0;
  for (const auto& iv : trace) {
    if (iv.schedule_index >= set.size())
      throw std::invalid_argument("trace schedule index out of range");
    d.probs[iv.schedule_index] += iv.duration;
    total += iv.duration;
  }
  if (!(total > 0.0)) throw std::invalid_argument("trace has zero duration");
  for (double& p : d.probs) p /= total;
  return d;
}

exact::ScheduleDistribution OccupancyResult::distribution() const {
  if (!(total_time > 0.0))
    throw std::invalid_argument("no observed time");
  exact::ScheduleDistribution d;
  d.probs = time_per_schedule;
  for (double& p : d.probs) p /= total_time;
  return d;
}

OccupancyResult simulate_occupancy(const ScheduleSet& set,
                                   const ConflictGraph& g,
                                   std::span<const double> activation_rate,
                                   double holding_mean, double slot_len,
                                   std::uint64_t min_events, Rng& rng) {
  OccupancyResult res;
  res.time_per_schedule.assign(set.size(), 0.0);
  CtState state;
  std::vector<HoldInterval> intervals;
  while (res.events < min_events) {
    intervals.clear();
    SlotResult r = run_slot(state, set, g, activation_rate, holding_mean,
                            slot_len, rng, &intervals);
    for (const auto& iv : intervals) {
      res.time_per_schedule[iv.schedule_index] += iv.duration;
      res.total_time += iv.duration;
    }
    res.events += r.events;
  }
  return res;
}

}  // namespace csma::ctsim
