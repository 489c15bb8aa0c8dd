#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "csma/exact.hpp"
#include "csma/graph.hpp"
#include "csma/rng.hpp"

namespace csma::ctsim {

/// Channel state of the collision-free continuous-time network.
struct CtState {
  Schedule active;
  double clock = 0.0;  // time into the current slot; 0 at slot boundaries
};

/// Fraction of the slot each link spent transmitting.
struct SlotService {
  std::vector<double> service;
};

/// One visit of the schedule chain: which schedule, for how long.
struct HoldInterval {
  std::size_t schedule_index;
  double duration;
};

struct SlotResult {
  SlotService service;
  std::uint64_t events = 0;
};

/// Simulates the schedule jump process for one slot of length slot_len.
/// From schedule m, each addable link activates at rate activation_rate[l]
/// and each active link deactivates at rate 1/holding_mean; the next event is
/// the minimum of fresh exponential draws over all enabled transitions (drawn
/// in link order, activations first). Backoffs are also freshly drawn at the
/// slot boundary, which for exponential backoffs changes nothing but keeps
/// one code path for slotted parameter updates.
SlotResult run_slot(CtState& state, const ScheduleSet& set,
                    const ConflictGraph& g,
                    std::span<const double> activation_rate,
                    double holding_mean, double slot_len, Rng& rng,
                    std::vector<HoldInterval>* trace = nullptr);

/// Time-weighted occupancy of each schedule. Throws on an empty trace or
/// zero total duration.
exact::ScheduleDistribution empirical_distribution(
    const ScheduleSet& set, std::span<const HoldInterval> trace);

/// Long fixed-parameter run that accumulates occupancy in place instead of
/// materializing the trace. Runs whole slots until at least min_events jump
/// events have occurred.
struct OccupancyResult {
  std::vector<double> time_per_schedule;
  std::uint64_t events = 0;
  double total_time = 0.0;

  exact::ScheduleDistribution distribution() const;
};

OccupancyResult simulate_occupancy(const ScheduleSet& set,
                                   const ConflictGraph& g,
                                   std::span<const double> activation_rate,
                                   double holding_mean, double slot_len,
                                   std::uint64_t min_events, Rng& rng);

}  // namespace csma::ctsim
