#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "csma/adaptive.hpp"
#include "csma/exact.hpp"
#include "csma/graph.hpp"
#include "csma/rng.hpp"

namespace csma::dtsim {

enum class HoldingModel { geometric, deterministic };

/// Discrete-time channel parameters. A link starts transmitting with
/// probability epsilon * activation_rate[l] per eligible minislot and holds
/// the channel for about holding_mean / epsilon minislots, so collision rates
/// stay O(epsilon). Construction rejects transmit probabilities above 1
/// rather than clamping them.
struct DtParams {
  double epsilon = 0.1;
  double holding_mean = 1.0;  // mu
  std::vector<double> activation_rate;
  HoldingModel holding = HoldingModel::geometric;

  double start_prob(unsigned link) const {
    return epsilon * activation_rate[link];
  }
  double holding_minislots() const { return holding_mean / epsilon; }
  void validate(const ConflictGraph& g) const;
};

enum class LinkMode : std::uint8_t { idle, tx_success, tx_collided };

struct DtState {
  std::vector<LinkMode> mode;
  std::vector<std::uint64_t> remaining;
  LinkMask prev_occupied = 0;  // links that transmitted during the previous minislot

  static DtState idle(unsigned links) {
    return DtState{std::vector<LinkMode>(links, LinkMode::idle),
                   std::vector<std::uint64_t>(links, 0), 0};
  }
};

struct MinislotEvents {
  LinkMask started = 0;
  LinkMask collided_started = 0;
  LinkMask success_now = 0;   // links transmitting successfully this minislot
  LinkMask occupied_now = 0;  // links transmitting at all this minislot
};

/// Advances the channel by one minislot. An idle link may start only when its
/// whole neighborhood, itself included, was silent during the previous
/// minislot (carrier sensing lags by one minislot, which is what makes
/// simultaneous starts and hence collisions possible). Links starting in the
/// same minislot with pairwise interference are collided for their entire
/// holding duration and contribute no service.
MinislotEvents step_minislot(DtState& state, const ConflictGraph& g,
                             std::span<const double> start_prob,
                             double holding_minislots, HoldingModel model,
                             Rng& rng);

/// Long-run per-link statistics over a measurement window.
struct FairnessReport {
  double epsilon = 0.0;
  std::vector<double> gamma_eps;        // successful fraction of the window
  std::vector<double> starvation_mean;  // E_l: mean no-success period, minislots
  double beta = 0.0;                    // 1 / max_l E_l
  double collision_rate = 0.0;          // collided starts / all starts
  std::vector<std::uint64_t> period_count;
  bool under_sampled = false;  // some link completed fewer than 100 periods
  std::vector<bool> starved;   // no successful minislot in the window
};

/// Fixed-parameter run over `horizon` minislots. Statistics are collected
/// over the second half of the horizon so the report reflects equilibrium
/// behavior.
FairnessReport run_dt(const ConflictGraph& g, const DtParams& p,
                      std::uint64_t horizon, Rng& rng);

/// Slotted adaptation config for the discrete-time channel.
struct DtAdaptiveConfig {
  double epsilon = 0.1;
  HoldingModel holding = HoldingModel::geometric;
  std::uint64_t slots = 10'000;
  std::uint64_t slot_len_minislots = 1'000;
};

struct DtAdaptiveResult {
  adaptive::SimTrace trace;
  FairnessReport report;  // over the second half of the slots
};

/// The adaptive loop with the collision channel: per slot, each link uses
/// start probability epsilon * exp(W(q_l)) / mu, service is the fraction of
/// successful minislots, and queues update as in the collision-free loop.
/// Construction fails if epsilon * exp(W(q_max)) / mu exceeds 1.
DtAdaptiveResult run_dt_adaptive(const ConflictGraph& g,
                                 const adaptive::AlgoParams& algo,
                                 const DtAdaptiveConfig& cfg,
                                 const adaptive::QueueState& q0, Rng& rng);

struct EfficiencyResult {
  double value = 0.0;
  bool starved = false;
};

/// Geometric-mean throughput ratio relative to the optimal vector:
/// exp((sum U(gamma) - sum U(gamma_opt)) / L) for log utility. A zero
/// throughput reports efficiency 0 with the starvation flag set.
EfficiencyResult efficiency(const exact::ThroughputVector& gamma,
                            const exact::ThroughputVector& gamma_opt,
                            const Utility& utility);

}  // namespace csma::dtsim
