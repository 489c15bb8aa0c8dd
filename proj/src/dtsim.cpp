#include "csma/dtsim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace csma::dtsim {

void DtParams::validate(const ConflictGraph& g) const {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("epsilon must lie in (0, 1]");
  if (!(holding_mean > 0.0))
    throw std::invalid_argument("holding mean must be positive");
  if (!(holding_mean / epsilon >= 1.0))
    throw std::invalid_argument("holding time must span at least one minislot");
  if (activation_rate.size() != g.links())
    throw std::invalid_argument("activation rate length mismatch");
  for (double r : activation_rate) {
    if (!(r > 0.0))
      throw std::invalid_argument("activation rates must be positive");
    if (epsilon * r > 1.0)
      throw std::invalid_argument(
          "epsilon * rate exceeds 1: not a valid transmit probability");
  }
}

namespace {

std::uint64_t draw_holding(double mean_minislots, HoldingModel model,
                           Rng& rng) {
  if (model == HoldingModel::deterministic)
    return static_cast<std::uint64_t>(std::ceil(mean_minislots));
  return rng.geometric(1.0 / mean_minislots);
}

/// Per-link window statistics: success time, completed no-success periods
/// (bounded by successes on both sides), start/collision counts.
class FairnessAccumulator {
 public:
  explicit FairnessAccumulator(unsigned links)
      : success_(links, 0),
        period_sum_(links, 0),
        period_count_(links, 0),
        run_(links, 0),
        success_seen_(links, false) {}

  void record(const MinislotEvents& ev, unsigned links) {
    for (unsigned l = 0; l < links; ++l) {
      const LinkMask bit = LinkMask{1} << l;
      if (ev.success_now & bit) {
        ++success_[l];
        if (success_seen_[l] && run_[l] > 0) {
          period_sum_[l] += run_[l];
          ++period_count_[l];
        }
        success_seen_[l] = true;
        run_[l] = 0;
      } else {
        ++run_[l];
      }
      if (ev.started & bit) {
        ++starts_;
        if (ev.collided_started & bit) ++collided_starts_;
      }
    }
    ++window_len_;
  }

  FairnessReport finalize(double epsilon) const {
    const unsigned links = static_cast<unsigned>(success_.size());
    FairnessReport r;
    r.epsilon = epsilon;
    r.gamma_eps.resize(links);
    r.starvation_mean.resize(links);
    r.period_count = period_count_;
    r.starved.resize(links);
    double max_e = 0.0;
    for (unsigned l = 0; l < links; ++l) {
      r.gamma_eps[l] =
          static_cast<double>(success_[l]) / static_cast<double>(window_len_);
      r.starved[l] = success_[l] == 0;
      if (period_count_[l] > 0) {
        r.starvation_mean[l] = static_cast<double>(period_sum_[l]) /
                               static_cast<double>(period_count_[l]);
      } else {
        // Never or once successful: the starvation period is censored by the
        // window; report the window length as a lower bound.
        r.starvation_mean[l] = static_cast<double>(window_len_);
      }
      if (period_count_[l] < 100) r.under_sampled = true;
      max_e = std::max(max_e, r.starvation_mean[l]);
    }
    r.beta = max_e > 0.0 ? 1.0 / max_e : 0.0;
    r.collision_rate =
        starts_ > 0 ? static_cast<double>(collided_starts_) /
                          static_cast<double>(starts_)
                    : 0.0;
    return r;
  }

 private:
  std::vector<std::uint64_t> success_, period_sum_, period_count_, run_;
  std::vector<bool> success_seen_;
  std::uint64_t starts_ = 0;
  std::uint64_t collided_starts_ = 0;
  std::uint64_t window_len_ = 0;
};

}  // namespace

MinislotEvents step_minislot(DtState& state, const ConflictGraph& g,
                             std::span<const double> start_prob,
                             double holding_minislots, HoldingModel model,
                             Rng& rng) {
  const unsigned links = g.links();
  MinislotEvents ev;

  // Start decisions, in link order for reproducibility. A link senses its own
  // previous-minislot transmission too, so back-to-back restarts leave at
  // least one idle minislot.
  for (unsigned l = 0; l < links; ++l) {
    if (state.mode[l] != LinkMode::idle) continue;
    const LinkMask sensed = g.neighbors(l) | (LinkMask{1} << l);
    if (sensed & state.prev_occupied) continue;
    if (rng.bernoulli(start_prob[l])) ev.started |= LinkMask{1} << l;
  }

  LinkMask rest = ev.started;
  while (rest) {
    const unsigned l = static_cast<unsigned>(__builtin_ctz(rest));
    rest &= rest - 1;
    state.remaining[l] = draw_holding(holding_minislots, model, rng);
    const bool collided = (g.neighbors(l) & ev.started) != 0;
    state.mode[l] = collided ? LinkMode::tx_collided : LinkMode::tx_success;
    if (collided) ev.collided_started |= LinkMask{1} << l;
  }

  for (unsigned l = 0; l < links; ++l) {
    if (state.mode[l] == LinkMode::idle) continue;
    const LinkMask bit = LinkMask{1} << l;
    ev.occupied_now |= bit;
    if (state.mode[l] == LinkMode::tx_success) ev.success_now |= bit;
    if (--state.remaining[l] == 0) state.mode[l] = LinkMode::idle;
  }
  state.prev_occupied = ev.occupied_now;
  return ev;
}

FairnessReport run_dt(const ConflictGraph& g, const DtParams& p,
                      std::uint64_t horizon, Rng& rng) {
  p.validate(g);
  if (horizon == 0) throw std::invalid_argument("horizon must be positive");
  const unsigned links = g.links();
  std::vector<double> prob(links);
  for (unsigned l = 0; l < links; ++l) prob[l] = p.start_prob(l);

  DtState state = DtState::idle(links);
  FairnessAccumulator acc(links);
  const std::uint64_t window_start = horizon / 2;
  for (std::uint64_t t = 0; t < horizon; ++t) {
    MinislotEvents ev = step_minislot(state, g, prob, p.holding_minislots(),
                                      p.holding, rng);
    if (t >= window_start) acc.record(ev, links);
  }
  return acc.finalize(p.epsilon);
}

DtAdaptiveResult run_dt_adaptive(const ConflictGraph& g,
                                 const adaptive::AlgoParams& algo,
                                 const DtAdaptiveConfig& cfg,
                                 const adaptive::QueueState& q0, Rng& rng) {
  algo.validate();
  const unsigned links = g.links();
  if (q0.q.size() != links)
    throw std::invalid_argument("initial queue length mismatch");
  if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0))
    throw std::invalid_argument("epsilon must lie in (0, 1]");
  if (cfg.slot_len_minislots == 0)
    throw std::invalid_argument("slot length must be positive");
  const double hold = algo.holding_mean / cfg.epsilon;
  if (!(hold >= 1.0))
    throw std::invalid_argument("holding time must span at least one minislot");
  // The cap must hold at the largest reachable queue level.
  const double max_prob =
      cfg.epsilon *
      std::exp(algo.weight.value(algo.queue_max)) / algo.holding_mean;
  if (max_prob > 1.0)
    throw std::invalid_argument(
        "epsilon * lambda(q_max) exceeds 1: not a valid transmit probability");
  for (double q : q0.q)
    if (!(q >= algo.queue_min && q <= algo.queue_max))
      throw std::invalid_argument("initial queue outside [q_min, q_max]");

  adaptive::SimTrace trace;
  trace.links = links;
  trace.queues.reserve(cfg.slots * links);
  trace.service.reserve(cfg.slots * links);
  trace.avg_throughput.reserve(cfg.slots * links);

  std::vector<double> q = q0.q;
  std::vector<double> prob(links);
  std::vector<double> sum_service(links, 0.0);
  std::vector<std::uint64_t> slot_success(links);
  DtState state = DtState::idle(links);
  FairnessAccumulator acc(links);
  const std::uint64_t window_start_slot = cfg.slots / 2;

  for (std::uint64_t t = 0; t < cfg.slots; ++t) {
    for (unsigned l = 0; l < links; ++l)
      prob[l] = cfg.epsilon * adaptive::lambda_from_queue(q[l], algo);
    std::fill(slot_success.begin(), slot_success.end(), 0);
    const bool in_window = t >= window_start_slot;
    for (std::uint64_t s = 0; s < cfg.slot_len_minislots; ++s) {
      MinislotEvents ev =
          step_minislot(state, g, prob, hold, cfg.holding, rng);
      LinkMask succ = ev.success_now;
      while (succ) {
        const unsigned l = static_cast<unsigned>(__builtin_ctz(succ));
        succ &= succ - 1;
        ++slot_success[l];
      }
      if (in_window) acc.record(ev, links);
    }

    const double b = algo.step.at(t);
    trace.queues.insert(trace.queues.end(), q.begin(), q.end());
    for (unsigned l = 0; l < links; ++l) {
      const double service = static_cast<double>(slot_success[l]) /
                             static_cast<double>(cfg.slot_len_minislots);
      trace.service.push_back(service);
      sum_service[l] += service;
      trace.avg_throughput.push_back(sum_service[l] /
                                     static_cast<double>(t + 1));
      q[l] = adaptive::update_queue(q[l], service, b, algo);
    }
  }
  trace.final_queue = q;
  return DtAdaptiveResult{std::move(trace), acc.finalize(cfg.epsilon)};
}

EfficiencyResult efficiency(const exact::ThroughputVector& gamma,
                            const exact::ThroughputVector& gamma_opt,
                            const Utility& utility) {
  if (!utility.is_log())
    throw std::invalid_argument(
        "the efficiency metric is defined for log utility");
  if (gamma.gamma.size() != gamma_opt.gamma.size())
    throw std::invalid_argument("throughput length mismatch");
  const auto links = gamma.gamma.size();
  double delta = 0.0;
  for (std::size_t l = 0; l < links; ++l) {
    if (!(gamma_opt.gamma[l] > 0.0))
      throw std::invalid_argument("optimal throughput must be positive");
    if (!(gamma.gamma[l] > 0.0)) return {0.0, true};
    delta += utility.value(gamma.gamma[l]) - utility.value(gamma_opt.gamma[l]);
  }
  return {std::exp(delta / static_cast<double>(links)), false};
}

}  // namespace csma::dtsim
