#pragma once

#include <span>
#include <vector>

#include "csma/adaptive.hpp"
#include "csma/exact.hpp"
#include "csma/graph.hpp"

namespace csma::ode {

/// Queue trajectory in algorithmic time (cumulative step-size scale).
struct Trajectory {
  unsigned links = 0;
  std::vector<double> times;
  std::vector<double> states;  // times.size() * links, row-major

  std::span<const double> state_at(std::size_t i) const {
    return {states.data() + i * links, links};
  }
  std::span<const double> final_state() const {
    return state_at(times.size() - 1);
  }
};

/// Piecewise-linear interpolation of a stochastic run: breakpoint n sits at
/// the cumulative step size of the first n slots and carries queue q[n].
struct InterpolatedTrajectory {
  unsigned links = 0;
  std::vector<double> times;
  std::vector<double> values;  // times.size() * links

  double span_end() const { return times.back(); }
  void eval(double t, std::span<double> out) const;
};

/// Right-hand side of the limiting dynamics:
///   dq_l/dt = (U'^{-1}(W(q_l)/V) - sum_{m: l in m} pi^q(m)) / W'(q_l),
/// with the component zeroed when it points out of the [q_min, q_max] box at
/// an active face (projected dynamics).
std::vector<double> drift(std::span<const double> q, const ScheduleSet& set,
                          const adaptive::AlgoParams& p);

/// Fixed-step classic Runge-Kutta integration of drift() with per-step box
/// projection. Records every step.
Trajectory integrate(std::span<const double> q0, const ScheduleSet& set,
                     const adaptive::AlgoParams& p, double horizon, double dt);

InterpolatedTrajectory interpolate_stochastic(const adaptive::SimTrace& trace,
                                              const adaptive::AlgoParams& p);

/// sup over t in [start, start+window] of the inf-norm distance between the
/// interpolated stochastic path and the solution of the limiting dynamics
/// re-initialized at the stochastic value at time start.
double tracking_error(const InterpolatedTrajectory& stoch,
                      const ScheduleSet& set, const adaptive::AlgoParams& p,
                      double window, double start, double dt = 0.005);

}  // namespace csma::ode
