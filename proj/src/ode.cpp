#include "csma/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace csma::ode {

void InterpolatedTrajectory::eval(double t, std::span<double> out) const {
  if (times.empty()) throw std::invalid_argument("empty trajectory");
  if (t < times.front() - 1e-12 || t > times.back() + 1e-12)
    throw std::invalid_argument("evaluation time outside trajectory span");
  t = std::clamp(t, times.front(), times.back());
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t hi = std::min<std::size_t>(it - times.begin(), times.size() - 1);
  if (hi == 0) hi = 1;
  const std::size_t lo = hi - 1;
  const double den = times[hi] - times[lo];
  const double a = den > 0.0 ? (t - times[lo]) / den : 0.0;
  for (unsigned l = 0; l < links; ++l) {
    const double vlo = values[lo * links + l];
    const double vhi = values[hi * links + l];
    out[l] = vlo + a * (vhi - vlo);
  }
}

std::vector<double> drift(std::span<const double> q, const ScheduleSet& set,
                          const adaptive::AlgoParams& p) {
  const unsigned links = set.links();
  if (q.size() != links) throw std::invalid_argument("queue length mismatch");
  auto pi = exact::distribution_from_queues(set, q, p.weight);
  auto tput = exact::link_throughputs(set, pi);
  std::vector<double> d(links);
  for (unsigned l = 0; l < links; ++l) {
    const double target =
        p.utility.deriv_inv(p.weight.value(q[l]) / p.utility_weight);
    double v = (target - tput.gamma[l]) / p.weight.deriv(q[l]);
    // Projected dynamics: drop only the outward component at an active face.
    if (q[l] <= p.queue_min && v < 0.0) v = 0.0;
    if (q[l] >= p.queue_max && v > 0.0) v = 0.0;
    d[l] = v;
  }
  return d;
}

namespace {

void rk4_step(std::vector<double>& q, const ScheduleSet& set,
              const adaptive::AlgoParams& p, double dt) {
  const unsigned links = set.links();
  std::vector<double> k1 = drift(q, set, p);
  std::vector<double> tmp(links);
  for (unsigned l = 0; l < links; ++l) tmp[l] = q[l] + 0.5 * dt * k1[l];
  std::vector<double> k2 = drift(tmp, set, p);
  for (unsigned l = 0; l < links; ++l) tmp[l] = q[l] + 0.5 * dt * k2[l];
  std::vector<double> k3 = drift(tmp, set, p);
  for (unsigned l = 0; l < links; ++l) tmp[l] = q[l] + dt * k3[l];
  std::vector<double> k4 = drift(tmp, set, p);
  for (unsigned l = 0; l < links; ++l) {
    q[l] += dt / 6.0 * (k1[l] + 2.0 * k2[l] + 2.0 * k3[l] + k4[l]);
    q[l] = std::clamp(q[l], p.queue_min, p.queue_max);
  }
}

}  // namespace

Trajectory integrate(std::span<const double> q0, const ScheduleSet& set,
                     const adaptive::AlgoParams& p, double horizon,
                     double dt) {
  if (!(dt > 0.0) || !(horizon > 0.0))
    throw std::invalid_argument("horizon and dt must be positive");
  p.validate();
  const unsigned links = set.links();
  if (q0.size() != links) throw std::invalid_argument("q0 length mismatch");

  Trajectory traj;
  traj.links = links;
  std::vector<double> q(q0.begin(), q0.end());
  for (double& v : q) v = std::clamp(v, p.queue_min, p.queue_max);

  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt));
  traj.times.reserve(steps + 1);
  traj.states.reserve((steps + 1) * links);
  traj.times.push_back(0.0);
  traj.states.insert(traj.states.end(), q.begin(), q.end());
  double t = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    const double h = std::min(dt, horizon - t);
    rk4_step(q, set, p, h);
    t += h;
    traj.times.push_back(t);
    traj.states.insert(traj.states.end(), q.begin(), q.end());
  }
  return traj;
}

InterpolatedTrajectory interpolate_stochastic(const adaptive::SimTrace& trace,
                                              const adaptive::AlgoParams& p) {
  if (trace.slots() == 0) throw std::invalid_argument("empty trace");
  InterpolatedTrajectory out;
  out.links = trace.links;
  const std::size_t n = trace.slots();
  out.times.reserve(n + 1);
  out.values.reserve((n + 1) * trace.links);
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.times.push_back(t);
    auto row = trace.queue_row(i);
    out.values.insert(out.values.end(), row.begin(), row.end());
    t += p.step.at(i);
  }
  out.times.push_back(t);
  out.values.insert(out.values.end(), trace.final_queue.begin(),
                    trace.final_queue.end());
  return out;
}

double tracking_error(const InterpolatedTrajectory& stoch,
                      const ScheduleSet& set, const adaptive::AlgoParams& p,
                      double window, double start, double dt) {
  if (!(window >= 0.0) || start < stoch.times.front() ||
      start + window > stoch.span_end() + 1e-12)
    throw std::invalid_argument("tracking window outside trajectory span");
  const unsigned links = stoch.links;
  std::vector<double> q(links);
  stoch.eval(start, q);

  std::vector<double> ref(links);
  double err = 0.0;
  double t = start;
  const double end = start + window;
  while (true) {
    stoch.eval(t, ref);
    double d = 0.0;
    for (unsigned l = 0; l < links; ++l)
      d = std::max(d, std::abs(ref[l] - q[l]));
    err = std::max(err, d);
    if (t >= end) break;
    const double h = std::min(dt, end - t);
    rk4_step(q, set, p, h);
    t += h;
  }
  return err;
}

}  // namespace csma::ode
