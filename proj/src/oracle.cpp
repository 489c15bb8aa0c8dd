#include "csma/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "csma/kernels.hpp"

namespace csma::oracle {

namespace {

void check_bounds(DualBounds b) {
  if (!(b.lo > 0.0) || !(b.lo < b.hi))
    throw std::invalid_argument("dual bounds must satisfy 0 < lo < hi");
}

double sum_utility(const Utility& u, std::span<const double> gamma) {
  double s = 0.0;
  for (double g : gamma) s += u.value(g);
  return s;
}

/// Euclidean projection onto the probability simplex.
void project_simplex(std::vector<double>& v) {
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cum = 0.0;
  double tau = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cum += sorted[i];
    const double candidate = (cum - 1.0) / static_cast<double>(i + 1);
    if (sorted[i] - candidate > 0.0) tau = candidate;
  }
  for (double& x : v) x = std::max(x - tau, 0.0);
}

}  // namespace

OracleSolution solve_entropy_regularized(const ScheduleSet& set,
                                         const Utility& utility, double V,
                                         DualBounds bounds,
                                         SolveOptions opts) {
  check_bounds(bounds);
  if (!(V > 0.0)) throw std::invalid_argument("V must be positive");
  if (V > bounds.hi / utility.deriv_at_one())
    throw std::invalid_argument("inadmissible V: exceeds nu_max / U'(1)");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("tol must be positive");

  const unsigned links = set.links();
  std::vector<double> nu = opts.nu0;
  if (nu.empty()) nu.assign(links, 0.5 * (bounds.lo + bounds.hi));
  if (nu.size() != links)
    throw std::invalid_argument("nu0 length mismatch");
  for (double& v : nu) v = std::clamp(v, bounds.lo, bounds.hi);

  exact::ScheduleDistribution pi;
  std::vector<double> residual(links);
  std::uint64_t k = 0;
  bool converged = false;
  while (k < opts.max_iter) {
    ++k;
    pi = exact::distribution_from_log_weights(set, nu);
    auto tput = exact::link_throughputs(set, pi);
    double proj_norm = 0.0;
    for (unsigned l = 0; l < links; ++l) {
      residual[l] = utility.deriv_inv(nu[l] / V) - tput.gamma[l];
      double pr = residual[l];
      if (nu[l] <= bounds.lo && pr < 0.0) pr = 0.0;
      if (nu[l] >= bounds.hi && pr > 0.0) pr = 0.0;
      proj_norm = std::max(proj_norm, std::abs(pr));
    }
    if (proj_norm < opts.tol) {
      converged = true;
      break;
    }
    const double a = opts.step0 / std::sqrt(static_cast<double>(k));
    for (unsigned l = 0; l < links; ++l)
      nu[l] = std::clamp(nu[l] + a * residual[l], bounds.lo, bounds.hi);
  }
  if (!converged)
    throw std::runtime_error(
        "entropy-regularized solve did not converge within the iteration cap");

  OracleSolution sol;
  sol.nu = nu;
  sol.pi = pi;
  sol.gamma.gamma.resize(links);
  for (unsigned l = 0; l < links; ++l)
    sol.gamma.gamma[l] = utility.deriv_inv(nu[l] / V);
  sol.objective = V * sum_utility(utility, sol.gamma.gamma) +
                  exact::entropy(sol.pi);
  sol.kkt_residual = kkt_residual(set, utility, V, sol.gamma.gamma, sol.pi,
                                  sol.nu);
  sol.utility_weight = V;
  sol.bounds = bounds;
  sol.iterations = k;
  return sol;
}

OracleSolution solve_utility_optimal(const ScheduleSet& set,
                                     const Utility& utility, double tol,
                                     std::uint64_t max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  const unsigned links = set.links();
  const std::size_t n = set.size();

  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  std::vector<double> gamma(links), uprime(links), grad(n), trial(n);

  auto throughput = [&](const std::vector<double>& p, std::vector<double>& g) {
    kern::bit_sums(set.masks().data(), n, p.data(), links, g.data());
  };
  auto value = [&](const std::vector<double>& p) {
    std::vector<double> g(links);
    throughput(p, g);
    double f = 0.0;
    for (unsigned l = 0; l < links; ++l) {
      if (g[l] <= 0.0 && utility.diverges_at_zero())
        return -std::numeric_limits<double>::infinity();
      f += utility.value(g[l]);
    }
    return f;
  };

  double f = value(pi);
  double step = 1.0;
  double fw_gap = std::numeric_limits<double>::infinity();
  std::uint64_t k = 0;
  for (; k < max_iter; ++k) {
    throughput(pi, gamma);
    for (unsigned l = 0; l < links; ++l) uprime[l] = utility.deriv(gamma[l]);
    kern::mask_dot(set.masks().data(), n, uprime.data(), links, grad.data());

    // Frank-Wolfe gap bounds the suboptimality of the current value.
    double gmax = grad[0];
    double gdot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      gmax = std::max(gmax, grad[i]);
      gdot += grad[i] * pi[i];
    }
    fw_gap = gmax - gdot;
    if (fw_gap < tol) break;

    // Projected gradient step with backtracking.
    bool accepted = false;
    while (step > 1e-18) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = pi[i] + step * grad[i];
      project_simplex(trial);
      double inner = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        inner += grad[i] * (trial[i] - pi[i]);
      const double ft = value(trial);
      if (ft >= f + 1e-4 * inner && std::isfinite(ft)) {
        pi.swap(trial);
        f = ft;
        step *= 2.0;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // step underflow: cannot improve further
  }
  if (fw_gap > std::sqrt(tol))
    throw std::runtime_error("utility-optimal solve did not converge");

  OracleSolution sol;
  sol.pi.probs = pi;
  throughput(pi, gamma);
  sol.gamma.gamma = gamma;
  sol.nu.resize(links);
  for (unsigned l = 0; l < links; ++l)
    sol.nu[l] = utility.deriv(gamma[l]);
  sol.objective = sum_utility(utility, gamma);
  sol.kkt_residual = fw_gap;
  sol.utility_weight = 0.0;
  sol.bounds = DualBounds{0.0, 0.0};
  sol.iterations = k;
  return sol;
}

GapCertificate utility_gap_certificate(const ScheduleSet& set,
                                       const Utility& utility, double V,
                                       const OracleSolution& regularized,
                                       const OracleSolution& optimal,
                                       double tol) {
  GapCertificate cert;
  cert.gap = std::abs(sum_utility(utility, optimal.gamma.gamma) -
                      sum_utility(utility, regularized.gamma.gamma));
  cert.bound = std::log(static_cast<double>(set.size())) / V;
  if (cert.gap > cert.bound + tol)
    throw std::runtime_error("utility gap exceeds the log|N|/V bound");
  return cert;
}

double kkt_residual(const ScheduleSet& set, const Utility& utility, double V,
                    std::span<const double> gamma,
                    const exact::ScheduleDistribution& pi,
                    std::span<const double> nu) {
  const unsigned links = set.links();
  const std::size_t n = set.size();
  if (gamma.size() != links || nu.size() != links || pi.probs.size() != n)
    throw std::invalid_argument("kkt input dimension mismatch");
  for (double p : pi.probs)
    if (!(p > 0.0))
      throw std::invalid_argument("degenerate distribution: zero entry");

  double res = 0.0;
  for (unsigned l = 0; l < links; ++l)
    res = std::max(res, std::abs(V * utility.deriv(gamma[l]) - nu[l]));

  std::vector<double> nu_sum(n);
  kern::mask_dot(set.masks().data(), n, nu.data(), links, nu_sum.data());
  // Distribution block: -1 - log pi_m + sum nu + eta, with eta zeroing the
  // mean residual.
  double eta = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    eta += 1.0 + std::log(pi.probs[i]) - nu_sum[i];
  eta /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    res = std::max(res,
                   std::abs(-1.0 - std::log(pi.probs[i]) + nu_sum[i] + eta));

  auto tput = link_throughputs(set, pi);
  for (unsigned l = 0; l < links; ++l)
    res = std::max(res, std::abs(nu[l] * (gamma[l] - tput.gamma[l])));
  return res;
}

double dual_value(const ScheduleSet& set, const Utility& utility, double V,
                  std::span<const double> nu, DualBounds bounds) {
  check_bounds(bounds);
  if (nu.size() != set.links())
    throw std::invalid_argument("nu length mismatch");
  for (double v : nu)
    if (v < bounds.lo - 1e-12 || v > bounds.hi + 1e-12)
      throw std::invalid_argument("nu outside the dual bounds");
  double d = 0.0;
  for (double v : nu) {
    const double g = utility.deriv_inv(v / V);
    d += V * utility.value(g) - v * g;
  }
  return d + exact::log_partition(set, nu);
}

}  // namespace csma::oracle
