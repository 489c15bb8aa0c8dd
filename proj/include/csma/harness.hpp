#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "csma/adaptive.hpp"
#include "csma/dtsim.hpp"
#include "csma/graph.hpp"
#include "csma/ode.hpp"
#include "csma/oracle.hpp"

namespace csma::harness {

/// Invalid or incomplete configuration; the CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json load_config(const std::string& path);

/// Applies one "path.to.field=value" override. Values parse as JSON when
/// possible (numbers, booleans, arrays) and as strings otherwise.
void apply_override(nlohmann::json& config, const std::string& spec);

/// Worker count: CSMA_OPT_WORKERS if set, else hardware concurrency.
unsigned default_workers();

/// Dispatches a validated config to its mode implementation and writes a
/// summary JSON (embedding the resolved config and version) plus any
/// mode-specific CSV outputs into out_dir.
void run_experiment(const nlohmann::json& config, const std::string& out_dir);

/// One epsilon of a tradeoff sweep, with per-seed outcomes and medians.
struct TradeoffPoint {
  double epsilon = 0.0;
  struct PerSeed {
    std::uint64_t seed = 0;
    double efficiency = 0.0;
    double max_starvation = 0.0;  // max_l E_l, minislots
    double beta = 0.0;
    double collision_rate = 0.0;
    bool starved = false;
    bool under_sampled = false;
    std::string status = "ok";  // error text when the point failed
  };
  std::vector<PerSeed> per_seed;
  std::size_t failed = 0;
  double efficiency_median = 0.0, efficiency_min = 0.0, efficiency_max = 0.0;
  double max_starvation_median = 0.0, max_starvation_min = 0.0,
         max_starvation_max = 0.0;
};

struct TradeoffSweepConfig {
  std::vector<double> eps_list;
  dtsim::HoldingModel holding = dtsim::HoldingModel::geometric;
  std::uint64_t slots = 20'000;
  /// Continuous time per slot; the per-epsilon slot length in minislots is
  /// round(slot_ct / epsilon) unless slot_len_minislots is set.
  double slot_ct = 10.0;
  std::uint64_t slot_len_minislots = 0;  // 0: derive from slot_ct
};

/// Runs run_dt_adaptive for every (epsilon, seed) pair, scoring efficiency
/// against the utility-optimal vector. Points execute concurrently up to
/// `workers`; results are aggregated in (epsilon, seed) order regardless of
/// completion order.
std::vector<TradeoffPoint> tradeoff_sweep(const ConflictGraph& g,
                                          const ScheduleSet& set,
                                          const adaptive::AlgoParams& algo,
                                          const TradeoffSweepConfig& cfg,
                                          std::span<const std::uint64_t> seeds,
                                          unsigned workers);

struct ConvergenceReport {
  std::vector<std::uint64_t> checkpoints;  // slot counts, log-spaced
  std::vector<double> gamma_err;           // inf-norm vs target gamma
  std::vector<double> nu_err;              // inf-norm of W(q) vs target nu
  double final_gamma_err = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Compares a stochastic run against an oracle target with matching V and
/// dual bounds; throws ConfigError on a parameter mismatch.
ConvergenceReport convergence_report(const adaptive::SimTrace& trace,
                                     const adaptive::AlgoParams& algo,
                                     const oracle::OracleSolution& target,
                                     double tol);

// CSV writers with frozen column contracts. All doubles print as %.12g and
// rows end with '\n', so identical inputs produce identical bytes.
void write_trace_csv(const std::string& path, const adaptive::SimTrace& trace);
void write_ct_trace_csv(const std::string& path, const ScheduleSet& set,
                        std::span<const ctsim::HoldInterval> intervals);
void write_ode_csv(const std::string& path, const ode::Trajectory& traj);
void write_tradeoff_csv(const std::string& path,
                        std::span<const TradeoffPoint> points);

nlohmann::json solution_to_json(const oracle::OracleSolution& sol,
                                double bound);
nlohmann::json report_to_json(const dtsim::FairnessReport& report);

}  // namespace csma::harness
