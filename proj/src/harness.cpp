#include "csma/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "csma/version.hpp"

namespace csma::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Everything that constructs objects out of the config runs through here so
// validation failures surface as ConfigError (CLI exit code 2) rather than
// runtime errors.
template <typename F>
auto config_phase(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << body;
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

ConflictGraph graph_from_config(const json& config) {
  return config_phase([&] {
    if (!config.contains("graph"))
      throw ConfigError("config is missing the \"graph\" object");
    const json& g = config.at("graph");
    if (g.is_object() && g.contains("file"))
      return ConflictGraph::from_json(load_config(g.at("file")));
    return ConflictGraph::from_json(g);
  });
}

std::vector<std::uint64_t> seeds_from_config(const json& config) {
  return config_phase([&] {
    if (!config.contains("seeds"))
      throw ConfigError("config is missing the \"seeds\" list");
    auto seeds = config.at("seeds").get<std::vector<std::uint64_t>>();
    if (seeds.empty()) throw ConfigError("seed list must be nonempty");
    return seeds;
  });
}

adaptive::AlgoParams algo_from_config(const json& config) {
  return config_phase([&] {
    return adaptive::AlgoParams::from_json(config.value("algo", json::object()));
  });
}

adaptive::QueueState q0_from_config(const json& config,
                                    const adaptive::AlgoParams& p,
                                    unsigned links) {
  return config_phase([&] {
    adaptive::QueueState q0;
    const json spec = config.value("q0", json("min"));
    if (spec.is_string()) {
      const std::string s = spec.get<std::string>();
      if (s == "min")
        q0.q.assign(links, p.queue_min);
      else if (s == "max")
        q0.q.assign(links, p.queue_max);
      else
        throw ConfigError("q0 must be \"min\", \"max\", or an array");
    } else {
      q0.q = spec.get<std::vector<double>>();
      if (q0.q.size() != links)
        throw ConfigError("q0 array length must match the link count");
    }
    return q0;
  });
}

json base_summary(const json& config, const std::string& mode) {
  return {{"version", kVersion}, {"mode", mode}, {"config", config}};
}

void write_summary(const std::string& out_dir, const json& summary) {
  write_file(out_dir + "/summary.json", summary.dump(2) + "\n");
}

dtsim::HoldingModel holding_from_string(const std::string& s) {
  if (s == "geometric") return dtsim::HoldingModel::geometric;
  if (s == "deterministic") return dtsim::HoldingModel::deterministic;
  throw ConfigError("holding must be \"geometric\" or \"deterministic\"");
}

// ---------------------------------------------------------------- modes --

json run_enumerate(const json& config, const std::string&) {
  const auto g = graph_from_config(config);
  const auto set = config_phase([&] {
    return ScheduleSet::enumerate(
        g, config.value("enumeration_cap", kDefaultEnumerationCap));
  });
  json summary = base_summary(config, "enumerate");
  summary["count"] = set.size();
  json schedules = json::array();
  for (std::size_t i = 0; i < set.size(); ++i)
    schedules.push_back(to_string(set.at(i), set.links()));
  summary["schedules"] = schedules;
  summary["masks"] = set.masks();
  return summary;
}

json run_stationary(const json& config, const std::string&) {
  const auto g = graph_from_config(config);
  const auto set = ScheduleSet::enumerate(g);
  const auto lambda = config_phase([&] {
    auto v = config.at("lambda").get<std::vector<double>>();
    if (v.size() != g.links())
      throw ConfigError("lambda length must match the link count");
    return v;
  });
  const double mu = config.value("mu", 1.0);
  const auto pi = config_phase(
      [&] { return exact::stationary_distribution(set, lambda, mu); });
  const auto tput = exact::link_throughputs(set, pi);
  json summary = base_summary(config, "stationary");
  summary["pi"] = pi.probs;
  summary["gamma"] = tput.gamma;
  summary["entropy"] = exact::entropy(pi);
  return summary;
}

json run_simulate_ct(const json& config, const std::string& out_dir) {
  const auto g = graph_from_config(config);
  const auto set = ScheduleSet::enumerate(g);
  const auto lambda = config_phase([&] {
    auto v = config.at("lambda").get<std::vector<double>>();
    if (v.size() != g.links())
      throw ConfigError("lambda length must match the link count");
    return v;
  });
  const double mu = config.value("mu", 1.0);
  const double slot_len = config.value("slot_len", 10.0 * mu);
  const auto min_events = config.value("min_events", std::uint64_t{1'000'000});
  const bool want_trace = config.value("trace", false);
  const auto seeds = seeds_from_config(config);

  const auto reference = config_phase(
      [&] { return exact::stationary_distribution(set, lambda, mu); });

  json summary = base_summary(config, "simulate-ct");
  summary["exact_pi"] = reference.probs;
  json per_seed = json::array();
  for (auto seed : seeds) {
    Rng rng(seed);
    exact::ScheduleDistribution empirical;
    std::uint64_t events = 0;
    if (want_trace) {
      ctsim::CtState state;
      std::vector<ctsim::HoldInterval> intervals;
      while (events < min_events) {
        auto r = ctsim::run_slot(state, set, g, lambda, mu, slot_len, rng,
                                 &intervals);
        events += r.events;
      }
      empirical = ctsim::empirical_distribution(set, intervals);
      write_ct_trace_csv(out_dir + "/ct_trace_seed" + std::to_string(seed) +
                             ".csv",
                         set, intervals);
    } else {
      auto occ = ctsim::simulate_occupancy(set, g, lambda, mu, slot_len,
                                           min_events, rng);
      empirical = occ.distribution();
      events = occ.events;
    }
    per_seed.push_back({{"seed", seed},
                        {"events", events},
                        {"empirical_pi", empirical.probs},
                        {"tv_distance", exact::tv_distance(empirical,
                                                           reference)}});
  }
  summary["per_seed"] = per_seed;
  return summary;
}

json run_adaptive_mode(const json& config, const std::string& out_dir) {
  const auto g = graph_from_config(config);
  const auto set = ScheduleSet::enumerate(g);
  const auto algo = algo_from_config(config);
  const auto q0 = q0_from_config(config, algo, g.links());
  const auto slots = config.value("slots", std::uint64_t{200'000});
  const auto seeds = seeds_from_config(config);

  json summary = base_summary(config, "run-adaptive");
  const bool report_convergence = config.value("report_convergence", false);
  oracle::OracleSolution target;
  if (report_convergence) {
    oracle::SolveOptions opts;
    opts.tol = config.value("solve_tol", 1e-9);
    opts.step0 = config.value("solve_step0", 1.0);
    target = oracle::solve_entropy_regularized(
        set, algo.utility, algo.utility_weight,
        {algo.weight.value(algo.queue_min), algo.weight.value(algo.queue_max)},
        opts);
    summary["gamma_star"] = target.gamma.gamma;
    summary["nu_star"] = target.nu;
    summary["bound"] =
        std::log(static_cast<double>(set.size())) / algo.utility_weight;
  }

  json per_seed = json::array();
  for (auto seed : seeds) {
    Rng rng(seed);
    auto trace = adaptive::run(g, set, algo, q0, slots, rng);
    write_trace_csv(out_dir + "/trace_seed" + std::to_string(seed) + ".csv",
                    trace);
    json entry = {{"seed", seed},
                  {"final_queue", trace.final_queue}};
    if (trace.slots() > 0)
      entry["final_gamma"] = adaptive::gamma_running_average(trace).gamma;
    if (report_convergence) {
      auto rep = convergence_report(trace, algo, target,
                                    config.value("convergence_tol", 0.03));
      entry["convergence"] = {{"checkpoints", rep.checkpoints},
                              {"gamma_err", rep.gamma_err},
                              {"nu_err", rep.nu_err},
                              {"final_gamma_err", rep.final_gamma_err},
                              {"pass", rep.pass}};
    }
    per_seed.push_back(entry);
  }
  summary["per_seed"] = per_seed;
  return summary;
}

json run_ode_mode(const json& config, const std::string& out_dir) {
  const auto g = graph_from_config(config);
  const auto set = ScheduleSet::enumerate(g);
  const auto algo = algo_from_config(config);
  const auto q0 = q0_from_config(config, algo, g.links());
  const double horizon = config.value("horizon", 200.0);
  const double dt = config.value("dt", 0.01);

  const auto traj =
      config_phase([&] { return ode::integrate(q0.q, set, algo, horizon, dt); });
  write_ode_csv(out_dir + "/ode_trajectory.csv", traj);

  auto q_end = traj.final_state();
  auto d = ode::drift(q_end, set, algo);
  double drift_norm = 0.0;
  for (double v : d) drift_norm = std::max(drift_norm, std::abs(v));
  std::vector<double> nu_end(g.links());
  for (unsigned l = 0; l < g.links(); ++l)
    nu_end[l] = algo.weight.value(q_end[l]);

  json summary = base_summary(config, "ode");
  summary["final_q"] = std::vector<double>(q_end.begin(), q_end.end());
  summary["final_drift_inf_norm"] = drift_norm;
  summary["nu"] = nu_end;
  auto pi = exact::distribution_from_queues(set, q_end, algo.weight);
  std::vector<double> gamma(g.links());
  for (unsigned l = 0; l < g.links(); ++l)
    gamma[l] = algo.utility.deriv_inv(nu_end[l] / algo.utility_weight);
  summary["kkt_residual"] = oracle::kkt_residual(set, algo.utility,
                                                 algo.utility_weight, gamma,
                                                 pi, nu_end);
  return summary;
}

json run_solve_mode(const json& config, const std::string& out_dir) {
  const auto g = graph_from_config(config);
  const auto set = ScheduleSet::enumerate(g);
  const auto algo = algo_from_config(config);
  const json solve_cfg = config.value("solve", json::object());
  const std::string problem = solve_cfg.value("problem", "both");
  oracle::SolveOptions opts;
  opts.tol = solve_cfg.value("tol", 1e-9);
  opts.max_iter = solve_cfg.value("max_iter", std::uint64_t{1'000'000});
  opts.step0 = solve_cfg.value("step0", 1.0);
  oracle::DualBounds bounds{algo.weight.value(algo.queue_min),
                            algo.weight.value(algo.queue_max)};
  if (solve_cfg.contains("nu_lo")) bounds.lo = solve_cfg.at("nu_lo");
  if (solve_cfg.contains("nu_hi")) bounds.hi = solve_cfg.at("nu_hi");

  const double bound =
      std::log(static_cast<double>(set.size())) / algo.utility_weight;
  json summary = base_summary(config, "solve");
  summary["bound"] = bound;

  if (problem != "entropy" && problem != "utility" && problem != "both")
    throw ConfigError("solve.problem must be entropy, utility, or both");

  oracle::OracleSolution reg, opt;
  if (problem != "utility") {
    reg = config_phase([&] {
      return oracle::solve_entropy_regularized(set, algo.utility,
                                               algo.utility_weight, bounds,
                                               opts);
    });
    json sol = solution_to_json(reg, bound);
    summary["entropy_regularized"] = sol;
    write_file(out_dir + "/solution.json", sol.dump(2) + "\n");
  }
  if (problem != "entropy") {
    opt = oracle::solve_utility_optimal(set, algo.utility, opts.tol);
    summary["utility_optimal"] = solution_to_json(opt, bound);
  }
  if (problem == "both") {
    auto cert = oracle::utility_gap_certificate(set, algo.utility,
                                                algo.utility_weight, reg, opt);
    summary["gap"] = cert.gap;
  }
  return summary;
}

json run_dt_mode(const json& config, const std::string& out_dir) {
  const auto g = graph_from_config(config);
  const auto set = ScheduleSet::enumerate(g);
  const json dt_cfg = config.value("dt", json::object());
  dtsim::DtParams p;
  p.epsilon = dt_cfg.value("epsilon", 0.1);
  p.holding_mean = dt_cfg.value("mu", 1.0);
  p.holding = holding_from_string(dt_cfg.value("holding", "geometric"));
  p.activation_rate = config_phase([&] {
    auto v = dt_cfg.at("lambda").get<std::vector<double>>();
    return v;
  });
  config_phase([&] { p.validate(g); return 0; });
  const auto horizon = dt_cfg.value("horizon", std::uint64_t{1'000'000});
  const auto seeds = seeds_from_config(config);

  auto gamma_opt = oracle::solve_utility_optimal(set, Utility::log_utility());

  json summary = base_summary(config, "run-dt");
  json reports = json::array();
  std::vector<double> eff_values, beta_values, collision_values;
  std::vector<std::vector<double>> gamma_values(g.links()), e_values(g.links());
  for (auto seed : seeds) {
    Rng rng(seed);
    auto rep = dtsim::run_dt(g, p, horizon, rng);
    auto eff = dtsim::efficiency(exact::ThroughputVector{rep.gamma_eps},
                                 gamma_opt.gamma, Utility::log_utility());
    json r = report_to_json(rep);
    r["seed"] = seed;
    r["efficiency"] = eff.value;
    reports.push_back(r);
    eff_values.push_back(eff.value);
    beta_values.push_back(rep.beta);
    collision_values.push_back(rep.collision_rate);
    for (unsigned l = 0; l < g.links(); ++l) {
      gamma_values[l].push_back(rep.gamma_eps[l]);
      e_values[l].push_back(rep.starvation_mean[l]);
    }
  }
  // Top-level figures are medians across seeds; per-seed reports follow.
  std::vector<double> gamma_med(g.links()), e_med(g.links());
  for (unsigned l = 0; l < g.links(); ++l) {
    gamma_med[l] = median(gamma_values[l]);
    e_med[l] = median(e_values[l]);
  }
  json report = {{"epsilon", p.epsilon},
                 {"gamma_eps", gamma_med},
                 {"E", e_med},
                 {"beta", median(beta_values)},
                 {"collision_rate", median(collision_values)},
                 {"efficiency", median(eff_values)},
                 {"seeds", seeds},
                 {"per_seed", reports}};
  summary["report"] = report;
  write_file(out_dir + "/report.json", report.dump(2) + "\n");
  return summary;
}

json run_tradeoff_mode(const json& config, const std::string& out_dir) {
  const auto g = graph_from_config(config);
  const auto set = ScheduleSet::enumerate(g);
  const auto algo = algo_from_config(config);
  const auto seeds = seeds_from_config(config);
  const json dt_cfg = config.value("dt", json::object());

  TradeoffSweepConfig sweep;
  sweep.holding = holding_from_string(dt_cfg.value("holding", "geometric"));
  sweep.slots = dt_cfg.value("slots", std::uint64_t{20'000});
  sweep.slot_ct = dt_cfg.value("slot_ct", 10.0 * algo.holding_mean);
  sweep.slot_len_minislots =
      dt_cfg.value("slot_len_minislots", std::uint64_t{0});
  sweep.eps_list = config_phase([&]() -> std::vector<double> {
    if (dt_cfg.contains("eps_list"))
      return dt_cfg.at("eps_list").get<std::vector<double>>();
    if (dt_cfg.contains("eps_lambda_max")) {
      // epsilon given as the product with the largest reachable rate.
      const double lambda_max =
          std::exp(algo.weight.value(algo.queue_max)) / algo.holding_mean;
      std::vector<double> eps;
      for (double v : dt_cfg.at("eps_lambda_max").get<std::vector<double>>())
        eps.push_back(v / lambda_max);
      return eps;
    }
    throw ConfigError("tradeoff needs dt.eps_list or dt.eps_lambda_max");
  });
  const unsigned workers = config.value("workers", default_workers());

  auto points = config_phase([&] {
    return tradeoff_sweep(g, set, algo, sweep, seeds, workers);
  });
  write_tradeoff_csv(out_dir + "/tradeoff.csv", points);

  json summary = base_summary(config, "tradeoff");
  summary["bound"] =
      std::log(static_cast<double>(set.size())) / algo.utility_weight;
  json pts = json::array();
  std::size_t failed = 0;
  for (const auto& pt : points) {
    failed += pt.failed;
    json per_seed = json::array();
    for (const auto& s : pt.per_seed)
      per_seed.push_back({{"seed", s.seed},
                          {"efficiency", s.efficiency},
                          {"max_E", s.max_starvation},
                          {"beta", s.beta},
                          {"collision_rate", s.collision_rate},
                          {"starved", s.starved},
                          {"under_sampled", s.under_sampled},
                          {"status", s.status}});
    pts.push_back({{"epsilon", pt.epsilon},
                   {"efficiency_median", pt.efficiency_median},
                   {"efficiency_min", pt.efficiency_min},
                   {"efficiency_max", pt.efficiency_max},
                   {"max_E_median", pt.max_starvation_median},
                   {"max_E_min", pt.max_starvation_min},
                   {"max_E_max", pt.max_starvation_max},
                   {"failed", pt.failed},
                   {"per_seed", per_seed}});
  }
  summary["points"] = pts;
  if (failed > 0) {
    // Partial results are on disk; the run itself still reports failure.
    write_summary(out_dir, summary);
    throw std::runtime_error(std::to_string(failed) +
                             " sweep point(s) failed; partial results written");
  }
  return summary;
}

}  // namespace

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded())
    throw ConfigError("config file is not valid JSON: " + path);
  return j;
}

void apply_override(json& config, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override must look like path.to.field=value: " + spec);
  const std::string path = spec.substr(0, eq);
  const std::string raw = spec.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* cur = &config;
  std::size_t pos = 0;
  while (true) {
    const auto dot = path.find('.', pos);
    const std::string key = path.substr(pos, dot - pos);
    if (key.empty()) throw ConfigError("override path has an empty segment");
    if (dot == std::string::npos) {
      (*cur)[key] = value;
      break;
    }
    cur = &(*cur)[key];
    pos = dot + 1;
  }
}

unsigned default_workers() {
  if (const char* env = std::getenv("CSMA_OPT_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void run_experiment(const json& config, const std::string& out_dir) {
  const std::string mode = config_phase([&] {
    if (!config.contains("mode"))
      throw ConfigError("config is missing \"mode\"");
    return config.at("mode").get<std::string>();
  });
  fs::create_directories(out_dir);

  json summary;
  if (mode == "enumerate")
    summary = run_enumerate(config, out_dir);
  else if (mode == "stationary")
    summary = run_stationary(config, out_dir);
  else if (mode == "simulate-ct")
    summary = run_simulate_ct(config, out_dir);
  else if (mode == "run-adaptive")
    summary = run_adaptive_mode(config, out_dir);
  else if (mode == "ode")
    summary = run_ode_mode(config, out_dir);
  else if (mode == "solve")
    summary = run_solve_mode(config, out_dir);
  else if (mode == "run-dt")
    summary = run_dt_mode(config, out_dir);
  else if (mode == "tradeoff")
    summary = run_tradeoff_mode(config, out_dir);
  else
    throw ConfigError("unknown mode: " + mode);

  write_summary(out_dir, summary);
}

std::vector<TradeoffPoint> tradeoff_sweep(const ConflictGraph& g,
                                          const ScheduleSet& set,
                                          const adaptive::AlgoParams& algo,
                                          const TradeoffSweepConfig& cfg,
                                          std::span<const std::uint64_t> seeds,
                                          unsigned workers) {
  algo.validate();
  if (cfg.eps_list.empty()) throw std::invalid_argument("empty sweep");
  if (seeds.empty()) throw std::invalid_argument("seed list must be nonempty");
  if (!algo.utility.is_log())
    throw std::invalid_argument("tradeoff efficiency requires log utility");
  const double lambda_max =
      std::exp(algo.weight.value(algo.queue_max)) / algo.holding_mean;
  for (double eps : cfg.eps_list) {
    if (!(eps > 0.0 && eps <= 1.0))
      throw std::invalid_argument("epsilon must lie in (0, 1]");
    if (eps * lambda_max > 1.0)
      throw std::invalid_argument(
          "epsilon * lambda(q_max) exceeds 1 for a sweep point");
  }

  const auto gamma_opt = oracle::solve_utility_optimal(set, algo.utility);

  struct Task {
    std::size_t eps_idx;
    std::size_t seed_idx;
  };
  std::vector<Task> tasks;
  for (std::size_t e = 0; e < cfg.eps_list.size(); ++e)
    for (std::size_t s = 0; s < seeds.size(); ++s) tasks.push_back({e, s});

  std::vector<TradeoffPoint::PerSeed> results(tasks.size());
  std::atomic<std::size_t> next{0};

  // A failing point records its status and the sweep carries on; partial
  // results are still aggregated and written.
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      const Task& task = tasks[i];
      TradeoffPoint::PerSeed out;
      out.seed = seeds[task.seed_idx];
      try {
        const double eps = cfg.eps_list[task.eps_idx];
        dtsim::DtAdaptiveConfig dt;
        dt.epsilon = eps;
        dt.holding = cfg.holding;
        dt.slots = cfg.slots;
        dt.slot_len_minislots =
            cfg.slot_len_minislots > 0
                ? cfg.slot_len_minislots
                : static_cast<std::uint64_t>(
                      std::max(1.0, std::llround(cfg.slot_ct / eps) * 1.0));
        adaptive::QueueState q0;
        q0.q.assign(g.links(), algo.queue_min);
        Rng rng(out.seed);
        auto res = dtsim::run_dt_adaptive(g, algo, dt, q0, rng);
        auto eff = dtsim::efficiency(
            exact::ThroughputVector{res.report.gamma_eps}, gamma_opt.gamma,
            algo.utility);
        out.efficiency = eff.value;
        out.starved = eff.starved;
        out.max_starvation = *std::max_element(
            res.report.starvation_mean.begin(),
            res.report.starvation_mean.end());
        out.beta = res.report.beta;
        out.collision_rate = res.report.collision_rate;
        out.under_sampled = res.report.under_sampled;
      } catch (const std::exception& e) {
        out.status = e.what();
      }
      results[i] = out;
    }
  };

  const unsigned n_threads =
      std::max<std::size_t>(1, std::min<std::size_t>(workers, tasks.size()));
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::vector<TradeoffPoint> points(cfg.eps_list.size());
  for (std::size_t e = 0; e < cfg.eps_list.size(); ++e) {
    points[e].epsilon = cfg.eps_list[e];
    std::vector<double> eff, stv;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const auto& r = results[e * seeds.size() + s];
      points[e].per_seed.push_back(r);
      if (r.status != "ok") {
        ++points[e].failed;
        continue;
      }
      eff.push_back(r.efficiency);
      stv.push_back(r.max_starvation);
    }
    if (eff.empty()) continue;
    points[e].efficiency_median = median(eff);
    points[e].efficiency_min = *std::min_element(eff.begin(), eff.end());
    points[e].efficiency_max = *std::max_element(eff.begin(), eff.end());
    points[e].max_starvation_median = median(stv);
    points[e].max_starvation_min = *std::min_element(stv.begin(), stv.end());
    points[e].max_starvation_max = *std::max_element(stv.begin(), stv.end());
  }
  return points;
}

ConvergenceReport convergence_report(const adaptive::SimTrace& trace,
                                     const adaptive::AlgoParams& algo,
                                     const oracle::OracleSolution& target,
                                     double tol) {
  if (trace.slots() == 0) throw std::invalid_argument("empty trace");
  if (std::abs(target.utility_weight - algo.utility_weight) > 1e-12)
    throw ConfigError("convergence target solved with a different V");
  if (std::abs(target.bounds.lo - algo.weight.value(algo.queue_min)) > 1e-9 ||
      std::abs(target.bounds.hi - algo.weight.value(algo.queue_max)) > 1e-9)
    throw ConfigError("convergence target solved with different dual bounds");

  ConvergenceReport rep;
  rep.tolerance = tol;
  const std::size_t slots = trace.slots();
  for (std::uint64_t t = 1; t < slots; t *= 2) rep.checkpoints.push_back(t);
  rep.checkpoints.push_back(slots);

  const unsigned links = trace.links;
  for (auto t : rep.checkpoints) {
    auto avg = trace.avg_row(t - 1);
    double gerr = 0.0;
    for (unsigned l = 0; l < links; ++l)
      gerr = std::max(gerr, std::abs(avg[l] - target.gamma.gamma[l]));
    rep.gamma_err.push_back(gerr);

    std::span<const double> q = t < slots
                                    ? trace.queue_row(t)
                                    : std::span<const double>(
                                          trace.final_queue);
    double nerr = 0.0;
    for (unsigned l = 0; l < links; ++l)
      nerr = std::max(nerr,
                      std::abs(algo.weight.value(q[l]) - target.nu[l]));
    rep.nu_err.push_back(nerr);
  }
  rep.final_gamma_err = rep.gamma_err.back();
  rep.pass = rep.final_gamma_err < tol;
  return rep;
}

void write_trace_csv(const std::string& path,
                     const adaptive::SimTrace& trace) {
  std::string body = "slot";
  const unsigned links = trace.links;
  for (unsigned l = 1; l <= links; ++l) body += ",q_" + std::to_string(l);
  for (unsigned l = 1; l <= links; ++l) body += ",S_" + std::to_string(l);
  for (unsigned l = 1; l <= links; ++l) body += ",gamma_" + std::to_string(l);
  body += "\n";
  for (std::size_t t = 0; t < trace.slots(); ++t) {
    body += std::to_string(t);
    for (double v : trace.queue_row(t)) body += "," + fmt(v);
    for (double v : trace.service_row(t)) body += "," + fmt(v);
    for (double v : trace.avg_row(t)) body += "," + fmt(v);
    body += "\n";
  }
  write_file(path, body);
}

void write_ct_trace_csv(const std::string& path, const ScheduleSet& set,
                        std::span<const ctsim::HoldInterval> intervals) {
  std::string body = "time,schedule_index";
  for (unsigned l = 1; l <= set.links(); ++l) body += ",a_" + std::to_string(l);
  body += "\n";
  double t = 0.0;
  for (const auto& iv : intervals) {
    body += fmt(t) + "," + std::to_string(iv.schedule_index);
    const Schedule m = set.at(iv.schedule_index);
    for (unsigned l = 0; l < set.links(); ++l)
      body += m.contains(l) ? ",1" : ",0";
    body += "\n";
    t += iv.duration;
  }
  write_file(path, body);
}

void write_ode_csv(const std::string& path, const ode::Trajectory& traj) {
  std::string body = "time";
  for (unsigned l = 1; l <= traj.links; ++l) body += ",q_" + std::to_string(l);
  body += "\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    body += fmt(traj.times[i]);
    for (double v : traj.state_at(i)) body += "," + fmt(v);
    body += "\n";
  }
  write_file(path, body);
}

void write_tradeoff_csv(const std::string& path,
                        std::span<const TradeoffPoint> points) {
  std::string body = "epsilon,seed,efficiency,max_E,beta,collision_rate\n";
  for (const auto& pt : points) {
    for (const auto& s : pt.per_seed) {
      if (s.status != "ok") continue;  // failed points live in the summary
      body += fmt(pt.epsilon) + "," + std::to_string(s.seed) + "," +
              fmt(s.efficiency) + "," + fmt(s.max_starvation) + "," +
              fmt(s.beta) + "," + fmt(s.collision_rate) + "\n";
    }
  }
  write_file(path, body);
}

json solution_to_json(const oracle::OracleSolution& sol, double bound) {
  return {{"gamma", sol.gamma.gamma},
          {"pi", sol.pi.probs},
          {"nu", sol.nu},
          {"objective", sol.objective},
          {"kkt_residual", sol.kkt_residual},
          {"bound", bound},
          {"iterations", sol.iterations}};
}

json report_to_json(const dtsim::FairnessReport& report) {
  return {{"epsilon", report.epsilon},
          {"gamma_eps", report.gamma_eps},
          {"E", report.starvation_mean},
          {"beta", report.beta},
          {"collision_rate", report.collision_rate},
          {"period_count", report.period_count},
          {"under_sampled", report.under_sampled},
          {"starved", report.starved}};
}

}  // namespace csma::harness
