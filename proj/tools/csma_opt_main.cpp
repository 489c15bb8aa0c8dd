// csma-opt: experiment driver for the CSMA scheduling toolkit.
//
//   csma-opt <mode> --config <file> [--path.to.field=value ...] --out <dir>
//
// Modes: enumerate | stationary | simulate-ct | run-adaptive | ode | solve |
//        run-dt | tradeoff
//
// Any flag of the form --a.b.c=value overrides that field of the config
// (e.g. --algo.V=5, --dt.eps_list=[0.01,0.02]). Exit codes: 0 success,
// 2 config error, 3 runtime error.

#include <cstdio>
#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "csma/harness.hpp"
#include "csma/kernels.hpp"
#include "csma/version.hpp"

namespace {

void print_usage() {
  std::puts(
      "usage: csma-opt <mode> --config <file> [--field.path=value ...] "
      "[--out <dir>] [--workers N]\n"
      "\n"
      "modes:\n"
      "  enumerate     list all feasible schedules of a conflict graph\n"
      "  stationary    closed-form schedule distribution and throughputs\n"
      "  simulate-ct   event-driven collision-free CSMA simulation\n"
      "  run-adaptive  slotted queue-adaptation loop (collision-free channel)\n"
      "  ode           integrate the limiting queue dynamics\n"
      "  solve         convex oracles: utility-optimal and entropy-regularized\n"
      "  run-dt        discrete-time collision channel at fixed parameters\n"
      "  tradeoff      efficiency vs short-term fairness sweep over epsilon\n"
      "\n"
      "Overrides mirror JSON paths, e.g. --algo.V=5 or --seeds=[1,2,3].\n"
      "CSMA_OPT_WORKERS sets the default worker count for sweeps;\n"
      "CSMA_OPT_SIMD=scalar|avx2|auto selects the kernel backend.");
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty() || args[0] == "--help" || args[0] == "-h") {
    print_usage();
    return args.empty() ? 2 : 0;
  }
  if (args[0] == "--version") {
    std::printf("csma-opt %s (kernels: %s)\n", csma::kVersion,
                csma::kern::backend_name());
    return 0;
  }

  const std::string mode = args[0];
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;

  try {
    for (std::size_t i = 1; i < args.size(); ++i) {
      const std::string& a = args[i];
      auto take_value = [&](const char* name) -> std::string {
        const std::string prefix = std::string(name) + "=";
        if (a.rfind(prefix, 0) == 0) return a.substr(prefix.size());
        if (i + 1 >= args.size())
          throw csma::harness::ConfigError(std::string(name) +
                                           " needs a value");
        return args[++i];
      };
      if (a == "--help" || a == "-h") {
        print_usage();
        return 0;
      } else if (a == "--config" || a.rfind("--config=", 0) == 0) {
        config_path = take_value("--config");
      } else if (a == "--out" || a.rfind("--out=", 0) == 0) {
        out_dir = take_value("--out");
      } else if (a == "--workers" || a.rfind("--workers=", 0) == 0) {
        overrides.push_back("workers=" + take_value("--workers"));
      } else if (a.rfind("--", 0) == 0) {
        overrides.push_back(a.substr(2));
      } else {
        throw csma::harness::ConfigError("unexpected argument: " + a);
      }
    }

    nlohmann::json config = config_path.empty()
                                ? nlohmann::json::object()
                                : csma::harness::load_config(config_path);
    config["mode"] = mode;
    for (const auto& o : overrides) csma::harness::apply_override(config, o);

    csma::harness::run_experiment(config, out_dir);
  } catch (const csma::harness::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
