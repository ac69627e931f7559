// fcascade <check|graph|openloop|simulate|regulate> --config <ini> [options]
//
// Exit codes: 0 pass, 1 check failure, 2 numerical failure, 3 config error.

#include "fcascade/config.hpp"
#include "fcascade/errors.hpp"
#include "fcascade/scenarios.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitNumerical = 2;
constexpr int kExitConfig = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace fcascade;
  CLI::App app{"Forwarding stabilizers for semilinear cascades"};
  app.footer(config_reference());

  std::string scenario;
  std::string config_path;
  std::optional<std::string> out;
  std::optional<long> seed;
  std::optional<std::string> controller;
  std::optional<double> theta_ref;
  std::optional<double> sample_period;
  std::optional<std::string> y_ref;

  app.add_option("scenario", scenario, "check | graph | openloop | simulate | regulate")
      ->required()
      ->check(CLI::IsMember({"check", "graph", "openloop", "simulate", "regulate"}));
  app.add_option("--config", config_path, "INI run configuration")->required();
  app.add_option("--out", out, "output prefix for <prefix>.csv and <prefix>.json");
  app.add_option("--seed", seed, "seed for random states and probes (default 42)");
  app.add_option("--controller", controller, "full | linear")
      ->check(CLI::IsMember({"full", "linear"}));
  app.add_option("--theta-ref", theta_ref, "beam reference angle in radians");
  app.add_option("--sample-period", sample_period, "controller sample-and-hold period");
  app.add_option("--y-ref", y_ref, "set point for integral action (space-separated)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    RunConfig cfg = load_run_config_file(config_path);
    if (out) cfg.out = *out;
    if (seed) {
      if (*seed < 0) throw ConfigError("--seed", "must be nonnegative");
      cfg.seed = static_cast<std::uint64_t>(*seed);
    }
    if (controller) cfg.controller.mode = parse_controller_mode(*controller);
    if (theta_ref) {
      cfg.beam.theta_ref = *theta_ref;
      cfg.theta_refs.clear();
    }
    if (sample_period) {
      cfg.controller.sample_period = *sample_period;
      if (!(*sample_period > 0.0) || cfg.sim.dt > *sample_period) {
        throw ConfigError("--sample-period", "must be positive and at least dt");
      }
    }
    if (y_ref) {
      const auto vals = parse_reals(*y_ref, "--y-ref");
      cfg.controller.y_ref = Eigen::Map<const Vector>(vals.data(),
                                                      static_cast<Eigen::Index>(vals.size()));
    }
    const ScenarioResult result = run_scenario(parse_scenario(scenario), cfg);
    std::cout << result.text;
    return result.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  }
}
