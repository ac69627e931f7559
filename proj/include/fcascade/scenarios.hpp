#pragma once

// Scenario drivers behind the CLI subcommands. Each writes <out>.json (and
// CSV traces where applicable) and returns a summary.

#include "fcascade/beam.hpp"
#include "fcascade/config.hpp"
#include "fcascade/controller.hpp"
#include "fcascade/sim.hpp"

#include <json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace fcascade {

enum class Scenario { Check, Graph, OpenLoop, Simulate, Regulate };

Scenario parse_scenario(std::string_view name);
std::string to_string(Scenario s);

struct ScenarioResult {
  int exit_code = 0;  // 0 pass, 1 check failure
  nlohmann::json summary;
  std::string text;
};

/// Model, optional beam, Lyapunov spec and graph map built from a config.
struct Setup {
  explicit Setup(const RunConfig& cfg);

  std::optional<Beam> beam;
  CascadeRealization model;
  LyapunovSpec spec;
  std::shared_ptr<const GraphMap> graph;
};

/// Initial state per the [initial] section; `regulate` selects the
/// regulation defaults (beam at rest at theta = 0, other models at 0).
Vector initial_x(const RunConfig& cfg, const Setup& setup, bool regulate);
Vector initial_z(const RunConfig& cfg, const Setup& setup, bool regulate);

struct OpenLoopRun {
  Trajectory traj;
  double max_drift = 0.0;  // max_t | ||z - M(x)|| - ||z0 - M(x0)|| | / ||z0 - M(x0)||
  double drift_tol = 0.0;
  bool V_nonincreasing = true;
};

OpenLoopRun openloop_drift(const RunConfig& cfg);

struct RegulationRun {
  double reference = 0.0;  // theta_ref (beam) or y_ref scale (other models)
  ControllerMode mode = ControllerMode::FullNonlinear;
  Trajectory traj;
  double output_error = 0.0;  // |theta(T) - theta_ref| or ||(C + h)(x(T)) - y_ref||
  double w_sup = 0.0;         // max_i |w(xi_i, T)| for the beam
  bool fit_ok = false;
  DecayFit W_fit;
  ValidationReport W_report;
  bool passed = false;
  std::string failure;  // numerical failure message, if any
};

/// Closed-loop set-point run of the beam at theta_ref.
RegulationRun regulate_beam(const RunConfig& cfg, double theta_ref, ControllerMode mode);

/// Integral-action run of a generic model with y_ref scaled by `scale`.
RegulationRun regulate_generic(const RunConfig& cfg, double scale, ControllerMode mode);

/// Closed-loop run with the configured controller and monitors.
Trajectory closed_loop(const RunConfig& cfg, const Setup& setup);

ScenarioResult run_check(const RunConfig& cfg);
ScenarioResult run_graph(const RunConfig& cfg);
ScenarioResult run_openloop(const RunConfig& cfg);
ScenarioResult run_simulate(const RunConfig& cfg);
ScenarioResult run_regulate(const RunConfig& cfg);

ScenarioResult run_scenario(Scenario s, const RunConfig& cfg);

}  // namespace fcascade
