#pragma once

// INI-style run configuration: [section] headers, key = value lines,
// '#' or ';' comments. Matrices are written row by row with ';' between rows.

#include "fcascade/beam.hpp"
#include "fcascade/controller.hpp"
#include "fcascade/graph.hpp"
#include "fcascade/sim.hpp"

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fcascade {

struct IniValue {
  std::string text;
  int line = 0;
};

/// section -> key -> value; keys outside any section live under "".
struct IniFile {
  std::string source;
  std::map<std::string, std::map<std::string, IniValue>> sections;
};

/// Throws ConfigError("<source>:<line>", ...) on malformed lines and
/// duplicate keys.
IniFile parse_ini(std::istream& in, const std::string& source);

enum class ModelKind { Beam, Scalar, CustomLinear };

std::string to_string(ModelKind kind);

struct LinearSpec {
  Matrix A, B, C, S;
  std::optional<Matrix> QX, QY, QU;
};

struct InitialSpec {
  /// "default" (scenario-dependent), "random", or "values".
  std::string x0_kind = "default";
  Vector x0;
  /// Target V(x0) for random beam states, ||x0||_X for other models.
  double x0_energy = 1.0;
  std::optional<Vector> z0;
};

struct RunConfig {
  std::string source;
  ModelKind model = ModelKind::Beam;
  std::uint64_t seed = 42;
  std::string out = "fcascade_out";
  BeamParams beam;
  LinearSpec linear;
  double beta = 0.5;  // ISS gain for models other than the beam
  QuadConfig quad;
  SimConfig sim;
  ControllerConfig controller;
  InitialSpec initial;
  /// References for the beam regulate sweep; empty means beam.theta_ref.
  std::vector<double> theta_refs;
  /// regulate also runs the other controller mode and reports both rates.
  bool compare_modes = false;
};

/// Parses and validates a run configuration. Every problem is reported as a
/// ConfigError naming the line or field.
RunConfig load_run_config(std::istream& in, const std::string& source);
RunConfig load_run_config_file(const std::string& path);

/// Keys accepted per section, for --help.
std::string config_reference();

/// Builds the realization selected by the config.
CascadeRealization build_model(const RunConfig& cfg);

/// Whitespace-separated reals; throws ConfigError(where, ...) on bad tokens.
std::vector<double> parse_reals(const std::string& text, const std::string& where);

}  // namespace fcascade
