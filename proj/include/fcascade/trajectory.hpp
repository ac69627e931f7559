#pragma once

#include "fcascade/wlinalg.hpp"

#include <vector>

namespace fcascade {

/// Per-record Lyapunov instrumentation of a closed-loop run.
struct MonitorRecord {
  double V = 0.0;
  double W = 0.0;
  double u_norm = 0.0;       // ||u||_U of the held input
  double defect_norm = 0.0;  // ||z - M(x)||_Y
  double x_norm = 0.0;       // ||x||_X
  double V_eps = 0.0;        // strictified functional, when the spec has one
  /// Difference quotient of V minus the model's predicted dissipation rate,
  /// averaged over the interval ending at this record. Zero when the
  /// Lyapunov spec carries no dissipation formula.
  double energy_residual = 0.0;
  /// Running integral of ||u||_U^2 dt since t = 0.
  double u_energy = 0.0;
};

/// Time-stamped states. Open-loop flows only fill times and states.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> zs;
  std::vector<Vector> us;
  std::vector<MonitorRecord> monitors;

  std::size_t size() const { return times.size(); }
};

}  // namespace fcascade
