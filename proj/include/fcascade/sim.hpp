#pragma once

// Closed-loop time integration of the cascade with Lyapunov monitors.

#include "fcascade/controller.hpp"
#include "fcascade/flow.hpp"
#include "fcascade/model.hpp"
#include "fcascade/trajectory.hpp"

#include <functional>
#include <optional>
#include <random>

namespace fcascade {

struct SimConfig {
  double dt = 1e-3;
  double T_final = 10.0;
  Scheme scheme = Scheme::ImexCN;
  /// Steps between records; 0 records at every controller sample instant.
  int record_every = 0;

  void check() const;
};

using ScalarFn = std::function<double(const Vector&)>;
using DissipationFn = std::function<double(const Vector& x, const Vector& u)>;

struct LyapunovSpec {
  ScalarFn V;
  /// ISS gain: dV(x)[A x + f(x) + g(x) u] <= beta ||u||^2_U.
  double beta = 0.5;
  /// Exact rate dV(x)[A x + f(x) + g(x) u], when known in closed form.
  DissipationFn dissipation;
  /// Strictified functional, recorded alongside V when present.
  ScalarFn V_eps;
};

/// W = V(x) + (beta / 4) ||z - M||_Y^2 for a given graph value M.
double lyapunov_W(const LyapunovSpec& spec, const CascadeRealization& model,
                  const Vector& x, const Vector& z, const Vector& m);

/// One-step integrator for the joint state y = [x; z] with linear part
/// [[A, 0], [C, S]] and nonlinear part [f(x) + g(x) u; h(x) - y_ref].
/// The input is held constant over the step.
class CascadeIntegrator {
 public:
  CascadeIntegrator(const CascadeRealization& model, double dt, Scheme scheme,
                    std::optional<Vector> y_ref = {});

  double dt() const { return stepper_.dt(); }

  /// Advances (x, z) by one step. Throws StepRejected at time t + dt on a
  /// tenfold norm increase (relative to max(||[x, z]||, 1e-8)).
  void advance(Vector& x, Vector& z, const Vector& u, double t) const;

 private:
  CascadeRealization model_;
  Stepper stepper_;
  Vector y_ref_;
};

/// Integrates the closed loop from (x0, z0). With controller == nullptr the
/// input is zero (open loop). Monitors use the full-nonlinear graph map of
/// `graph` regardless of the controller mode.
Trajectory simulate(const GraphMap& graph, const ForwardingController* controller,
                    const Vector& x0, const Vector& z0, const SimConfig& cfg,
                    const LyapunovSpec& spec);

struct DecayFit {
  double rate = 0.0;
  double r2 = 0.0;
};

/// Least-squares slope of log(trace) against time over the final half of the
/// record. Throws NonPositiveTrace if any fitted value is <= 0 and
/// InvalidParams for fewer than 10 samples.
DecayFit fit_decay_rate(const std::vector<double>& trace,
                        const std::vector<double>& times);

struct WDecayOptions {
  double step_tol = 1e-8;        // per-record, scaled by (1 + W)
  double integrated_tol = 1e-3;
  double sublevel_tol = 1e-8;
};

/// Checks on a recorded trajectory:
///   "W nonincreasing"        W_k - W_{k-1} <= step_tol (1 + W_{k-1})
///   "integrated dissipation" W(0) - W(T) >= (beta / 2) int ||u||^2 dt - tol
///   "sublevel invariance"    max_t W(t) <= W(0) + tol
ValidationReport verify_W_decay(const Trajectory& traj, const LyapunovSpec& spec,
                                const WDecayOptions& opts = {});

struct QuadraticBounds {
  double m1 = 0.0;
  double m2 = 0.0;
};

/// Fitted constants with m1 ||x||^2 <= V(x) <= m2 ||x||^2 on `samples` random
/// states of norm up to `radius`.
QuadraticBounds fit_quadratic_bounds(const LyapunovSpec& spec,
                                     const CascadeRealization& model, int samples,
                                     double radius, std::mt19937_64& rng);

}  // namespace fcascade
