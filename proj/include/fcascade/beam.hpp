#pragma once

// Rotating flexible Euler-Bernoulli beam (E = I = rho = I_R = 1) in the
// shifted coordinates phi = theta - theta_ref, v = w + xi phi, closed with the
// energy-shaping torque. State layout: [v_1..v_N, phi, p_1..p_N, omega] with
// v_i = v(i h), h = L / N, p = dv/dt and omega = dphi/dt.

#include "fcascade/model.hpp"
#include "fcascade/sim.hpp"

#include <random>

namespace fcascade {

struct BeamParams {
  int N = 32;
  double L = 1.0;
  double lambda = 1.0;
  double theta_ref = 0.0;

  /// Throws InvalidParams unless N >= 8, L > 0 and lambda > 0.
  void check() const;
};

struct BeamState {
  Vector v;
  double phi = 0.0;
  Vector p;
  double omega = 0.0;
};

/// Beam in the original frame: deflection w, angle theta and their rates.
struct OriginalState {
  Vector w;
  double theta = 0.0;
  Vector w_rate;
  double theta_rate = 0.0;
};

class Beam {
 public:
  explicit Beam(BeamParams params);

  const BeamParams& params() const { return params_; }
  int N() const { return params_.N; }
  Eigen::Index n() const { return 2 * params_.N + 2; }
  double h() const { return params_.L / params_.N; }
  const Vector& xi() const { return xi_; }
  /// Trapezoidal mass weights for integrals of v and p (h/2 at the free end).
  const Vector& mass_weights() const { return mw_; }
  /// Weights for integrals of v'' on the D2 rows (h/2 at the joint).
  const Vector& curvature_weights() const { return wq_; }
  /// Second difference on [v; phi], N x (N + 1), with v(0) = 0 and
  /// v'(0) = phi eliminated from the ghost point.
  const Matrix& D2() const { return d2_; }

  Eigen::Index phi_index() const { return params_.N; }
  Eigen::Index omega_index() const { return 2 * params_.N + 1; }

  const CascadeRealization& realization() const { return model_; }

  Vector pack(const BeamState& s) const;
  BeamState unpack(const Vector& x) const;

  /// V = x^T QX x / 2.
  double energy(const Vector& x) const;
  /// V plus eps (int v p + phi omega + (lambda/2) int v^2 + phi^2 / 2).
  double strict_energy(const Vector& x, double eps) const;
  /// Symmetric K with strict_energy = energy + eps x^T K x.
  const Matrix& cross_form() const { return cross_; }
  /// Supremum of eps for which strict_energy stays positive definite.
  double eps_max() const;
  /// eps used for monitoring: min(eps_max / 2, lambda / 2, 1 / 2).
  double default_eps() const;

  /// Exact dV/dt along the closed loop: -lambda int p^2 - omega^2 + u omega.
  double dissipation(const Vector& x, double u) const;

  OriginalState to_original(const Vector& x) const;
  Vector from_original(const OriginalState& s) const;

  /// Physical joint torque tau = -phi + tau_tilde.
  double total_torque(const Vector& x, double u) const;

  /// Solves A x = -B u.
  Vector steady_state(double u) const;

  /// Beam at rest at theta = 0 seen from the shifted frame of theta_ref.
  Vector rest_state(double theta_ref) const;

  /// Smooth random state (cubic profiles with v'(0) = phi, p'(0) = omega)
  /// scaled so that energy(x) = target.
  Vector random_smooth_state(double target_energy, std::mt19937_64& rng) const;

  /// Probe stations xi = k L / 5, k = 1..5.
  std::vector<double> probe_stations() const;
  /// Deflection w at the probe stations, linearly interpolated (w(0) = 0).
  std::vector<double> probe_deflection(const Vector& x) const;

  /// V, beta = 1/2, the exact dissipation and V_eps at default_eps().
  LyapunovSpec lyapunov() const;

 private:
  BeamParams params_;
  Vector xi_;
  Vector mw_;
  Vector wq_;
  Matrix d2_;
  Matrix cross_;
  CascadeRealization model_;
};

}  // namespace fcascade
