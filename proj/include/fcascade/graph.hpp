#pragma once

// Invariant-graph map M of the uncontrolled cascade: the solution of
//
//   dM(x) (A x + f(x)) = S M(x) + C x + h(x),   M(0) = 0,
//
// evaluated as M(x) = M0 x + int_0^inf e^{-tS} [M0 f(x(t)) - h(x(t))] dt along
// the open-loop flow x(t), where M0 solves M0 A = S M0 + C.

#include "fcascade/flow.hpp"
#include "fcascade/model.hpp"
#include "fcascade/trajectory.hpp"

#include <cstdint>
#include <optional>

namespace fcascade {

struct QuadConfig {
  double tail_tol = 1e-8;
  double step = 1e-3;
  double max_horizon = 1000.0;
  /// Horizon T* is the first grid time with ||x(t)||_X <= decay_floor * ||x0||_X.
  double decay_floor = 1e-8;
  /// Flow scheme for the quadrature. RK4 suits nonstiff models; stiff ones
  /// such as the beam need etd2 or imex-cn at practical steps.
  Scheme scheme = Scheme::RK4;

  /// Throws InvalidParams on nonpositive entries.
  void check() const;
};

struct M0Solution {
  Matrix M0;
  double residual = 0.0;
  /// Relative deviation from the independent route: C A^-1 when S = 0, the
  /// explicit time integral on random probes otherwise. NaN if skipped.
  double crosscheck = 0.0;
};

/// Solves the linear Sylvester equation and cross-checks it.
M0Solution compute_M0(const CascadeRealization& model, std::uint64_t seed = 42);

/// Integrates x' = A x + f(x) from x0 on [0, T], recording every step.
/// Throws StepRejected on a tenfold norm increase within one step.
Trajectory open_loop_flow(const CascadeRealization& model, const Vector& x0,
                          double T, double step, Scheme scheme = Scheme::ETD2);

struct GraphEvaluation {
  Vector M;           // M(x)
  Matrix dM;          // dM(x) applied to the requested directions, m x k
  double horizon = 0.0;
  double tail_estimate = 0.0;
  double decay_rate = 0.0;  // fitted over the last decade before T*
  bool tail_warning = false;
  long steps = 0;
};

class GraphMap {
 public:
  /// Validates the quadrature config and solves for M0.
  GraphMap(CascadeRealization model, QuadConfig quad);

  const CascadeRealization& model() const { return model_; }
  const QuadConfig& quad() const { return quad_; }
  const Matrix& M0() const { return m0_.M0; }
  const M0Solution& m0_solution() const { return m0_; }

  /// M(x) and dM(x) * directions from a single open-loop solve. Pass an
  /// n x 0 matrix to skip the variational part. Throws HorizonExceeded if
  /// the flow has not decayed by max_horizon.
  GraphEvaluation evaluate(const Vector& x, const Matrix& directions) const;

  Vector eval_M(const Vector& x) const;
  /// Full m x n differential (n variational directions).
  Matrix eval_dM(const Vector& x) const;

  /// ||dM(x)(A x + f(x)) - S M(x) - C x - h(x)||_Y.
  double forwarding_residual(const Vector& x) const;

 private:
  CascadeRealization model_;
  QuadConfig quad_;
  M0Solution m0_;
  Stepper stepper_;
  Matrix s_step_;  // e^{-step S}
  bool s_zero_;
};

}  // namespace fcascade
