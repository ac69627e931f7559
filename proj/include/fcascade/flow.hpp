#pragma once

// One-step schemes for semilinear systems y' = L y + N(y) with a constant
// linear part L, plus the exact derivative of each step map (used to
// propagate variational directions alongside a base trajectory).

#include "fcascade/wlinalg.hpp"

#include <functional>
#include <string>
#include <string_view>

namespace fcascade {

enum class Scheme {
  ImexCN,  // Crank-Nicolson on L, nonlinearity at the implicit midpoint stage
  RK4,     // classical explicit Runge-Kutta
  ETD2,    // exponential time differencing, second order (Cox-Matthews)
};

Scheme parse_scheme(std::string_view name);
std::string to_string(Scheme scheme);

using NonlinearFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<Matrix(const Vector&)>;

/// Points at which a step evaluated the nonlinearity; needed to replay the
/// step's derivative. Which fields are used depends on the scheme.
struct StepStages {
  Vector y;
  Vector s1;
  Vector s2;
  Vector s3;
};

class Stepper {
 public:
  /// Prefactors everything that depends on (L, dt) only: the Crank-Nicolson
  /// LU for imex-cn, the exponential and phi-functions for etd2.
  Stepper(Matrix linear, double dt, Scheme scheme);

  double dt() const { return dt_; }
  Scheme scheme() const { return scheme_; }
  const Matrix& linear() const { return l_; }

  /// Advances y by one step. `n_y` must equal N(y). When `stages` is
  /// non-null the intermediate points are recorded for tangent().
  Vector advance(const Vector& y, const Vector& n_y, const NonlinearFn& n,
                 StepStages* stages = nullptr) const;

  /// Derivative of the step map at the recorded base point applied to the
  /// columns of dy. `dn_y` must equal dN(stages.y).
  Matrix tangent(const StepStages& stages, const Matrix& dy, const Matrix& dn_y,
                 const JacobianFn& dn) const;

  /// Derivative of the step map for N = 0; the amplification operator.
  Matrix linear_step_matrix() const;

 private:
  Matrix solve_cn(const Matrix& rhs) const;

  Matrix l_;
  double dt_;
  Scheme scheme_;
  Eigen::PartialPivLU<Matrix> cn_lu_;  // I - dt/2 L
  Matrix exp_;                         // e^{L dt}
  Matrix phi1_;                        // phi_1(L dt)
  Matrix phi2_;                        // phi_2(L dt)
};

}  // namespace fcascade
