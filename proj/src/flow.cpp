#include "fcascade/flow.hpp"

#include "fcascade/errors.hpp"

namespace fcascade {

Scheme parse_scheme(std::string_view name) {
  if (name == "imex-cn") return Scheme::ImexCN;
  if (name == "rk4") return Scheme::RK4;
  if (name == "etd2") return Scheme::ETD2;
  throw InvalidParams("unknown scheme '" + std::string(name) +
                      "' (expected imex-cn, rk4 or etd2)");
}

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::ImexCN: return "imex-cn";
    case Scheme::RK4: return "rk4";
    case Scheme::ETD2: return "etd2";
  }
  return "unknown";
}

Stepper::Stepper(Matrix linear, double dt, Scheme scheme)
    : l_(std::move(linear)), dt_(dt), scheme_(scheme) {
  if (!(dt > 0.0)) throw InvalidParams("time step must be positive");
  if (l_.rows() != l_.cols()) throw DimensionMismatch("Stepper: L must be square");
  const Eigen::Index n = l_.rows();
  const Matrix id = Matrix::Identity(n, n);
  switch (scheme_) {
    case Scheme::ImexCN: {
      const Matrix lhs = id - 0.5 * dt_ * l_;
      cn_lu_.compute(lhs);
      if (n > 0 && cn_lu_.matrixLU().diagonal().cwiseAbs().minCoeff() <
                       1e-12 * lhs.cwiseAbs().rowwise().sum().maxCoeff()) {
        throw SingularMatrix("Crank-Nicolson matrix I - dt/2 L is singular");
      }
      break;
    }
    case Scheme::ETD2: {
      // exp([[L dt, I, 0], [0, 0, I], [0, 0, 0]]) = [[e, phi1, phi2], ...]
      Matrix aug = Matrix::Zero(3 * n, 3 * n);
      aug.topLeftCorner(n, n) = dt_ * l_;
      aug.block(0, n, n, n) = id;
      aug.block(n, 2 * n, n, n) = id;
      const Matrix e = expm(aug);
      exp_ = e.topLeftCorner(n, n);
      phi1_ = e.block(0, n, n, n);
      phi2_ = e.block(0, 2 * n, n, n);
      break;
    }
    case Scheme::RK4:
      break;
  }
}

Matrix Stepper::solve_cn(const Matrix& rhs) const { return cn_lu_.solve(rhs); }

Vector Stepper::advance(const Vector& y, const Vector& n_y, const NonlinearFn& n,
                        StepStages* stages) const {
  const double h = dt_;
  switch (scheme_) {
    case Scheme::ImexCN: {
      const Vector mid = solve_cn(y + 0.5 * h * n_y);
      const Vector n_mid = n(mid);
      if (stages) {
        stages->y = y;
        stages->s1 = mid;
      }
      return 2.0 * mid - y + h * (n_mid - n_y);
    }
    case Scheme::ETD2: {
      const Vector a = exp_ * y + h * (phi1_ * n_y);
      const Vector n_a = n(a);
      if (stages) {
        stages->y = y;
        stages->s1 = a;
      }
      return a + h * (phi2_ * (n_a - n_y));
    }
    case Scheme::RK4: {
      const Vector k1 = l_ * y + n_y;
      const Vector y2 = y + 0.5 * h * k1;
      const Vector k2 = l_ * y2 + n(y2);
      const Vector y3 = y + 0.5 * h * k2;
      const Vector k3 = l_ * y3 + n(y3);
      const Vector y4 = y + h * k3;
      const Vector k4 = l_ * y4 + n(y4);
      if (stages) {
        stages->y = y;
        stages->s1 = y2;
        stages->s2 = y3;
        stages->s3 = y4;
      }
      return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return y;
}

Matrix Stepper::tangent(const StepStages& st, const Matrix& dy, const Matrix& dn_y,
                        const JacobianFn& dn) const {
  const double h = dt_;
  switch (scheme_) {
    case Scheme::ImexCN: {
      const Matrix dn_y_dy = dn_y * dy;
      const Matrix dmid = solve_cn(dy + 0.5 * h * dn_y_dy);
      return 2.0 * dmid - dy + h * (dn(st.s1) * dmid - dn_y_dy);
    }
    case Scheme::ETD2: {
      const Matrix dn_y_dy = dn_y * dy;
      const Matrix da = exp_ * dy + h * (phi1_ * dn_y_dy);
      return da + h * (phi2_ * (dn(st.s1) * da - dn_y_dy));
    }
    case Scheme::RK4: {
      const Matrix dk1 = l_ * dy + dn_y * dy;
      const Matrix d2 = dy + 0.5 * h * dk1;
      const Matrix dk2 = l_ * d2 + dn(st.s1) * d2;
      const Matrix d3 = dy + 0.5 * h * dk2;
      const Matrix dk3 = l_ * d3 + dn(st.s2) * d3;
      const Matrix d4 = dy + h * dk3;
      const Matrix dk4 = l_ * d4 + dn(st.s3) * d4;
      return dy + (h / 6.0) * (dk1 + 2.0 * dk2 + 2.0 * dk3 + dk4);
    }
  }
  return dy;
}

Matrix Stepper::linear_step_matrix() const {
  const Eigen::Index n = l_.rows();
  const Matrix id = Matrix::Identity(n, n);
  StepStages st;
  st.y = Vector::Zero(n);
  st.s1 = st.s2 = st.s3 = st.y;
  const Matrix zero = Matrix::Zero(n, n);
  return tangent(st, id, zero, [&](const Vector&) { return zero; });
}

}  // namespace fcascade
