#include "fcascade/models.hpp"

namespace fcascade {

CascadeRealization scalar_cubic_model() {
  const Matrix one = Matrix::Constant(1, 1, 1.0);
  return CascadeRealization{
      .name = "scalar",
      .A = -one,
      .C = one,
      .S = Matrix::Zero(1, 1),
      .f = [](const Vector& x) { return Vector(-x.array().cube()); },
      .df = [](const Vector& x) { return Matrix(Matrix::Constant(1, 1, -3.0 * x(0) * x(0))); },
      .g = [one](const Vector&) { return one; },
      .h = [](const Vector&) { return Vector(Vector::Zero(1)); },
      .dh = [](const Vector&) { return Matrix(Matrix::Zero(1, 1)); },
      .QX = GramForm::identity(1),
      .QY = GramForm::identity(1),
      .QU = GramForm::identity(1),
      .linear = false,
      .constant_input = true,
  };
}

LyapunovSpec scalar_cubic_lyapunov() {
  LyapunovSpec spec;
  spec.V = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  spec.beta = 0.5;
  return spec;
}

LyapunovSpec quadratic_lyapunov(const CascadeRealization& model, double beta) {
  LyapunovSpec spec;
  spec.V = [q = model.QX](const Vector& x) { return 0.5 * q.norm_sq(x); };
  spec.beta = beta;
  return spec;
}

}  // namespace fcascade
