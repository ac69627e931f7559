#pragma once

// Finite-dimensional realization of the cascade
//
//   x' = A x + f(x) + g(x) u
//   z' = S z + C x + h(x)
//
// together with the Gram forms that define the X, Y and U inner products.

#include "fcascade/wlinalg.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace fcascade {

using VectorMap = std::function<Vector(const Vector&)>;
using MatrixMap = std::function<Matrix(const Vector&)>;

/// Closures must be pure: the realization is shared across threads.
struct CascadeRealization {
  std::string name;
  Matrix A;   // n x n
  Matrix C;   // m x n
  Matrix S;   // m x m
  VectorMap f;   // n -> n
  MatrixMap df;  // n -> n x n
  MatrixMap g;   // n -> n x r
  VectorMap h;   // n -> m
  MatrixMap dh;  // n -> m x n
  GramForm QX;
  GramForm QY;
  GramForm QU;
  /// True when f and h vanish identically; lets callers skip quadrature.
  bool linear = false;
  /// True when g does not depend on x.
  bool constant_input = false;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m() const { return C.rows(); }
  Eigen::Index r() const { return QU.dim(); }
};

/// Builds a realization with f = h = 0 and constant input matrix B.
CascadeRealization make_linear_realization(std::string name, Matrix A,
                                           Matrix B, Matrix C, Matrix S,
                                           std::optional<Matrix> QX = {},
                                           std::optional<Matrix> QY = {},
                                           std::optional<Matrix> QU = {});

struct CheckEntry {
  std::string name;
  bool passed = false;
  double value = 0.0;      // the measured quantity
  double threshold = 0.0;  // the bound it was compared with
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckEntry> entries;

  bool all_passed() const;
  const CheckEntry* find(const std::string& name) const;
};

struct ValidateOptions {
  int fd_points = 20;
  std::uint64_t seed = 42;
};

/// Runs every structural check that is decidable in finite dimensions.
/// Findings are reported, never thrown.
ValidationReport validate(const CascadeRealization& model,
                          const ValidateOptions& opts = {});

struct CascadeRate {
  Vector dx;
  Vector dz;
};

/// Right-hand side of the cascade. Throws DimensionMismatch.
CascadeRate rhs(const CascadeRealization& model, const Vector& x,
                const Vector& z, const Vector& u);

/// Integral-action variant z' = C x + h(x) - y_ref. Requires S = 0.
CascadeRate rhs_regulated(const CascadeRealization& model, const Vector& x,
                          const Vector& z, const Vector& u,
                          const Vector& y_ref);

/// Throws NonzeroS unless S vanishes.
void require_zero_s(const CascadeRealization& model);

/// Draws a state with ||x||_X = radius along a Gram-whitened Gaussian direction.
Vector random_state(const CascadeRealization& model, double radius,
                    std::mt19937_64& rng);

}  // namespace fcascade
