#pragma once

// Dense weighted linear algebra shared by every other module.

#include <Eigen/Dense>

#include <memory>

namespace fcascade {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Symmetric positive-definite Gram matrix realizing an inner product.
///
/// The matrix is symmetrized on construction and its eigendecomposition is
/// computed once; square roots and inverse square roots are cached.
class GramForm {
 public:
  /// Throws InvalidParams if `q` is not square or not positive definite.
  explicit GramForm(const Matrix& q);

  static GramForm identity(Eigen::Index n);

  Eigen::Index dim() const { return q_.rows(); }
  const Matrix& matrix() const { return q_; }
  const Matrix& sqrt() const { return cache_->sqrt; }
  const Matrix& inv_sqrt() const { return cache_->inv_sqrt; }
  double min_eigenvalue() const { return cache_->min_eig; }

  double inner(const Vector& a, const Vector& b) const;
  double norm_sq(const Vector& a) const { return inner(a, a); }
  double norm(const Vector& a) const;

  /// Solves Q y = b.
  Matrix solve(const Matrix& b) const;

 private:
  struct Cache {
    Matrix sqrt;
    Matrix inv_sqrt;
    Eigen::LDLT<Matrix> ldlt;
    double min_eig = 0.0;
  };
  Matrix q_;
  std::shared_ptr<const Cache> cache_;
};

/// Solves A x = b by partial-pivot LU. Throws SingularMatrix when a pivot is
/// below 1e-12 * ||A||_inf.
Vector solve_linear(const Matrix& a, const Vector& b);

/// Same as solve_linear for several right-hand sides at once.
Matrix solve_linear(const Matrix& a, const Matrix& b);

/// Solves M0 A - S M0 = C (A: n x n, S: m x m, C: m x n) by Kronecker
/// vectorization. Throws TooLarge when n*m > 1e4 and SpectraOverlap when the
/// vectorized system is singular.
Matrix solve_sylvester(const Matrix& a, const Matrix& s, const Matrix& c);

/// Frobenius residual ||M0 A - S M0 - C||_F.
double sylvester_residual(const Matrix& m0, const Matrix& a, const Matrix& s,
                          const Matrix& c);

/// Hilbert adjoint of L : (R^n, Qdom) -> (R^m, Qcod), i.e. Qdom^-1 L^T Qcod.
Matrix weighted_adjoint(const Matrix& l, const GramForm& qdom,
                        const GramForm& qcod);

/// Dense matrix exponential by Pade(13) scaling and squaring. No size limit;
/// used internally for exponential integrators.
Matrix expm(const Matrix& a);

/// e^{tS} y for m <= 50. Throws TooLarge otherwise.
Vector matrix_exp_action(const Matrix& s, double t, const Vector& y);

struct SurjectivityMargin {
  bool surjective = false;
  double sigma_min = 0.0;
  /// Largest singular value of the weighted map, the scale for the rank test.
  double sigma_max = 0.0;
};

/// Smallest singular value of Qcod^{1/2} L Qdom^{-1/2}; surjective iff it
/// exceeds 1e-8 times the largest one. sigma_min^2 is the coercivity constant
/// of L* with respect to the Gram norms.
SurjectivityMargin surjectivity_margin(const Matrix& l, const GramForm& qcod);
SurjectivityMargin surjectivity_margin(const Matrix& l, const GramForm& qcod,
                                       const GramForm& qdom);

/// Largest real part over the spectrum of a square matrix.
double spectral_abscissa(const Matrix& a);

/// Largest eigenvalue of the symmetric part of Q^{1/2} A Q^{-1/2}, i.e. the
/// supremum of <x, A x>_Q / ||x||_Q^2. Nonpositive iff A is Q-dissipative.
double dissipativity_margin(const Matrix& a, const GramForm& q);

}  // namespace fcascade
