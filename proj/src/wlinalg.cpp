#include "fcascade/wlinalg.hpp"

#include "fcascade/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fcascade {

namespace {

constexpr double kPivotTol = 1e-12;
constexpr double kRankTol = 1e-8;
constexpr Eigen::Index kMaxSylvesterUnknowns = 10000;
constexpr Eigen::Index kMaxExpActionDim = 50;

double inf_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

// Factorizes and rejects tiny pivots relative to ||A||_inf.
Eigen::PartialPivLU<Matrix> checked_lu(const Matrix& a, bool sylvester) {
  if (a.rows() != a.cols()) {
    throw DimensionMismatch("linear solve needs a square matrix, got " +
                            std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()));
  }
  Eigen::PartialPivLU<Matrix> lu(a);
  const double scale = inf_norm(a);
  const double min_pivot =
      a.rows() == 0 ? 1.0 : lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(min_pivot >= kPivotTol * scale) || scale == 0.0) {
    const std::string msg = "pivot " + std::to_string(min_pivot) +
                            " below threshold " +
                            std::to_string(kPivotTol * scale);
    if (sylvester) throw SpectraOverlap("Sylvester operator singular: " + msg);
    throw SingularMatrix("singular matrix: " + msg);
  }
  return lu;
}

}  // namespace

GramForm::GramForm(const Matrix& q) {
  if (q.rows() != q.cols() || q.rows() == 0) {
    throw InvalidParams("Gram matrix must be square and nonempty");
  }
  if (!q.allFinite()) throw InvalidParams("Gram matrix has non-finite entries");
  q_ = 0.5 * (q + q.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(q_);
  auto cache = std::make_shared<Cache>();
  cache->min_eig = es.eigenvalues().minCoeff();
  if (!(cache->min_eig > 0.0)) {
    throw InvalidParams("Gram matrix is not positive definite (min eigenvalue " +
                        std::to_string(cache->min_eig) + ")");
  }
  const auto& v = es.eigenvectors();
  const Vector s = es.eigenvalues().cwiseSqrt();
  cache->sqrt = v * s.asDiagonal() * v.transpose();
  cache->inv_sqrt = v * s.cwiseInverse().asDiagonal() * v.transpose();
  cache->ldlt.compute(q_);
  cache_ = std::move(cache);
}

GramForm GramForm::identity(Eigen::Index n) {
  return GramForm(Matrix::Identity(n, n));
}

double GramForm::inner(const Vector& a, const Vector& b) const {
  return a.dot(q_ * b);
}

double GramForm::norm(const Vector& a) const {
  return std::sqrt(std::max(0.0, norm_sq(a)));
}

Matrix GramForm::solve(const Matrix& b) const { return cache_->ldlt.solve(b); }

Vector solve_linear(const Matrix& a, const Vector& b) {
  if (b.size() != a.rows()) throw DimensionMismatch("solve_linear: rhs size");
  auto lu = checked_lu(a, false);
  Vector x = lu.solve(b);
  // One step of iterative refinement.
  x += lu.solve(b - a * x);
  return x;
}

Matrix solve_linear(const Matrix& a, const Matrix& b) {
  if (b.rows() != a.rows()) throw DimensionMismatch("solve_linear: rhs rows");
  auto lu = checked_lu(a, false);
  Matrix x = lu.solve(b);
  x += lu.solve(b - a * x);
  return x;
}

Matrix solve_sylvester(const Matrix& a, const Matrix& s, const Matrix& c) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = s.rows();
  if (a.cols() != n || s.cols() != m || c.rows() != m || c.cols() != n) {
    throw DimensionMismatch("solve_sylvester: expected A n x n, S m x m, C m x n");
  }
  if (n * m > kMaxSylvesterUnknowns) {
    throw TooLarge("solve_sylvester: " + std::to_string(n * m) +
                   " unknowns exceeds the Kronecker limit of 10000");
  }
  // Column-major vec: vec(M A) = (A^T kron I_m) vec(M),
  //                   vec(S M) = (I_n kron S) vec(M).
  const Eigen::Index nm = n * m;
  Matrix k = Matrix::Zero(nm, nm);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index l = 0; l < n; ++l) {
      const double alj = a(l, j);
      if (alj != 0.0) {
        for (Eigen::Index i = 0; i < m; ++i) k(j * m + i, l * m + i) += alj;
      }
    }
    k.block(j * m, j * m, m, m) -= s;
  }
  auto lu = checked_lu(k, true);
  const Vector rhs = Eigen::Map<const Vector>(c.data(), nm);
  Vector x = lu.solve(rhs);
  x += lu.solve(rhs - k * x);
  return Eigen::Map<const Matrix>(x.data(), m, n);
}

double sylvester_residual(const Matrix& m0, const Matrix& a, const Matrix& s,
                          const Matrix& c) {
  return (m0 * a - s * m0 - c).norm();
}

Matrix weighted_adjoint(const Matrix& l, const GramForm& qdom,
                        const GramForm& qcod) {
  if (l.cols() != qdom.dim() || l.rows() != qcod.dim()) {
    throw DimensionMismatch("weighted_adjoint: Gram dimensions do not match L");
  }
  return solve_linear(qdom.matrix(), Matrix(l.transpose() * qcod.matrix()));
}

Matrix expm(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("expm: square matrix needed");
  const Eigen::Index n = a.rows();
  if (n == 0) return a;
  // Higham (2005) degree-13 Pade coefficients.
  static constexpr double b[] = {64764752532480000.0,
                                 32382376266240000.0,
                                 7771770303897600.0,
                                 1187353796428800.0,
                                 129060195264000.0,
                                 10559470521600.0,
                                 670442572800.0,
                                 33522128640.0,
                                 1323241920.0,
                                 40840800.0,
                                 960960.0,
                                 16380.0,
                                 182.0,
                                 1.0};
  constexpr double theta13 = 5.371920351148152;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  }
  const Matrix x = a / std::ldexp(1.0, squarings);
  const Matrix id = Matrix::Identity(n, n);
  const Matrix x2 = x * x;
  const Matrix x4 = x2 * x2;
  const Matrix x6 = x4 * x2;
  const Matrix u_inner = x6 * (b[13] * x6 + b[11] * x4 + b[9] * x2) +
                         b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * id;
  const Matrix u = x * u_inner;
  const Matrix v = x6 * (b[12] * x6 + b[10] * x4 + b[8] * x2) + b[6] * x6 +
                   b[4] * x4 + b[2] * x2 + b[0] * id;
  Matrix r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

Vector matrix_exp_action(const Matrix& s, double t, const Vector& y) {
  if (s.rows() > kMaxExpActionDim) {
    throw TooLarge("matrix_exp_action: dimension " + std::to_string(s.rows()) +
                   " exceeds 50");
  }
  if (s.rows() != s.cols() || y.size() != s.rows()) {
    throw DimensionMismatch("matrix_exp_action: dimensions");
  }
  if (s.isZero(0.0)) return y;
  return expm(t * s) * y;
}

SurjectivityMargin surjectivity_margin(const Matrix& l, const GramForm& qcod) {
  return surjectivity_margin(l, qcod, GramForm::identity(l.cols()));
}

SurjectivityMargin surjectivity_margin(const Matrix& l, const GramForm& qcod,
                                       const GramForm& qdom) {
  if (l.rows() != qcod.dim() || l.cols() != qdom.dim()) {
    throw DimensionMismatch("surjectivity_margin: Gram dimensions");
  }
  SurjectivityMargin out;
  const Matrix weighted = qcod.sqrt() * l * qdom.inv_sqrt();
  if (weighted.size() == 0) return out;
  Eigen::JacobiSVD<Matrix> svd(weighted);
  const Vector& sv = svd.singularValues();
  out.sigma_max = sv(0);
  out.sigma_min = l.rows() > l.cols() ? 0.0 : sv(l.rows() - 1);
  out.surjective = out.sigma_max > 0.0 && out.sigma_min > kRankTol * out.sigma_max;
  return out;
}

double spectral_abscissa(const Matrix& a) {
  if (a.size() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::EigenSolver<Matrix> es(a, false);
  return es.eigenvalues().real().maxCoeff();
}

double dissipativity_margin(const Matrix& a, const GramForm& q) {
  const Matrix qa = q.matrix() * a;
  const Matrix sym = 0.5 * (qa + qa.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(sym, q.matrix(),
                                                      Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace fcascade
