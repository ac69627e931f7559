#include "fcascade/model.hpp"

#include "fcascade/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fcascade {

namespace {

constexpr double kDiffZeroTol = 1e-10;
constexpr double kSkewTol = 1e-12;
constexpr double kDissipTol = 1e-10;
constexpr double kFdTol = 1e-5;
constexpr double kFdStep = 1e-5;

CheckEntry entry(std::string name, bool passed, double value, double threshold,
                 std::string detail = {}) {
  return CheckEntry{std::move(name), passed, value, threshold, std::move(detail)};
}

// Central-difference Jacobian of `map` at x.
Matrix fd_jacobian(const VectorMap& map, const Vector& x, Eigen::Index rows) {
  const double step = kFdStep * (1.0 + x.norm());
  Matrix j(rows, x.size());
  Vector xp = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    xp(k) = x(k) + step;
    const Vector fp = map(xp);
    xp(k) = x(k) - step;
    const Vector fm = map(xp);
    xp(k) = x(k);
    j.col(k) = (fp - fm) / (2.0 * step);
  }
  return j;
}

}  // namespace

CascadeRealization make_linear_realization(std::string name, Matrix A,
                                           Matrix B, Matrix C, Matrix S,
                                           std::optional<Matrix> QX,
                                           std::optional<Matrix> QY,
                                           std::optional<Matrix> QU) {
  const Eigen::Index n = A.rows();
  const Eigen::Index m = C.rows();
  const Eigen::Index r = B.cols();
  if (A.cols() != n || B.rows() != n || C.cols() != n || S.rows() != m ||
      S.cols() != m) {
    throw DimensionMismatch("make_linear_realization: inconsistent dimensions");
  }
  CascadeRealization model{
      .name = std::move(name),
      .A = std::move(A),
      .C = std::move(C),
      .S = std::move(S),
      .f = [n](const Vector&) { return Vector(Vector::Zero(n)); },
      .df = [n](const Vector&) { return Matrix(Matrix::Zero(n, n)); },
      .g = [B](const Vector&) { return B; },
      .h = [m](const Vector&) { return Vector(Vector::Zero(m)); },
      .dh = [m, n](const Vector&) { return Matrix(Matrix::Zero(m, n)); },
      .QX = GramForm(QX.value_or(Matrix::Identity(n, n))),
      .QY = GramForm(QY.value_or(Matrix::Identity(m, m))),
      .QU = GramForm(QU.value_or(Matrix::Identity(r, r))),
      .linear = true,
      .constant_input = true,
  };
  return model;
}

bool ValidationReport::all_passed() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const CheckEntry& e) { return e.passed; });
}

const CheckEntry* ValidationReport::find(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

ValidationReport validate(const CascadeRealization& model,
                          const ValidateOptions& opts) {
  ValidationReport report;
  auto& out = report.entries;
  const Eigen::Index n = model.n();
  const Eigen::Index m = model.m();

  const bool dims_ok = model.A.cols() == n && model.C.cols() == n &&
                       model.S.rows() == m && model.S.cols() == m &&
                       model.QX.dim() == n && model.QY.dim() == m;
  out.push_back(entry("dimensions", dims_ok, dims_ok ? 0.0 : 1.0, 0.0));
  if (!dims_ok) return report;

  const Vector zero = Vector::Zero(n);
  const Vector f0 = model.f(zero);
  const Vector h0 = model.h(zero);
  const Matrix g0 = model.g(zero);
  const bool g_ok = g0.rows() == n && g0.cols() == model.r();
  out.push_back(entry("g dimensions", g_ok, g_ok ? 0.0 : 1.0, 0.0));
  if (!g_ok) return report;

  out.push_back(entry("f(0) = 0", f0.size() == n && f0.isZero(0.0),
                      f0.size() == n ? f0.norm() : 1.0, 0.0));
  out.push_back(entry("h(0) = 0", h0.size() == m && h0.isZero(0.0),
                      h0.size() == m ? h0.norm() : 1.0, 0.0));

  const double df0 = model.df(zero).norm();
  const double dh0 = model.dh(zero).norm();
  out.push_back(entry("df(0) = 0", df0 <= kDiffZeroTol, df0, kDiffZeroTol));
  out.push_back(entry("dh(0) = 0", dh0 <= kDiffZeroTol, dh0, kDiffZeroTol));

  {
    const Matrix qs = model.QY.matrix() * model.S;
    const double defect = (qs + qs.transpose()).norm();
    const double bound = kSkewTol * qs.norm();
    out.push_back(entry("S skew-adjoint", defect <= bound, defect, bound,
                        "||QY S + S^T QY||"));
  }

  {
    // Extreme generalized eigenvalues of (sym(QX A), QX).
    const Matrix qa = model.QX.matrix() * model.A;
    const Matrix sym = 0.5 * (qa + qa.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(
        sym, model.QX.matrix(), Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().maxCoeff();
    const double scale = std::max(1.0, std::abs(es.eigenvalues().minCoeff()));
    out.push_back(entry("A dissipative", top <= kDissipTol * scale, top,
                        kDissipTol * scale, "max <x, A x>_X / ||x||_X^2"));
  }

  {
    const double abscissa = spectral_abscissa(model.A);
    out.push_back(entry("A exponentially stable", abscissa < 0.0, abscissa, 0.0,
                        "max Re(eig A)"));
  }

  {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> radius(0.1, 2.0);
    double worst_f = 0.0;
    double worst_h = 0.0;
    for (int k = 0; k < opts.fd_points; ++k) {
      const Vector x = random_state(model, radius(rng), rng);
      const Matrix jf = model.df(x);
      const Matrix jh = model.dh(x);
      const Matrix fd_f = fd_jacobian(model.f, x, n);
      const Matrix fd_h = fd_jacobian(model.h, x, m);
      worst_f = std::max(worst_f, (fd_f - jf).norm() / std::max(1.0, jf.norm()));
      worst_h = std::max(worst_h, (fd_h - jh).norm() / std::max(1.0, jh.norm()));
    }
    out.push_back(entry("df matches finite differences", worst_f <= kFdTol,
                        worst_f, kFdTol));
    out.push_back(entry("dh matches finite differences", worst_h <= kFdTol,
                        worst_h, kFdTol));
  }
  return report;
}

CascadeRate rhs(const CascadeRealization& model, const Vector& x,
                const Vector& z, const Vector& u) {
  if (x.size() != model.n() || z.size() != model.m() || u.size() != model.r()) {
    std::ostringstream msg;
    msg << "rhs: expected (x, z, u) sizes (" << model.n() << ", " << model.m()
        << ", " << model.r() << "), got (" << x.size() << ", " << z.size()
        << ", " << u.size() << ")";
    throw DimensionMismatch(msg.str());
  }
  CascadeRate out;
  out.dx = model.A * x + model.f(x) + model.g(x) * u;
  out.dz = model.S * z + model.C * x + model.h(x);
  return out;
}

void require_zero_s(const CascadeRealization& model) {
  if (!model.S.isZero(0.0)) {
    throw NonzeroS("integral action requires S = 0");
  }
}

CascadeRate rhs_regulated(const CascadeRealization& model, const Vector& x,
                          const Vector& z, const Vector& u,
                          const Vector& y_ref) {
  require_zero_s(model);
  if (y_ref.size() != model.m()) throw DimensionMismatch("rhs_regulated: y_ref size");
  CascadeRate out = rhs(model, x, z, u);
  out.dz -= y_ref;
  return out;
}

Vector random_state(const CascadeRealization& model, double radius,
                    std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector xi(model.n());
  for (auto& v : xi) v = normal(rng);
  const double len = xi.norm();
  if (len == 0.0) return Vector::Zero(model.n());
  return model.QX.inv_sqrt() * (xi * (radius / len));
}

}  // namespace fcascade
