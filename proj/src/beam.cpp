#include "fcascade/beam.hpp"

#include "fcascade/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fcascade {

namespace {

const BeamParams& checked(const BeamParams& p) {
  p.check();
  return p;
}

Vector grid(const BeamParams& p) {
  const double h = p.L / p.N;
  Vector xi(p.N);
  for (int i = 0; i < p.N; ++i) xi(i) = (i + 1) * h;
  return xi;
}

Vector mass_weights_of(const BeamParams& p) {
  const double h = p.L / p.N;
  Vector w = Vector::Constant(p.N, h);
  w(p.N - 1) = 0.5 * h;
  return w;
}

Vector curvature_weights_of(const BeamParams& p) {
  const double h = p.L / p.N;
  Vector w = Vector::Constant(p.N, h);
  w(0) = 0.5 * h;
  return w;
}

// Row 0 is v''(0) with ghost v_{-1} = v_1 - 2 h phi; row i is the centred
// difference at xi_i. v''(L) = 0 makes the free-end row vanish.
Matrix second_difference(const BeamParams& p) {
  const int n = p.N;
  const double h = p.L / n;
  const double h2 = h * h;
  Matrix d = Matrix::Zero(n, n + 1);
  d(0, 0) = 2.0 / h2;
  d(0, n) = -2.0 / h;
  // Column j - 1 holds v_j; v_0 = 0 drops out.
  for (int i = 1; i < n; ++i) {
    if (i >= 2) d(i, i - 2) = 1.0 / h2;
    d(i, i - 1) = -2.0 / h2;
    d(i, i) = 1.0 / h2;
  }
  return d;
}

Matrix cross_form_of(const BeamParams& p, const Vector& mw) {
  const int n = p.N;
  const Eigen::Index dim = 2 * n + 2;
  Matrix k = Matrix::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    k(i, n + 1 + i) = k(n + 1 + i, i) = 0.5 * mw(i);
    k(i, i) = 0.5 * p.lambda * mw(i);
  }
  k(n, 2 * n + 1) = k(2 * n + 1, n) = 0.5;
  k(n, n) = 0.5;
  return k;
}

CascadeRealization assemble(const BeamParams& p, const Vector& xi, const Vector& mw,
                            const Vector& wq, const Matrix& d2) {
  const int n = p.N;
  const Eigen::Index dim = 2 * n + 2;
  const Eigen::Index iphi = n;
  const Eigen::Index iom = 2 * n + 1;
  const double lam = p.lambda;
  const Matrix stiff = d2.transpose() * wq.asDiagonal() * d2;  // (N+1) x (N+1)

  Matrix a = Matrix::Zero(dim, dim);
  a.block(0, n + 1, n + 1, n + 1) = Matrix::Identity(n + 1, n + 1);
  a.block(n + 1, 0, n, n + 1) = -(mw.cwiseInverse().asDiagonal() * stiff.topRows(n));
  a.block(iom, 0, 1, n + 1) = -stiff.row(n);
  a(iom, iphi) -= 1.0;
  a.block(n + 1, n + 1, n, n) -= lam * Matrix::Identity(n, n);
  a.block(n + 1, iom, n, 1) += lam * xi;
  a.block(iom, n + 1, 1, n) -= lam * mw.cwiseProduct(xi).transpose();
  a(iom, iom) -= 1.0;

  Matrix qx = Matrix::Zero(dim, dim);
  qx.topLeftCorner(n + 1, n + 1) = stiff;
  qx(iphi, iphi) += 1.0;
  qx.block(n + 1, n + 1, n, n) = mw.asDiagonal();
  qx(iom, iom) = 1.0;

  Matrix c = Matrix::Zero(1, dim);
  c(0, iphi) = 1.0;
  Matrix b = Matrix::Zero(dim, 1);
  b(iom, 0) = 1.0;
  const Vector mxi = mw.cwiseProduct(xi);

  auto f = [n, xi, mw, mxi](const Vector& x) {
    const auto v = x.head(n);
    const double phi = x(n);
    const auto pp = x.segment(n + 1, n);
    const double om = x(2 * n + 1);
    Vector out = Vector::Zero(x.size());
    out.segment(n + 1, n) = om * om * (v - xi * phi);
    out(2 * n + 1) = -om * mw.cwiseProduct(v).dot(pp) + phi * om * mxi.dot(pp);
    return out;
  };
  auto df = [n, xi, mw, mxi](const Vector& x) {
    const auto v = x.head(n);
    const double phi = x(n);
    const auto pp = x.segment(n + 1, n);
    const double om = x(2 * n + 1);
    Matrix j = Matrix::Zero(x.size(), x.size());
    j.block(n + 1, 0, n, n).diagonal().setConstant(om * om);
    j.block(n + 1, n, n, 1) = -om * om * xi;
    j.block(n + 1, 2 * n + 1, n, 1) = 2.0 * om * (v - xi * phi);
    j.block(2 * n + 1, 0, 1, n) = -om * mw.cwiseProduct(pp).transpose();
    j.block(2 * n + 1, n + 1, 1, n) =
        (-om * mw.cwiseProduct(v) + phi * om * mxi).transpose();
    j(2 * n + 1, n) = om * mxi.dot(pp);
    j(2 * n + 1, 2 * n + 1) = -mw.cwiseProduct(v).dot(pp) + phi * mxi.dot(pp);
    return j;
  };

  return CascadeRealization{
      .name = "beam",
      .A = std::move(a),
      .C = c,
      .S = Matrix::Zero(1, 1),
      .f = f,
      .df = df,
      .g = [b](const Vector&) { return b; },
      .h = [](const Vector&) { return Vector(Vector::Zero(1)); },
      .dh = [dim](const Vector&) { return Matrix(Matrix::Zero(1, dim)); },
      .QX = GramForm(qx),
      .QY = GramForm::identity(1),
      .QU = GramForm::identity(1),
      .linear = false,
      .constant_input = true,
  };
}

}  // namespace

void BeamParams::check() const {
  if (N < 8) throw InvalidParams("beam: N must be at least 8");
  if (!(L > 0.0)) throw InvalidParams("beam: L must be positive");
  if (!(lambda > 0.0)) throw InvalidParams("beam: lambda must be positive");
  if (!std::isfinite(theta_ref)) throw InvalidParams("beam: theta_ref must be finite");
}

Beam::Beam(BeamParams params)
    : params_(checked(params)),
      xi_(grid(params_)),
      mw_(mass_weights_of(params_)),
      wq_(curvature_weights_of(params_)),
      d2_(second_difference(params_)),
      cross_(cross_form_of(params_, mw_)),
      model_(assemble(params_, xi_, mw_, wq_, d2_)) {}

Vector Beam::pack(const BeamState& s) const {
  const int n = N();
  if (s.v.size() != n || s.p.size() != n) throw DimensionMismatch("beam state size");
  Vector x(this->n());
  x << s.v, s.phi, s.p, s.omega;
  return x;
}

BeamState Beam::unpack(const Vector& x) const {
  const int n = N();
  if (x.size() != this->n()) throw DimensionMismatch("beam state size");
  return BeamState{x.head(n), x(n), x.segment(n + 1, n), x(2 * n + 1)};
}

double Beam::energy(const Vector& x) const {
  // Same value as x^T QX x / 2, without the cancellation in the assembled
  // stiffness.
  const int n = N();
  const Vector curv = d2_ * x.head(n + 1);
  const auto pp = x.segment(n + 1, n);
  const double phi = x(n);
  const double om = x(2 * n + 1);
  return 0.5 * (wq_.dot(curv.cwiseProduct(curv)) + phi * phi + mw_.dot(pp.cwiseProduct(pp)) +
                om * om);
}

double Beam::strict_energy(const Vector& x, double eps) const {
  return energy(x) + eps * x.dot(cross_ * x);
}

double Beam::eps_max() const {
  // 1/2 QX + eps K > 0  iff  1 + 2 eps mu > 0 for every eigenvalue mu of
  // QX^{-1/2} K QX^{-1/2}.
  const Matrix& r = model_.QX.inv_sqrt();
  const Matrix k = r * cross_ * r;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (k + k.transpose()),
                                           Eigen::EigenvaluesOnly);
  const double mu = es.eigenvalues().minCoeff();
  if (mu >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / (2.0 * mu);
}

double Beam::default_eps() const {
  return std::min({0.5 * eps_max(), 0.5 * params_.lambda, 0.5});
}

double Beam::dissipation(const Vector& x, double u) const {
  const int n = N();
  const auto pp = x.segment(n + 1, n);
  const double om = x(2 * n + 1);
  return -params_.lambda * mw_.dot(pp.cwiseProduct(pp)) - om * om + u * om;
}

OriginalState Beam::to_original(const Vector& x) const {
  const BeamState s = unpack(x);
  return OriginalState{s.v - xi_ * s.phi, s.phi + params_.theta_ref,
                       s.p - xi_ * s.omega, s.omega};
}

Vector Beam::from_original(const OriginalState& o) const {
  const double phi = o.theta - params_.theta_ref;
  return pack(BeamState{o.w + xi_ * phi, phi, o.w_rate + xi_ * o.theta_rate,
                        o.theta_rate});
}

double Beam::total_torque(const Vector& x, double u) const {
  const BeamState s = unpack(x);
  const double int_vp = mw_.dot(s.v.cwiseProduct(s.p));
  const double int_xp = mw_.dot(xi_.cwiseProduct(s.p));
  const double tilde =
      -s.omega * int_vp + (s.phi * s.omega - params_.lambda) * int_xp - s.omega + u;
  return -s.phi + tilde;
}

Vector Beam::steady_state(double u) const {
  const Vector rhs = -model_.g(Vector::Zero(n())).col(0) * u;
  // A is stiff (entries ~ h^-4); refine with residuals in extended precision.
  const Eigen::PartialPivLU<Matrix> lu(model_.A);
  Vector x = solve_linear(model_.A, rhs);
  for (int it = 0; it < 3; ++it) {
    Vector r(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      long double acc = rhs(i);
      for (Eigen::Index j = 0; j < x.size(); ++j) {
        acc -= static_cast<long double>(model_.A(i, j)) * x(j);
      }
      r(i) = static_cast<double>(acc);
    }
    x += lu.solve(r);
  }
  return x;
}

Vector Beam::rest_state(double theta_ref) const {
  BeamState s{xi_ * (-theta_ref), -theta_ref, Vector::Zero(N()), 0.0};
  return pack(s);
}

Vector Beam::random_smooth_state(double target_energy, std::mt19937_64& rng) const {
  if (!(target_energy >= 0.0)) throw InvalidParams("target energy must be nonnegative");
  std::normal_distribution<double> normal;
  const double len = params_.L;
  const Vector s = xi_ / len;
  const double phi = normal(rng);
  const double om = normal(rng);
  const double c2 = normal(rng), c3 = normal(rng);
  const double d2 = normal(rng), d3 = normal(rng);
  const Vector s2 = s.cwiseProduct(s);
  const Vector s3 = s2.cwiseProduct(s);
  BeamState st{phi * xi_ + len * (c2 * s2 + c3 * s3), phi,
               om * xi_ + len * (d2 * s2 + d3 * s3), om};
  Vector x = pack(st);
  const double e = energy(x);
  if (e == 0.0) return x;
  return x * std::sqrt(target_energy / e);
}

std::vector<double> Beam::probe_stations() const {
  std::vector<double> out;
  for (int k = 1; k <= 5; ++k) out.push_back(params_.L * k / 5.0);
  return out;
}

std::vector<double> Beam::probe_deflection(const Vector& x) const {
  const Vector w = to_original(x).w;
  const double hh = h();
  std::vector<double> out;
  for (double st : probe_stations()) {
    const double pos = st / hh;  // grid coordinate, w at 0 is 0
    const int lo = std::min(static_cast<int>(std::floor(pos)), N() - 1);
    const double frac = pos - lo;
    const double w_lo = lo == 0 ? 0.0 : w(lo - 1);
    const double w_hi = w(lo);
    out.push_back((1.0 - frac) * w_lo + frac * w_hi);
  }
  return out;
}

LyapunovSpec Beam::lyapunov() const {
  LyapunovSpec spec;
  const GramForm q = model_.QX;
  spec.V = [q](const Vector& x) { return 0.5 * q.norm_sq(x); };
  spec.beta = 0.5;
  const Vector mw = mw_;
  const int n = N();
  const double lam = params_.lambda;
  spec.dissipation = [mw, n, lam](const Vector& x, const Vector& u) {
    const auto pp = x.segment(n + 1, n);
    const double om = x(2 * n + 1);
    return -lam * mw.dot(pp.cwiseProduct(pp)) - om * om + u(0) * om;
  };
  const double eps = default_eps();
  const Matrix k = cross_;
  spec.V_eps = [q, k, eps](const Vector& x) {
    return 0.5 * q.norm_sq(x) + eps * x.dot(k * x);
  };
  return spec;
}

}  // namespace fcascade
