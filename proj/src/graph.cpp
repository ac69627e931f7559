#include "fcascade/graph.hpp"

#include "fcascade/errors.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace fcascade {

namespace {

constexpr double kGrowthLimit = 10.0;
constexpr double kS0CrossTol = 1e-10;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kExplicitCrossTol = 1e-6;
constexpr long kExplicitMaxSteps = 400000;

[[noreturn]] void reject_step(double t, double before, double after) {
  std::ostringstream msg;
  msg << "step rejected at t = " << t << ": norm grew from " << before << " to "
      << after;
  throw StepRejected(msg.str(), t);
}

void check_growth(double t, double before, double after) {
  if (!std::isfinite(after) || after > kGrowthLimit * before) {
    reject_step(t, before, after);
  }
}

// M0 x = C A^-1 x - int_0^inf S e^{-tS} C A^-1 e^{tA} x dt, by composite
// Simpson on exact exponential propagators. Returns NaN if the integrand has
// not decayed within the step budget.
double explicit_m0_deviation(const Matrix& m0, const Matrix& a, const Matrix& s,
                             const Matrix& c, std::uint64_t seed) {
  const Eigen::Index n = a.rows();
  const Matrix cainv = solve_linear(Matrix(a.transpose()), Matrix(c.transpose())).transpose();
  const double rho = a.norm() + s.norm();
  const double tau = 0.02 / std::max(1.0, rho);
  const Matrix e_step = expm(tau * a);
  const Matrix f_step = expm(-tau * s);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int probe = 0; probe < 5; ++probe) {
    Vector x(n);
    for (auto& v : x) v = normal(rng);
    Vector ex = x;
    Matrix f = Matrix::Identity(s.rows(), s.rows());
    auto integrand = [&] { return Vector(s * (f * (cainv * ex))); };
    Vector acc = integrand();  // weight 1 at t = 0
    long k = 0;
    bool decayed = false;
    while (k < kExplicitMaxSteps) {
      ex = e_step * ex;
      f = f_step * f;
      ++k;
      const Vector val = integrand();
      const bool even = (k % 2 == 0);
      if (even && ex.norm() <= 1e-14 * x.norm()) {
        acc += val;
        decayed = true;
        break;
      }
      acc += (even ? 2.0 : 4.0) * val;
    }
    if (!decayed) return std::numeric_limits<double>::quiet_NaN();
    const Vector explicit_m0x = cainv * x - (tau / 3.0) * acc;
    const double scale = std::max(1e-300, (m0 * x).norm() + cainv.norm() * x.norm());
    worst = std::max(worst, (m0 * x - explicit_m0x).norm() / scale);
  }
  return worst;
}

}  // namespace

void QuadConfig::check() const {
  if (!(tail_tol > 0.0 && step > 0.0 && max_horizon > 0.0 && decay_floor > 0.0)) {
    throw InvalidParams("quadrature config: tail_tol, step, max_horizon and "
                        "decay_floor must all be positive");
  }
  if (max_horizon < step) throw InvalidParams("quadrature config: max_horizon < step");
}

M0Solution compute_M0(const CascadeRealization& model, std::uint64_t seed) {
  M0Solution out;
  out.M0 = solve_sylvester(model.A, model.S, model.C);
  out.residual = sylvester_residual(out.M0, model.A, model.S, model.C);
  if (model.S.isZero(0.0)) {
    const Matrix cainv =
        solve_linear(Matrix(model.A.transpose()), Matrix(model.C.transpose())).transpose();
    out.crosscheck = (out.M0 - cainv).norm() / std::max(1e-300, cainv.norm());
    // Two backward-stable solves agree to about cond(A) * eps.
    const double cond = 1.0 / Eigen::PartialPivLU<Matrix>(model.A).rcond();
    const double tol = std::max(kS0CrossTol, 100.0 * kEps * cond);
    if (out.crosscheck > tol) {
      throw NumericalError("M0 disagrees with C A^-1 (relative " +
                           std::to_string(out.crosscheck) + ")");
    }
  } else {
    out.crosscheck = explicit_m0_deviation(out.M0, model.A, model.S, model.C, seed);
    if (out.crosscheck > kExplicitCrossTol) {
      throw NumericalError("M0 disagrees with the explicit integral (relative " +
                           std::to_string(out.crosscheck) + ")");
    }
  }
  return out;
}

Trajectory open_loop_flow(const CascadeRealization& model, const Vector& x0,
                          double T, double step, Scheme scheme) {
  if (x0.size() != model.n()) throw DimensionMismatch("open_loop_flow: x0 size");
  Stepper stepper(model.A, step, scheme);
  Trajectory traj;
  const long steps = static_cast<long>(std::llround(T / step));
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  Vector x = x0;
  Vector fx = model.f(x);
  traj.times.push_back(0.0);
  traj.states.push_back(x);
  double norm = model.QX.norm(x);
  for (long k = 1; k <= steps; ++k) {
    Vector next = stepper.advance(x, fx, model.f);
    const double next_norm = model.QX.norm(next);
    check_growth(k * step, norm, next_norm);
    x = std::move(next);
    norm = next_norm;
    fx = model.f(x);
    traj.times.push_back(k * step);
    traj.states.push_back(x);
  }
  return traj;
}

GraphMap::GraphMap(CascadeRealization model, QuadConfig quad)
    : model_(std::move(model)),
      quad_(quad),
      m0_((quad_.check(), compute_M0(model_))),
      stepper_(model_.A, quad_.step, quad_.scheme),
      s_zero_(model_.S.isZero(0.0)) {
  const double scale = m0_.M0.norm() * (model_.A.norm() + model_.S.norm()) +
                       model_.C.norm();
  if (m0_.residual > 1e-10 * scale) {
    throw NumericalError("Sylvester residual " + std::to_string(m0_.residual) +
                         " too large");
  }
  s_step_ = s_zero_ ? Matrix::Identity(model_.m(), model_.m())
                    : expm(-quad_.step * model_.S);
}

GraphEvaluation GraphMap::evaluate(const Vector& x, const Matrix& directions) const {
  const Eigen::Index n = model_.n();
  const Eigen::Index m = model_.m();
  if (x.size() != n || directions.rows() != n) {
    throw DimensionMismatch("GraphMap::evaluate: state or direction size");
  }
  const Matrix& m0 = m0_.M0;
  const bool want_tangent = directions.cols() > 0;

  GraphEvaluation out;
  out.M = m0 * x;
  out.dM = m0 * directions;
  const double norm0 = model_.QX.norm(x);
  if (norm0 == 0.0 || model_.linear) return out;

  const double tau = quad_.step;
  const double floor = quad_.decay_floor * norm0;
  const auto& f = model_.f;
  const auto& df = model_.df;

  Matrix rot = Matrix::Identity(m, m);  // e^{-t S}
  Vector y = x;
  Vector fy = f(y);
  Matrix jy;
  Matrix delta;
  if (want_tangent) {
    jy = df(y);
    delta = directions;
  }
  auto integrand = [&](const Vector& state, const Vector& f_state) {
    Vector q = m0 * f_state - model_.h(state);
    return s_zero_ ? q : Vector(rot * q);
  };
  auto integrand_tangent = [&](const Vector& state, const Matrix& j_state,
                               const Matrix& d) {
    Matrix dq = (m0 * j_state - model_.dh(state)) * d;
    return s_zero_ ? dq : Matrix(rot * dq);
  };

  Vector q = integrand(y, fy);
  Matrix dq;
  if (want_tangent) dq = integrand_tangent(y, jy, delta);
  Vector acc = Vector::Zero(m);
  Matrix dacc = Matrix::Zero(m, directions.cols());
  Vector q_pair = q, q_mid;
  Matrix dq_pair = dq, dq_mid;

  double t = 0.0;
  double norm = norm0;
  long k = 0;
  // Start of the last decade above the floor, for the decay-rate fit.
  double decade_t = -1.0;
  double decade_norm = 0.0;
  StepStages stages;
  while (norm > floor) {
    if (t >= quad_.max_horizon) {
      std::ostringstream msg;
      msg << "open-loop flow has not decayed by t = " << quad_.max_horizon
          << " (||x(t)|| / ||x0|| = " << norm / norm0 << ")";
      throw HorizonExceeded(msg.str());
    }
    Vector next = stepper_.advance(y, fy, f, want_tangent ? &stages : nullptr);
    if (want_tangent) delta = stepper_.tangent(stages, delta, jy, df);
    const double next_norm = model_.QX.norm(next);
    check_growth(t + tau, norm, next_norm);
    ++k;
    t = k * tau;
    y = std::move(next);
    norm = next_norm;
    fy = f(y);
    if (!s_zero_) rot = s_step_ * rot;
    q = integrand(y, fy);
    if (want_tangent) {
      jy = df(y);
      dq = integrand_tangent(y, jy, delta);
    }
    // Composite Simpson over consecutive step pairs.
    if (k % 2 == 1) {
      q_mid = q;
      if (want_tangent) dq_mid = dq;
    } else {
      acc += (tau / 3.0) * (q_pair + 4.0 * q_mid + q);
      q_pair = q;
      if (want_tangent) {
        dacc += (tau / 3.0) * (dq_pair + 4.0 * dq_mid + dq);
        dq_pair = dq;
      }
    }
    if (decade_t < 0.0 && norm <= 10.0 * floor) {
      decade_t = t;
      decade_norm = norm;
    }
  }
  // An odd final step closes with the trapezoid rule; the integrand is
  // already at the floor there.
  if (k % 2 == 1) {
    acc += 0.5 * tau * (q_pair + q_mid);
    if (want_tangent) dacc += 0.5 * tau * (dq_pair + dq_mid);
  }
  out.M += acc;
  if (want_tangent) out.dM += dacc;
  out.horizon = t;
  out.steps = k;

  // Tail of an integrand that vanishes quadratically along a flow decaying
  // like e^{-mu t}: roughly |q(T*)| / (2 mu).
  if (k > 0 && t > decade_t && decade_t >= 0.0 && norm > 0.0) {
    out.decay_rate = std::log(decade_norm / norm) / (t - decade_t);
  } else if (k > 0 && norm > 0.0) {
    out.decay_rate = std::log(norm0 / norm) / t;
  }
  const double qn = model_.QY.norm(q);
  if (qn == 0.0) {
    out.tail_estimate = 0.0;
  } else if (out.decay_rate > 0.0) {
    out.tail_estimate = qn / (2.0 * out.decay_rate);
  } else {
    out.tail_estimate = std::numeric_limits<double>::infinity();
  }
  out.tail_warning = out.tail_estimate > quad_.tail_tol;
  return out;
}

Vector GraphMap::eval_M(const Vector& x) const {
  return evaluate(x, Matrix(model_.n(), 0)).M;
}

Matrix GraphMap::eval_dM(const Vector& x) const {
  return evaluate(x, Matrix::Identity(model_.n(), model_.n())).dM;
}

double GraphMap::forwarding_residual(const Vector& x) const {
  const Vector flow = model_.A * x + model_.f(x);
  const GraphEvaluation ev = evaluate(x, flow);
  const Vector lhs = ev.dM.col(0);
  const Vector rhs = model_.S * ev.M + model_.C * x + model_.h(x);
  return model_.QY.norm(lhs - rhs);
}

}  // namespace fcascade
