#include "fcascade/sim.hpp"

#include "fcascade/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fcascade {

namespace {

constexpr double kGrowthLimit = 10.0;
constexpr double kGrowthFloor = 1e-8;
constexpr double kDefaultRecordPeriod = 0.05;

Matrix joint_linear_part(const CascadeRealization& model) {
  const Eigen::Index n = model.n();
  const Eigen::Index m = model.m();
  Matrix l = Matrix::Zero(n + m, n + m);
  l.topLeftCorner(n, n) = model.A;
  l.bottomLeftCorner(m, n) = model.C;
  l.bottomRightCorner(m, m) = model.S;
  return l;
}

long steps_per(double period, double dt, const char* what) {
  const double ratio = period / dt;
  const long k = std::lround(ratio);
  if (k < 1 || std::abs(ratio - k) > 1e-9 * ratio) {
    std::ostringstream msg;
    msg << what << " " << period << " is not a positive multiple of dt = " << dt;
    throw InvalidParams(msg.str());
  }
  return k;
}

}  // namespace

void SimConfig::check() const {
  if (!(dt > 0.0)) throw InvalidParams("dt must be positive");
  if (!(T_final > 0.0)) throw InvalidParams("T_final must be positive");
  if (record_every < 0) throw InvalidParams("record_every must be nonnegative");
}

double lyapunov_W(const LyapunovSpec& spec, const CascadeRealization& model,
                  const Vector& x, const Vector& z, const Vector& m) {
  return spec.V(x) + 0.25 * spec.beta * model.QY.norm_sq(z - m);
}

CascadeIntegrator::CascadeIntegrator(const CascadeRealization& model, double dt,
                                     Scheme scheme, std::optional<Vector> y_ref)
    : model_(model), stepper_(joint_linear_part(model), dt, scheme) {
  if (y_ref) {
    require_zero_s(model_);
    if (y_ref->size() != model_.m()) throw DimensionMismatch("y_ref size");
    y_ref_ = std::move(*y_ref);
  } else {
    y_ref_ = Vector::Zero(model_.m());
  }
}

void CascadeIntegrator::advance(Vector& x, Vector& z, const Vector& u,
                                double t) const {
  const Eigen::Index n = model_.n();
  const Eigen::Index m = model_.m();
  if (x.size() != n || z.size() != m || u.size() != model_.r()) {
    throw DimensionMismatch("CascadeIntegrator: state or input size");
  }
  Vector y(n + m);
  y << x, z;
  auto nonlinear = [&](const Vector& s) {
    const Vector xs = s.head(n);
    Vector out(n + m);
    out << model_.f(xs) + model_.g(xs) * u, model_.h(xs) - y_ref_;
    return out;
  };
  const double before = std::sqrt(model_.QX.norm_sq(x) + model_.QY.norm_sq(z));
  const Vector next = stepper_.advance(y, nonlinear(y), nonlinear);
  const Vector xn = next.head(n);
  const Vector zn = next.tail(m);
  const double after = std::sqrt(model_.QX.norm_sq(xn) + model_.QY.norm_sq(zn));
  const double t_next = t + stepper_.dt();
  if (!std::isfinite(after) || after > kGrowthLimit * std::max(before, kGrowthFloor)) {
    std::ostringstream msg;
    msg << "step rejected at t = " << t_next << ": norm grew from " << before
        << " to " << after;
    throw StepRejected(msg.str(), t_next);
  }
  x = xn;
  z = zn;
}

Trajectory simulate(const GraphMap& graph, const ForwardingController* controller,
                    const Vector& x0, const Vector& z0, const SimConfig& cfg,
                    const LyapunovSpec& spec) {
  cfg.check();
  const auto& model = graph.model();
  if (x0.size() != model.n() || z0.size() != model.m()) {
    throw DimensionMismatch("simulate: initial state sizes");
  }
  std::optional<Vector> y_ref;
  long sample_steps = 0;
  if (controller) {
    sample_steps = steps_per(controller->config().sample_period, cfg.dt, "sample_period");
    y_ref = controller->config().y_ref;
  }
  const CascadeIntegrator integrator(model, cfg.dt, cfg.scheme, y_ref);
  const long record_every =
      cfg.record_every > 0
          ? cfg.record_every
          : (sample_steps > 0 ? sample_steps
                              : std::max(1L, std::lround(kDefaultRecordPeriod / cfg.dt)));
  const long steps = std::lround(cfg.T_final / cfg.dt);
  const bool reuse_graph =
      controller && controller->config().mode == ControllerMode::FullNonlinear &&
      record_every % sample_steps == 0;

  Trajectory traj;
  const std::size_t records = static_cast<std::size_t>(steps / record_every + 2);
  traj.times.reserve(records);
  traj.states.reserve(records);
  traj.zs.reserve(records);
  traj.us.reserve(records);
  traj.monitors.reserve(records);

  Vector x = x0;
  Vector z = z0;
  Vector u = Vector::Zero(model.r());
  Vector sampled_m;
  double u_energy = 0.0;
  double dissipated = 0.0;  // integral of the predicted dV/dt since the last record
  double last_v = 0.0;
  double last_t = 0.0;

  auto record = [&](long k, bool sampled_now) {
    const double t = k * cfg.dt;
    const Vector m = (reuse_graph && sampled_now) ? sampled_m : graph.eval_M(x);
    MonitorRecord rec;
    rec.V = spec.V(x);
    rec.W = lyapunov_W(spec, model, x, z, m);
    rec.u_norm = model.QU.norm(u);
    rec.defect_norm = model.QY.norm(z - m);
    rec.x_norm = model.QX.norm(x);
    if (spec.V_eps) rec.V_eps = spec.V_eps(x);
    if (spec.dissipation && !traj.times.empty() && t > last_t) {
      rec.energy_residual = (rec.V - last_v - dissipated) / (t - last_t);
    }
    rec.u_energy = u_energy;
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.zs.push_back(z);
    traj.us.push_back(u);
    traj.monitors.push_back(rec);
    last_v = rec.V;
    last_t = t;
    dissipated = 0.0;
  };

  for (long k = 0;; ++k) {
    const bool sample_now = controller && k % sample_steps == 0 && k < steps;
    if (sample_now) {
      FeedbackSample fs = controller->sample(x, z);
      u = std::move(fs.u);
      sampled_m = std::move(fs.M);
    }
    if (k % record_every == 0 || k == steps) record(k, sample_now);
    if (k == steps) break;
    if (spec.dissipation) {
      // Crank-Nicolson makes the quadratic energy identity exact at the midpoint.
      const Vector x_prev = x;
      integrator.advance(x, z, u, k * cfg.dt);
      dissipated += cfg.dt * spec.dissipation(0.5 * (x_prev + x), u);
    } else {
      integrator.advance(x, z, u, k * cfg.dt);
    }
    u_energy += model.QU.norm_sq(u) * cfg.dt;
  }
  return traj;
}

DecayFit fit_decay_rate(const std::vector<double>& trace,
                        const std::vector<double>& times) {
  if (trace.size() != times.size()) throw DimensionMismatch("fit_decay_rate: sizes");
  if (trace.size() < 10) throw InvalidParams("fit_decay_rate needs at least 10 samples");
  const std::size_t start = trace.size() / 2;
  const std::size_t count = trace.size() - start;
  double st = 0.0;
  double sy = 0.0;
  for (std::size_t i = start; i < trace.size(); ++i) {
    if (!(trace[i] > 0.0)) {
      throw NonPositiveTrace("trace value " + std::to_string(trace[i]) + " at t = " +
                             std::to_string(times[i]));
    }
    st += times[i];
    sy += std::log(trace[i]);
  }
  const double tm = st / count;
  const double ym = sy / count;
  double stt = 0.0;
  double sty = 0.0;
  double syy = 0.0;
  for (std::size_t i = start; i < trace.size(); ++i) {
    const double dt = times[i] - tm;
    const double dy = std::log(trace[i]) - ym;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  DecayFit fit;
  if (stt == 0.0) throw InvalidParams("fit_decay_rate: times are all equal");
  fit.rate = sty / stt;
  // A perfectly flat trace is fitted exactly by slope 0.
  fit.r2 = syy <= 1e-300 ? 1.0 : (sty * sty) / (stt * syy);
  return fit;
}

ValidationReport verify_W_decay(const Trajectory& traj, const LyapunovSpec& spec,
                                const WDecayOptions& opts) {
  ValidationReport report;
  const auto& mon = traj.monitors;
  double worst_step = 0.0;  // largest scaled increase
  double w_max = mon.empty() ? 0.0 : mon.front().W;
  std::size_t worst_at = 0;
  for (std::size_t k = 1; k < mon.size(); ++k) {
    const double rise = (mon[k].W - mon[k - 1].W) / (1.0 + mon[k - 1].W);
    if (rise > worst_step) {
      worst_step = rise;
      worst_at = k;
    }
    w_max = std::max(w_max, mon[k].W);
  }
  {
    CheckEntry e{"W nonincreasing", worst_step <= opts.step_tol, worst_step,
                 opts.step_tol, ""};
    if (worst_step > 0.0) e.detail = "largest rise at t = " + std::to_string(traj.times[worst_at]);
    report.entries.push_back(e);
  }
  const double w0 = mon.empty() ? 0.0 : mon.front().W;
  const double w_end = mon.empty() ? 0.0 : mon.back().W;
  const double u_int = mon.empty() ? 0.0 : mon.back().u_energy;
  const double slack = (w0 - w_end) - 0.5 * spec.beta * u_int;
  report.entries.push_back({"integrated dissipation", slack >= -opts.integrated_tol,
                            slack, -opts.integrated_tol,
                            "W(0) - W(T) - (beta/2) int ||u||^2 dt"});
  const double excess = w_max - w0;
  report.entries.push_back({"sublevel invariance", excess <= opts.sublevel_tol, excess,
                            opts.sublevel_tol, "max_t W(t) - W(0)"});
  return report;
}

QuadraticBounds fit_quadratic_bounds(const LyapunovSpec& spec,
                                     const CascadeRealization& model, int samples,
                                     double radius, std::mt19937_64& rng) {
  if (samples < 1 || !(radius > 0.0)) throw InvalidParams("fit_quadratic_bounds");
  std::uniform_real_distribution<double> uniform(0.1 * radius, radius);
  QuadraticBounds b{std::numeric_limits<double>::infinity(), 0.0};
  for (int i = 0; i < samples; ++i) {
    const Vector x = random_state(model, uniform(rng), rng);
    const double ratio = spec.V(x) / model.QX.norm_sq(x);
    b.m1 = std::min(b.m1, ratio);
    b.m2 = std::max(b.m2, ratio);
  }
  return b;
}

}  // namespace fcascade
