#include "fcascade/controller.hpp"

#include "fcascade/errors.hpp"

namespace fcascade {

ControllerMode parse_controller_mode(std::string_view name) {
  if (name == "full" || name == "full-nonlinear") return ControllerMode::FullNonlinear;
  if (name == "linear" || name == "linear-M0") return ControllerMode::LinearM0;
  throw InvalidParams("unknown controller mode '" + std::string(name) +
                      "' (expected full or linear)");
}

std::string to_string(ControllerMode mode) {
  return mode == ControllerMode::FullNonlinear ? "full" : "linear";
}

void ControllerConfig::check() const {
  if (!(sample_period > 0.0)) throw InvalidParams("sample_period must be positive");
}

ForwardingController::ForwardingController(std::shared_ptr<const GraphMap> graph,
                                           ControllerConfig cfg)
    : graph_(std::move(graph)), cfg_(std::move(cfg)) {
  cfg_.check();
  if (cfg_.y_ref && cfg_.y_ref->size() != graph_->model().m()) {
    throw DimensionMismatch("y_ref has the wrong dimension");
  }
}

FeedbackSample ForwardingController::sample(const Vector& x, const Vector& z) const {
  const auto& model = graph_->model();
  if (x.size() != model.n() || z.size() != model.m()) {
    throw DimensionMismatch("feedback: state sizes");
  }
  const Matrix gx = model.g(x);
  FeedbackSample out;
  if (cfg_.mode == ControllerMode::LinearM0) {
    out.M = graph_->M0() * x;
    out.dMg = graph_->M0() * gx;
  } else {
    GraphEvaluation ev = graph_->evaluate(x, gx);
    out.M = std::move(ev.M);
    out.dMg = std::move(ev.dM);
  }
  // g* dM* = QU^-1 g^T QX QX^-1 dM^T QY: the QX factors cancel.
  const Vector weighted_defect = model.QY.matrix() * (z - out.M);
  out.u = model.QU.solve(out.dMg.transpose() * weighted_defect);
  return out;
}

Vector ForwardingController::feedback_via_adjoints(const Vector& x,
                                                   const Vector& z) const {
  const auto& model = graph_->model();
  Vector mx;
  Matrix dm;
  if (cfg_.mode == ControllerMode::LinearM0) {
    mx = graph_->M0() * x;
    dm = graph_->M0();
  } else {
    GraphEvaluation ev = graph_->evaluate(x, Matrix::Identity(model.n(), model.n()));
    mx = std::move(ev.M);
    dm = std::move(ev.dM);
  }
  const Matrix g_star = weighted_adjoint(model.g(x), model.QU, model.QX);
  const Matrix dm_star = weighted_adjoint(dm, model.QX, model.QY);
  return g_star * (dm_star * (z - mx));
}

Vector ForwardingController::regulated_feedback(const Vector& x,
                                                const Vector& z) const {
  require_zero_s(graph_->model());
  if (!cfg_.y_ref) throw InvalidParams("regulated feedback needs y_ref");
  return feedback(x, z);
}

NonResonance check_non_resonance(const GraphMap& graph) {
  const auto& model = graph.model();
  NonResonance out;
  out.m0g = graph.M0() * model.g(Vector::Zero(model.n()));
  const SurjectivityMargin margin = surjectivity_margin(out.m0g, model.QY, model.QU);
  out.ok = margin.surjective;
  out.sigma_min = margin.sigma_min;
  out.lambda = margin.sigma_min * margin.sigma_min;
  return out;
}

}  // namespace fcascade
