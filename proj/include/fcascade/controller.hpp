#pragma once

// Forwarding feedback u = g(x)* dM(x)* [z - M(x)] and its integral-action use.

#include "fcascade/graph.hpp"

#include <memory>
#include <optional>
#include <string_view>

namespace fcascade {

enum class ControllerMode {
  FullNonlinear,  // M and dM from the quadrature engine
  LinearM0,       // M(x) <- M0 x, dM(x) <- M0
};

ControllerMode parse_controller_mode(std::string_view name);
std::string to_string(ControllerMode mode);

struct ControllerConfig {
  ControllerMode mode = ControllerMode::FullNonlinear;
  double sample_period = 0.05;
  std::optional<Vector> y_ref;

  void check() const;
};

/// What one feedback evaluation produced; the graph values are reused by
/// the simulator's monitors.
struct FeedbackSample {
  Vector u;
  Vector M;   // the graph value used by the law (M0 x in linear mode)
  Matrix dMg; // dM(x) g(x), m x r
};

class ForwardingController {
 public:
  ForwardingController(std::shared_ptr<const GraphMap> graph, ControllerConfig cfg);

  const GraphMap& graph() const { return *graph_; }
  const ControllerConfig& config() const { return cfg_; }

  /// u = QU^-1 (dM(x) g(x))^T QY (z - M(x)); only the r directions of g(x)
  /// are propagated through the variational flow.
  FeedbackSample sample(const Vector& x, const Vector& z) const;

  Vector feedback(const Vector& x, const Vector& z) const { return sample(x, z).u; }

  /// Same law through the general adjoint path: full dM(x), then
  /// g(x)* dM(x)* with weighted_adjoint. Reference for the fast path.
  Vector feedback_via_adjoints(const Vector& x, const Vector& z) const;

  /// Same law for the integral-action cascade. Requires S = 0 and y_ref.
  Vector regulated_feedback(const Vector& x, const Vector& z) const;

 private:
  std::shared_ptr<const GraphMap> graph_;
  ControllerConfig cfg_;
};

struct NonResonance {
  bool ok = false;
  double lambda = 0.0;     // sigma_min^2, the coercivity constant at x = 0
  double sigma_min = 0.0;
  Matrix m0g;              // M0 g(0)
};

/// Surjectivity of M0 g(0) onto Y with respect to the Gram norms.
NonResonance check_non_resonance(const GraphMap& graph);

}  // namespace fcascade
