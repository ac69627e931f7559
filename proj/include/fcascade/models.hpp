#pragma once

// Small reference realizations with closed-form graph maps.

#include "fcascade/model.hpp"
#include "fcascade/sim.hpp"

namespace fcascade {

/// x' = -x - x^3 + u, z' = x. Its graph map is M(x) = -atan(x).
CascadeRealization scalar_cubic_model();

/// V(x) = x^2 / 2 with ISS gain 1/2 for the scalar cubic model.
LyapunovSpec scalar_cubic_lyapunov();

/// V(x) = ||x||_X^2 / 2 with a user-supplied gain.
LyapunovSpec quadratic_lyapunov(const CascadeRealization& model, double beta);

}  // namespace fcascade
