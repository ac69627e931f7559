#pragma once

// Batch evaluation kernels. Each has an OpenMP version and a serial
// reference that must agree with it bit for bit.

#include "fcascade/graph.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace fcascade {

std::vector<Vector> eval_M_batch_serial(const GraphMap& graph,
                                        const std::vector<Vector>& states);
std::vector<Vector> eval_M_batch(const GraphMap& graph,
                                 const std::vector<Vector>& states);

/// Full dM(x), n variational directions split into column blocks of width
/// `block`; every block replays the same base trajectory.
Matrix eval_dM_blocked_serial(const GraphMap& graph, const Vector& x, int block);
Matrix eval_dM_blocked(const GraphMap& graph, const Vector& x, int block);

/// Runs fn(0) .. fn(count - 1), in parallel unless `serial`. The first
/// exception thrown by any task is rethrown after all tasks finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  bool serial = false);

}  // namespace fcascade
