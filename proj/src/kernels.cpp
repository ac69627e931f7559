#include "fcascade/kernels.hpp"

#include "fcascade/errors.hpp"

#include <exception>
#include <mutex>

namespace fcascade {

namespace {

void check_block(int block) {
  if (block < 1) throw InvalidParams("column block width must be positive");
}

}  // namespace

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  bool serial) {
  std::exception_ptr first;
  std::mutex guard;
  const long n = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic) if (!serial)
  for (long i = 0; i < n; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

std::vector<Vector> eval_M_batch_serial(const GraphMap& graph,
                                        const std::vector<Vector>& states) {
  std::vector<Vector> out;
  out.reserve(states.size());
  for (const auto& x : states) out.push_back(graph.eval_M(x));
  return out;
}

std::vector<Vector> eval_M_batch(const GraphMap& graph,
                                 const std::vector<Vector>& states) {
  std::vector<Vector> out(states.size());
  parallel_for(states.size(), [&](std::size_t i) { out[i] = graph.eval_M(states[i]); });
  return out;
}

Matrix eval_dM_blocked_serial(const GraphMap& graph, const Vector& x, int block) {
  check_block(block);
  const Eigen::Index n = graph.model().n();
  Matrix out(graph.model().m(), n);
  for (Eigen::Index c = 0; c < n; c += block) {
    const Eigen::Index w = std::min<Eigen::Index>(block, n - c);
    out.middleCols(c, w) =
        graph.evaluate(x, Matrix::Identity(n, n).middleCols(c, w)).dM;
  }
  return out;
}

Matrix eval_dM_blocked(const GraphMap& graph, const Vector& x, int block) {
  check_block(block);
  const Eigen::Index n = graph.model().n();
  const std::size_t blocks = static_cast<std::size_t>((n + block - 1) / block);
  Matrix out(graph.model().m(), n);
  parallel_for(blocks, [&](std::size_t b) {
    const Eigen::Index c = static_cast<Eigen::Index>(b) * block;
    const Eigen::Index w = std::min<Eigen::Index>(block, n - c);
    const Matrix cols = graph.evaluate(x, Matrix::Identity(n, n).middleCols(c, w)).dM;
    out.middleCols(c, w) = cols;  // disjoint column ranges
  });
  return out;
}

}  // namespace fcascade
