#include "fcascade/beam.hpp"
#include "fcascade/errors.hpp"
#include "fcascade/kernels.hpp"
#include "fcascade/models.hpp"

#include <doctest.h>

#include <atomic>
#include <random>
#include <stdexcept>

using namespace fcascade;

TEST_CASE("batch graph evaluation matches the serial reference") {
  QuadConfig q;
  q.step = 1e-2;
  const GraphMap graph(scalar_cubic_model(), q);
  std::vector<Vector> states;
  for (int k = -10; k <= 10; ++k) states.push_back(Vector::Constant(1, 0.2 * k));
  const auto par = eval_M_batch(graph, states);
  const auto ser = eval_M_batch_serial(graph, states);
  REQUIRE(par.size() == ser.size());
  for (std::size_t k = 0; k < par.size(); ++k) CHECK((par[k] - ser[k]).norm() == 0.0);
}

TEST_CASE("blocked dM matches the serial reference and the full solve") {
  BeamParams bp;
  bp.N = 8;
  const Beam beam(bp);
  QuadConfig q;
  q.step = 0.05;
  q.scheme = Scheme::ETD2;
  const GraphMap graph(beam.realization(), q);
  std::mt19937_64 rng(1);
  const Vector x = beam.random_smooth_state(0.5, rng);
  const Matrix full = graph.eval_dM(x);
  for (int block : {1, 3, 7, 64}) {
    CAPTURE(block);
    const Matrix par = eval_dM_blocked(graph, x, block);
    const Matrix ser = eval_dM_blocked_serial(graph, x, block);
    CHECK((par - ser).norm() == 0.0);
    CHECK((par - full).norm() <= 1e-12 * (1.0 + full.norm()));
  }
  CHECK_THROWS_AS(eval_dM_blocked(graph, x, 0), InvalidParams);
}

TEST_CASE("parallel_for runs every index and rethrows") {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);

  std::atomic<int> count{0};
  CHECK_THROWS_AS(parallel_for(20,
                               [&](std::size_t i) {
                                 ++count;
                                 if (i == 5) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  CHECK(count.load() == 20);

  std::vector<std::size_t> order;
  parallel_for(5, [&](std::size_t i) { order.push_back(i); }, true);
  CHECK(order == std::vector<std::size_t>{0, 1, 2, 3, 4});
}
