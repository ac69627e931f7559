#include "fcascade/beam.hpp"
#include "fcascade/kernels.hpp"
#include "fcascade/models.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace fcascade;

namespace {

std::vector<Vector> scalar_states() {
  std::vector<Vector> out;
  for (int k = 0; k < 32; ++k) out.push_back(Vector::Constant(1, -2.0 + 0.125 * k));
  return out;
}

const GraphMap& scalar_graph() {
  static const GraphMap graph = [] {
    QuadConfig q;
    q.step = 1e-3;
    return GraphMap(scalar_cubic_model(), q);
  }();
  return graph;
}

const Beam& beam() {
  static const Beam b(BeamParams{});
  return b;
}

const GraphMap& beam_graph() {
  static const GraphMap graph = [] {
    QuadConfig q;
    q.step = 0.05;
    q.scheme = Scheme::ETD2;
    return GraphMap(beam().realization(), q);
  }();
  return graph;
}

void BM_EvalMBatchSerial(benchmark::State& state) {
  const auto states = scalar_states();
  for (auto _ : state) benchmark::DoNotOptimize(eval_M_batch_serial(scalar_graph(), states));
}

void BM_EvalMBatch(benchmark::State& state) {
  const auto states = scalar_states();
  for (auto _ : state) benchmark::DoNotOptimize(eval_M_batch(scalar_graph(), states));
}

void BM_EvalDMBlockedSerial(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const Vector x = beam().random_smooth_state(1.0, rng);
  const int block = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eval_dM_blocked_serial(beam_graph(), x, block));
}

void BM_EvalDMBlocked(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const Vector x = beam().random_smooth_state(1.0, rng);
  const int block = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eval_dM_blocked(beam_graph(), x, block));
}

}  // namespace

BENCHMARK(BM_EvalMBatchSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvalMBatch)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvalDMBlockedSerial)->Arg(11)->Arg(66)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvalDMBlocked)->Arg(11)->Arg(66)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
