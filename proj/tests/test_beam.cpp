#include "fcascade/beam.hpp"
#include "fcascade/controller.hpp"
#include "fcascade/errors.hpp"
#include "fcascade/graph.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

using namespace fcascade;

namespace {

Beam make_beam(int N, double lambda = 1.0) {
  BeamParams p;
  p.N = N;
  p.lambda = lambda;
  return Beam(p);
}

Vector random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vector v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

std::vector<double> smallest_eigen_magnitudes(const Beam& beam, int count) {
  Eigen::EigenSolver<Matrix> es(beam.realization().A, false);
  std::vector<std::complex<double>> ev(es.eigenvalues().begin(), es.eigenvalues().end());
  // One representative per conjugate pair.
  std::vector<double> mags;
  for (const auto& e : ev) {
    if (e.imag() >= 0.0) mags.push_back(std::abs(e));
  }
  std::sort(mags.begin(), mags.end());
  mags.resize(static_cast<std::size_t>(count));
  return mags;
}

}  // namespace

TEST_CASE("beam parameters are validated") {
  BeamParams p;
  p.N = 4;
  CHECK_THROWS_AS(Beam{p}, InvalidParams);
  p = BeamParams{};
  p.lambda = 0.0;
  CHECK_THROWS_AS(Beam{p}, InvalidParams);
  p = BeamParams{};
  p.L = -1.0;
  CHECK_THROWS_AS(Beam{p}, InvalidParams);
}

TEST_CASE("beam realization passes structural validation") {
  const Beam beam = make_beam(16);
  const ValidationReport r = validate(beam.realization());
  for (const CheckEntry& e : r.entries) {
    CAPTURE(e.name);
    CHECK(e.passed);
  }
}

TEST_CASE("energy examples") {
  const Beam beam = make_beam(16);
  Vector x = Vector::Zero(beam.n());
  CHECK(beam.energy(x) == 0.0);
  x(beam.omega_index()) = 1.0;
  CHECK(beam.energy(x) == doctest::Approx(0.5));
  std::mt19937_64 rng(1);
  const Vector y = random_vector(beam.n(), rng);
  CHECK(beam.strict_energy(y, 0.0) == doctest::Approx(beam.energy(y)).epsilon(1e-15));
  CHECK(beam.strict_energy(y, 1e-9) == doctest::Approx(beam.energy(y)).epsilon(1e-6));
}

TEST_CASE("pack and unpack round trip") {
  const Beam beam = make_beam(8);
  std::mt19937_64 rng(2);
  const Vector x = random_vector(beam.n(), rng);
  CHECK((beam.pack(beam.unpack(x)) - x).norm() == 0.0);
  CHECK((beam.from_original(beam.to_original(x)) - x).norm() <= 1e-14 * x.norm());
}

TEST_CASE("coordinate change examples") {
  BeamParams p;
  p.N = 16;
  p.theta_ref = 0.4;
  const Beam beam(p);
  const OriginalState zero = beam.to_original(Vector::Zero(beam.n()));
  CHECK(zero.w.norm() == 0.0);
  CHECK(zero.theta == doctest::Approx(0.4));

  const double u = 0.3;
  const OriginalState ss = beam.to_original(beam.steady_state(u));
  CHECK(ss.w.norm() <= 1e-10);
  CHECK(ss.theta == doctest::Approx(u + 0.4).epsilon(1e-10));

  const OriginalState rest = beam.to_original(beam.rest_state(0.4));
  CHECK(rest.theta == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(rest.w.norm() <= 1e-15);
}

TEST_CASE("torque examples") {
  const Beam beam = make_beam(16);
  Vector x = Vector::Zero(beam.n());
  CHECK(beam.total_torque(x, 0.0) == 0.0);
  x(beam.omega_index()) = 1.0;
  CHECK(beam.total_torque(x, 0.0) == doctest::Approx(-1.0));
}

TEST_CASE("exact linear energy balance") {
  for (int N : {8, 32}) {
    for (double lambda : {1.0, 0.1}) {
      const Beam beam = make_beam(N, lambda);
      const auto& m = beam.realization();
      std::mt19937_64 rng(3);
      std::normal_distribution<double> nd;
      for (int k = 0; k < 100; ++k) {
        const Vector x = random_vector(beam.n(), rng);
        const double u = nd(rng);
        const Vector ax = m.A * x + m.g(x).col(0) * u;
        const double lhs = x.dot(m.QX.matrix() * ax);
        const BeamState s = beam.unpack(x);
        const double rhs = -lambda * s.p.dot(beam.mass_weights().cwiseProduct(s.p)) -
                           s.omega * s.omega + u * s.omega;
        // Rounding scale: the stiff contributions cancel in the sum.
        const Vector qx = m.QX.matrix() * x;
        const double scale = qx.cwiseAbs().dot(ax.cwiseAbs());
        CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
        const Vector f = m.f(x);
        CHECK(std::abs(beam.dissipation(x, u) - lhs - qx.dot(f)) <=
              1e-12 * (scale + qx.cwiseAbs().dot(f.cwiseAbs())));
      }
    }
  }
}

TEST_CASE("exact nonlinear cancellation") {
  const Beam beam = make_beam(32);
  const auto& m = beam.realization();
  std::mt19937_64 rng(4);
  for (int k = 0; k < 100; ++k) {
    const Vector x = random_vector(beam.n(), rng);
    const Vector f = m.f(x);
    const Vector qf = m.QX.matrix() * f;
    const double scale = x.cwiseAbs().dot(qf.cwiseAbs());
    CHECK(std::abs(x.dot(qf)) <= 1e-12 * scale);
  }
}

TEST_CASE("steady-state linear profile is exact") {
  for (int N : {8, 16, 32, 64}) {
    const Beam beam = make_beam(N);
    const double u = 0.7;
    const BeamState ss = beam.unpack(beam.steady_state(u));
    CHECK((ss.v - u * beam.xi()).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(std::abs(ss.phi - u) <= 1e-10);
    CHECK(ss.p.cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(std::abs(ss.omega) <= 1e-10);

    BeamState lin;
    lin.v = u * beam.xi();
    lin.phi = u;
    lin.p = Vector::Zero(N);
    const auto& m = beam.realization();
    const Vector x = beam.pack(lin);
    // Relative to the rounding scale |A| |x| of the stiff product.
    const Vector residual = m.A * x + m.g(x).col(0) * u;
    const Vector scale = m.A.cwiseAbs() * x.cwiseAbs();
    CHECK(residual.cwiseAbs().maxCoeff() <= 1e-10 * scale.maxCoeff());
  }
}

TEST_CASE("strictified functional is positive definite below eps_max") {
  const Beam beam = make_beam(16);
  const double eps_max = beam.eps_max();
  REQUIRE(eps_max > 0.0);
  const Matrix q = 0.5 * beam.realization().QX.matrix();
  auto min_eig = [&](double eps) {
    const Matrix form = q + eps * beam.cross_form();
    return Eigen::SelfAdjointEigenSolver<Matrix>(form, Eigen::EigenvaluesOnly)
        .eigenvalues()
        .minCoeff();
  };
  CHECK(min_eig(0.99 * eps_max) > 0.0);
  CHECK(min_eig(1.01 * eps_max) < 0.0);
  CHECK(beam.default_eps() <= 0.5 * eps_max);
  CHECK(beam.default_eps() > 0.0);
}

TEST_CASE("grid convergence of the low eigenvalues") {
  const auto e16 = smallest_eigen_magnitudes(make_beam(16), 5);
  const auto e32 = smallest_eigen_magnitudes(make_beam(32), 5);
  const auto e64 = smallest_eigen_magnitudes(make_beam(64), 5);
  for (std::size_t k = 0; k < 5; ++k) {
    CAPTURE(k);
    const double order = std::log2(std::abs(e16[k] - e32[k]) / std::abs(e32[k] - e64[k]));
    CHECK(order >= 1.8);
  }
}

TEST_CASE("non-resonance gain is close to one on every grid") {
  for (int N : {16, 32, 64}) {
    const Beam beam = make_beam(N);
    const GraphMap graph(beam.realization(), QuadConfig{});
    const NonResonance nr = check_non_resonance(graph);
    CHECK(nr.ok);
    CHECK(std::abs(std::abs(nr.m0g(0, 0)) - 1.0) <= 5e-2);
  }
}

TEST_CASE("random smooth states hit the target energy") {
  const Beam beam = make_beam(32);
  std::mt19937_64 rng(5);
  for (double target : {0.1, 1.0, 5.0}) {
    const Vector x = beam.random_smooth_state(target, rng);
    CHECK(beam.energy(x) == doctest::Approx(target).epsilon(1e-12));
  }
}

TEST_CASE("probe deflection") {
  const Beam beam = make_beam(10);
  CHECK(beam.probe_stations().size() == 5);
  CHECK(beam.probe_stations().back() == doctest::Approx(1.0));
  for (double w : beam.probe_deflection(beam.steady_state(0.5))) {
    CHECK(std::abs(w) <= 1e-10);
  }
  BeamState s = beam.unpack(Vector::Zero(beam.n()));
  s.v = beam.xi().array().square();
  const auto w = beam.probe_deflection(beam.pack(s));
  CHECK(w[1] == doctest::Approx(0.16));
  CHECK(w[4] == doctest::Approx(1.0));
}
