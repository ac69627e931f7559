#include "fcascade/errors.hpp"
#include "fcascade/model.hpp"
#include "fcascade/models.hpp"

#include <doctest.h>

#include <random>

using namespace fcascade;

namespace {

CascadeRealization rotation_model() {
  Matrix S(2, 2);
  S << 0, 1, -1, 0;
  return make_linear_realization("rot", -Matrix::Identity(2, 2), Matrix::Identity(2, 1),
                                 Matrix::Identity(2, 2), S);
}

bool entry_passed(const ValidationReport& r, const std::string& name) {
  const CheckEntry* e = r.find(name);
  REQUIRE(e != nullptr);
  return e->passed;
}

}  // namespace

TEST_CASE("scalar model right-hand side") {
  const CascadeRealization m = scalar_cubic_model();
  const CascadeRate r = rhs(m, Vector::Constant(1, 2.0), Vector::Zero(1), Vector::Zero(1));
  CHECK(r.dx(0) == doctest::Approx(-10.0));
  CHECK(r.dz(0) == doctest::Approx(2.0));

  const CascadeRate zero = rhs(m, Vector::Zero(1), Vector::Zero(1), Vector::Zero(1));
  CHECK(zero.dx.norm() == 0.0);
  CHECK(zero.dz.norm() == 0.0);

  CHECK_THROWS_AS(rhs(m, Vector::Zero(2), Vector::Zero(1), Vector::Zero(1)),
                  DimensionMismatch);
}

TEST_CASE("validate accepts the reference models") {
  CHECK(validate(scalar_cubic_model()).all_passed());
  CHECK(validate(rotation_model()).all_passed());
}

TEST_CASE("validate flags a non-skew S") {
  const CascadeRealization m = make_linear_realization(
      "sym", -Matrix::Identity(2, 2), Matrix::Identity(2, 1), Matrix::Identity(2, 2),
      Matrix::Identity(2, 2));
  const ValidationReport r = validate(m);
  CHECK_FALSE(r.all_passed());
  CHECK_FALSE(entry_passed(r, "S skew-adjoint"));
}

TEST_CASE("validate flags an unstable or non-dissipative A") {
  Matrix A(2, 2);
  A << -1, 10, 0, -1;
  const CascadeRealization m = make_linear_realization(
      "shear", A, Matrix::Identity(2, 1), Matrix::Zero(1, 2), Matrix::Zero(1, 1));
  const ValidationReport r = validate(m);
  CHECK_FALSE(entry_passed(r, "A dissipative"));
  CHECK(entry_passed(r, "A exponentially stable"));
}

TEST_CASE("validate flags a wrong Jacobian") {
  CascadeRealization m = scalar_cubic_model();
  m.df = [](const Vector& x) { return Matrix(Matrix::Constant(1, 1, -x(0) * x(0))); };
  CHECK_FALSE(entry_passed(validate(m), "df matches finite differences"));
}

TEST_CASE("validate flags a nonzero f(0)") {
  CascadeRealization m = scalar_cubic_model();
  m.f = [](const Vector& x) { return Vector(Vector::Constant(1, 1e-3) - x.array().cube().matrix()); };
  CHECK_FALSE(entry_passed(validate(m), "f(0) = 0"));
}

TEST_CASE("linear models are linear in (x, z, u)") {
  const CascadeRealization m = rotation_model();
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  auto draw = [&](Eigen::Index k) {
    Vector v(k);
    for (auto& x : v) x = nd(rng);
    return v;
  };
  for (int k = 0; k < 20; ++k) {
    const Vector x1 = draw(2), x2 = draw(2), z1 = draw(2), z2 = draw(2);
    const Vector u1 = draw(1), u2 = draw(1);
    const double a = nd(rng);
    const CascadeRate lhs = rhs(m, x1 + a * x2, z1 + a * z2, u1 + a * u2);
    const CascadeRate r1 = rhs(m, x1, z1, u1);
    const CascadeRate r2 = rhs(m, x2, z2, u2);
    CHECK((lhs.dx - r1.dx - a * r2.dx).norm() <= 1e-12 * (1.0 + lhs.dx.norm()));
    CHECK((lhs.dz - r1.dz - a * r2.dz).norm() <= 1e-12 * (1.0 + lhs.dz.norm()));
  }
}

TEST_CASE("regulated right-hand side") {
  const CascadeRealization m = scalar_cubic_model();
  const CascadeRate r = rhs_regulated(m, Vector::Constant(1, 1.0), Vector::Zero(1),
                                      Vector::Zero(1), Vector::Constant(1, 0.25));
  CHECK(r.dz(0) == doctest::Approx(0.75));
  CHECK_THROWS_AS(rhs_regulated(rotation_model(), Vector::Zero(2), Vector::Zero(2),
                                Vector::Zero(1), Vector::Zero(2)),
                  NonzeroS);
}

TEST_CASE("ISS dissipation inequality for the scalar model") {
  const CascadeRealization m = scalar_cubic_model();
  const LyapunovSpec spec = scalar_cubic_lyapunov();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ud(-5.0, 5.0);
  for (int k = 0; k < 200; ++k) {
    const Vector x = Vector::Constant(1, ud(rng));
    const Vector u = Vector::Constant(1, ud(rng));
    const double dV = x.dot(rhs(m, x, Vector::Zero(1), u).dx);
    CHECK(dV <= spec.beta * u.squaredNorm() + 1e-12);
  }
}

TEST_CASE("random_state has the requested Gram norm") {
  Matrix qx(2, 2);
  qx << 3, 1, 1, 2;
  const CascadeRealization m = make_linear_realization(
      "w", -Matrix::Identity(2, 2), Matrix::Identity(2, 1), Matrix::Zero(1, 2),
      Matrix::Zero(1, 1), qx);
  std::mt19937_64 rng(8);
  for (double r : {0.1, 1.0, 7.0}) {
    CHECK(m.QX.norm(random_state(m, r, rng)) == doctest::Approx(r).epsilon(1e-12));
  }
}
