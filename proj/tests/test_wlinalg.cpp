#include "fcascade/errors.hpp"
#include "fcascade/wlinalg.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace fcascade;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

Vector vec(std::initializer_list<double> vals) {
  Vector v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v(i++) = x;
  return v;
}

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = nd(rng);
  return m;
}

Matrix random_spd(Eigen::Index n, std::mt19937_64& rng) {
  const Matrix g = random_matrix(n, n, rng);
  return g * g.transpose() + Matrix::Identity(n, n);
}

}  // namespace

TEST_CASE("solve_linear small systems") {
  const Vector x = solve_linear(mat({{2, 1}, {1, 3}}), vec({1, 0}));
  CHECK(x(0) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(x(1) == doctest::Approx(-0.2).epsilon(1e-14));

  const Vector y = solve_linear(mat({{0, 1}, {1, 0}}), vec({3, 4}));
  CHECK(y(0) == doctest::Approx(4.0));
  CHECK(y(1) == doctest::Approx(3.0));

  CHECK_THROWS_AS(solve_linear(mat({{1, 2}, {2, 4}}), vec({1, 1})), SingularMatrix);
}

TEST_CASE("solve_linear residual on random well-conditioned systems") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 50; ++k) {
    const Matrix a = random_spd(12, rng);
    const Vector b = random_matrix(12, 1, rng);
    const Vector x = solve_linear(a, b);
    CHECK((a * x - b).norm() <= 1e-10 * (1.0 + b.norm()));
  }
}

TEST_CASE("solve_sylvester closed forms") {
  SUBCASE("scalar") {
    const Matrix m0 = solve_sylvester(mat({{-1}}), mat({{0}}), mat({{1}}));
    CHECK(m0(0, 0) == doctest::Approx(-1.0).epsilon(1e-14));
  }
  SUBCASE("identity A with zero S") {
    const Matrix m0 = solve_sylvester(-Matrix::Identity(2, 2), mat({{0}}), mat({{1, 2}}));
    CHECK(m0(0, 0) == doctest::Approx(-1.0));
    CHECK(m0(0, 1) == doctest::Approx(-2.0));
  }
  SUBCASE("rotation S") {
    const Matrix m0 = solve_sylvester(-Matrix::Identity(2, 2), mat({{0, 1}, {-1, 0}}),
                                      Matrix::Identity(2, 2));
    const Matrix expected = -0.5 * mat({{1, -1}, {1, 1}});
    CHECK((m0 - expected).norm() <= 1e-12);
  }
}

TEST_CASE("solve_sylvester residual on random stable instances") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> nd(1, 30);
  std::uniform_int_distribution<int> md(1, 4);
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index n = nd(rng);
    const Eigen::Index m = md(rng);
    // A = -(G G^T + I) is Hurwitz, S skew has imaginary spectrum.
    const Matrix a = -random_spd(n, rng);
    const Matrix g = random_matrix(m, m, rng);
    const Matrix s = g - g.transpose();
    const Matrix c = random_matrix(m, n, rng);
    const Matrix m0 = solve_sylvester(a, s, c);
    const double scale = m0.norm() * (a.norm() + s.norm()) + c.norm();
    CHECK(sylvester_residual(m0, a, s, c) <= 1e-10 * scale);
  }
}

TEST_CASE("solve_sylvester errors") {
  CHECK_THROWS_AS(solve_sylvester(Matrix::Zero(1, 1), Matrix::Zero(1, 1), mat({{1}})),
                  SpectraOverlap);
  CHECK_THROWS_AS(solve_sylvester(-Matrix::Identity(101, 101), Matrix::Zero(100, 100),
                                  Matrix::Zero(100, 101)),
                  TooLarge);
  CHECK_THROWS_AS(solve_sylvester(-Matrix::Identity(2, 2), Matrix::Zero(1, 1),
                                  Matrix::Zero(1, 3)),
                  DimensionMismatch);
}

TEST_CASE("GramForm rejects indefinite matrices") {
  CHECK_THROWS_AS(GramForm(mat({{1, 0}, {0, -1}})), InvalidParams);
  CHECK_THROWS_AS(GramForm(mat({{1, 0, 0}, {0, 1, 0}})), InvalidParams);
  const GramForm q(mat({{2, 1}, {1, 2}}));
  CHECK(q.min_eigenvalue() == doctest::Approx(1.0));
  CHECK(q.norm_sq(vec({1, 0})) == doctest::Approx(2.0));
  CHECK((q.sqrt() * q.sqrt() - q.matrix()).norm() <= 1e-13);
  CHECK((q.inv_sqrt() * q.sqrt() - Matrix::Identity(2, 2)).norm() <= 1e-13);
}

TEST_CASE("weighted_adjoint examples") {
  const Matrix l = mat({{1, 0}});
  const GramForm qdom(mat({{2, 0}, {0, 1}}));
  const GramForm qcod(mat({{0.5}}));
  const Matrix adj = weighted_adjoint(l, qdom, qcod);
  REQUIRE(adj.rows() == 2);
  REQUIRE(adj.cols() == 1);
  CHECK(adj(0, 0) == doctest::Approx(0.25));
  CHECK(adj(1, 0) == doctest::Approx(0.0));

  const Matrix id_adj = weighted_adjoint(mat({{1, 2}, {3, 4}}), GramForm::identity(2),
                                         GramForm::identity(2));
  CHECK((id_adj - mat({{1, 3}, {2, 4}})).norm() == doctest::Approx(0.0));
}

TEST_CASE("weighted_adjoint pairing identity") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 100; ++k) {
    const GramForm qdom(random_spd(5, rng));
    const GramForm qcod(random_spd(3, rng));
    const Matrix l = random_matrix(3, 5, rng);
    const Matrix adj = weighted_adjoint(l, qdom, qcod);
    const Vector x = random_matrix(5, 1, rng);
    const Vector y = random_matrix(3, 1, rng);
    const double lhs = qcod.inner(l * x, y);
    const double rhs = qdom.inner(x, adj * y);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * qcod.norm(l * x) * qcod.norm(y) * 10.0 +
                                     1e-12 * std::abs(lhs));
  }
}

TEST_CASE("matrix_exp_action") {
  const Vector y = vec({1, 0});
  const Vector same = matrix_exp_action(Matrix::Zero(2, 2), 3.7, y);
  CHECK((same - y).norm() == 0.0);

  const Vector rot = matrix_exp_action(mat({{0, 1}, {-1, 0}}), std::numbers::pi / 2, y);
  CHECK(rot(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rot(1) == doctest::Approx(-1.0).epsilon(1e-12));

  CHECK_THROWS_AS(matrix_exp_action(Matrix::Zero(51, 51), 1.0, Vector::Zero(51)), TooLarge);
}

TEST_CASE("matrix_exp_action agrees with a truncated series") {
  std::mt19937_64 rng(11);
  const Matrix s = 0.3 * random_matrix(4, 4, rng);
  const Vector y = random_matrix(4, 1, rng);
  Vector series = y;
  Vector term = y;
  for (int k = 1; k < 40; ++k) {
    term = s * term / static_cast<double>(k);
    series += term;
  }
  CHECK((matrix_exp_action(s, 1.0, y) - series).norm() <= 1e-12 * series.norm());
}

TEST_CASE("skew generators preserve the Euclidean norm") {
  std::mt19937_64 rng(5);
  const Matrix g = random_matrix(4, 4, rng);
  const Matrix s = g - g.transpose();
  const Vector y = random_matrix(4, 1, rng);
  for (double t = 0.0; t <= 100.0; t += 12.5) {
    CHECK(std::abs(matrix_exp_action(s, t, y).norm() - y.norm()) <= 1e-10 * y.norm());
  }
}

TEST_CASE("surjectivity_margin") {
  const GramForm id1 = GramForm::identity(1);
  const SurjectivityMargin a = surjectivity_margin(mat({{1, 0}}), id1);
  CHECK(a.surjective);
  CHECK(a.sigma_min == doctest::Approx(1.0));

  const SurjectivityMargin b = surjectivity_margin(mat({{0, 0}}), id1);
  CHECK_FALSE(b.surjective);
  CHECK(b.sigma_min == doctest::Approx(0.0));

  const SurjectivityMargin c =
      surjectivity_margin(mat({{1, 0}, {0, 1}, {1, 1}}).transpose(), GramForm::identity(2));
  CHECK(c.surjective);
}

TEST_CASE("surjectivity_margin is a coercivity constant for the adjoint") {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 20; ++k) {
    const GramForm qcod(random_spd(2, rng));
    const Matrix l = random_matrix(2, 5, rng);
    const SurjectivityMargin sm = surjectivity_margin(l, qcod);
    const Matrix adj = weighted_adjoint(l, GramForm::identity(5), qcod);
    for (int j = 0; j < 50; ++j) {
      const Vector y = random_matrix(2, 1, rng);
      const double lhs = (adj * y).squaredNorm();
      CHECK(lhs >= sm.sigma_min * sm.sigma_min * qcod.norm_sq(y) * (1.0 - 1e-10));
    }
  }
}

TEST_CASE("spectral and dissipativity margins") {
  CHECK(spectral_abscissa(mat({{-1, 5}, {0, -2}})) == doctest::Approx(-1.0));
  CHECK(dissipativity_margin(mat({{0, 1}, {-1, 0}}), GramForm::identity(2)) ==
        doctest::Approx(0.0).epsilon(1e-14));
  CHECK(dissipativity_margin(-Matrix::Identity(3, 3), GramForm::identity(3)) ==
        doctest::Approx(-1.0));
}

TEST_CASE("expm of a nilpotent and a diagonal matrix") {
  const Matrix e = expm(mat({{0, 1}, {0, 0}}));
  CHECK((e - mat({{1, 1}, {0, 1}})).norm() <= 1e-14);
  const Matrix d = expm(mat({{1, 0}, {0, -2}}));
  CHECK(d(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK(d(1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
}
