#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "cheeger/errors.hpp"
#include "cheeger/lie.hpp"
#include "oracles.hpp"

using namespace cheeger;
using lie::LieGroupModel;

namespace {

std::vector<LieGroupModel> all_groups() {
  return {LieGroupModel::u1(), LieGroupModel::t2(), LieGroupModel::su2()};
}

// Left multiplication by a quaternion q on R^4 in the (w, x, y, z) order.
Matrix left_mult(const Eigen::Quaterniond& q) {
  Matrix m(4, 4);
  for (int c = 0; c < 4; ++c) {
    Eigen::Vector4d e = Eigen::Vector4d::Unit(c);
    const Eigen::Quaterniond p(e(0), e(1), e(2), e(3));
    const Eigen::Quaterniond r = q * p;
    m.col(c) << r.w(), r.x(), r.y(), r.z();
  }
  return m;
}

}  // namespace

TEST_CASE("exp of zero is the identity") {
  for (const auto& g : all_groups()) {
    const auto e = g.exp(Vector::Zero(g.dim()));
    CHECK(linalg::max_abs(e.matrix - Matrix::Identity(g.rep_dim(), g.rep_dim())) == 0.0);
  }
}

TEST_CASE("u(1) exp is a rotation") {
  const auto g = LieGroupModel::u1();
  const auto r = g.exp(Vector::Ones(1), std::numbers::pi / 2);
  Matrix expected(2, 2);
  expected << 0, -1, 1, 0;
  CHECK(linalg::max_abs(r.matrix - expected) < 1e-14);
}

TEST_CASE("su(2) exp has period 4 pi and is -I at 2 pi") {
  const auto g = LieGroupModel::su2();
  for (int i = 0; i < 3; ++i) {
    const auto half = g.exp(Vector::Unit(3, i), 2 * std::numbers::pi);
    CHECK(linalg::max_abs(half.matrix + Matrix::Identity(4, 4)) < 1e-13);
    const auto full = g.exp(Vector::Unit(3, i), 4 * std::numbers::pi);
    CHECK(linalg::max_abs(full.matrix - Matrix::Identity(4, 4)) < 1e-13);
  }
}

TEST_CASE("su(2) exp matches the quaternion exponential") {
  const auto g = LieGroupModel::su2();
  oracle::Gen gen(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector a = gen.vector(3, -3.0, 3.0);
    // exp(sum a_i L_i / 2) = left multiplication by exp of the pure quaternion a/2.
    const double half = a.norm() / 2;
    const Eigen::Vector3d axis = a.normalized();
    const Eigen::Quaterniond q(std::cos(half), std::sin(half) * axis(0), std::sin(half) * axis(1),
                               std::sin(half) * axis(2));
    CHECK(linalg::max_abs(g.exp(a).matrix - left_mult(q)) < 1e-13);
  }
}

TEST_CASE("bracket examples") {
  const auto u1 = LieGroupModel::u1();
  CHECK(u1.bracket(Vector::Ones(1), Vector::Ones(1)).norm() == 0.0);

  const auto su2 = LieGroupModel::su2();
  const Vector b = su2.bracket(Vector::Unit(3, 0), Vector::Unit(3, 1));
  CHECK(b(0) == doctest::Approx(0.0));
  CHECK(b(1) == doctest::Approx(0.0));
  CHECK(b(2) == doctest::Approx(1.0));

  oracle::Gen gen(3);
  const Vector a = gen.vector(3);
  CHECK(su2.bracket(a, a).norm() < 1e-15);
}

TEST_CASE("bracket agrees with the direct commutator and structure constants") {
  const auto g = LieGroupModel::su2();
  oracle::Gen gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector a = gen.vector(3);
    const Vector b = gen.vector(3);
    const Matrix A = g.algebra_element(a);
    const Matrix Bm = g.algebra_element(b);
    const Vector c = g.bracket(a, b);
    CHECK(linalg::max_abs(g.algebra_element(c) - (A * Bm - Bm * A)) < 1e-12);
    Vector via_constants = Vector::Zero(3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int m = 0; m < 3; ++m) via_constants(m) += a(i) * b(j) * g.structure_constant(i, j, m);
    CHECK((via_constants - c).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("catalogued groups satisfy the algebra invariants") {
  for (const auto& g : all_groups()) {
    CAPTURE(g.name());
    CHECK(g.ad_invariance_residual() < 1e-10);
    CHECK(g.antisymmetry_residual() < 1e-12);
    CHECK(g.jacobi_residual() < 1e-12);
    CHECK(linalg::max_abs(g.form() - Matrix::Identity(g.dim(), g.dim())) == 0.0);
  }
}

TEST_CASE("one-parameter subgroups: exp(ta) exp(sa) = exp((t+s)a)") {
  oracle::Gen gen(19);
  for (const auto& g : all_groups()) {
    for (int trial = 0; trial < 25; ++trial) {
      const Vector a = gen.unit(g.dim());
      const double t = gen.uniform(-2, 2);
      const double s = gen.uniform(-2, 2);
      const auto lhs = g.multiply(g.exp(a, t), g.exp(a, s));
      CHECK(linalg::max_abs(lhs.matrix - g.exp(a, t + s).matrix) < 1e-10);
      CHECK(g.membership_residual(lhs) < 1e-10);
    }
  }
}

TEST_CASE("random elements are group members and deterministic") {
  for (const auto& g : all_groups()) {
    CounterRng r1(5, streams::kGroupElements);
    CounterRng r2(5, streams::kGroupElements);
    for (int i = 0; i < 10; ++i) {
      const auto a = g.random_element(r1, 6.0);
      const auto b = g.random_element(r2, 6.0);
      CHECK(g.membership_residual(a) < 1e-10);
      CHECK(linalg::max_abs(a.matrix - b.matrix) == 0.0);
    }
  }
}

TEST_CASE("invalid bases are rejected") {
  Matrix k(2, 2);
  k << 0, -1, 1, 0;
  auto member = [](const Matrix&) { return 0.0; };
  SUBCASE("dependent generators") {
    CHECK_THROWS_AS(LieGroupModel("bad", {k, 2 * k}, Matrix::Identity(2, 2), member), NumericalError);
  }
  SUBCASE("form not SPD") {
    CHECK_THROWS_AS(LieGroupModel("bad", {k}, -Matrix::Identity(1, 1), member), NumericalError);
  }
  SUBCASE("not closed under the bracket") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 1) = 1;
    Matrix b = Matrix::Zero(2, 2);
    b(1, 0) = 1;
    CHECK_THROWS_AS(LieGroupModel("bad", {a, b}, Matrix::Identity(2, 2), member), NumericalError);
  }
}

TEST_CASE("project reports the residual of elements outside the span") {
  const auto g = LieGroupModel::u1();
  double residual = -1;
  CHECK_THROWS_AS(g.project(Matrix::Identity(2, 2), &residual), NumericalError);
  CHECK(residual > 0.5);
  const Vector c = g.project(g.algebra_element(Vector::Constant(1, 0.3)), &residual);
  CHECK(c(0) == doctest::Approx(0.3));
  CHECK(residual < 1e-15);
}
