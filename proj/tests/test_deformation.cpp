#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cheeger/deformation.hpp"
#include "cheeger/errors.hpp"
#include "cheeger/scenarios.hpp"
#include "oracles.hpp"

using namespace cheeger;
using namespace cheeger::deformation;

namespace {

constexpr double kPi = std::numbers::pi;

struct At {
  std::shared_ptr<const manifold::Scenario> sc;
  Point x;
  KillingData d;
  Matrix g;

  At(std::shared_ptr<const manifold::Scenario> s, Point p)
      : sc(std::move(s)), x(std::move(p)), d(manifold::killing_data(*sc, x)), g(sc->metric(x)) {}
};

std::vector<std::shared_ptr<const manifold::Scenario>> all_scenarios() {
  std::vector<std::shared_ptr<const manifold::Scenario>> out;
  for (const auto& info : scenarios::catalog()) out.push_back(scenarios::make_scenario(info.id));
  out.push_back(scenarios::make_s3_hopf(0.6));
  out.push_back(scenarios::make_flat_t2(1.5, true));
  return out;
}

Point random_point(const manifold::Chart& region, oracle::Gen& gen) {
  Point x(region.dim());
  for (int i = 0; i < region.dim(); ++i) {
    x(i) = gen.uniform(region.intervals()[i].lo, region.intervals()[i].hi);
  }
  return x;
}

// Unit Hopf vector at x.
Vector hopf_unit(const At& a) {
  const Vector k = a.d.K.col(0);
  return k / std::sqrt(k.dot(a.g * k));
}

}  // namespace

TEST_CASE("deformation parameter validation") {
  CHECK(DeformationParams::make(0.5).l == 0.5);
  CHECK(DeformationParams::make(1e-7).ill_conditioned());
  CHECK_FALSE(DeformationParams::make(1e-3).ill_conditioned());
  CHECK_THROWS_AS(DeformationParams::make(0.0), std::invalid_argument);
  CHECK_THROWS_AS(DeformationParams::make(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(DeformationParams::make(INFINITY), std::invalid_argument);
}

TEST_CASE("kappa examples") {
  const At band(scenarios::make_s2_band(), Point{{0.2, kPi / 4}});
  CHECK(kappa(band.d, band.g, Vector::Unit(2, 0))(0) == doctest::Approx(0.5));
  CHECK(kappa(band.d, band.g, Vector::Unit(2, 1)).norm() == 0.0);

  const At hopf(scenarios::make_s3_hopf(), Point{{0.7, 0.1, 0.4}});
  CHECK(kappa(hopf.d, hopf.g, hopf_unit(hopf))(0) == doctest::Approx(1.0));
}

TEST_CASE("vertical space basis") {
  const At band(scenarios::make_s2_band(), Point{{0.0, 1.0}});
  const auto vb = vertical_space_basis(band.d);
  REQUIRE(vb.pairs.size() == 1);
  CHECK(vb.pairs[0].algebra(0) == -1.0);
  CHECK(vb.pairs[0].tangent(0) == 1.0);
  CHECK(vb.pairs[0].tangent(1) == 0.0);

  const At torus(scenarios::make_flat_t2(), Point{{1.0, 1.0}});
  const auto tb = vertical_space_basis(torus.d);
  REQUIRE(tb.pairs.size() == 1);
  CHECK(tb.pairs[0].tangent(0) == 1.0);

  const At su2(scenarios::make_su2_s2(), Point{{0.5, 1.2}});
  const auto sb = vertical_space_basis(su2.d);
  REQUIRE(sb.pairs.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK((sb.pairs[i].tangent + su2.d.K * sb.pairs[i].algebra).norm() == 0.0);
  }
}

TEST_CASE("Cheeger reparametrization examples") {
  const At band(scenarios::make_s2_band(), Point{{0.0, kPi / 4}});
  const Vector c = cheeger_reparam(band.d, band.g, 1.0, Vector::Unit(2, 0));
  CHECK(c(0) == doctest::Approx(1.5));
  CHECK(c(1) == 0.0);
  const Vector h = cheeger_reparam(band.d, band.g, 0.3, Vector::Unit(2, 1));
  CHECK((h - Vector::Unit(2, 1)).norm() == 0.0);

  const At hopf(scenarios::make_s3_hopf(), Point{{0.6, 0.0, 1.0}});
  const Vector v = hopf_unit(hopf);
  CHECK((cheeger_reparam(hopf.d, hopf.g, 0.1, v) - 101.0 * v).norm() < 1e-12);
  CHECK(linalg::max_abs(cheeger_reparam_matrix(hopf.d, hopf.g, 0.1) * v - 101.0 * v) < 1e-12);
}

TEST_CASE("g_l spot values") {
  const At band(scenarios::make_s2_band(), Point{{0.0, kPi / 4}});
  const Matrix gl = cheeger_metric(band.d, band.g, 1.0);
  CHECK(gl(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  CHECK(gl(1, 1) == doctest::Approx(1.0));
  CHECK(gl(0, 1) == doctest::Approx(0.0));

  const At hopf(scenarios::make_s3_hopf(), Point{{0.9, 0.0, 0.0}});
  const Vector v = hopf_unit(hopf);
  CHECK(v.dot(cheeger_metric(hopf.d, hopf.g, 1.0) * v) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("rescaled and limit spot values") {
  const At band(scenarios::make_s2_band(), Point{{0.0, kPi / 4}});
  CHECK(rescaled_metric(band.d, band.g, 0.1)(0, 0) ==
        doctest::Approx(0.5 / 0.51).epsilon(1e-13));
  const Matrix lim = limit_metric(band.d, band.g);
  CHECK(linalg::max_abs(lim - Matrix::Identity(2, 2)) < 1e-14);

  const At hopf(scenarios::make_s3_hopf(), Point{{0.4, 0.2, 0.3}});
  const Vector v = hopf_unit(hopf);
  CHECK(v.dot(rescaled_metric(hopf.d, hopf.g, 0.1) * v) == doctest::Approx(1.0 / 1.01).epsilon(1e-13));
  CHECK(linalg::max_abs(limit_metric(hopf.d, hopf.g) - hopf.g) < 1e-10);

  const auto warped = scenarios::make_s2_band(0.3);
  for (double phi : {0.5, 1.0, 2.0}) {
    const At w(warped, Point{{0.0, phi}});
    CHECK(limit_metric(w.d, w.g)(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("closed form: one-dimensional and identity cases") {
  const auto torus = scenarios::make_flat_t2(0.7);
  const At t(torus, Point{{1.0, 2.0}});
  const double lambda = 0.49;
  for (double l : {0.1, 1.0, 3.0}) {
    CHECK(cheeger_metric_closed_form(t.d, t.g, l)(0, 0) ==
          doctest::Approx(oracle::cheeger_vertical(lambda, l)).epsilon(1e-14));
  }
  CHECK(linalg::max_abs(cheeger_metric_closed_form(t.d, t.g, 1.0) - cheeger_metric(t.d, t.g, 1.0)) <
        1e-15);
  // Large l recovers g_M.
  CHECK(linalg::max_abs(cheeger_metric_closed_form(t.d, t.g, 1e4) - t.g) < 1e-8);

  const At su2(scenarios::make_su2_s2(), Point{{0.3, 1.0}});
  // P = I on the round unit sphere, so the vertical block halves at l = 1.
  CHECK(linalg::max_abs(su2.d.P - Matrix::Identity(2, 2)) < 1e-12);
  CHECK(linalg::max_abs(cheeger_metric_closed_form(su2.d, su2.g, 1.0) - 0.5 * su2.g) < 1e-12);
}

TEST_CASE("normal homogeneous pullback") {
  const At band(scenarios::make_s2_band(0.3), Point{{0.0, 1.1}});
  const Vector a = Vector::Constant(1, 0.7);
  const Matrix lim = limit_metric(band.d, band.g);
  CHECK(normal_homogeneous_pullback(band.d, lim, a, a) == doctest::Approx(0.49));
  CHECK(normal_homogeneous_pullback(band.d, band.g, a, a) ==
        doctest::Approx(band.d.P(0, 0) * 0.49));

  const At su2(scenarios::make_su2_s2(), Point{{0.3, 1.0}});
  CHECK_THROWS_AS(normal_homogeneous_pullback(su2.d, su2.g, su2.d.isotropy_basis.col(0),
                                              su2.d.m_basis.col(0)),
                  std::invalid_argument);
  const Matrix pulled = orbit_pullback(su2.d, limit_metric(su2.d, su2.g));
  CHECK(linalg::max_abs(pulled - Matrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("ill-conditioned reparametrization is reported with l") {
  const At band(scenarios::make_s2_band(), Point{{0.0, 1.0}});
  try {
    cheeger_metric(band.d, band.g, 1e-7);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("l = 1e-07") != std::string::npos);
  }
}

TEST_CASE("property: g_l is the quotient metric of l^2 B + g_M") {
  oracle::Gen gen(31);
  for (const auto& sc : all_scenarios()) {
    CAPTURE(sc->id());
    for (int i = 0; i < 30; ++i) {
      const At a(sc, random_point(sc->sample_region(), gen));
      const double l = gen.uniform(0.05, 5.0);
      const Matrix expected = oracle::quotient_metric(a.d.K, a.d.B, a.g, l);
      const Matrix gl = cheeger_metric(a.d, a.g, l);
      CHECK(linalg::max_abs(gl - expected) < 1e-10 * std::max(1.0, linalg::max_abs(expected)));
      CHECK(linalg::max_abs(cheeger_metric_closed_form(a.d, a.g, l) - gl) < 1e-10);
      CHECK(linalg::is_spd(gl));
    }
  }
}

TEST_CASE("property: horizontality, isotropy leakage and the horizontal block") {
  oracle::Gen gen(37);
  for (const auto& sc : all_scenarios()) {
    CAPTURE(sc->id());
    for (int i = 0; i < 30; ++i) {
      const At a(sc, random_point(sc->sample_region(), gen));
      const Vector v = gen.vector(a.g.rows());
      const double l = gen.uniform(0.05, 5.0);
      CHECK(horizontality_residual(a.d, a.g, l, v) < 1e-10);
      const Vector k = kappa(a.d, a.g, v);
      if (a.d.isotropy_basis.cols() > 0) {
        CHECK((a.d.isotropy_basis.transpose() * a.d.B * k).cwiseAbs().maxCoeff() < 1e-10);
      }
      // Horizontal Z: g_M-orthogonal to every Killing vector.
      const Matrix km = a.d.vertical_vectors();
      const Vector w = gen.vector(a.g.rows());
      Vector z = w - km * (km.transpose() * a.g * km).ldlt().solve(km.transpose() * a.g * w);
      if (z.norm() < 1e-6) continue;  // transitive: no horizontal space
      CHECK(kappa(a.d, a.g, z).norm() < 1e-12);
      const Matrix gl = cheeger_metric(a.d, a.g, l);
      const Matrix gtl = rescaled_metric(a.d, a.g, l);
      const Matrix lim = limit_metric(a.d, a.g);
      const Vector u = gen.vector(a.g.rows());
      CHECK(std::abs(z.dot(gl * u) - z.dot(a.g * u)) < 1e-10);
      CHECK(std::abs(z.dot(gtl * u) - z.dot(a.g * u)) < 1e-10);
      CHECK(std::abs(z.dot(lim * u) - z.dot(a.g * u)) < 1e-10);
    }
  }
}

TEST_CASE("property: kappa restricted to the orbit is invertible") {
  oracle::Gen gen(41);
  for (const auto& sc : all_scenarios()) {
    CAPTURE(sc->id());
    for (int i = 0; i < 20; ++i) {
      const At a(sc, random_point(sc->sample_region(), gen));
      const Matrix restricted =
          a.d.m_basis.transpose() * a.d.B * kappa_matrix(a.d, a.g) * a.d.vertical_vectors();
      // kappa(K m c) = P c in m coordinates.
      CHECK(linalg::max_abs(restricted - a.d.P) < 1e-10);
      Eigen::JacobiSVD<Matrix> svd(restricted);
      CHECK(svd.singularValues().minCoeff() > 0.1);
    }
  }
}

TEST_CASE("property: rescaled and limit orbit pullbacks") {
  oracle::Gen gen(43);
  for (const auto& sc : all_scenarios()) {
    CAPTURE(sc->id());
    for (int i = 0; i < 20; ++i) {
      const At a(sc, random_point(sc->sample_region(), gen));
      const double l = gen.uniform(0.05, 2.0);
      const auto r = a.d.orbit_dim();
      const Matrix I = Matrix::Identity(r, r);
      const Matrix gap = orbit_pullback(a.d, rescaled_metric(a.d, a.g, l)) - I;
      const Matrix expected = -l * l * (l * l * I + a.d.P).inverse();
      CHECK(linalg::max_abs(gap - expected) < 1e-10);
      CHECK(linalg::max_abs(orbit_pullback(a.d, limit_metric(a.d, a.g)) - I) < 1e-10);
    }
  }
}

TEST_CASE("metric variants evaluate through the scenario") {
  const auto sc = scenarios::make_s2_band();
  const Point x{{0.0, kPi / 4}};
  CHECK(evaluate(*sc, MetricVariant::original(), x)(0, 0) == doctest::Approx(0.5));
  CHECK(evaluate(*sc, MetricVariant::cheeger(1.0), x)(0, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(field(*sc, MetricVariant::limit())(x)(0, 0) == doctest::Approx(1.0));
  CHECK(MetricVariant::rescaled(0.1).name() == "rescaled(l=0.1)");
}
