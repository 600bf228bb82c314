#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cheeger/deformation.hpp"
#include "cheeger/errors.hpp"
#include "cheeger/scenarios.hpp"
#include "cheeger/tensor.hpp"
#include "oracles.hpp"

using namespace cheeger;
using namespace cheeger::tensor;
using deformation::MetricVariant;

namespace {

constexpr double kPi = std::numbers::pi;

TensorField variant_field(const manifold::Scenario& sc, const MetricVariant& v) {
  TensorField f;
  f.value = deformation::field(sc, v);
  f.chart = &sc.chart();
  return f;
}

TensorField analytic_original(const manifold::Scenario& sc) {
  TensorField f = variant_field(sc, MetricVariant::original());
  f.derivatives = [&sc](const Point& x) { return *sc.metric_derivatives(x); };
  return f;
}

manifold::MetricFn killing_of(const manifold::Scenario& sc) {
  return [&sc](const Point& y) { return manifold::killing_operator(sc, y); };
}

}  // namespace

TEST_CASE("metric derivatives: examples") {
  const auto torus = scenarios::make_flat_t2(1.3);
  const auto d0 = fd_derivatives(variant_field(*torus, MetricVariant::original()), Point{{1.0, 2.0}});
  for (const auto& m : d0) CHECK(linalg::max_abs(m) < 1e-10);

  const auto band = scenarios::make_s2_band();
  const Point x{{0.0, kPi / 4}};
  const auto analytic = metric_derivatives(analytic_original(*band), x);
  CHECK(analytic[1](0, 0) == doctest::Approx(1.0));
  const auto fd = fd_derivatives(variant_field(*band, MetricVariant::original()), x);
  CHECK(fd[1](0, 0) == doctest::Approx(1.0).epsilon(1e-9));

  const auto lim = fd_derivatives(variant_field(*band, MetricVariant::limit()), x);
  for (const auto& m : lim) CHECK(linalg::max_abs(m) < 1e-9);
}

TEST_CASE("property: FD derivatives agree with analytic ones") {
  oracle::Gen gen(53);
  for (const auto& sc : {scenarios::make_s2_band(), scenarios::make_s2_band(0.3),
                         scenarios::make_s3_hopf(), scenarios::make_s3_hopf(1.4),
                         scenarios::make_su2_s2(1.5), scenarios::make_flat_t2(2.0)}) {
    CAPTURE(sc->id());
    if (!sc->metric_derivatives(sc->default_geodesic_starts().front())) continue;
    const auto& region = sc->sample_region();
    for (int i = 0; i < 20; ++i) {
      Point x(region.dim());
      for (int k = 0; k < region.dim(); ++k) {
        x(k) = gen.uniform(region.intervals()[k].lo, region.intervals()[k].hi);
      }
      const auto a = metric_derivatives(analytic_original(*sc), x);
      const auto f = fd_derivatives(variant_field(*sc, MetricVariant::original()), x);
      for (std::size_t m = 0; m < a.size(); ++m) CHECK(linalg::max_abs(a[m] - f[m]) < 1e-6);
    }
  }
}

TEST_CASE("FD stencil outside the chart is a domain error") {
  const auto band = scenarios::make_s2_band();
  CHECK_THROWS_AS(fd_derivatives(variant_field(*band, MetricVariant::original()),
                                 Point{{0.0, 0.40001}}),
                  DomainError);
}

TEST_CASE("Christoffel symbols: flat, sphere and flat cylinder") {
  const auto torus = scenarios::make_flat_t2();
  for (const auto& m : christoffel(variant_field(*torus, MetricVariant::original()), Point{{1.0, 1.0}})) {
    CHECK(linalg::max_abs(m) == 0.0);
  }

  const auto band = scenarios::make_s2_band();
  for (double phi : {kPi / 4, 0.7, 2.0}) {
    const auto gamma = christoffel(variant_field(*band, MetricVariant::original()), Point{{0.3, phi}});
    CHECK(gamma[1](0, 0) == doctest::Approx(oracle::sphere_gamma_phi_theta_theta(phi)).epsilon(1e-9));
    CHECK(gamma[0](0, 1) == doctest::Approx(oracle::sphere_gamma_theta_theta_phi(phi)).epsilon(1e-9));
    CHECK(gamma[0](1, 0) == doctest::Approx(oracle::sphere_gamma_theta_theta_phi(phi)).epsilon(1e-9));
    CHECK(std::abs(gamma[0](0, 0)) < 1e-9);
    CHECK(std::abs(gamma[1](1, 1)) < 1e-9);
  }
  CHECK(christoffel(variant_field(*band, MetricVariant::original()), Point{{0.0, kPi / 4}})[1](0, 0) ==
        doctest::Approx(-0.5));

  for (const auto& m : christoffel(variant_field(*band, MetricVariant::limit()), Point{{0.0, 1.0}})) {
    CHECK(linalg::max_abs(m) < 1e-9);
  }

  Matrix singular = Matrix::Zero(2, 2);
  CHECK_THROWS_AS(christoffel(singular, {Matrix::Zero(2, 2), Matrix::Zero(2, 2)}), NumericalError);
}

TEST_CASE("property: Christoffel symmetry in the lower indices") {
  oracle::Gen gen(59);
  for (const auto& sc : {scenarios::make_s2_band(0.3), scenarios::make_s3_hopf(1.3),
                         scenarios::make_su2_s2()}) {
    const auto region = sc->sample_region();
    for (int i = 0; i < 10; ++i) {
      Point x(region.dim());
      for (int k = 0; k < region.dim(); ++k) {
        x(k) = gen.uniform(region.intervals()[k].lo, region.intervals()[k].hi);
      }
      for (const auto& v : {MetricVariant::original(), MetricVariant::rescaled(0.3)}) {
        for (const auto& m : christoffel(variant_field(*sc, v), x)) {
          CHECK(linalg::max_abs(m - m.transpose()) < 1e-8);
        }
      }
    }
  }
}

TEST_CASE("geodesics: flat torus lines") {
  const auto torus = scenarios::make_flat_t2();
  const GeodesicState start{Point{{0.5, 1.0}}, Vector{{0.6, 0.8}}, 0.0};
  const auto traj = geodesic_integrate(variant_field(*torus, MetricVariant::original()), start, 2.0, 1e-2);
  CHECK(traj.completed);
  const auto& end = traj.states.back();
  CHECK(end.position(0) == doctest::Approx(0.5 + 1.2));
  CHECK(end.position(1) == doctest::Approx(1.0 + 1.6));
  CHECK(end.arc_length == doctest::Approx(2.0));
}

TEST_CASE("geodesics: flat cylinder stays on the latitude, sphere follows a great circle") {
  const auto band = scenarios::make_s2_band();
  const GeodesicState start{Point{{0.0, 0.9}}, Vector{{1.0, 0.0}}, 0.0};

  const auto flat = geodesic_integrate(variant_field(*band, MetricVariant::limit()), start, 3.0, 1e-3);
  CHECK(flat.completed);
  double drift = 0.0;
  for (const auto& s : flat.states) drift = std::max(drift, std::abs(s.position(1) - 0.9));
  CHECK(drift < 1e-10);

  const auto round = geodesic_integrate(variant_field(*band, MetricVariant::original()), start, 3.0, 1e-3);
  CHECK(round.completed);
  CHECK(round.max_speed_drift < 3e-8);
  double dev_at_1 = 0.0;
  double worst = 0.0;
  for (const auto& s : round.states) {
    if (s.arc_length <= 1.0) dev_at_1 = std::max(dev_at_1, std::abs(s.position(1) - 0.9));
    const Eigen::Vector3d expected = oracle::great_circle(0.0, 0.9, 1.0, 0.0, s.arc_length);
    worst = std::max(worst, (oracle::sphere_embed(s.position(0), s.position(1)) - expected).norm());
  }
  CHECK(dev_at_1 > 1e-3);
  CHECK(worst < 1e-8);
}

TEST_CASE("property: geodesic speed is conserved") {
  oracle::Gen gen(61);
  const auto sc = scenarios::make_s2_band(0.3);
  for (int i = 0; i < 5; ++i) {
    const GeodesicState start{Point{{0.0, gen.uniform(0.9, 2.2)}}, gen.unit(2), 0.0};
    for (const auto& v : {MetricVariant::original(), MetricVariant::rescaled(0.2)}) {
      const auto traj = geodesic_integrate(variant_field(*sc, v), start, 1.0, 1e-3);
      CHECK(traj.max_speed_drift < 1e-8 * std::max(1.0, traj.exit_arc_length));
    }
  }
}

TEST_CASE("geodesics report a boundary exit") {
  const auto band = scenarios::make_s2_band();
  const GeodesicState start{Point{{0.0, 1.0}}, Vector{{0.0, -1.0}}, 0.0};
  const auto traj = geodesic_integrate(variant_field(*band, MetricVariant::original()), start, 3.0, 1e-2);
  CHECK_FALSE(traj.completed);
  CHECK(traj.exit_arc_length == doctest::Approx(0.6).epsilon(0.05));
  CHECK_THROWS_AS(geodesic_integrate(variant_field(*band, MetricVariant::original()),
                                     {Point{{0.0, 1.0}}, Vector::Zero(2), 0.0}, 1.0, 1e-2),
                  std::invalid_argument);
}

TEST_CASE("T-tensor examples") {
  const auto band = scenarios::make_s2_band();
  auto at = [&](const TensorField& f, double phi) {
    const Point x{{0.0, phi}};
    return t_tensor(f, killing_of(*band), manifold::killing_data(*band, x), x).value;
  };
  const auto round = analytic_original(*band);
  CHECK(at(round, kPi / 2) < 1e-10);
  CHECK(at(round, kPi / 4) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(at(variant_field(*band, MetricVariant::limit()), 1.1) < 1e-8);

  const double ratio = at(variant_field(*band, MetricVariant::rescaled(0.1)), kPi / 4) / at(round, kPi / 4);
  CHECK(std::abs(ratio - 0.01 / 0.51) < 1e-6);

  const auto warped = scenarios::make_s2_band(0.3);
  for (double phi : {0.6, 1.3, 2.3}) {
    const Point x{{0.0, phi}};
    const auto d = manifold::killing_data(*warped, x);
    const double t0 = t_tensor(analytic_original(*warped), killing_of(*warped), d, x).value;
    CHECK(t0 == doctest::Approx(oracle::warped_t(oracle::band_f(phi, 0.3), oracle::band_df(phi, 0.3))).epsilon(1e-8));
    const double tl = t_tensor(variant_field(*warped, MetricVariant::rescaled(0.2)), killing_of(*warped), d, x).value;
    CHECK(tl == doctest::Approx(oracle::band_rescaled_t(phi, 0.2, 0.3)).epsilon(1e-6));
  }
}

TEST_CASE("T-tensor vanishes on product and totally geodesic scenarios") {
  const auto torus = scenarios::make_flat_t2(1.7);
  const Point x{{1.0, 2.0}};
  const auto d = manifold::killing_data(*torus, x);
  for (const auto& v : {MetricVariant::original(), MetricVariant::cheeger(0.3),
                        MetricVariant::rescaled(0.3), MetricVariant::limit()}) {
    CHECK(t_tensor(variant_field(*torus, v), killing_of(*torus), d, x).value < 1e-7);
  }
  const auto hopf = scenarios::make_s3_hopf();
  const Point y{{0.8, 0.2, 0.1}};
  CHECK(t_tensor(variant_field(*hopf, MetricVariant::original()), killing_of(*hopf),
                 manifold::killing_data(*hopf, y), y)
            .value < 1e-7);
}

TEST_CASE("sample plans are deterministic and inside the region") {
  const auto band = scenarios::make_s2_band();
  const auto region = band->sample_region();
  const auto a = make_sample_plan(region, 50, 7, 3);
  const auto b = make_sample_plan(region, 50, 7, 3);
  REQUIRE(a.points.size() == 50);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(region.contains(a.points[i]));
    CHECK((a.points[i] - b.points[i]).norm() == 0.0);
  }
  CHECK(a.directions == 7);
}

TEST_CASE("C^p norms") {
  const auto band = scenarios::make_s2_band();
  const auto plan = make_sample_plan(band->sample_region(), 200, 50, 42);
  const manifold::MetricFn ref = [&](const Point& x) { return band->metric(x); };

  TensorField zero;
  zero.value = [](const Point&) -> Matrix { return Matrix::Zero(2, 2); };
  zero.chart = &band->chart();
  CHECK(cp_norm(zero, 0, plan, ref) == 0.0);
  CHECK(cp_norm(zero, 1, plan, ref) == 0.0);
  CHECK_THROWS_AS(cp_norm(zero, 2, plan, ref), UnsupportedOrderError);

  // Vertical deviation of g~_l from g~ in g_M-unit terms: l^2 / (f (l^2 + f)).
  TensorField diff;
  diff.chart = &band->chart();
  diff.value = [&](const Point& x) -> Matrix {
    return deformation::evaluate(*band, MetricVariant::rescaled(0.1), x) -
           deformation::evaluate(*band, MetricVariant::limit(), x);
  };
  double expected = 0.0;
  for (const auto& x : plan.points) {
    const double f = oracle::band_f(x(1));
    expected = std::max(expected, 0.01 / (f * (0.01 + f)));
  }
  const auto norms = cp_norms(diff, plan, ref);
  CHECK(norms.c0 == doctest::Approx(expected).epsilon(1e-12));
  CHECK(norms.c1 >= norms.c0);

  TensorField scaled = diff;
  scaled.value = [&](const Point& x) -> Matrix { return -3.0 * diff.value(x); };
  CHECK(cp_norm(scaled, 0, plan, ref) == doctest::Approx(3.0 * norms.c0));
  CHECK(cp_norm(scaled, 1, plan, ref) == doctest::Approx(3.0 * norms.c1).epsilon(1e-9));
}
