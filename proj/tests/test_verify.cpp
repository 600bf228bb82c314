#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cheeger/errors.hpp"
#include "cheeger/scenarios.hpp"
#include "cheeger/verify.hpp"
#include "oracles.hpp"

using namespace cheeger;
using namespace cheeger::verify;
using deformation::MetricVariant;

namespace {

SweepConfig sweep_for(std::shared_ptr<const manifold::Scenario> sc, int points = 60) {
  SweepConfig c;
  c.plan = tensor::make_sample_plan(sc->sample_region(), points, 50, 42);
  c.scenario = std::move(sc);
  return c;
}

const Verdict& find(const std::vector<Verdict>& vs, const std::string& check) {
  for (const auto& v : vs) {
    if (v.check == check) return v;
  }
  FAIL("missing verdict " << check);
  return vs.front();
}

}  // namespace

TEST_CASE("rate_fit examples") {
  const auto exact = rate_fit({{0.2, 0.04}, {0.1, 0.01}, {0.05, 0.0025}});
  CHECK(exact.status == FitStatus::kFitted);
  CHECK(exact.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(exact.residual < 1e-12);

  std::vector<std::pair<double, double>> hopf;
  for (double l : {0.2, 0.1, 0.05, 0.025}) hopf.emplace_back(l, 3.0 * l * l / (1 + l * l));
  const auto h = rate_fit(hopf);
  CHECK(h.slope < 2.0);
  CHECK(h.slope > 1.9);

  const auto flat = rate_fit({{0.2, 5.0}, {0.1, 5.0}, {0.05, 5.0}});
  CHECK(flat.slope == doctest::Approx(0.0));

  const auto zero = rate_fit({{0.2, 0.0}, {0.1, 0.0}});
  CHECK(zero.status == FitStatus::kExact);

  const auto noisy = rate_fit({{0.2, 0.04}, {0.1, 0.01}, {0.05, 1e-17}});
  CHECK(noisy.excluded == 1);
  CHECK(noisy.slope == doctest::Approx(2.0));

  const auto thin = rate_fit({{0.2, 0.04}, {0.1, 1e-20}});
  CHECK(thin.status == FitStatus::kInsufficient);
  CHECK(to_string(thin.status) == "insufficient");
}

TEST_CASE("property: rate_fit recovers power laws") {
  oracle::Gen gen(71);
  for (int i = 0; i < 50; ++i) {
    const double p = gen.uniform(-3, 3);
    const double c = gen.uniform(0.01, 100);
    std::vector<std::pair<double, double>> s;
    for (double l : {0.3, 0.2, 0.1, 0.05, 0.01}) s.emplace_back(l, c * std::pow(l, p));
    const auto fit = rate_fit(s);
    CHECK(fit.slope == doctest::Approx(p).epsilon(1e-10));
    CHECK(std::exp(fit.intercept) == doctest::Approx(c).epsilon(1e-9));
  }
}

TEST_CASE("sweep config validation") {
  auto c = sweep_for(scenarios::make_s2_band(), 5);
  CHECK_NOTHROW(c.validate());
  c.l_grid = {0.2, 0.1, 0.05};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.l_grid = {0.1, 0.2, 0.05, 0.025};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.l_grid = {0.2, 0.1, 0.05, 1e-4};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.l_grid = {0.2, 0.1, 0.05, 0.025};
  c.scenario.reset();
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("convergence sweep on the S2 band") {
  const auto report = convergence_sweep(sweep_for(scenarios::make_s2_band()));
  REQUIRE(report.rows.size() == 4);
  CHECK(report.c0_fit.slope >= 1.9);
  CHECK(report.c0_fit.slope <= 2.1);
  CHECK(report.c1_fit.slope >= 1.8);
  CHECK(report.c1_fit.slope <= 2.2);
  CHECK(report.gap_ratio < 3.0);
  for (const auto& v : report.verdicts) {
    CAPTURE(v.check);
    CHECK(v.passed);
  }
  for (const auto& r : report.rows) CHECK(r.c1_diff >= r.c0_diff);
}

TEST_CASE("convergence sweep on the round Hopf fibration") {
  const auto report = convergence_sweep(sweep_for(scenarios::make_s3_hopf()));
  for (const auto& r : report.rows) {
    // g~ = g_M and the vertical deviation is l^2 / (1 + l^2) everywhere.
    CHECK(r.c0_diff == doctest::Approx(r.l * r.l / (1 + r.l * r.l)).epsilon(1e-10));
  }
  CHECK(report.rows[1].c0_diff == doctest::Approx(0.00990).epsilon(1e-3));
}

TEST_CASE("T-tensor scaling test") {
  const auto band = t_tensor_scaling_test(sweep_for(scenarios::make_s2_band()));
  CHECK_FALSE(band.vacuous);
  CHECK(band.fit.slope >= 1.8);
  CHECK(band.fit.slope <= 2.2);
  CHECK(band.verdicts.at(0).passed);

  const auto torus = t_tensor_scaling_test(sweep_for(scenarios::make_flat_t2()));
  CHECK(torus.vacuous);
  CHECK(torus.excluded_samples == 60);
  CHECK(torus.verdicts.at(0).note.find("vacuous") != std::string::npos);
}

TEST_CASE("T-tensor scaling excludes vanishing samples") {
  // A band around the equator: the plan contains the equator itself.
  auto c = sweep_for(scenarios::make_s2_band(), 1);
  c.plan.points = {Point{{0.0, std::numbers::pi / 2}}, Point{{0.0, 1.0}}};
  const auto r = t_tensor_scaling_test(c);
  CHECK(r.excluded_samples == 1);
  CHECK_FALSE(r.vacuous);
  CHECK(r.verdicts.at(0).note.find("excluded") != std::string::npos);
}

TEST_CASE("totally geodesic test") {
  const auto band = scenarios::make_s2_band();
  const auto starts = vertical_starts(*band, {Point{{0.0, 0.6}}, Point{{0.0, 0.9}}, Point{{0.0, 1.2}}});
  const auto lim = totally_geodesic_test(*band, MetricVariant::limit(), starts, 3.0, 1e-3);
  CHECK(lim.max_drift < 1e-6);
  CHECK(lim.inconclusive == 0);
  const auto orig = totally_geodesic_test(*band, MetricVariant::original(), starts, 3.0, 1e-3);
  CHECK(orig.max_drift > 1e-3);

  const auto torus = scenarios::make_flat_t2();
  const auto ts = vertical_starts(*torus, torus->default_geodesic_starts());
  CHECK(totally_geodesic_test(*torus, MetricVariant::limit(), ts, 3.0, 1e-3).max_drift < 1e-10);

  const auto su2 = scenarios::make_su2_s2();
  CHECK(totally_geodesic_test(*su2, MetricVariant::limit(), vertical_starts(*su2, {Point{{0.0, 1.0}}}),
                              1.0, 1e-2)
            .vacuous);

  tensor::GeodesicState horizontal{Point{{0.0, 1.0}}, Vector{{0.0, 1.0}}, 0.0};
  CHECK_THROWS_AS(totally_geodesic_test(*band, MetricVariant::limit(), {horizontal}, 1.0, 1e-2),
                  std::invalid_argument);
}

TEST_CASE("invariance suite") {
  for (const auto& info : scenarios::catalog()) {
    CAPTURE(info.id);
    const auto sc = scenarios::make_scenario(info.id);
    const auto plan = tensor::make_sample_plan(sc->sample_region(), 5, 1, 42);
    const auto r = invariance_suite(*sc, {0.2, 0.05}, plan.points, 20, 42);
    CHECK(r.max_metric_residual() < 1e-8);
    CHECK(r.horizontal_identity < 1e-10);
    CHECK(r.kappa_horizontality < 1e-10);
    CHECK(r.kappa_isotropy < 1e-10);
    CHECK(r.group_elements == 20);
  }
}

TEST_CASE("large-l limit") {
  const auto band = scenarios::make_s2_band();
  const auto plan = tensor::make_sample_plan(band->sample_region(), 40, 1, 42);
  const auto r = large_l_limit_test(*band, {10, 30, 100}, plan);
  CHECK(r.fit.slope >= -2.2);
  CHECK(r.fit.slope <= -1.8);

  // Flat orbit with P = 1: the deviation is 1 / (l^2 + 1) in g_M-unit terms.
  const auto torus = scenarios::make_flat_t2();
  const auto tp = tensor::make_sample_plan(torus->sample_region(), 5, 1, 42);
  const auto t = large_l_limit_test(*torus, {10, 30, 100}, tp);
  for (const auto& [l, dev] : t.deviations) CHECK(dev == doctest::Approx(1 / (l * l + 1)).epsilon(1e-9));

  CHECK_THROWS_AS(large_l_limit_test(*band, {30, 10}, plan), ConfigError);
  CHECK_THROWS_AS(large_l_limit_test(*band, {10}, plan), ConfigError);
}

TEST_CASE("oracle equivalence on every scenario") {
  for (const auto& info : scenarios::catalog()) {
    CAPTURE(info.id);
    CHECK(oracle_equivalence_test(*scenarios::make_scenario(info.id), 100, 42) < 1e-10);
  }
  CHECK(oracle_equivalence_test(*scenarios::make_flat_t2(), 10, 1) < 1e-15);
}

TEST_CASE("verdicts are deterministic") {
  const auto a = convergence_sweep(sweep_for(scenarios::make_s2_band(0.3), 20));
  const auto b = convergence_sweep(sweep_for(scenarios::make_s2_band(0.3), 20));
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].c0_diff == b.rows[i].c0_diff);
    CHECK(a.rows[i].c1_diff == b.rows[i].c1_diff);
  }
  CHECK(find(a.verdicts, "c0_slope").measured == find(b.verdicts, "c0_slope").measured);
}
