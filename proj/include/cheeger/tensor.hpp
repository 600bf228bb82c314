#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cheeger/manifold.hpp"

namespace cheeger::tensor {

// d_m T_ij stored as one matrix per coordinate direction m.
using Derivatives = std::vector<Matrix>;
// Gamma^m_ij stored as one matrix per upper index m.
using Christoffel = std::vector<Matrix>;

// A symmetric (0,2)-tensor field in chart coordinates, optionally with
// analytic first derivatives. `chart` (may be null) bounds FD stencils.
struct TensorField {
  manifold::MetricFn value;
  std::function<Derivatives(const Point&)> derivatives;
  const manifold::Chart* chart = nullptr;
};

struct FdOptions {
  double h = 1e-4;          // coordinate step
  bool richardson = true;   // one extrapolation level (steps h and h/2)
};

// Analytic derivatives when the field provides them, otherwise fourth-order
// central differences (+ one Richardson level). Throws DomainError when the
// stencil leaves the chart.
Derivatives metric_derivatives(const TensorField& field, const Point& x,
                               const FdOptions& fd = {});
// Always finite differences, for cross-checking analytic derivatives.
Derivatives fd_derivatives(const TensorField& field, const Point& x, const FdOptions& fd = {});

// Gamma^m_ij = 1/2 g^{mn} (d_i g_nj + d_j g_ni - d_n g_ij).
Christoffel christoffel(const TensorField& metric, const Point& x, const FdOptions& fd = {});
Christoffel christoffel(const Matrix& metric_at_x, const Derivatives& dg);

struct GeodesicState {
  Point position;
  Vector velocity;
  double arc_length = 0.0;
};

struct Trajectory {
  std::vector<GeodesicState> states;
  bool completed = false;         // false: left the chart before `length`
  double exit_arc_length = 0.0;   // arc length reached
  double max_speed_drift = 0.0;   // max |speed - 1|
};

// Classical RK4 on x'' + Gamma(x', x') = 0. The initial velocity is rescaled
// to unit speed so the parameter is arc length. Integration stops cleanly
// when the next FD stencil would leave the chart.
Trajectory geodesic_integrate(const TensorField& metric, const GeodesicState& initial,
                              double length, double step, const FdOptions& fd = {});

struct TTensorSample {
  Point x;
  double value = 0.0;  // max |T_V W| over unit vertical V, W
};

struct TTensorOptions {
  FdOptions fd;
  double h_killing = 1e-5;  // step for differentiating the Killing operator
  int direction_pairs = 50; // extra random vertical pairs when dim G(x) > 1
  std::uint64_t seed = 42;
};

// |T| at x for the given metric: the horizontal part of nabla_V W for
// vertical V, W (W extended as a Killing field), maximized over unit pairs.
TTensorSample t_tensor(const TensorField& metric, const manifold::MetricFn& killing,
                       const manifold::KillingData& data, const Point& x,
                       const TTensorOptions& options = {});

// Deterministic low-discrepancy (Halton) points in a chart region plus the
// seed for any per-point random draws.
struct SamplePlan {
  std::vector<Point> points;
  int directions = 50;
  std::uint64_t seed = 42;
};

SamplePlan make_sample_plan(const manifold::Chart& region, int points, int directions,
                            std::uint64_t seed);

struct CpNorms {
  double c0 = 0.0;
  double c1 = 0.0;  // c0 + sup of first derivatives
};

// Fiberwise sup over reference-unit vector pairs (computed exactly as a
// generalized eigenvalue), then sup over the plan's points. p = 1 adds the
// sup over coordinate directions m of |d_m delta|. Throws
// UnsupportedOrderError for p >= 2.
double cp_norm(const TensorField& difference, int p, const SamplePlan& plan,
               const manifold::MetricFn& reference, const FdOptions& fd = {});
CpNorms cp_norms(const TensorField& difference, const SamplePlan& plan,
                 const manifold::MetricFn& reference, const FdOptions& fd = {});

}  // namespace cheeger::tensor
