#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cheeger/lie.hpp"
#include "cheeger/linalg.hpp"

namespace cheeger::manifold {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool periodic = false;  // period hi - lo

  double period() const { return hi - lo; }
};

// A single coordinate chart: a box of intervals, some of them periodic.
// Points are carried in universal-cover coordinates; periodic coordinates are
// never wrapped except by reduce(), which exists for display.
class Chart {
 public:
  Chart(std::vector<std::string> labels, std::vector<Interval> intervals);

  int dim() const { return static_cast<int>(intervals_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Interval>& intervals() const { return intervals_; }

  // Strictly inside, at least `margin` away from every non-periodic edge.
  bool contains(const Point& x, double margin = 0.0) const;
  // Throws DomainError naming `what` when !contains(x, margin).
  void require_inside(const Point& x, double margin, const std::string& what) const;

  // Shift periodic coordinates of y by whole periods to lie closest to ref.
  Point unwrap_near(const Point& y, const Point& ref) const;
  // Periodic coordinates reduced into [lo, hi).
  Point reduce(const Point& x) const;

  // Non-periodic intervals shrunk by margin on both sides.
  Chart shrunk(double margin) const;

 private:
  std::vector<std::string> labels_;
  std::vector<Interval> intervals_;
};

using MetricFn = std::function<Matrix(const Point&)>;

// A catalogued G-manifold: chart, isometric G-action, invariant metric g_M,
// and the bookkeeping the verification suites need (sample region, orbit
// level-set coordinates, default geodesic starts).
class Scenario {
 public:
  Scenario(lie::LieGroupModel group, Chart chart, double margin);
  virtual ~Scenario() = default;

  virtual std::string id() const = 0;
  // Effective parameters, for the report echo.
  virtual std::vector<std::pair<std::string, double>> parameters() const = 0;

  const lie::LieGroupModel& group() const { return group_; }
  const Chart& chart() const { return chart_; }
  double margin() const { return margin_; }
  // The precompact invariant sample region: the chart shrunk by the margin.
  Chart sample_region() const { return chart_.shrunk(margin_); }

  // Result is unwrapped close to x for periodic coordinates.
  virtual Point act(const lie::GroupElement& g, const Point& x) const = 0;
  // g_M in chart coordinates.
  virtual Matrix metric(const Point& x) const = 0;
  // d_m g_M (index m = entry of the returned vector), when catalogued.
  virtual std::optional<std::vector<Matrix>> metric_derivatives(const Point& x) const;
  // Columns K_{M,x}(k_i), when catalogued.
  virtual std::optional<Matrix> killing_analytic(const Point& x) const;
  // D act(g, .) at x, when catalogued.
  virtual std::optional<Matrix> action_jacobian(const lie::GroupElement& g,
                                                const Point& x) const;

  // Dimension of principal orbits in the chart region.
  virtual int orbit_dim() const = 0;
  // Coordinates constant along orbits (empty for transitive actions); orbit
  // drift is measured against these.
  virtual Vector orbit_coordinates(const Point& x) const = 0;
  virtual std::vector<Point> default_geodesic_starts() const = 0;
  // Whether the orbits are totally geodesic already for g_M.
  virtual bool orbits_totally_geodesic() const = 0;

 private:
  lie::LieGroupModel group_;
  Chart chart_;
  double margin_;
};

enum class KillingMethod { kAuto, kAnalytic, kFiniteDifference };

// Per-point Killing operator and isotropy decomposition.
struct KillingData {
  Point x;
  Matrix K;               // dim_m x dim_g, columns K_{M,x}(k_i)
  Matrix isotropy_basis;  // dim_g x dim(g_x), B-orthonormal
  Matrix m_basis;         // dim_g x dim(m_x), B-orthonormal
  Matrix P;               // orbit tensor in m_basis coordinates
  Matrix B;               // bi-invariant form on the algebra basis

  int orbit_dim() const { return static_cast<int>(m_basis.cols()); }
  // K applied to the m_basis: a basis of T_x G(x).
  Matrix vertical_vectors() const { return K * m_basis; }
};

struct IsotropySplit {
  Matrix isotropy_basis;
  Matrix m_basis;
};

struct NumericOptions {
  double h_act = 1e-5;       // action differentiation step
  double sigma_tol = 1e-8;   // relative kernel threshold
  KillingMethod killing = KillingMethod::kAuto;
};

// Column i = d/dt|0 act(exp(t k_i), x). Analytic when catalogued (and
// allowed by `method`), otherwise fourth-order central differences.
Matrix killing_operator(const Scenario& scenario, const Point& x,
                        KillingMethod method = KillingMethod::kAuto,
                        double h_act = 1e-5);

// Kernel of K and its B-orthogonal complement. Throws DegeneratePointError
// when a singular value falls in [0.1, 10] x sigma_tol x sigma_max.
IsotropySplit isotropy_split(const Matrix& K, const Matrix& B, double sigma_tol = 1e-8);

// P with g_M(K a, K b) = B(P a, b) on m_x, in m_basis coordinates.
Matrix orbit_tensor(const Matrix& K, const Matrix& metric, const Matrix& m_basis,
                    const Matrix& B);

KillingData killing_data(const Scenario& scenario, const Point& x,
                         const NumericOptions& options = {});

// D act(g, .) at x: analytic when catalogued, else fourth-order central
// differences with step h_act.
Matrix action_jacobian(const Scenario& scenario, const lie::GroupElement& g,
                       const Point& x, double h_act = 1e-5);

// Dact^T metric(act(g, x)) Dact. Throws DomainError when x or its image leaves
// the chart.
Matrix action_pullback_metric(const Scenario& scenario, const lie::GroupElement& g,
                              const MetricFn& metric, const Point& x,
                              double h_act = 1e-5);

// A vector of m_x at x, validated against the isotropy algebra.
struct OrbitBundlePoint {
  Point x;
  Vector v;
};

// Throws std::invalid_argument unless B(v, g_x) vanishes to 1e-10.
OrbitBundlePoint make_orbit_bundle_point(const KillingData& data, Vector v);

}  // namespace cheeger::manifold
