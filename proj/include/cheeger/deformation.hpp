#pragma once

#include <string>
#include <vector>

#include "cheeger/manifold.hpp"

namespace cheeger::deformation {

using manifold::KillingData;

// Length scale l of the G-factor metric l^2 g_bi.
struct DeformationParams {
  double l;

  // Throws std::invalid_argument unless l > 0 and finite.
  static DeformationParams make(double l);
  // 1/l^2 rescaling loses accuracy below this.
  bool ill_conditioned() const { return l * l < 1e-12; }
};

enum class MetricTag { kOriginal, kCheeger, kRescaled, kLimit };

// Which metric field to evaluate: g_M, g_l, the vertically rescaled g~_l, or
// the limit g~. `l` is ignored for kOriginal and kLimit.
struct MetricVariant {
  MetricTag tag = MetricTag::kOriginal;
  double l = 1.0;

  static MetricVariant original() { return {MetricTag::kOriginal, 1.0}; }
  static MetricVariant cheeger(double l) { return {MetricTag::kCheeger, l}; }
  static MetricVariant rescaled(double l) { return {MetricTag::kRescaled, l}; }
  static MetricVariant limit() { return {MetricTag::kLimit, 1.0}; }

  std::string name() const;
};

// A generator of the vertical space of q: G x M -> M at (e, x), stored as
// (algebra part, tangent part) = (-k, K k).
struct VerticalPair {
  Vector algebra;
  Vector tangent;
};

struct VerticalSpaceBasis {
  std::vector<VerticalPair> pairs;
};

// The unique kappa in m_x with B(kappa, k) = g_M(v, K k) for every k in g
// (algebra coefficients). kappa(v)/l^2 is the G-component of the horizontal
// lift of v for every l.
Vector kappa(const KillingData& data, const Matrix& metric, const Vector& v);
// Matrix of v -> kappa(v), dim_g x dim_m.
Matrix kappa_matrix(const KillingData& data, const Matrix& metric);

VerticalSpaceBasis vertical_space_basis(const KillingData& data);

// max over vertical pairs of |(l^2 B + g_M)((kappa(v)/l^2, v), (-k, K k))|.
double horizontality_residual(const KillingData& data, const Matrix& metric, double l,
                              const Vector& v);

// Ch_l(v) = K(kappa(v))/l^2 + v.
Vector cheeger_reparam(const KillingData& data, const Matrix& metric, double l,
                       const Vector& v);
Matrix cheeger_reparam_matrix(const KillingData& data, const Matrix& metric, double l);

// g_l = C^{-T} [kappa^* B / l^2 + g_M] C^{-1} with C the matrix of Ch_l.
// Throws NumericalError when cond(C) > 1e12.
Matrix cheeger_metric(const KillingData& data, const Matrix& metric, double l);

// g_l assembled from the orbit tensor in the adapted frame: vertical block
// l^2 P (l^2 + P)^{-1}, horizontal block g_M, no mixed terms. Independent of
// the Ch_l route above; the two must agree.
Matrix cheeger_metric_closed_form(const KillingData& data, const Matrix& metric, double l);

// g_M-orthonormal frame adapted to T_xG(x) + its complement: the first
// `vertical_dim` columns span the orbit, the rest are Gram-Schmidt of the
// chart basis against it (fixed order, first nonzero component positive).
struct AdaptedFrame {
  Matrix frame;
  int vertical_dim = 0;
  // frame.leftCols(vertical_dim) = K m_basis * to_m_coords.
  Matrix to_m_coords;
};

AdaptedFrame adapted_frame(const KillingData& data, const Matrix& metric);

// g~_l: g_l with its orbit block divided by l^2, horizontal and mixed blocks
// untouched. Assembled in the adapted frame.
Matrix rescaled_metric(const KillingData& data, const Matrix& metric, double l);

// g~: horizontal block of g_M, orbit block (K|_m^{-1})^* B.
Matrix limit_metric(const KillingData& data, const Matrix& metric);

// (Phi_x)^* metric (a, b) = metric(K a, K b) for a, b in m_x. Throws
// std::invalid_argument when a or b has an isotropy component.
double normal_homogeneous_pullback(const KillingData& data, const Matrix& metric_at_x,
                                   const Vector& a, const Vector& b);
// The same pullback as a matrix in m_basis coordinates.
Matrix orbit_pullback(const KillingData& data, const Matrix& metric_at_x);

// Evaluate a metric variant at x.
Matrix evaluate(const manifold::Scenario& scenario, const MetricVariant& variant,
                const Point& x, const manifold::NumericOptions& options = {});

// The variant as a metric field. The scenario must outlive the result.
manifold::MetricFn field(const manifold::Scenario& scenario, const MetricVariant& variant,
                         const manifold::NumericOptions& options = {});

}  // namespace cheeger::deformation
