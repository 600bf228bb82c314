#include "cheeger/deformation.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cheeger/errors.hpp"

namespace cheeger::deformation {

namespace {

void require_positive(double l) {
  if (!(l > 0.0) || !std::isfinite(l)) {
    throw std::invalid_argument("deformation parameter l must be positive and finite");
  }
}

// m_basis coordinates of kappa: B_m c = (K m)^T g_M v.
Matrix kappa_m_coords(const KillingData& data, const Matrix& metric) {
  const Matrix km = data.vertical_vectors();
  const Matrix b_m = data.m_basis.transpose() * data.B * data.m_basis;
  return b_m.llt().solve(km.transpose() * metric);
}

// frame^{-T} M frame^{-1} for a g_M-orthonormal frame (frame^{-1} = frame^T g_M).
Matrix from_frame(const Matrix& frame, const Matrix& metric, const Matrix& in_frame) {
  const Matrix gf = metric * frame;
  return linalg::symmetrize(gf * in_frame * gf.transpose());
}

}  // namespace

DeformationParams DeformationParams::make(double l) {
  require_positive(l);
  return {l};
}

std::string MetricVariant::name() const {
  std::ostringstream os;
  switch (tag) {
    case MetricTag::kOriginal: return "g_M";
    case MetricTag::kLimit: return "limit";
    case MetricTag::kCheeger: os << "cheeger(l=" << l << ")"; break;
    case MetricTag::kRescaled: os << "rescaled(l=" << l << ")"; break;
  }
  return os.str();
}

Matrix kappa_matrix(const KillingData& data, const Matrix& metric) {
  return data.m_basis * kappa_m_coords(data, metric);
}

Vector kappa(const KillingData& data, const Matrix& metric, const Vector& v) {
  return kappa_matrix(data, metric) * v;
}

VerticalSpaceBasis vertical_space_basis(const KillingData& data) {
  VerticalSpaceBasis out;
  const auto dim_g = data.K.cols();
  for (Eigen::Index i = 0; i < dim_g; ++i) {
    const Vector e = Vector::Unit(dim_g, i);
    out.pairs.push_back({-e, data.K * e});
  }
  return out;
}

double horizontality_residual(const KillingData& data, const Matrix& metric, double l,
                              const Vector& v) {
  require_positive(l);
  const Vector lift_g = kappa(data, metric, v) / (l * l);
  double worst = 0.0;
  for (const auto& pair : vertical_space_basis(data).pairs) {
    const double ip = l * l * lift_g.dot(data.B * pair.algebra) + v.dot(metric * pair.tangent);
    worst = std::max(worst, std::abs(ip));
  }
  return worst;
}

Matrix cheeger_reparam_matrix(const KillingData& data, const Matrix& metric, double l) {
  require_positive(l);
  const auto n = metric.rows();
  return Matrix::Identity(n, n) + data.K * kappa_matrix(data, metric) / (l * l);
}

Vector cheeger_reparam(const KillingData& data, const Matrix& metric, double l,
                       const Vector& v) {
  require_positive(l);
  return data.K * kappa(data, metric, v) / (l * l) + v;
}

Matrix cheeger_metric(const KillingData& data, const Matrix& metric, double l) {
  const Matrix C = cheeger_reparam_matrix(data, metric, l);
  const double cond = linalg::condition_number(C);
  if (cond > 1e12) {
    std::ostringstream os;
    os << "Cheeger reparametrization ill-conditioned (cond " << cond << ") at l = " << l;
    throw NumericalError(os.str());
  }
  const Matrix kap = kappa_matrix(data, metric);
  const Matrix lifted = kap.transpose() * data.B * kap / (l * l) + metric;
  const Eigen::PartialPivLU<Matrix> ct(C.transpose());
  const Matrix left = ct.solve(lifted);                 // C^{-T} Q
  const Matrix both = ct.solve(left.transpose());       // C^{-T} (C^{-T} Q)^T
  return linalg::symmetrize(both.transpose());
}

AdaptedFrame adapted_frame(const KillingData& data, const Matrix& metric) {
  const auto n = metric.rows();
  const Matrix km = data.vertical_vectors();
  const auto r = km.cols();
  Matrix candidates(n, r + n);
  candidates << km, Matrix::Identity(n, n);
  AdaptedFrame out;
  out.frame = linalg::gram_schmidt(candidates, metric);
  if (out.frame.cols() != n) {
    throw NumericalError("adapted frame construction lost rank");
  }
  out.vertical_dim = static_cast<int>(r);
  // Express the vertical frame in m coordinates: K m T = E_v.
  const Matrix ev = out.frame.leftCols(r);
  const Matrix gram = km.transpose() * metric * km;
  out.to_m_coords = gram.llt().solve(km.transpose() * metric * ev);
  return out;
}

Matrix cheeger_metric_closed_form(const KillingData& data, const Matrix& metric, double l) {
  require_positive(l);
  const AdaptedFrame af = adapted_frame(data, metric);
  const auto n = metric.rows();
  const auto r = af.vertical_dim;
  // m_basis is B-orthonormal, so B_m = I and P is symmetric.
  const Matrix& P = data.P;
  const Matrix shifted = P + l * l * Matrix::Identity(r, r);
  const Matrix vertical_m = linalg::symmetrize(l * l * P * shifted.inverse());
  Matrix in_frame = Matrix::Identity(n, n);
  in_frame.topLeftCorner(r, r) = af.to_m_coords.transpose() * vertical_m * af.to_m_coords;
  return from_frame(af.frame, metric, in_frame);
}

Matrix rescaled_metric(const KillingData& data, const Matrix& metric, double l) {
  const Matrix gl = cheeger_metric(data, metric, l);
  const AdaptedFrame af = adapted_frame(data, metric);
  const auto r = af.vertical_dim;
  Matrix in_frame = af.frame.transpose() * gl * af.frame;
  in_frame.topLeftCorner(r, r) /= l * l;
  return from_frame(af.frame, metric, in_frame);
}

Matrix limit_metric(const KillingData& data, const Matrix& metric) {
  const AdaptedFrame af = adapted_frame(data, metric);
  const auto n = metric.rows();
  const auto r = af.vertical_dim;
  const Matrix b_m = data.m_basis.transpose() * data.B * data.m_basis;
  Matrix in_frame = Matrix::Identity(n, n);
  in_frame.topLeftCorner(r, r) = af.to_m_coords.transpose() * b_m * af.to_m_coords;
  return from_frame(af.frame, metric, in_frame);
}

double normal_homogeneous_pullback(const KillingData& data, const Matrix& metric_at_x,
                                   const Vector& a, const Vector& b) {
  manifold::make_orbit_bundle_point(data, a);
  manifold::make_orbit_bundle_point(data, b);
  return (data.K * a).dot(metric_at_x * (data.K * b));
}

Matrix orbit_pullback(const KillingData& data, const Matrix& metric_at_x) {
  const Matrix km = data.vertical_vectors();
  return linalg::symmetrize(km.transpose() * metric_at_x * km);
}

Matrix evaluate(const manifold::Scenario& scenario, const MetricVariant& variant,
                const Point& x, const manifold::NumericOptions& options) {
  const Matrix g = scenario.metric(x);
  if (variant.tag == MetricTag::kOriginal) return g;
  const KillingData data = manifold::killing_data(scenario, x, options);
  switch (variant.tag) {
    case MetricTag::kCheeger: return cheeger_metric(data, g, variant.l);
    case MetricTag::kRescaled: return rescaled_metric(data, g, variant.l);
    case MetricTag::kLimit: return limit_metric(data, g);
    case MetricTag::kOriginal: break;
  }
  return g;
}

manifold::MetricFn field(const manifold::Scenario& scenario, const MetricVariant& variant,
                         const manifold::NumericOptions& options) {
  return [&scenario, variant, options](const Point& x) {
    return evaluate(scenario, variant, x, options);
  };
}

}  // namespace cheeger::deformation
