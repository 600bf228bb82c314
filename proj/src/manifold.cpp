#include "cheeger/manifold.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cheeger/errors.hpp"

namespace cheeger::manifold {

namespace {

std::string format_point(const Point& x) {
  std::ostringstream os;
  os << '(';
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
  os << ')';
  return os.str();
}

}  // namespace

Chart::Chart(std::vector<std::string> labels, std::vector<Interval> intervals)
    : labels_(std::move(labels)), intervals_(std::move(intervals)) {
  if (labels_.size() != intervals_.size() || intervals_.empty()) {
    throw std::invalid_argument("chart needs one label per interval");
  }
  for (const auto& iv : intervals_) {
    if (!(iv.hi > iv.lo)) throw std::invalid_argument("empty chart interval");
  }
}

bool Chart::contains(const Point& x, double margin) const {
  if (x.size() != dim() || !x.allFinite()) return false;
  for (int i = 0; i < dim(); ++i) {
    const auto& iv = intervals_[i];
    if (iv.periodic) continue;
    if (!(x(i) > iv.lo + margin && x(i) < iv.hi - margin)) return false;
  }
  return true;
}

void Chart::require_inside(const Point& x, double margin, const std::string& what) const {
  if (!contains(x, margin)) {
    throw DomainError(what + ": point " + format_point(x) + " outside chart domain");
  }
}

Point Chart::unwrap_near(const Point& y, const Point& ref) const {
  Point out = y;
  for (int i = 0; i < dim(); ++i) {
    const auto& iv = intervals_[i];
    if (!iv.periodic) continue;
    out(i) -= iv.period() * std::round((y(i) - ref(i)) / iv.period());
  }
  return out;
}

Point Chart::reduce(const Point& x) const {
  Point out = x;
  for (int i = 0; i < dim(); ++i) {
    const auto& iv = intervals_[i];
    if (!iv.periodic) continue;
    out(i) = iv.lo + std::fmod(std::fmod(x(i) - iv.lo, iv.period()) + iv.period(), iv.period());
  }
  return out;
}

Chart Chart::shrunk(double margin) const {
  auto intervals = intervals_;
  for (auto& iv : intervals) {
    if (iv.periodic) continue;
    iv.lo += margin;
    iv.hi -= margin;
  }
  return Chart(labels_, std::move(intervals));
}

Scenario::Scenario(lie::LieGroupModel group, Chart chart, double margin)
    : group_(std::move(group)), chart_(std::move(chart)), margin_(margin) {
  if (!(margin >= 0.0)) throw ConfigError("scenario margin must be non-negative");
  for (const auto& iv : chart_.intervals()) {
    if (!iv.periodic && iv.hi - iv.lo <= 2.0 * margin) {
      throw ConfigError("scenario margin leaves an empty sample region");
    }
  }
}

std::optional<std::vector<Matrix>> Scenario::metric_derivatives(const Point&) const {
  return std::nullopt;
}

std::optional<Matrix> Scenario::killing_analytic(const Point&) const { return std::nullopt; }

std::optional<Matrix> Scenario::action_jacobian(const lie::GroupElement&, const Point&) const {
  return std::nullopt;
}

Matrix killing_operator(const Scenario& scenario, const Point& x, KillingMethod method,
                        double h_act) {
  scenario.chart().require_inside(x, 0.0, "killing_operator");
  if (method != KillingMethod::kFiniteDifference) {
    if (auto k = scenario.killing_analytic(x)) return *k;
    if (method == KillingMethod::kAnalytic) {
      throw std::invalid_argument(scenario.id() + " has no analytic Killing operator");
    }
  }
  const auto& group = scenario.group();
  const auto& chart = scenario.chart();
  Matrix K(chart.dim(), group.dim());
  for (int i = 0; i < group.dim(); ++i) {
    const Vector e = Vector::Unit(group.dim(), i);
    auto at = [&](double t) { return chart.unwrap_near(scenario.act(group.exp(e, t), x), x); };
    K.col(i) = (-at(2 * h_act) + 8.0 * at(h_act) - 8.0 * at(-h_act) + at(-2 * h_act)) /
               (12.0 * h_act);
  }
  return K;
}

IsotropySplit isotropy_split(const Matrix& K, const Matrix& B, double sigma_tol) {
  const Eigen::Index n = B.rows();
  if (K.cols() != n) throw std::invalid_argument("isotropy_split: K and B disagree on dim g");
  // B = L L^T; in B-orthonormal coordinates c, algebra coefficients are
  // a = L^{-T} c and the Killing operator becomes K L^{-T}.
  const Eigen::LLT<Matrix> llt(B);
  if (llt.info() != Eigen::Success) throw NumericalError("bi-invariant form is not SPD");
  const Matrix l_inv_t = llt.matrixU().solve(Matrix::Identity(n, n));
  const Matrix k_hat = K * l_inv_t;

  Eigen::JacobiSVD<Matrix> svd(k_hat, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  const double threshold = sigma_tol * smax;

  // Full V columns are ordered by decreasing singular value; entries beyond
  // s.size() (when dim_m < dim_g) belong to the kernel.
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (smax == 0.0) break;
    if (s(i) >= 0.1 * threshold && s(i) <= 10.0 * threshold) {
      throw DegeneratePointError(
          "ambiguous Killing rank: singular value " + std::to_string(s(i)) +
          " is within a decade of the kernel threshold (point near a singular orbit)");
    }
    if (s(i) > threshold) ++rank;
  }

  IsotropySplit out;
  out.m_basis = l_inv_t * svd.matrixV().leftCols(rank);
  out.isotropy_basis = l_inv_t * svd.matrixV().rightCols(n - rank);
  for (Matrix* basis : {&out.m_basis, &out.isotropy_basis}) {
    for (Eigen::Index c = 0; c < basis->cols(); ++c) {
      Vector col = basis->col(c);
      linalg::fix_sign(col);
      basis->col(c) = col;
    }
  }
  return out;
}

Matrix orbit_tensor(const Matrix& K, const Matrix& metric, const Matrix& m_basis,
                    const Matrix& B) {
  const Matrix km = K * m_basis;
  const Matrix b_m = m_basis.transpose() * B * m_basis;
  const Matrix gram = km.transpose() * metric * km;
  const Matrix P = linalg::symmetrize(b_m.llt().solve(gram));
  if (P.size() > 0 && !linalg::is_spd(P, 1e-12 * std::max(1.0, linalg::max_abs(P)))) {
    throw NumericalError("orbit tensor is not SPD (Killing rank misdetected?)");
  }
  return P;
}

KillingData killing_data(const Scenario& scenario, const Point& x,
                         const NumericOptions& options) {
  KillingData d;
  d.x = x;
  d.K = killing_operator(scenario, x, options.killing, options.h_act);
  const Matrix& B = scenario.group().form();
  d.B = B;
  auto split = isotropy_split(d.K, B, options.sigma_tol);
  d.isotropy_basis = std::move(split.isotropy_basis);
  d.m_basis = std::move(split.m_basis);
  d.P = orbit_tensor(d.K, scenario.metric(x), d.m_basis, B);
  return d;
}

Matrix action_jacobian(const Scenario& scenario, const lie::GroupElement& g, const Point& x,
                       double h_act) {
  if (auto j = scenario.action_jacobian(g, x)) return *j;
  const auto& chart = scenario.chart();
  const Point center = scenario.act(g, x);
  Matrix J(chart.dim(), chart.dim());
  for (int i = 0; i < chart.dim(); ++i) {
    auto at = [&](double t) {
      Point y = x;
      y(i) += t;
      return chart.unwrap_near(scenario.act(g, y), center);
    };
    J.col(i) = (-at(2 * h_act) + 8.0 * at(h_act) - 8.0 * at(-h_act) + at(-2 * h_act)) /
               (12.0 * h_act);
  }
  return J;
}

Matrix action_pullback_metric(const Scenario& scenario, const lie::GroupElement& g,
                              const MetricFn& metric, const Point& x, double h_act) {
  const auto& chart = scenario.chart();
  chart.require_inside(x, 2.0 * h_act, "action_pullback_metric");
  const Point image = scenario.act(g, x);
  chart.require_inside(image, 2.0 * h_act, "action_pullback_metric (image)");
  const Matrix J = action_jacobian(scenario, g, x, h_act);
  return linalg::symmetrize(J.transpose() * metric(image) * J);
}

OrbitBundlePoint make_orbit_bundle_point(const KillingData& data, Vector v) {
  const Matrix& B = data.B;
  if (v.size() != B.rows()) throw std::invalid_argument("orbit bundle vector has wrong length");
  const double leak = data.isotropy_basis.size()
                          ? (data.isotropy_basis.transpose() * B * v).cwiseAbs().maxCoeff()
                          : 0.0;
  if (leak > 1e-10) {
    throw std::invalid_argument("vector is not B-orthogonal to the isotropy algebra");
  }
  return {data.x, std::move(v)};
}

}  // namespace cheeger::manifold
