#include "cheeger/linalg.hpp"

#include <cmath>
#include <limits>

#include "cheeger/errors.hpp"

namespace cheeger::linalg {

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double min_eigenvalue(const Matrix& symmetric) {
  if (symmetric.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool is_spd(const Matrix& symmetric, double min_eig) {
  if (symmetric.rows() != symmetric.cols()) return false;
  if (!symmetric.allFinite()) return false;
  return min_eigenvalue(symmetric) > min_eig;
}

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double condition_number(const Matrix& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

void fix_sign(Vector& v, double tol) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > tol) {
      if (v(i) < 0) v = -v;
      return;
    }
  }
}

Matrix gram_schmidt(const Matrix& vectors, const Matrix& metric,
                    double drop_tol) {
  Matrix out(vectors.rows(), vectors.cols());
  Eigen::Index kept = 0;
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Vector v = vectors.col(c);
    const double original = std::sqrt(std::abs(v.dot(metric * v)));
    if (original == 0.0) continue;
    // Two passes keep the result orthogonal to round-off.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < kept; ++k) {
        v -= out.col(k).dot(metric * v) * out.col(k);
      }
    }
    const double norm = std::sqrt(std::abs(v.dot(metric * v)));
    if (norm <= drop_tol * original) continue;
    v /= norm;
    fix_sign(v);
    out.col(kept++) = v;
  }
  return out.leftCols(kept);
}

double metric_operator_norm(const Matrix& delta, const Matrix& metric) {
  if (delta.size() == 0) return 0.0;
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(
      symmetrize(delta), symmetrize(metric), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError("generalized eigen-solve failed (metric not SPD?)");
  }
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace cheeger::linalg
