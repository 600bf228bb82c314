#include "cheeger/lie.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cheeger/errors.hpp"

namespace cheeger::lie {

Matrix expm(const Matrix& a) {
  const Eigen::Index n = a.rows();
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
  int squarings = 0;
  if (norm > 0.25) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
  const Matrix scaled = a / std::ldexp(1.0, squarings);

  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= 30; ++k) {
    term = term * scaled / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

namespace {

Eigen::Map<const Vector> flat(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

double orthogonality_residual(const Matrix& m) {
  const Matrix id = Matrix::Identity(m.rows(), m.cols());
  return linalg::max_abs(m.transpose() * m - id) + std::abs(m.determinant() - 1.0);
}

Matrix rotation_generator() {
  Matrix k(2, 2);
  k << 0, -1, 1, 0;
  return k;
}

// Left multiplication by the imaginary units on (w, x, y, z).
Matrix quaternion_left(int unit) {
  Matrix m = Matrix::Zero(4, 4);
  switch (unit) {
    case 1:  // i
      m(1, 0) = 1; m(0, 1) = -1; m(3, 2) = 1; m(2, 3) = -1;
      break;
    case 2:  // j
      m(2, 0) = 1; m(0, 2) = -1; m(1, 3) = 1; m(3, 1) = -1;
      break;
    default:  // k
      m(3, 0) = 1; m(0, 3) = -1; m(2, 1) = 1; m(1, 2) = -1;
      break;
  }
  return m;
}

}  // namespace

LieGroupModel::LieGroupModel(std::string name, std::vector<Matrix> basis,
                             Matrix form, MembershipFn membership)
    : name_(std::move(name)),
      basis_(std::move(basis)),
      form_(std::move(form)),
      membership_(std::move(membership)) {
  const int n = dim();
  if (n < 1) throw NumericalError(name_ + ": empty Lie algebra basis");
  if (form_.rows() != n || form_.cols() != n) {
    throw NumericalError(name_ + ": bi-invariant form has wrong shape");
  }

  Matrix gram(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gram(i, j) = flat(basis_[i]).dot(flat(basis_[j]));
  Eigen::FullPivLU<Matrix> lu(gram);
  if (lu.rank() < n) throw NumericalError(name_ + ": generators are linearly dependent");
  flat_gram_inverse_ = lu.inverse();

  if (linalg::max_abs(form_ - form_.transpose()) > 1e-14 ||
      linalg::min_eigenvalue(form_) <= 1e-12) {
    throw NumericalError(name_ + ": bi-invariant form is not SPD");
  }

  structure_.assign(static_cast<std::size_t>(n) * n * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Matrix comm = basis_[i] * basis_[j] - basis_[j] * basis_[i];
      const Vector c = project(comm);
      for (int m = 0; m < n; ++m) structure_[(i * n + j) * n + m] = c(m);
    }
  }

  if (antisymmetry_residual() > 1e-12 || jacobi_residual() > 1e-12) {
    throw NumericalError(name_ + ": structure constants violate antisymmetry/Jacobi");
  }
  if (ad_invariance_residual() > 1e-10) {
    throw NumericalError(name_ + ": form is not ad-invariant");
  }
}

LieGroupModel LieGroupModel::u1() {
  return LieGroupModel("U(1)", {rotation_generator()}, Matrix::Identity(1, 1),
                       [](const Matrix& m) {
                         return orthogonality_residual(m) + std::abs(m(0, 0) - m(1, 1)) +
                                std::abs(m(0, 1) + m(1, 0));
                       });
}

LieGroupModel LieGroupModel::t2() {
  Matrix k1 = Matrix::Zero(4, 4);
  Matrix k2 = Matrix::Zero(4, 4);
  k1.topLeftCorner(2, 2) = rotation_generator();
  k2.bottomRightCorner(2, 2) = rotation_generator();
  return LieGroupModel("T^2", {k1, k2}, Matrix::Identity(2, 2), [](const Matrix& m) {
    double r = orthogonality_residual(m);
    r += linalg::max_abs(m.topRightCorner(2, 2)) + linalg::max_abs(m.bottomLeftCorner(2, 2));
    for (int b = 0; b < 4; b += 2) {
      r += std::abs(m(b, b) - m(b + 1, b + 1)) + std::abs(m(b, b + 1) + m(b + 1, b));
    }
    return r;
  });
}

LieGroupModel LieGroupModel::su2() {
  std::vector<Matrix> basis;
  for (int u = 1; u <= 3; ++u) basis.push_back(0.5 * quaternion_left(u));
  return LieGroupModel("SU(2)", std::move(basis), Matrix::Identity(3, 3), [](const Matrix& m) {
    // A unit quaternion q acts as m = q0 I + q1 L_i + q2 L_j + q3 L_k with
    // q = first column of m.
    const Vector q = m.col(0);
    Matrix rebuilt = q(0) * Matrix::Identity(4, 4);
    for (int u = 1; u <= 3; ++u) rebuilt += q(u) * quaternion_left(u);
    return linalg::max_abs(m - rebuilt) + std::abs(q.squaredNorm() - 1.0);
  });
}

double LieGroupModel::structure_constant(int i, int j, int m) const {
  const int n = dim();
  return structure_[(i * n + j) * n + m];
}

Matrix LieGroupModel::algebra_element(const Vector& coeffs) const {
  if (coeffs.size() != dim()) {
    throw std::invalid_argument("algebra coefficient vector has wrong length");
  }
  Matrix x = Matrix::Zero(rep_dim(), rep_dim());
  for (int i = 0; i < dim(); ++i) x += coeffs(i) * basis_[i];
  return x;
}

Vector LieGroupModel::project(const Matrix& x, double* residual) const {
  const int n = dim();
  Vector rhs(n);
  for (int i = 0; i < n; ++i) rhs(i) = flat(basis_[i]).dot(flat(x));
  const Vector c = flat_gram_inverse_ * rhs;
  Matrix rebuilt = Matrix::Zero(x.rows(), x.cols());
  for (int i = 0; i < n; ++i) rebuilt += c(i) * basis_[i];
  const double res = (x - rebuilt).norm() / std::max(1.0, x.norm());
  if (residual) *residual = res;
  if (res > 1e-10) {
    throw NumericalError(name_ + ": matrix is not in the Lie algebra (residual " +
                         std::to_string(res) + ")");
  }
  return c;
}

Vector LieGroupModel::bracket(const Vector& a, const Vector& b) const {
  const Matrix am = algebra_element(a);
  const Matrix bm = algebra_element(b);
  return project(am * bm - bm * am);
}

GroupElement LieGroupModel::exp(const Vector& a, double t) const {
  return {expm(t * algebra_element(a))};
}

GroupElement LieGroupModel::identity() const {
  return {Matrix::Identity(rep_dim(), rep_dim())};
}

GroupElement LieGroupModel::multiply(const GroupElement& a, const GroupElement& b) const {
  return {a.matrix * b.matrix};
}

double LieGroupModel::membership_residual(const GroupElement& g) const {
  if (g.matrix.rows() != rep_dim() || g.matrix.cols() != rep_dim()) {
    return std::numeric_limits<double>::infinity();
  }
  return membership_(g.matrix);
}

double LieGroupModel::ad_invariance_residual() const {
  const int n = dim();
  double worst = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        // B([e_a, e_b], e_c) + B(e_b, [e_a, e_c])
        double s = 0.0;
        for (int m = 0; m < n; ++m) {
          s += structure_constant(a, b, m) * form_(m, c);
          s += form_(b, m) * structure_constant(a, c, m);
        }
        worst = std::max(worst, std::abs(s));
      }
    }
  }
  return worst;
}

double LieGroupModel::antisymmetry_residual() const {
  const int n = dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int m = 0; m < n; ++m)
        worst = std::max(worst, std::abs(structure_constant(i, j, m) +
                                         structure_constant(j, i, m)));
  return worst;
}

double LieGroupModel::jacobi_residual() const {
  const int n = dim();
  double worst = 0.0;
  // [e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] + [e_k,[e_i,e_j]] in coefficients.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int r = 0; r < n; ++r) {
          double s = 0.0;
          for (int m = 0; m < n; ++m) {
            s += structure_constant(j, k, m) * structure_constant(i, m, r);
            s += structure_constant(k, i, m) * structure_constant(j, m, r);
            s += structure_constant(i, j, m) * structure_constant(k, m, r);
          }
          worst = std::max(worst, std::abs(s));
        }
      }
    }
  }
  return worst;
}

GroupElement LieGroupModel::random_element(CounterRng& rng, double radius) const {
  // Direction uniform w.r.t. B: draw in B-orthonormal coordinates.
  const Eigen::LLT<Matrix> llt(form_);
  const Vector dir = rng.unit_vector(dim());
  const Vector coeffs = llt.matrixU().solve(dir) * rng.uniform(0.0, radius);
  return exp(coeffs);
}

}  // namespace cheeger::lie
