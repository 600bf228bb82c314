#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cheeger/linalg.hpp"
#include "cheeger/random.hpp"

namespace cheeger::lie {

// An element of a matrix group in its defining (real) representation.
struct GroupElement {
  Matrix matrix;
};

// Matrix exponential by scaling and squaring with a truncated Taylor series.
// Accurate to a few ulps of ||a|| for the small, skew matrices used here.
Matrix expm(const Matrix& a);

// A compact matrix Lie group described by a basis {k_i} of its Lie algebra
// and a bi-invariant inner product B on that basis. Coefficient vectors
// (length dim()) are the canonical representation of algebra elements.
class LieGroupModel {
 public:
  using MembershipFn = std::function<double(const Matrix&)>;

  // Validates the basis: linear independence, closure under the commutator,
  // antisymmetry and Jacobi identity of the structure constants, B SPD and
  // ad-invariant. Throws NumericalError on failure.
  LieGroupModel(std::string name, std::vector<Matrix> basis, Matrix form,
                MembershipFn membership);

  // Catalogue. All bases are B-orthonormal (B = identity).
  static LieGroupModel u1();
  static LieGroupModel t2();
  // SU(2) = Sp(1) acting on R^4 = H by left quaternion multiplication, basis
  // L_i/2, L_j/2, L_k/2 with [e1, e2] = e3 (cyclic); exp(t e) has period 4 pi.
  static LieGroupModel su2();

  const std::string& name() const { return name_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  int rep_dim() const { return static_cast<int>(basis_.front().rows()); }
  const std::vector<Matrix>& basis() const { return basis_; }
  const Matrix& form() const { return form_; }

  // c[i][j][m] with [k_i, k_j] = sum_m c[i][j][m] k_m.
  double structure_constant(int i, int j, int m) const;

  Matrix algebra_element(const Vector& coeffs) const;

  // Coefficients of X in the basis. Throws NumericalError when X is not in
  // the span (relative residual > 1e-10); the residual is reported via the
  // optional out-parameter either way.
  Vector project(const Matrix& x, double* residual = nullptr) const;

  // Coefficients of [A, B] via the matrix commutator.
  Vector bracket(const Vector& a, const Vector& b) const;

  GroupElement exp(const Vector& a, double t = 1.0) const;
  GroupElement identity() const;
  GroupElement multiply(const GroupElement& a, const GroupElement& b) const;

  double membership_residual(const GroupElement& g) const;

  // max |B([a,b],c) + B(b,[a,c])| over basis triples.
  double ad_invariance_residual() const;
  // max |c_ij^m + c_ji^m|.
  double antisymmetry_residual() const;
  // max over basis triples of the Jacobi sum, in coefficient space.
  double jacobi_residual() const;

  // exp of an algebra element with B-norm uniform in [0, radius) along a
  // uniformly random direction.
  GroupElement random_element(CounterRng& rng, double radius) const;

 private:
  std::string name_;
  std::vector<Matrix> basis_;
  Matrix form_;
  MembershipFn membership_;
  Matrix flat_gram_inverse_;
  std::vector<double> structure_;  // dim^3, row-major (i, j, m)
};

}  // namespace cheeger::lie
