#pragma once

#include <Eigen/Dense>

namespace cheeger {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Chart coordinates of a point of M (universal-cover representative for
// periodic coordinates).
using Point = Eigen::VectorXd;

namespace linalg {

Matrix symmetrize(const Matrix& m);

double min_eigenvalue(const Matrix& symmetric);

bool is_spd(const Matrix& symmetric, double min_eig = 1e-12);

// Largest absolute entry; 0 for empty matrices.
double max_abs(const Matrix& m);

// 2-norm condition number from the singular values (inf when singular).
double condition_number(const Matrix& m);

// Flip v so that its first component with |v_i| > tol is positive.
void fix_sign(Vector& v, double tol = 1e-12);

// Modified Gram-Schmidt of the columns of `vectors` with respect to the inner
// product <a, b> = a^T metric b. Columns whose residual norm falls below
// `drop_tol` times their original norm are skipped. Each kept column gets the
// fix_sign convention applied *before* normalization of later columns, so
// the result is a deterministic function of the input order.
Matrix gram_schmidt(const Matrix& vectors, const Matrix& metric,
                    double drop_tol = 1e-10);

// sup |delta(u, v)| over metric-unit u, v: the largest |mu| solving
// delta u = mu * metric u. Both arguments must be symmetric, metric SPD.
double metric_operator_norm(const Matrix& delta, const Matrix& metric);

}  // namespace linalg
}  // namespace cheeger
