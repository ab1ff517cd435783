#pragma once

// Dense decompositions used throughout the library.
//
// All routines return singular triplets in nonincreasing order with a
// deterministic sign/ordering convention (see canonicalize_pairs). Square,
// exactly symmetric inputs are decomposed through the symmetric eigenproblem:
// sigma_i = |lambda_i|, u_i = q_i, v_i = sign(lambda_i) q_i. Everything else
// goes through LAPACK's SVD drivers.

#include <Eigen/Dense>

namespace sbmase {

struct SvdResult {
  Eigen::MatrixXd U;      // rows x r, orthonormal columns
  Eigen::VectorXd sigma;  // r, nonincreasing, nonnegative
  Eigen::MatrixXd V;      // cols x r, orthonormal columns

  [[nodiscard]] Eigen::Index rank_count() const { return sigma.size(); }
  [[nodiscard]] Eigen::MatrixXd reconstruct() const;
};

// Full (thin) SVD, r = min(rows, cols). Throws ConvergenceFailure.
SvdResult svd(const Eigen::MatrixXd& m);

// Leading d singular triplets, 1 <= d <= min(rows, cols).
SvdResult truncated_svd(const Eigen::MatrixXd& m, Eigen::Index d);

// All min(rows, cols) singular values, nonincreasing.
Eigen::VectorXd singular_values(const Eigen::MatrixXd& m);

// Number of singular values above rel_tol * sigma_1 (0 for the zero matrix).
Eigen::Index numerical_rank(const Eigen::MatrixXd& m, double rel_tol = 1e-10);

// Symmetric eigendecomposition of the whole spectrum, eigenvalues ascending.
struct SymmetricEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};
SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& m);

bool is_exactly_symmetric(const Eigen::MatrixXd& m);

// Sign and order convention for singular pairs:
//  * each (u_j, v_j) is flipped so that the largest-magnitude entry of u_j is
//    positive (lowest index wins ties);
//  * within a run of numerically equal singular values, columns are ordered by
//    the index of that largest-magnitude entry.
void canonicalize_pairs(SvdResult& s);

}  // namespace sbmase
