#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <tuple>
#include <vector>

namespace homog {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

/// Builds an n x n compressed-row matrix; duplicate triplets are summed,
/// column indices end up sorted and unique. Throws on out-of-range indices.
SparseMatrix csr_from_triplets(int n, const std::vector<Triplet>& triplets);

/// Exact sparse matrix-vector product. Throws on dimension mismatch.
Eigen::VectorXd spmv(const SparseMatrix& A, const Eigen::VectorXd& x);

struct CgResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double final_residual = 0.0;  // relative, ||b - Ax|| / ||b||
  bool converged = false;
  /// Preconditioned residual norms sqrt(r' M^-1 r), one entry per iteration.
  std::vector<double> residual_history;
};

/// Jacobi-preconditioned conjugate gradients for symmetric positive definite
/// systems. Stops when ||b - Ax|| <= tol * ||b||. Aborts with a diagnostic on
/// NaN; non-convergence is reported through `converged` and the residual.
CgResult cg_solve(const SparseMatrix& A, const Eigen::VectorXd& b,
                  double tol = 1e-10, int max_iter = 10000,
                  const Eigen::VectorXd* initial_guess = nullptr);

}  // namespace homog
