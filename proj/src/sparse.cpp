#include "homog/sparse.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace homog {

SparseMatrix csr_from_triplets(int n, const std::vector<Triplet>& triplets) {
  for (const auto& t : triplets)
    if (t.row() < 0 || t.row() >= n || t.col() < 0 || t.col() >= n)
      throw std::out_of_range("triplet index (" + std::to_string(t.row()) + ", " +
                              std::to_string(t.col()) + ") outside " +
                              std::to_string(n) + " x " + std::to_string(n));
  SparseMatrix A(n, n);
  A.setFromTriplets(triplets.begin(), triplets.end());
  A.makeCompressed();
  return A;
}

Eigen::VectorXd spmv(const SparseMatrix& A, const Eigen::VectorXd& x) {
  if (A.cols() != x.size())
    throw std::invalid_argument("spmv: dimension mismatch");
  return A * x;
}

CgResult cg_solve(const SparseMatrix& A, const Eigen::VectorXd& b, double tol,
                  int max_iter, const Eigen::VectorXd* initial_guess) {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw std::invalid_argument("cg_solve: dimension mismatch");
  const int n = static_cast<int>(b.size());

  Eigen::VectorXd inv_diag(n);
  for (int i = 0; i < n; ++i) {
    double d = A.coeff(i, i);
    if (d <= 0.0)
      throw std::runtime_error("cg_solve: non-positive diagonal at row " +
                               std::to_string(i));
    inv_diag[i] = 1.0 / d;
  }

  CgResult res;
  res.x = initial_guess ? *initial_guess : Eigen::VectorXd::Zero(n);
  double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.x.setZero();
    res.converged = true;
    return res;
  }

  Eigen::VectorXd r = b - A * res.x;
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  res.residual_history.push_back(std::sqrt(std::max(rz, 0.0)));

  for (int k = 0; k < max_iter; ++k) {
    if (r.norm() <= tol * bnorm) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd Ap = A * p;
    double pAp = p.dot(Ap);
    if (!std::isfinite(pAp) || pAp <= 0.0)
      throw std::runtime_error(
          "cg_solve: breakdown (p'Ap = " + std::to_string(pAp) +
          ") at iteration " + std::to_string(k));
    double alpha = rz / pAp;
    res.x += alpha * p;
    r -= alpha * Ap;
    if (!r.allFinite())
      throw std::runtime_error("cg_solve: NaN residual at iteration " +
                               std::to_string(k));
    z = inv_diag.cwiseProduct(r);
    double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
    res.residual_history.push_back(std::sqrt(std::max(rz, 0.0)));
    ++res.iterations;
  }
  res.final_residual = (b - A * res.x).norm() / bnorm;
  if (!res.converged) res.converged = res.final_residual <= tol;
  return res;
}

}  // namespace homog
