#include <doctest.h>

#include "homog/sparse.hpp"

#include <Eigen/Dense>

#include <random>

using namespace homog;

TEST_CASE("duplicate triplets are summed") {
  SparseMatrix A = csr_from_triplets(2, {{0, 0, 1.0}, {0, 0, 2.0}});
  CHECK(A.coeff(0, 0) == doctest::Approx(3.0));
  CHECK(A.nonZeros() == 1);
}

TEST_CASE("empty triplet list gives the zero matrix") {
  SparseMatrix A = csr_from_triplets(3, {});
  CHECK(A.nonZeros() == 0);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(3);
  CHECK(spmv(A, x).norm() == doctest::Approx(0.0));
}

TEST_CASE("out-of-range triplet index is rejected") {
  CHECK_THROWS_AS(csr_from_triplets(2, {{0, 2, 1.0}}), std::out_of_range);
}

TEST_CASE("random triplets reconstruct the dense sum") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> idx(0, 4);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  std::vector<Triplet> triplets;
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(5, 5);
  for (int k = 0; k < 60; ++k) {
    int i = idx(rng), j = idx(rng);
    double v = val(rng);
    triplets.emplace_back(i, j, v);
    dense(i, j) += v;
  }
  SparseMatrix A = csr_from_triplets(5, triplets);
  CHECK(Eigen::MatrixXd(A).isApprox(dense, 1e-14));
}

TEST_CASE("spmv basics") {
  SparseMatrix I = csr_from_triplets(3, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}});
  Eigen::VectorXd x(3);
  x << 3, -1, 2;
  CHECK((spmv(I, x) - x).norm() == doctest::Approx(0.0));
  CHECK(spmv(I, Eigen::VectorXd::Zero(3)).norm() == doctest::Approx(0.0));

  SparseMatrix A = csr_from_triplets(2, {{0, 0, 4.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 3.0}});
  Eigen::VectorXd y(2);
  y << 1, 2;
  Eigen::VectorXd Ay = spmv(A, y);
  CHECK(Ay[0] == doctest::Approx(6.0));
  CHECK(Ay[1] == doctest::Approx(7.0));

  CHECK_THROWS_AS(spmv(A, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("cg solves a diagonal system in at most 2 iterations") {
  SparseMatrix A = csr_from_triplets(2, {{0, 0, 2.0}, {1, 1, 2.0}});
  Eigen::VectorXd b(2);
  b << 2, 4;
  CgResult res = cg_solve(A, b);
  CHECK(res.converged);
  CHECK(res.iterations <= 2);
  CHECK(res.x[0] == doctest::Approx(1.0));
  CHECK(res.x[1] == doctest::Approx(2.0));
}

TEST_CASE("cg matches the hand solve of a 2x2 system") {
  SparseMatrix A = csr_from_triplets(2, {{0, 0, 4.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 3.0}});
  Eigen::VectorXd b(2);
  b << 1, 2;
  CgResult res = cg_solve(A, b);
  CHECK(res.x[0] == doctest::Approx(1.0 / 11).epsilon(1e-9));
  CHECK(res.x[1] == doctest::Approx(7.0 / 11).epsilon(1e-9));
}

namespace {

SparseMatrix laplacian_1d(int n) {
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2.0);
    if (i > 0) t.emplace_back(i, i - 1, -1.0);
    if (i + 1 < n) t.emplace_back(i, i + 1, -1.0);
  }
  return csr_from_triplets(n, t);
}

}  // namespace

TEST_CASE("cg agrees with a dense factorization oracle on the 1d laplacian") {
  const int n = 50;
  SparseMatrix A = laplacian_1d(n);
  Eigen::VectorXd b = Eigen::VectorXd::Ones(n);
  CgResult res = cg_solve(A, b, 1e-12, 1000);
  Eigen::VectorXd oracle = Eigen::MatrixXd(A).ldlt().solve(b);
  CHECK((res.x - oracle).norm() < 1e-8);
  CHECK((b - spmv(A, res.x)).norm() <= 1e-10 * b.norm() * 10);
}

TEST_CASE("cg error decreases monotonically in the A-norm") {
  // The A-norm of the error is the quantity conjugate gradients actually
  // minimizes per step; check it against a dense oracle solution.
  const int n = 40;
  SparseMatrix A = laplacian_1d(n);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b[i] = val(rng);
  Eigen::VectorXd exact = Eigen::MatrixXd(A).ldlt().solve(b);

  // Re-run CG step by step through decreasing max_iter budgets.
  double last = 1e300;
  for (int budget = 1; budget <= 25; budget += 3) {
    CgResult res = cg_solve(A, b, 1e-16, budget);
    Eigen::VectorXd e = res.x - exact;
    double err_a = std::sqrt(e.dot(spmv(A, e)));
    CHECK(err_a <= last * (1.0 + 1e-12));
    last = err_a;
  }
}

TEST_CASE("preconditioned residual history is monotone on SPD mass-like systems") {
  const int n = 30;
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 4.0 + 0.05 * i);
    if (i > 0) t.emplace_back(i, i - 1, 1.0);
    if (i + 1 < n) t.emplace_back(i, i + 1, 1.0);
  }
  SparseMatrix A = csr_from_triplets(n, t);
  CgResult res = cg_solve(A, Eigen::VectorXd::Ones(n), 1e-12, 500);
  REQUIRE(res.converged);
  for (size_t k = 1; k < res.residual_history.size(); ++k)
    CHECK(res.residual_history[k] <= res.residual_history[k - 1] * (1.0 + 1e-10));
}

TEST_CASE("nan rhs aborts with a diagnostic") {
  SparseMatrix A = csr_from_triplets(2, {{0, 0, 1.0}, {1, 1, 1.0}});
  Eigen::VectorXd b(2);
  b << std::numeric_limits<double>::quiet_NaN(), 1.0;
  CHECK_THROWS(cg_solve(A, b));
}
