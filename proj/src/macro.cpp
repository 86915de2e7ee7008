#include "homog/macro.hpp"

#include "homog/sparse.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace homog {

namespace {

CoefficientField constant_tensor(const Eigen::Matrix2d& A) {
  Eigen::Matrix2d S = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(S);
  double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  return {[A](const Eigen::Vector2d&) { return A; }, lo, hi};
}

}  // namespace

void MacroProblem::validate() const {
  Eigen::Matrix2d S = 0.5 * (A_eff + A_eff.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(S);
  if (es.eigenvalues().minCoeff() <= 0)
    throw std::invalid_argument("effective tensor is not elliptic");
  if (porosity <= 0 || porosity > 1)
    throw std::invalid_argument("porosity must lie in (0, 1]");
  if (!f) throw std::invalid_argument("source f is not set");
}

Eigen::VectorXd solve_macro_linear(const Mesh& mesh, const MacroProblem& problem,
                                   double cg_tol) {
  problem.validate();
  double theta = problem.porosity;
  ScalarField scaled = [theta, f = problem.f](const Eigen::Vector2d& x) {
    return theta * f(x);
  };
  SparseMatrix K = assemble_stiffness(mesh, constant_tensor(problem.A_eff));
  Eigen::VectorXd b = assemble_load(mesh, scaled);
  DirichletReducer reducer(mesh.num_vertices(),
                           mesh.tagged_vertices(BoundaryTag::Exterior));
  CgResult cg =
      cg_solve(reducer.reduce_matrix(K), reducer.reduce_vector(b), cg_tol, 40000);
  if (!cg.converged)
    throw std::runtime_error("macro linear solve: CG stalled at residual " +
                             std::to_string(cg.final_residual));
  return reducer.extend(cg.x);
}

Eigen::VectorXd solve_macro_semilinear(const Mesh& mesh, const MacroProblem& problem,
                                       IterationTrace* trace, double tol_fixpoint,
                                       int max_iter) {
  problem.validate();
  if (!problem.reaction) {
    Eigen::VectorXd u = solve_macro_linear(mesh, problem);
    if (trace) *trace = IterationTrace{};
    return u;
  }
  // The weak form reads  a(u, v) + < -theta Rbar(u), v > = < theta f, v >,
  // the micro scheme's shape with the effective volume reaction
  // g(z) = -theta Rbar(z); the declared bounds apply to -Rbar.
  double theta = problem.porosity;
  ReactionSpec reactions;
  reactions.R = [theta, Rbar = *problem.reaction](double z) { return -theta * Rbar(z); };
  reactions.delta0 = theta * problem.delta0;
  reactions.delta1 = theta * problem.delta1;

  ScalingConfig cfg = ScalingConfig::make(1.0, 0.0, 0.0, reactions);
  ScalarField scaled = [theta, f = problem.f](const Eigen::Vector2d& x) {
    return theta * f(x);
  };
  MicroSolver solver(mesh, constant_tensor(problem.A_eff), cfg, reactions, scaled);
  MicroSolution sol = solver.solve(tol_fixpoint, max_iter);
  if (trace) *trace = sol.trace;
  return sol.u;
}

}  // namespace homog
