#include "homog/cell.hpp"

#include <Eigen/LU>

#include "homog/sparse.hpp"

#include <cmath>
#include <future>
#include <stdexcept>

namespace homog {

namespace {

// Degree-2 rule, matching the stiffness quadrature.
const Eigen::Vector3d kQuadBc[3] = {{2.0 / 3, 1.0 / 6, 1.0 / 6},
                                    {1.0 / 6, 2.0 / 3, 1.0 / 6},
                                    {1.0 / 6, 1.0 / 6, 2.0 / 3}};

Eigen::Matrix<double, 2, 3> basis_gradients(const Mesh& mesh, int t, double& area) {
  const auto& tr = mesh.triangles[t];
  Eigen::Matrix2d J;
  J.col(0) = mesh.vertices[tr[1]] - mesh.vertices[tr[0]];
  J.col(1) = mesh.vertices[tr[2]] - mesh.vertices[tr[0]];
  area = 0.5 * J.determinant();
  Eigen::Matrix2d Jinv_t = J.inverse().transpose();
  Eigen::Matrix<double, 2, 3> g;
  g.col(1) = Jinv_t.col(0);
  g.col(2) = Jinv_t.col(1);
  g.col(0) = -g.col(1) - g.col(2);
  return g;
}

}  // namespace

Eigen::VectorXd solve_cell_problem(const Mesh& cell_mesh, const CoefficientField& A,
                                   int j, int pin_vertex, double* residual) {
  if (j != 1 && j != 2) throw std::invalid_argument("direction j must be 1 or 2");
  const Eigen::Vector2d ej = j == 1 ? Eigen::Vector2d(1, 0) : Eigen::Vector2d(0, 1);

  SparseMatrix K = assemble_stiffness(cell_mesh, A);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(cell_mesh.num_vertices());
  for (int t = 0; t < cell_mesh.num_triangles(); ++t) {
    double area;
    Eigen::Matrix<double, 2, 3> grads = basis_gradients(cell_mesh, t, area);
    const auto& tr = cell_mesh.triangles[t];
    for (const auto& bc : kQuadBc) {
      Eigen::Vector2d x = bc[0] * cell_mesh.vertices[tr[0]] +
                          bc[1] * cell_mesh.vertices[tr[1]] +
                          bc[2] * cell_mesh.vertices[tr[2]];
      Eigen::Vector2d flux = A.eval(x) * ej;
      for (int i = 0; i < 3; ++i)
        b[tr[i]] += (area / 3.0) * flux.dot(grads.col(i));
    }
  }

  PeriodicReducer reducer(cell_mesh, pin_vertex);
  SparseMatrix K_red = reducer.reduce_matrix(K);
  Eigen::VectorXd b_red = reducer.reduce_vector(b);
  CgResult cg = cg_solve(K_red, b_red, 1e-12, 40000);
  if (!cg.converged)
    throw std::runtime_error("cell problem CG stalled at residual " +
                             std::to_string(cg.final_residual));
  if (residual) *residual = cg.final_residual;

  Eigen::VectorXd chi = reducer.extend(cg.x);
  SparseMatrix Mv = assemble_mass_volume(cell_mesh);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(chi.size());
  double mean = chi.dot(Mv * ones) / ones.dot(Mv * ones);
  chi.array() -= mean;
  return chi;
}

Eigen::Matrix2d effective_tensor(const Mesh& cell_mesh, const CoefficientField& A,
                                 const Eigen::VectorXd& chi1,
                                 const Eigen::VectorXd& chi2) {
  Eigen::Matrix2d result = Eigen::Matrix2d::Zero();
  for (int t = 0; t < cell_mesh.num_triangles(); ++t) {
    double area;
    Eigen::Matrix<double, 2, 3> grads = basis_gradients(cell_mesh, t, area);
    const auto& tr = cell_mesh.triangles[t];
    Eigen::Vector2d grad_chi1 = Eigen::Vector2d::Zero();
    Eigen::Vector2d grad_chi2 = Eigen::Vector2d::Zero();
    for (int i = 0; i < 3; ++i) {
      grad_chi1 += chi1[tr[i]] * grads.col(i);
      grad_chi2 += chi2[tr[i]] * grads.col(i);
    }
    Eigen::Matrix2d grad_chi;  // column j = grad chi^j
    grad_chi.col(0) = grad_chi1;
    grad_chi.col(1) = grad_chi2;
    for (const auto& bc : kQuadBc) {
      Eigen::Vector2d x = bc[0] * cell_mesh.vertices[tr[0]] +
                          bc[1] * cell_mesh.vertices[tr[1]] +
                          bc[2] * cell_mesh.vertices[tr[2]];
      Eigen::Matrix2d Aq = A.eval(x);
      result += (area / 3.0) * (Aq - Aq * grad_chi);
    }
  }
  double asym = std::abs(result(0, 1) - result(1, 0));
  if (asym > 1e-6)
    throw std::runtime_error("effective tensor asymmetric by " + std::to_string(asym) +
                             "; refine the cell mesh");
  return result;
}

double porosity(const Mesh& cell_mesh) { return cell_mesh.total_area(); }

CellSolution solve_cell(const Mesh& cell_mesh, const CoefficientField& A,
                        int pin_vertex) {
  CellSolution sol;
  auto run = [&](int j, double* res) {
    return solve_cell_problem(cell_mesh, A, j, pin_vertex, res);
  };
  auto future2 = std::async(std::launch::async, run, 2, &sol.residual2);
  sol.chi1 = run(1, &sol.residual1);
  sol.chi2 = future2.get();
  sol.A_eff = effective_tensor(cell_mesh, A, sol.chi1, sol.chi2);
  sol.porosity = porosity(cell_mesh);
  return sol;
}

}  // namespace homog
