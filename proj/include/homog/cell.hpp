#pragma once

#include "homog/coefficient.hpp"
#include "homog/fem.hpp"
#include "homog/mesh.hpp"

#include <Eigen/Core>

namespace homog {

/// Corrector fields on the cell mesh together with the effective tensor
/// they induce. chi follows the sign convention in which the first-order
/// expansion term is  -eps * chi(x/eps) . grad u0(x).
struct CellSolution {
  Eigen::VectorXd chi1;
  Eigen::VectorXd chi2;
  Eigen::Matrix2d A_eff = Eigen::Matrix2d::Identity();
  double porosity = 1.0;
  double residual1 = 0.0;
  double residual2 = 0.0;
};

/// Solves the periodic cell problem in direction j (1 or 2):
///   int_Yl A grad chi . grad phi = int_Yl A e_j . grad phi
/// for all periodic phi, with one pinned dof and the discrete mean removed.
Eigen::VectorXd solve_cell_problem(const Mesh& cell_mesh, const CoefficientField& A,
                                   int j, int pin_vertex = 0,
                                   double* residual = nullptr);

/// Effective tensor  (1/|Y|) int_Yl (I - grad chi) A dy  with |Y| = 1,
/// evaluated with the assembly quadrature. Throws when the result is
/// asymmetric beyond 1e-6 (insufficient resolution or failed solve).
Eigen::Matrix2d effective_tensor(const Mesh& cell_mesh, const CoefficientField& A,
                                 const Eigen::VectorXd& chi1,
                                 const Eigen::VectorXd& chi2);

/// Liquid volume fraction |Y_l| / |Y| = sum of triangle areas.
double porosity(const Mesh& cell_mesh);

/// Runs both directional solves (in parallel) and assembles the tensor.
CellSolution solve_cell(const Mesh& cell_mesh, const CoefficientField& A,
                        int pin_vertex = 0);

}  // namespace homog
