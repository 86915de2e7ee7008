#pragma once

#include "homog/coefficient.hpp"
#include "homog/mesh.hpp"
#include "homog/sparse.hpp"

#include <functional>
#include <vector>

namespace homog {

using ScalarField = std::function<double(const Eigen::Vector2d&)>;

/// P1 stiffness matrix for the bilinear form  int A(x) grad u . grad v dx.
/// quad_order 3 (default) is a degree-2 Gauss rule, quad_order 1 the
/// centroid rule. Throws when a quadrature sample violates the declared
/// ellipticity bounds, naming the offending point.
SparseMatrix assemble_stiffness(const Mesh& mesh, const CoefficientField& A,
                                int quad_order = 3);

/// Consistent P1 mass matrix; entry sum equals the mesh area.
SparseMatrix assemble_mass_volume(const Mesh& mesh);

/// Mass matrix of the Hole boundary; entry sum equals the hole perimeter.
/// Zero matrix when the mesh has no Hole edges.
SparseMatrix assemble_mass_surface(const Mesh& mesh);

/// Load vector  b_i = int f phi_i dx  (degree-2 quadrature).
Eigen::VectorXd assemble_load(const Mesh& mesh, const ScalarField& f);

/// Row/column elimination of Dirichlet dofs; keeps the reduced operator
/// symmetric positive definite. The extension re-inserts exact zeros.
struct DirichletReducer {
  std::vector<int> reduced_of_full;  // -1 on eliminated dofs
  std::vector<int> full_of_reduced;

  DirichletReducer(int n_full, const std::vector<int>& dirichlet_dofs);

  int reduced_size() const { return static_cast<int>(full_of_reduced.size()); }
  SparseMatrix reduce_matrix(const SparseMatrix& A) const;
  Eigen::VectorXd reduce_vector(const Eigen::VectorXd& v) const;
  Eigen::VectorXd extend(const Eigen::VectorXd& reduced) const;
};

/// Master-slave folding of the periodic boundary pairs plus one pinned dof,
/// realizing the quotient by constants for pure-Neumann periodic solves.
struct PeriodicReducer {
  std::vector<int> master_of_full;   // every dof mapped to its master
  std::vector<int> reduced_of_full;  // -1 for the pinned dof
  std::vector<int> full_of_reduced;  // masters except the pin
  int pinned_master = 0;

  PeriodicReducer(const Mesh& mesh, int pin_vertex = 0);

  int reduced_size() const { return static_cast<int>(full_of_reduced.size()); }
  SparseMatrix reduce_matrix(const SparseMatrix& A) const;  // P' A P
  Eigen::VectorXd reduce_vector(const Eigen::VectorXd& v) const;
  /// Prolongation with zero on the pinned dof, copied onto all slaves.
  Eigen::VectorXd extend(const Eigen::VectorXd& reduced) const;
};

/// Assembled discrete operators of the microscopic weak form.
struct AssembledSystem {
  SparseMatrix stiffness;
  SparseMatrix mass_volume;
  SparseMatrix mass_surface;
  Eigen::VectorXd load;
  std::vector<int> dirichlet_dofs;  // Exterior-tagged vertices

  static AssembledSystem build(const Mesh& mesh, const CoefficientField& A,
                               const ScalarField& f, int quad_order = 3);
};

}  // namespace homog
