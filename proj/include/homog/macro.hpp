#pragma once

#include "homog/fem.hpp"
#include "homog/mesh.hpp"
#include "homog/micro.hpp"

#include <Eigen/Core>

#include <optional>

namespace homog {

/// Homogenized problem on the unperforated domain:
///   -div(A_eff grad u) - porosity * Rbar(u) = porosity * f,  u = 0 on the
/// exterior boundary. Rbar absent gives the linear limit problem.
struct MacroProblem {
  Eigen::Matrix2d A_eff = Eigen::Matrix2d::Identity();
  double porosity = 1.0;
  ScalarField f;
  std::optional<RealFunction> reaction;  // Rbar
  double delta0 = 1.0;                   // declared bounds of -Rbar
  double delta1 = 1.0;

  void validate() const;  // elliptic A_eff, porosity in (0, 1]
};

/// Discrete weak solution of  -div(A_eff grad u) = porosity * f.
Eigen::VectorXd solve_macro_linear(const Mesh& mesh, const MacroProblem& problem,
                                   double cg_tol = 1e-12);

/// Semilinear limit solved with the same stabilized fixed-point scheme,
/// scale-free (epsilon = 1). Returns the trace through `trace` if given.
Eigen::VectorXd solve_macro_semilinear(const Mesh& mesh, const MacroProblem& problem,
                                       IterationTrace* trace = nullptr,
                                       double tol_fixpoint = 1e-10,
                                       int max_iter = 400);

}  // namespace homog
