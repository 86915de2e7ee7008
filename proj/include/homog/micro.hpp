#pragma once

#include "homog/coefficient.hpp"
#include "homog/fem.hpp"
#include "homog/mesh.hpp"
#include "homog/sparse.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace homog {

using RealFunction = std::function<double(double)>;

/// Volume reaction R and surface reaction S with declared derivative bounds
/// 0 < delta0 <= R', S' <= delta1. A missing S models a pure volume
/// reaction (surface stabilization switched off).
struct ReactionSpec {
  RealFunction R;
  std::optional<RealFunction> S;
  double delta0 = 1.0;
  double delta1 = 1.0;

  bool has_surface() const { return S.has_value(); }
  /// Samples difference quotients over a probe grid; returns one warning per
  /// violated bound. Violations never abort: the bounds are declared, not
  /// estimated.
  std::vector<std::string> validate(unsigned seed = 0) const;
};

struct Stabilization {
  double L = 0.0;
  double M = 0.0;
};

/// The stabilization pair making the fixed-point map contract:
///   alpha <= beta:  L = d1 e^a + d0 (e^a - e^b),  M = d1 e^a
///   alpha >= beta:  L = d1 e^b,                   M = d1 e^b + d0 (e^b - e^a)
/// Throws on nonpositive delta0/epsilon and when the outputs fail to be
/// strictly positive.
Stabilization choose_stabilization(double alpha, double beta, double delta0,
                                   double delta1, double epsilon);

/// Contraction factor of the scheme,
///   eta = sqrt(max{ (L-d0 e^b)/(L+d0 e^b), (L-d0 e^b)/(M+d0 e^a),
///                   (M-d0 e^a)/(M+d0 e^a), (M-d0 e^a)/(L+d0 e^b) }),
/// clamped at zero from below. Throws when eta >= 1 (stabilization violated).
double contraction_factor(double L, double M, double delta0, double alpha,
                          double beta, double epsilon);

/// Contraction factor when only the volume reaction is active:
/// eta = sqrt((M - d0 e^a)/(M + d0 e^a)).
double contraction_factor_volume_only(double M, double delta0, double alpha,
                                      double epsilon);

/// Scaling regime (epsilon, alpha, beta) together with the stabilization
/// constants and the contraction bound they induce.
struct ScalingConfig {
  double epsilon = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  double L = 0.0;
  double M = 0.0;
  double eta = 0.0;

  static ScalingConfig make(double epsilon, double alpha, double beta,
                            const ReactionSpec& reactions);
};

struct IterationRecord {
  double l2_volume = 0.0;
  double l2_surface = 0.0;
  double h1_semi = 0.0;
  double w_norm = 0.0;       // scaled norm driving the stopping test
  double ratio = 0.0;        // ||v^k|| / ||v^{k-1}|| in the contraction norm
};

struct IterationTrace {
  std::vector<IterationRecord> steps;
  double eta = 0.0;
  double residual_w_norm = 0.0;  // nonlinear residual after convergence
  int iterations() const { return static_cast<int>(steps.size()); }
};

struct MicroSolution {
  Eigen::VectorXd u;  // nodal field on the full mesh
  IterationTrace trace;
};

/// Stabilized fixed-point solver for the microscopic problem. The iteration
/// matrix  stiffness + L * mass_surface + M * mass_volume  is assembled and
/// Dirichlet-reduced once; every loop reuses it and its preconditioner.
class MicroSolver {
 public:
  MicroSolver(const Mesh& mesh, const CoefficientField& A,
              const ScalingConfig& config, const ReactionSpec& reactions,
              const ScalarField& f, double cg_tol = 1e-12);

  /// One linearized step: solves
  ///   K u = load + L Ms u_prev + M Mv u_prev - e^b Ms S(u_prev)
  ///         - e^a Mv R(u_prev)
  /// with S, R applied nodewise. u_prev doubles as the CG warm start.
  Eigen::VectorXd step(const Eigen::VectorXd& u_prev) const;

  /// Runs the scheme from u^0 = 0 until the scaled-norm increment drops
  /// below tol_fixpoint, then verifies the nonlinear residual. Throws with
  /// the observed ratios when max_iter is exceeded.
  MicroSolution solve(double tol_fixpoint = 1e-10, int max_iter = 400) const;

  IterationRecord norms_of(const Eigen::VectorXd& v) const;
  const AssembledSystem& system() const { return system_; }
  const ScalingConfig& config() const { return config_; }

  /// Direct solve of the linear problem with reaction coefficients c_vol,
  /// c_surf:  (stiffness + c_surf Ms + c_vol Mv) u = load. The oracle route
  /// for linear reactions.
  Eigen::VectorXd solve_linear_oneshot(double c_vol, double c_surf) const;

 private:
  double contraction_norm(const IterationRecord& r) const;

  AssembledSystem system_;
  SparseMatrix stiffness_identity_;
  ScalingConfig config_;
  ReactionSpec reactions_;
  DirichletReducer reducer_;
  SparseMatrix iteration_matrix_;  // reduced
  double cg_tol_ = 1e-12;
  double pow_alpha_ = 1.0;
  double pow_beta_ = 1.0;
};

/// Convenience wrapper building a MicroSolver and running it.
MicroSolution solve_micro(const Mesh& mesh, const CoefficientField& A,
                          const ScalingConfig& config, const ReactionSpec& reactions,
                          const ScalarField& f, double tol_fixpoint = 1e-10,
                          int max_iter = 400);

}  // namespace homog
