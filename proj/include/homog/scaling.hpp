#pragma once

#include "homog/cell.hpp"
#include "homog/fem.hpp"
#include "homog/mesh.hpp"

#include <Eigen/Core>

#include <array>
#include <string>
#include <vector>

namespace homog {

enum class IndexConstraint { VolumeStyle, SurfaceStyle };

/// Integer pairs (k, l) in [0, theta]^2 with  k * exponent + l >= 1  and
/// k + l <= theta. VolumeStyle and SurfaceStyle share the predicate; the
/// label records which scaling parameter fed it.
std::vector<std::array<int, 2>> index_set_pairs(double exponent, int theta,
                                                IndexConstraint style);

/// Integer triples (k, l, n) in [0, theta]^3 with
/// k (alpha + 1) + l beta + n >= 1 and k + l + n <= theta.
std::vector<std::array<int, 3>> index_set_triples(double alpha, double beta,
                                                  int theta);

enum class Regime {
  VolumePos,     // volume reaction, alpha > 0
  VolumeNeg,     // volume reaction, alpha < 0
  SurfacePos,    // surface reaction, beta > 1
  SurfaceSmall,  // surface reaction, beta < 1
  CombinedPos,   // both reactions, alpha > 0, beta > 1
  CombinedSmall, // both reactions, alpha > 0, 0 <= beta < 1
  CombinedNeg,   // both reactions, alpha < 0 or beta < 0
};

const char* to_string(Regime regime);

/// Exponent list of the convergence bound for the regime; `dominant` is the
/// smallest exponent (the slowest-decaying term).
struct RatePrediction {
  Regime regime = Regime::VolumePos;
  std::vector<double> exponents;
  double dominant = 0.0;
  std::string bound;  // human-readable form of the predicted estimate
};

/// Rates as stated by the convergence theory. mu in [0, theta-1] counts the
/// expansion terms kept outside the cut-off. Throws on regime/parameter
/// mismatch (e.g. VolumeNeg with alpha > 0).
RatePrediction predicted_rate(Regime regime, double alpha, double beta, int theta,
                              int mu);

/// Rate prediction for the surface norm in the decaying regimes, obtained
/// from the volume bound through the trace inequality.
RatePrediction predicted_surface_rate(double alpha);

/// Boundary-layer mask on the unit square: 0 within distance epsilon of the
/// outer boundary, 1 beyond 2 epsilon, linear ramp between. Requires
/// epsilon < 0.5.
Eigen::VectorXd build_cutoff(const Mesh& mesh, double epsilon);

/// P1 point location with a uniform background bin grid.
class PointLocator {
 public:
  explicit PointLocator(const Mesh& mesh);

  /// Barycentric location; returns false when p lies outside the mesh.
  bool locate(const Eigen::Vector2d& p, int& triangle,
              Eigen::Vector3d& barycentric) const;
  double interpolate(const Eigen::VectorXd& nodal, const Eigen::Vector2d& p) const;
  /// Index of the mesh vertex closest to p.
  int nearest_vertex(const Eigen::Vector2d& p) const;

 private:
  const Mesh& mesh_;
  int bins_per_side_;
  std::vector<std::vector<int>> bins_;
};

/// P1 interpolation of a macro nodal field onto micro mesh nodes; exact for
/// linear fields. Throws when a micro node cannot be located.
Eigen::VectorXd interpolate_macro_to_micro(const Eigen::VectorXd& u0,
                                           const Mesh& macro_mesh,
                                           const Mesh& micro_mesh);

/// Area-weighted average of elementwise P1 gradients at each vertex.
Eigen::MatrixX2d recover_gradient(const Mesh& mesh, const Eigen::VectorXd& u);

struct Reconstruction {
  Eigen::VectorXd values;
  int hole_fallbacks = 0;  // micro nodes that landed in the solid cell part
};

/// Two-scale reconstruction on the micro mesh:
///   order 0:  u0(x)
///   order 1:  u0(x) - eps * chi(x/eps) . grad u0(x)
/// chi is evaluated by periodic wrapping into the unit cell; nodes falling
/// in the solid part use the nearest liquid vertex. with_cutoff multiplies
/// the corrector term by the boundary-layer mask.
Reconstruction reconstruct_expansion(const Eigen::VectorXd& u0, const Mesh& macro_mesh,
                                     const CellSolution& cell, const Mesh& cell_mesh,
                                     double epsilon, const Mesh& micro_mesh, int order,
                                     bool with_cutoff = false);

struct ErrorNorms {
  double l2_volume = 0.0;
  double h1_semi = 0.0;
  double l2_surface = 0.0;
};

/// Mass- and stiffness-weighted norms of u - u_ref on their shared mesh.
/// Prebuilt matrices of the same mesh can be supplied to skip reassembly.
struct NormSystem {
  SparseMatrix mass_volume;
  SparseMatrix mass_surface;
  SparseMatrix stiffness_identity;

  explicit NormSystem(const Mesh& mesh);
  ErrorNorms norms(const Eigen::VectorXd& d) const;
};

ErrorNorms error_norms(const Mesh& mesh, const Eigen::VectorXd& u,
                       const Eigen::VectorXd& u_ref);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms of log-log fit residuals
  int points_used = 0;
  std::vector<std::string> warnings;
};

/// Least squares on (log eps, log error). Nonpositive errors are dropped
/// with a warning; fewer than 3 surviving points is an error.
RateFit fit_rate(const std::vector<std::pair<double, double>>& records);

}  // namespace homog
