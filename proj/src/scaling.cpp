#include "homog/scaling.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace homog {

std::vector<std::array<int, 2>> index_set_pairs(double exponent, int theta,
                                                IndexConstraint) {
  if (theta < 2) throw std::invalid_argument("theta must be >= 2");
  std::vector<std::array<int, 2>> set;
  for (int k = 0; k <= theta; ++k)
    for (int l = 0; l <= theta; ++l)
      if (k * exponent + l >= 1.0 - 1e-12 && k + l <= theta)
        set.push_back({k, l});
  return set;
}

std::vector<std::array<int, 3>> index_set_triples(double alpha, double beta,
                                                  int theta) {
  if (theta < 2) throw std::invalid_argument("theta must be >= 2");
  std::vector<std::array<int, 3>> set;
  for (int k = 0; k <= theta; ++k)
    for (int l = 0; l <= theta; ++l)
      for (int n = 0; n <= theta; ++n)
        if (k * (alpha + 1.0) + l * beta + n >= 1.0 - 1e-12 && k + l + n <= theta)
          set.push_back({k, l, n});
  return set;
}

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::VolumePos: return "volume_pos";
    case Regime::VolumeNeg: return "volume_neg";
    case Regime::SurfacePos: return "surface_pos";
    case Regime::SurfaceSmall: return "surface_small";
    case Regime::CombinedPos: return "combined_pos";
    case Regime::CombinedSmall: return "combined_small";
    case Regime::CombinedNeg: return "combined_neg";
  }
  return "?";
}

RatePrediction predicted_rate(Regime regime, double alpha, double beta, int theta,
                              int mu) {
  auto require = [&](bool ok, const char* what) {
    if (!ok)
      throw std::invalid_argument(std::string("regime ") + to_string(regime) +
                                  " incompatible with parameters: " + what);
  };
  auto require_mu = [&] {
    require(mu >= 0 && mu <= theta - 1, "mu must lie in [0, theta-1]");
    require(theta >= 2, "theta must be >= 2");
  };

  RatePrediction pred;
  pred.regime = regime;
  std::ostringstream bound;
  switch (regime) {
    case Regime::VolumePos:
      require(alpha > 0, "needs alpha > 0");
      require_mu();
      pred.exponents = {theta - 1.0 + alpha, mu + 0.5};
      bound << "C (eps^" << theta - 1.0 + alpha << " + eps^" << mu + 0.5 << ")";
      break;
    case Regime::VolumeNeg:
      require(alpha < 0, "needs alpha < 0");
      pred.exponents = {-alpha / 2.0, 1.0};
      bound << "C (eps^" << -alpha / 2.0 << " + eps)";
      break;
    case Regime::SurfacePos:
      require(beta > 1, "needs beta > 1");
      require_mu();
      pred.exponents = {theta + beta - 2.0, mu + 0.5};
      bound << "C (eps^" << theta + beta - 2.0 << " + eps^" << mu + 0.5 << ")";
      break;
    case Regime::SurfaceSmall:
      require(beta < 1, "needs beta < 1");
      pred.exponents = {(1.0 - beta) / 2.0, 0.5, 1.0};
      bound << "C (eps^" << (1.0 - beta) / 2.0 << " + eps^0.5 + eps)";
      break;
    case Regime::CombinedPos:
      require(alpha > 0 && beta > 1, "needs alpha > 0 and beta > 1");
      require_mu();
      pred.exponents = {theta - 1.0 + alpha, theta + beta - 2.0,
                        mu + std::min(mu * alpha, 0.0) + 0.5};
      bound << "C (eps^" << theta - 1.0 + alpha << " + eps^" << theta + beta - 2.0
            << " + eps^" << mu + std::min(mu * alpha, 0.0) + 0.5 << ")";
      break;
    case Regime::CombinedSmall:
      require(alpha > 0 && beta >= 0 && beta < 1, "needs alpha > 0, 0 <= beta < 1");
      pred.exponents = {(1.0 - beta) / 2.0, (1.0 - beta) / 2.0 + alpha / 2.0, 0.5};
      bound << "C (eps^" << (1.0 - beta) / 2.0 << " (1 + eps^" << alpha / 2.0
            << ") + eps^0.5)";
      break;
    case Regime::CombinedNeg: {
      require(alpha < 0 || beta < 0, "needs alpha < 0 or beta < 0");
      if (alpha < 0) pred.exponents.push_back(-alpha / 2.0);
      if (beta < 0) pred.exponents.push_back(-beta / 2.0);
      pred.exponents.push_back(1.0);
      bound << "C (";
      for (size_t i = 0; i + 1 < pred.exponents.size(); ++i)
        bound << "eps^" << pred.exponents[i] << " + ";
      bound << "eps)";
      break;
    }
  }
  pred.dominant = *std::min_element(pred.exponents.begin(), pred.exponents.end());
  pred.bound = bound.str();
  return pred;
}

RatePrediction predicted_surface_rate(double alpha) {
  if (alpha >= 0)
    throw std::invalid_argument("surface decay prediction needs alpha < 0");
  RatePrediction pred;
  pred.regime = Regime::VolumeNeg;
  pred.exponents = {-alpha / 2.0 - 0.5, 0.5};
  pred.dominant = std::min(pred.exponents[0], pred.exponents[1]);
  std::ostringstream bound;
  bound << "C (eps^" << pred.exponents[0] << " + eps^0.5) on the micro surfaces";
  pred.bound = bound.str();
  return pred;
}

Eigen::VectorXd build_cutoff(const Mesh& mesh, double epsilon) {
  if (epsilon <= 0 || epsilon >= 0.5)
    throw std::invalid_argument("cutoff needs 0 < epsilon < 0.5 (ramps overlap)");
  Eigen::VectorXd m(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const auto& p = mesh.vertices[v];
    double dist = std::min({p.x(), 1.0 - p.x(), p.y(), 1.0 - p.y()});
    m[v] = std::clamp((dist - epsilon) / epsilon, 0.0, 1.0);
  }
  return m;
}

PointLocator::PointLocator(const Mesh& mesh) : mesh_(mesh) {
  int n_tri = mesh.num_triangles();
  bins_per_side_ = std::max(1, static_cast<int>(std::sqrt(n_tri / 2.0)));
  bins_.resize(static_cast<size_t>(bins_per_side_) * bins_per_side_);
  auto bin_of = [&](double x) {
    return std::clamp(static_cast<int>(x * bins_per_side_), 0, bins_per_side_ - 1);
  };
  for (int t = 0; t < n_tri; ++t) {
    const auto& tr = mesh.triangles[t];
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (int v : tr) {
      xmin = std::min(xmin, mesh.vertices[v].x());
      xmax = std::max(xmax, mesh.vertices[v].x());
      ymin = std::min(ymin, mesh.vertices[v].y());
      ymax = std::max(ymax, mesh.vertices[v].y());
    }
    for (int bi = bin_of(xmin); bi <= bin_of(xmax); ++bi)
      for (int bj = bin_of(ymin); bj <= bin_of(ymax); ++bj)
        bins_[bj * bins_per_side_ + bi].push_back(t);
  }
}

bool PointLocator::locate(const Eigen::Vector2d& p, int& triangle,
                          Eigen::Vector3d& barycentric) const {
  auto bin_of = [&](double x) {
    return std::clamp(static_cast<int>(x * bins_per_side_), 0, bins_per_side_ - 1);
  };
  const auto& candidates = bins_[bin_of(p.y()) * bins_per_side_ + bin_of(p.x())];
  double best_defect = std::numeric_limits<double>::max();
  int best_tri = -1;
  Eigen::Vector3d best_bc;
  for (int t : candidates) {
    const auto& tr = mesh_.triangles[t];
    const auto &a = mesh_.vertices[tr[0]], &b = mesh_.vertices[tr[1]],
               &c = mesh_.vertices[tr[2]];
    double area2 = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
    Eigen::Vector3d bc;
    bc[1] = ((p.x() - a.x()) * (c.y() - a.y()) - (p.y() - a.y()) * (c.x() - a.x())) / area2;
    bc[2] = ((b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x())) / area2;
    bc[0] = 1.0 - bc[1] - bc[2];
    double defect = std::max(0.0, -bc.minCoeff());
    if (defect < best_defect) {
      best_defect = defect;
      best_tri = t;
      best_bc = bc;
    }
    if (defect == 0.0) break;
  }
  if (best_tri < 0 || best_defect > 1e-9) return false;
  triangle = best_tri;
  barycentric = best_bc.cwiseMax(0.0);
  barycentric /= barycentric.sum();
  return true;
}

double PointLocator::interpolate(const Eigen::VectorXd& nodal,
                                 const Eigen::Vector2d& p) const {
  int t;
  Eigen::Vector3d bc;
  if (!locate(p, t, bc))
    throw std::runtime_error("point location failed at (" + std::to_string(p.x()) +
                             ", " + std::to_string(p.y()) + ")");
  const auto& tr = mesh_.triangles[t];
  return bc[0] * nodal[tr[0]] + bc[1] * nodal[tr[1]] + bc[2] * nodal[tr[2]];
}

int PointLocator::nearest_vertex(const Eigen::Vector2d& p) const {
  int best = 0;
  double best_d = std::numeric_limits<double>::max();
  for (int v = 0; v < mesh_.num_vertices(); ++v) {
    double d = (mesh_.vertices[v] - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = v;
    }
  }
  return best;
}

Eigen::VectorXd interpolate_macro_to_micro(const Eigen::VectorXd& u0,
                                           const Mesh& macro_mesh,
                                           const Mesh& micro_mesh) {
  PointLocator locator(macro_mesh);
  Eigen::VectorXd out(micro_mesh.num_vertices());
  for (int v = 0; v < micro_mesh.num_vertices(); ++v)
    out[v] = locator.interpolate(u0, micro_mesh.vertices[v]);
  return out;
}

Eigen::MatrixX2d recover_gradient(const Mesh& mesh, const Eigen::VectorXd& u) {
  Eigen::MatrixX2d grad = Eigen::MatrixX2d::Zero(mesh.num_vertices(), 2);
  Eigen::VectorXd weight = Eigen::VectorXd::Zero(mesh.num_vertices());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tr = mesh.triangles[t];
    Eigen::Matrix2d J;
    J.col(0) = mesh.vertices[tr[1]] - mesh.vertices[tr[0]];
    J.col(1) = mesh.vertices[tr[2]] - mesh.vertices[tr[0]];
    double area = 0.5 * J.determinant();
    Eigen::Matrix2d Jinv_t = J.inverse().transpose();
    Eigen::Vector2d g = Jinv_t.col(0) * (u[tr[1]] - u[tr[0]]) +
                        Jinv_t.col(1) * (u[tr[2]] - u[tr[0]]);
    for (int v : tr) {
      grad.row(v) += area * g.transpose();
      weight[v] += area;
    }
  }
  for (int v = 0; v < mesh.num_vertices(); ++v) grad.row(v) /= weight[v];
  return grad;
}

Reconstruction reconstruct_expansion(const Eigen::VectorXd& u0, const Mesh& macro_mesh,
                                     const CellSolution& cell, const Mesh& cell_mesh,
                                     double epsilon, const Mesh& micro_mesh, int order,
                                     bool with_cutoff) {
  if (order != 0 && order != 1)
    throw std::invalid_argument("reconstruction order must be 0 or 1");
  Reconstruction rec;
  rec.values = interpolate_macro_to_micro(u0, macro_mesh, micro_mesh);
  if (order == 0) return rec;

  Eigen::MatrixX2d grad_macro = recover_gradient(macro_mesh, u0);
  Eigen::VectorXd grad_x = grad_macro.col(0), grad_y = grad_macro.col(1);
  PointLocator macro_locator(macro_mesh);
  PointLocator cell_locator(cell_mesh);
  Eigen::VectorXd cutoff;
  if (with_cutoff) cutoff = build_cutoff(micro_mesh, epsilon);

  for (int v = 0; v < micro_mesh.num_vertices(); ++v) {
    const Eigen::Vector2d& x = micro_mesh.vertices[v];
    Eigen::Vector2d g(macro_locator.interpolate(grad_x, x),
                      macro_locator.interpolate(grad_y, x));
    Eigen::Vector2d y(x.x() / epsilon - std::floor(x.x() / epsilon),
                      x.y() / epsilon - std::floor(x.y() / epsilon));
    double c1, c2;
    int t;
    Eigen::Vector3d bc;
    if (cell_locator.locate(y, t, bc)) {
      const auto& tr = cell_mesh.triangles[t];
      c1 = bc[0] * cell.chi1[tr[0]] + bc[1] * cell.chi1[tr[1]] + bc[2] * cell.chi1[tr[2]];
      c2 = bc[0] * cell.chi2[tr[0]] + bc[1] * cell.chi2[tr[1]] + bc[2] * cell.chi2[tr[2]];
    } else {
      int w = cell_locator.nearest_vertex(y);
      c1 = cell.chi1[w];
      c2 = cell.chi2[w];
      ++rec.hole_fallbacks;
    }
    double corrector = epsilon * (c1 * g.x() + c2 * g.y());
    if (with_cutoff) corrector *= cutoff[v];
    rec.values[v] -= corrector;
  }
  return rec;
}

NormSystem::NormSystem(const Mesh& mesh)
    : mass_volume(assemble_mass_volume(mesh)),
      mass_surface(assemble_mass_surface(mesh)),
      stiffness_identity(assemble_stiffness(mesh, CoefficientField::identity())) {}

ErrorNorms NormSystem::norms(const Eigen::VectorXd& d) const {
  ErrorNorms n;
  n.l2_volume = std::sqrt(std::max(0.0, d.dot(mass_volume * d)));
  n.h1_semi = std::sqrt(std::max(0.0, d.dot(stiffness_identity * d)));
  n.l2_surface = std::sqrt(std::max(0.0, d.dot(mass_surface * d)));
  return n;
}

ErrorNorms error_norms(const Mesh& mesh, const Eigen::VectorXd& u,
                       const Eigen::VectorXd& u_ref) {
  if (u.size() != u_ref.size() || u.size() != mesh.num_vertices())
    throw std::invalid_argument("error_norms: dimension mismatch");
  return NormSystem(mesh).norms(u - u_ref);
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& records) {
  RateFit fit;
  std::vector<double> xs, ys;
  double last_eps = std::numeric_limits<double>::max();
  for (const auto& [eps, err] : records) {
    if (eps <= 0 || eps >= last_eps)
      throw std::invalid_argument("fit_rate: eps must be positive, strictly decreasing");
    last_eps = eps;
    if (err <= 0) {
      fit.warnings.push_back("dropped nonpositive error at eps = " + std::to_string(eps));
      continue;
    }
    xs.push_back(std::log(eps));
    ys.push_back(std::log(err));
  }
  fit.points_used = static_cast<int>(xs.size());
  if (fit.points_used < 3)
    throw std::invalid_argument("fit_rate: fewer than 3 usable points");

  double n = fit.points_used;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < fit.points_used; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0;
  for (int i = 0; i < fit.points_used; ++i) {
    double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace homog
