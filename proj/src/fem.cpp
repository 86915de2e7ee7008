#include "homog/fem.hpp"

#include <Eigen/LU>

#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace homog {

namespace {

struct QuadRule {
  // Barycentric coordinates and weights (summing to 1) on the triangle.
  std::vector<Eigen::Vector3d> points;
  std::vector<double> weights;
};

const QuadRule& quad_rule(int order) {
  static const QuadRule centroid{{Eigen::Vector3d(1.0 / 3, 1.0 / 3, 1.0 / 3)}, {1.0}};
  static const QuadRule degree2{{Eigen::Vector3d(2.0 / 3, 1.0 / 6, 1.0 / 6),
                                 Eigen::Vector3d(1.0 / 6, 2.0 / 3, 1.0 / 6),
                                 Eigen::Vector3d(1.0 / 6, 1.0 / 6, 2.0 / 3)},
                                {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  if (order == 1) return centroid;
  if (order == 3) return degree2;
  throw std::invalid_argument("quad_order must be 1 or 3");
}

struct TriangleGeometry {
  Eigen::Matrix<double, 2, 3> grads;  // P1 basis gradients, one per column
  double area;
  Eigen::Vector2d corner[3];
};

TriangleGeometry triangle_geometry(const Mesh& mesh, int t) {
  TriangleGeometry g;
  const auto& tr = mesh.triangles[t];
  for (int i = 0; i < 3; ++i) g.corner[i] = mesh.vertices[tr[i]];
  Eigen::Matrix2d J;
  J.col(0) = g.corner[1] - g.corner[0];
  J.col(1) = g.corner[2] - g.corner[0];
  double det = J.determinant();
  g.area = 0.5 * det;
  Eigen::Matrix2d Jinv_t = J.inverse().transpose();
  g.grads.col(1) = Jinv_t.col(0);
  g.grads.col(2) = Jinv_t.col(1);
  g.grads.col(0) = -g.grads.col(1) - g.grads.col(2);
  return g;
}

void check_ellipticity(const Eigen::Matrix2d& A, const CoefficientField& field,
                       const Eigen::Vector2d& x) {
  Eigen::Matrix2d S = 0.5 * (A + A.transpose());
  double tr = S.trace();
  double det = S.determinant();
  double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
  double lmin = tr / 2 - disc, lmax = tr / 2 + disc;
  double slack = 1e-9 * std::max(1.0, field.gamma_upper);
  if (lmin < field.gamma_lower - slack || lmax > field.gamma_upper + slack) {
    std::ostringstream msg;
    msg << "coefficient violates declared ellipticity bounds [" << field.gamma_lower
        << ", " << field.gamma_upper << "] at quadrature point (" << x.x() << ", "
        << x.y() << "): eigenvalues [" << lmin << ", " << lmax << "]";
    throw std::runtime_error(msg.str());
  }
}

}  // namespace

SparseMatrix assemble_stiffness(const Mesh& mesh, const CoefficientField& A,
                                int quad_order) {
  const QuadRule& rule = quad_rule(quad_order);
  std::vector<Triplet> triplets;
  triplets.reserve(9 * mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    TriangleGeometry g = triangle_geometry(mesh, t);
    Eigen::Matrix3d local = Eigen::Matrix3d::Zero();
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const auto& bc = rule.points[q];
      Eigen::Vector2d x = bc[0] * g.corner[0] + bc[1] * g.corner[1] + bc[2] * g.corner[2];
      Eigen::Matrix2d Aq = A.eval(x);
      check_ellipticity(Aq, A, x);
      local += rule.weights[q] * g.area * g.grads.transpose() * Aq * g.grads;
    }
    const auto& tr = mesh.triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) triplets.emplace_back(tr[i], tr[j], local(i, j));
  }
  return csr_from_triplets(mesh.num_vertices(), triplets);
}

SparseMatrix assemble_mass_volume(const Mesh& mesh) {
  std::vector<Triplet> triplets;
  triplets.reserve(9 * mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    double w = mesh.triangle_area(t) / 12.0;
    const auto& tr = mesh.triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        triplets.emplace_back(tr[i], tr[j], w * (i == j ? 2.0 : 1.0));
  }
  return csr_from_triplets(mesh.num_vertices(), triplets);
}

SparseMatrix assemble_mass_surface(const Mesh& mesh) {
  std::vector<Triplet> triplets;
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag != BoundaryTag::Hole) continue;
    double len = (mesh.vertices[e.a] - mesh.vertices[e.b]).norm();
    double w = len / 6.0;
    triplets.emplace_back(e.a, e.a, 2 * w);
    triplets.emplace_back(e.b, e.b, 2 * w);
    triplets.emplace_back(e.a, e.b, w);
    triplets.emplace_back(e.b, e.a, w);
  }
  return csr_from_triplets(mesh.num_vertices(), triplets);
}

Eigen::VectorXd assemble_load(const Mesh& mesh, const ScalarField& f) {
  const QuadRule& rule = quad_rule(3);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.num_vertices());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    TriangleGeometry g = triangle_geometry(mesh, t);
    const auto& tr = mesh.triangles[t];
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const auto& bc = rule.points[q];
      Eigen::Vector2d x = bc[0] * g.corner[0] + bc[1] * g.corner[1] + bc[2] * g.corner[2];
      double fw = f(x) * rule.weights[q] * g.area;
      for (int i = 0; i < 3; ++i) b[tr[i]] += fw * bc[i];
    }
  }
  return b;
}

DirichletReducer::DirichletReducer(int n_full, const std::vector<int>& dirichlet_dofs) {
  reduced_of_full.assign(n_full, 0);
  for (int d : dirichlet_dofs) reduced_of_full.at(d) = -1;
  for (int i = 0; i < n_full; ++i) {
    if (reduced_of_full[i] == 0) {
      reduced_of_full[i] = static_cast<int>(full_of_reduced.size());
      full_of_reduced.push_back(i);
    }
  }
  if (full_of_reduced.empty())
    throw std::runtime_error("Dirichlet elimination left no interior dofs");
}

SparseMatrix DirichletReducer::reduce_matrix(const SparseMatrix& A) const {
  std::vector<Triplet> triplets;
  triplets.reserve(A.nonZeros());
  for (int row = 0; row < A.outerSize(); ++row) {
    int ri = reduced_of_full[row];
    if (ri < 0) continue;
    for (SparseMatrix::InnerIterator it(A, row); it; ++it) {
      int rj = reduced_of_full[it.col()];
      if (rj < 0) continue;
      triplets.emplace_back(ri, rj, it.value());
    }
  }
  return csr_from_triplets(reduced_size(), triplets);
}

Eigen::VectorXd DirichletReducer::reduce_vector(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out(reduced_size());
  for (int i = 0; i < reduced_size(); ++i) out[i] = v[full_of_reduced[i]];
  return out;
}

Eigen::VectorXd DirichletReducer::extend(const Eigen::VectorXd& reduced) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(reduced_of_full.size());
  for (int i = 0; i < reduced_size(); ++i) out[full_of_reduced[i]] = reduced[i];
  return out;
}

PeriodicReducer::PeriodicReducer(const Mesh& mesh, int pin_vertex) {
  const int n = mesh.num_vertices();
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int v) {
    return parent[v] == v ? v : parent[v] = find(parent[v]);
  };
  for (int axis : {0, 1})
    for (const auto& [a, b] : periodic_vertex_pairs(mesh, axis))
      parent[find(b)] = find(a);

  // Deterministic representatives: smallest index in each class.
  std::vector<int> rep(n, -1);
  for (int i = 0; i < n; ++i) {
    int r = find(i);
    if (rep[r] == -1 || i < rep[r]) rep[r] = i;
  }
  master_of_full.resize(n);
  for (int i = 0; i < n; ++i) master_of_full[i] = rep[find(i)];

  pinned_master = master_of_full.at(pin_vertex);
  reduced_of_full.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    int m = master_of_full[i];
    if (m == pinned_master) continue;
    if (i == m) {
      reduced_of_full[i] = static_cast<int>(full_of_reduced.size());
      full_of_reduced.push_back(i);
    }
  }
  for (int i = 0; i < n; ++i)
    if (reduced_of_full[i] == -1 && master_of_full[i] != pinned_master)
      reduced_of_full[i] = reduced_of_full[master_of_full[i]];
}

SparseMatrix PeriodicReducer::reduce_matrix(const SparseMatrix& A) const {
  std::vector<Triplet> triplets;
  triplets.reserve(A.nonZeros());
  for (int row = 0; row < A.outerSize(); ++row) {
    int ri = reduced_of_full[row];
    if (ri < 0) continue;
    for (SparseMatrix::InnerIterator it(A, row); it; ++it) {
      int rj = reduced_of_full[it.col()];
      if (rj < 0) continue;
      triplets.emplace_back(ri, rj, it.value());
    }
  }
  return csr_from_triplets(reduced_size(), triplets);
}

Eigen::VectorXd PeriodicReducer::reduce_vector(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(reduced_size());
  for (int i = 0; i < static_cast<int>(v.size()); ++i) {
    int r = reduced_of_full[i];
    if (r >= 0) out[r] += v[i];
  }
  return out;
}

Eigen::VectorXd PeriodicReducer::extend(const Eigen::VectorXd& reduced) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(reduced_of_full.size());
  for (int i = 0; i < static_cast<int>(out.size()); ++i) {
    int r = reduced_of_full[i];
    out[i] = r >= 0 ? reduced[r] : 0.0;
  }
  return out;
}

AssembledSystem AssembledSystem::build(const Mesh& mesh, const CoefficientField& A,
                                       const ScalarField& f, int quad_order) {
  AssembledSystem sys;
  sys.stiffness = assemble_stiffness(mesh, A, quad_order);
  sys.mass_volume = assemble_mass_volume(mesh);
  sys.mass_surface = assemble_mass_surface(mesh);
  sys.load = assemble_load(mesh, f);
  sys.dirichlet_dofs = mesh.tagged_vertices(BoundaryTag::Exterior);
  return sys;
}

}  // namespace homog
