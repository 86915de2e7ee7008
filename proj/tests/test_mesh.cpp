#include <doctest.h>

#include "homog/mesh.hpp"

#include <cmath>
#include <map>
#include <set>
#include <sstream>

using namespace homog;

namespace {
constexpr double kPi = 3.14159265358979323846;

// Test-side oracle: count triangles adjacent to each edge.
std::map<std::pair<int, int>, int> edge_counts(const Mesh& mesh) {
  std::map<std::pair<int, int>, int> counts;
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      counts[{std::min(a, b), std::max(a, b)}]++;
    }
  return counts;
}
}  // namespace

TEST_CASE("single-cell perforated mesh: porosity, loops, tags") {
  GeometrySpec spec{1.0, 0.4, 0.05};
  Mesh mesh = generate_perforated_mesh(spec);
  double exact = 1.0 - kPi * 0.16;
  CHECK(mesh.total_area() == doctest::Approx(exact).epsilon(0.01));
  CHECK(count_hole_loops(mesh) == 1);
  CHECK(mesh.h_max <= 1.5 * spec.target_h);
  CHECK_FALSE(mesh.tagged_vertices(BoundaryTag::Exterior).empty());
  for (const auto& e : mesh.boundary_edges)
    CHECK((e.tag == BoundaryTag::Exterior || e.tag == BoundaryTag::Hole));
}

TEST_CASE("r = 0 gives a plain unit-square mesh") {
  GeometrySpec spec{1.0, 0.0, 0.05};
  Mesh mesh = generate_perforated_mesh(spec);
  CHECK(mesh.total_area() == doctest::Approx(1.0).epsilon(1e-3));
  for (const auto& e : mesh.boundary_edges) CHECK(e.tag == BoundaryTag::Exterior);
  CHECK(count_hole_loops(mesh) == 0);
}

TEST_CASE("eps = 0.25 mesh has 16 hole loops and the same porosity") {
  GeometrySpec spec{0.25, 0.4, 0.25 / 8};
  Mesh mesh = generate_perforated_mesh(spec);
  CHECK(count_hole_loops(mesh) == 16);
  CHECK(mesh.total_area() == doctest::Approx(1.0 - kPi * 0.16).epsilon(0.01));
}

TEST_CASE("geometry validation") {
  CHECK_THROWS_AS(generate_perforated_mesh({0.3, 0.4, 0.03}), std::invalid_argument);
  CHECK_THROWS_AS(generate_perforated_mesh({0.25, 0.4, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(generate_perforated_mesh({1.0, 0.5, 0.05}), std::invalid_argument);
  CHECK_THROWS_AS(generate_perforated_mesh({1.0, -0.1, 0.05}), std::invalid_argument);
}

TEST_CASE("edge manifoldness: boundary edges one triangle, interior two") {
  Mesh mesh = generate_perforated_mesh({0.5, 0.4, 0.5 / 8});
  auto counts = edge_counts(mesh);
  std::set<std::pair<int, int>> boundary;
  for (const auto& e : mesh.boundary_edges)
    boundary.insert({std::min(e.a, e.b), std::max(e.a, e.b)});
  for (const auto& [edge, count] : counts) {
    if (boundary.count(edge))
      CHECK(count == 1);
    else
      CHECK(count == 2);
  }
  CHECK(counts.size() >= boundary.size());
}

TEST_CASE("hole edges approximate the circle to within h_max^2") {
  GeometrySpec spec{0.25, 0.4, 0.25 / 8};
  Mesh mesh = generate_perforated_mesh(spec);
  double rho = 0.25 * 0.4;
  double worst = 0.0;
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag != BoundaryTag::Hole) continue;
    for (const Eigen::Vector2d& p :
         {mesh.vertices[e.a], mesh.vertices[e.b],
          Eigen::Vector2d(0.5 * (mesh.vertices[e.a] + mesh.vertices[e.b]))}) {
      double cx = 0.25 * (std::floor(p.x() / 0.25) + 0.5);
      double cy = 0.25 * (std::floor(p.y() / 0.25) + 0.5);
      worst = std::max(worst, std::abs((p - Eigen::Vector2d(cx, cy)).norm() - rho));
    }
  }
  CHECK(worst <= mesh.h_max * mesh.h_max);
}

TEST_CASE("cell mesh porosity and periodic pairing") {
  Mesh mesh = generate_cell_mesh(0.4, 1.0 / 64);
  CHECK(mesh.total_area() == doctest::Approx(1.0 - kPi * 0.16).epsilon(0.005));

  auto pairs_x = periodic_vertex_pairs(mesh, 0);
  auto pairs_y = periodic_vertex_pairs(mesh, 1);
  CHECK_FALSE(pairs_x.empty());
  CHECK_FALSE(pairs_y.empty());
  // Count equality: every x1 = 0 vertex has an x1 = 1 partner and vice versa.
  int left = 0, right = 0;
  for (const auto& v : mesh.vertices) {
    if (std::abs(v.x()) < 1e-12) ++left;
    if (std::abs(v.x() - 1.0) < 1e-12) ++right;
  }
  CHECK(left == right);
  CHECK(static_cast<int>(pairs_x.size()) == left);

  // Involution: the partner map is a bijection with identical x2.
  for (const auto& [a, b] : pairs_x) {
    CHECK(mesh.vertices[a].y() == doctest::Approx(mesh.vertices[b].y()).epsilon(1e-12));
    CHECK(std::abs(mesh.vertices[b].x() - 1.0) < 1e-12);
  }
}

TEST_CASE("cell mesh with r = 0 has no hole edges") {
  Mesh mesh = generate_cell_mesh(0.0, 1.0 / 16);
  for (const auto& e : mesh.boundary_edges)
    CHECK((e.tag == BoundaryTag::PeriodicX || e.tag == BoundaryTag::PeriodicY));
  CHECK(mesh.total_area() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mesh quality: reference triangle and generated meshes") {
  Mesh tri;
  tri.vertices = {{0, 0}, {1, 0}, {0, 1}};
  tri.triangles = {{0, 1, 2}};
  MeshQuality q = mesh_quality(tri);
  CHECK(q.min_angle_deg == doctest::Approx(45.0));

  Mesh cell = generate_cell_mesh(0.4, 1.0 / 64);
  MeshQuality cq = mesh_quality(cell);
  CHECK(cq.min_angle_deg >= 15.0);

  Mesh degenerate;
  degenerate.vertices = {{0, 0}, {1, 0}, {2, 0}};
  degenerate.triangles = {{0, 1, 2}};
  CHECK_THROWS_WITH_AS(mesh_quality(degenerate), "degenerate triangle 0",
                       std::runtime_error);
}

TEST_CASE("sweep-resolution meshes keep the quality floor") {
  for (double eps : {0.25, 0.125}) {
    Mesh mesh = generate_perforated_mesh({eps, 0.4, eps / 8});
    CHECK(mesh_quality(mesh).min_angle_deg >= 15.0);
  }
}

TEST_CASE("porosity converges at second order under refinement") {
  double exact = 1.0 - kPi * 0.16;
  double e1 = std::abs(generate_cell_mesh(0.4, 1.0 / 16).total_area() - exact);
  double e2 = std::abs(generate_cell_mesh(0.4, 1.0 / 32).total_area() - exact);
  double e3 = std::abs(generate_cell_mesh(0.4, 1.0 / 64).total_area() - exact);
  CHECK(e2 <= 0.3 * e1);
  CHECK(e3 <= 0.3 * e2);
}

TEST_CASE("halving target_h at least halves h_max") {
  for (double r : {0.0, 0.4}) {
    Mesh coarse = generate_perforated_mesh({0.5, r, 1.0 / 32});
    Mesh fine = generate_perforated_mesh({0.5, r, 1.0 / 64});
    CHECK(fine.h_max <= 0.5 * coarse.h_max * (1.0 + 1e-12));
  }
}

TEST_CASE("mesh text format round-trips") {
  Mesh mesh = generate_cell_mesh(0.4, 1.0 / 16);
  std::stringstream ss;
  write_mesh(ss, mesh);
  Mesh back = read_mesh(ss);
  REQUIRE(back.num_vertices() == mesh.num_vertices());
  REQUIRE(back.num_triangles() == mesh.num_triangles());
  CHECK(back.h_max == doctest::Approx(mesh.h_max).epsilon(1e-14));
  for (int v = 0; v < mesh.num_vertices(); ++v)
    CHECK((back.vertices[v] - mesh.vertices[v]).norm() < 1e-15);
  CHECK(back.boundary_edges.size() == mesh.boundary_edges.size());

  // Determinism: regenerating gives a byte-identical serialization.
  std::stringstream again;
  write_mesh(again, generate_cell_mesh(0.4, 1.0 / 16));
  std::stringstream first;
  write_mesh(first, mesh);
  CHECK(first.str() == again.str());
}
