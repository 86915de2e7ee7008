#pragma once

#include <Eigen/Core>

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace homog {

enum class BoundaryTag { Exterior, Hole, PeriodicX, PeriodicY };

const char* to_string(BoundaryTag tag);
BoundaryTag boundary_tag_from_string(const std::string& name);

struct BoundaryEdge {
  int a = -1;
  int b = -1;
  BoundaryTag tag = BoundaryTag::Exterior;
};

/// Conforming P1 triangulation of a (possibly perforated) subdomain of the
/// unit square. Triangles are counter-clockwise; boundary edges carry the
/// tag of the boundary piece they discretize.
struct Mesh {
  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  double h_max = 0.0;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }

  double triangle_area(int t) const;
  double total_area() const;

  /// Indices of vertices lying on boundary edges with the given tag.
  std::vector<int> tagged_vertices(BoundaryTag tag) const;
};

/// Geometry of the perforated domain: the unit square tiled by 1/epsilon
/// periodicity cells, each carrying a centered circular hole of radius
/// epsilon*hole_radius. hole_radius == 0 means no perforation.
struct GeometrySpec {
  double epsilon = 1.0;
  double hole_radius = 0.4;
  double target_h = 0.05;

  void validate() const;  // throws std::invalid_argument on violation
};

/// Triangulates (0,1)^2 minus the periodic array of disks. Outer boundary
/// edges are tagged Exterior, hole boundaries Hole.
Mesh generate_perforated_mesh(const GeometrySpec& spec);

/// Triangulates the liquid part of the unit cell (centered disk removed).
/// Outer edges are tagged PeriodicX (on x1 = 0/1) and PeriodicY (on x2 = 0/1)
/// with exactly matching vertex partners on opposite sides.
Mesh generate_cell_mesh(double hole_radius, double target_h);

struct MeshQuality {
  double min_angle_deg = 0.0;
  double max_aspect_ratio = 0.0;
  double h_max = 0.0;
};

/// Scans all triangles; throws std::runtime_error naming the first
/// degenerate (non-positive area) triangle found.
MeshQuality mesh_quality(const Mesh& mesh);

/// Number of connected components of Hole-tagged boundary edges.
int count_hole_loops(const Mesh& mesh);

/// For every vertex on x1=0 (resp. x2=0) returns the index of its periodic
/// partner on x1=1 (resp. x2=1). Throws if a partner is missing.
std::vector<std::pair<int, int>> periodic_vertex_pairs(const Mesh& mesh, int axis);

/// Plain-text serialization: sections VERTICES / TRIANGLES / BOUNDARY,
/// one record per line.
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

}  // namespace homog
