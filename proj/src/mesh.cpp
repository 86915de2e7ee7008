#include "homog/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace homog {

namespace {

constexpr double kPi = 3.14159265358979323846;

double signed_area2(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                    const Eigen::Vector2d& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

int pow2_ceil(double x) {
  int k = 1;
  while (static_cast<double>(k) < x - 1e-12) k *= 2;
  return k;
}

struct EdgeKey {
  int a, b;
  EdgeKey(int u, int v) : a(std::min(u, v)), b(std::max(u, v)) {}
  bool operator<(const EdgeKey& o) const {
    return a != o.a ? a < o.a : b < o.b;
  }
};

// Adjacency of edges to triangles; boundary edges have t1 == -1.
struct EdgeAdjacency {
  std::map<EdgeKey, std::pair<int, int>> tris;

  explicit EdgeAdjacency(const std::vector<std::array<int, 3>>& triangles) {
    for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
      for (int e = 0; e < 3; ++e) {
        EdgeKey key(triangles[t][e], triangles[t][(e + 1) % 3]);
        auto it = tris.find(key);
        if (it == tris.end()) {
          tris.emplace(key, std::make_pair(t, -1));
        } else if (it->second.second == -1) {
          it->second.second = t;
        } else {
          throw std::runtime_error("mesh generation: non-manifold edge");
        }
      }
    }
  }
};

int third_vertex(const std::array<int, 3>& tri, int a, int b) {
  for (int v : tri)
    if (v != a && v != b) return v;
  return -1;
}

// Lawson flips toward the Delaunay criterion. Boundary edges are adjacent to
// a single triangle and are therefore never candidates. Flips are skipped
// when the new diagonal would exceed max_len, keeping the longest edge of
// the final mesh at the bulk grid diagonal.
void delaunay_flips(const std::vector<Eigen::Vector2d>& verts,
                    std::vector<std::array<int, 3>>& tris, double max_len) {
  for (int sweep = 0; sweep < 60; ++sweep) {
    EdgeAdjacency adj(tris);
    int flips = 0;
    for (const auto& [key, pair] : adj.tris) {
      if (pair.second == -1) continue;
      auto& t1 = tris[pair.first];
      auto& t2 = tris[pair.second];
      // Guard against stale adjacency after a flip in this sweep.
      auto has_edge = [&](const std::array<int, 3>& t) {
        int c = 0;
        for (int v : t) c += (v == key.a || v == key.b) ? 1 : 0;
        return c == 2;
      };
      if (!has_edge(t1) || !has_edge(t2)) continue;
      int c = third_vertex(t1, key.a, key.b);
      int d = third_vertex(t2, key.a, key.b);
      const auto &pa = verts[key.a], &pb = verts[key.b], &pc = verts[c],
                 &pd = verts[d];
      if ((pc - pd).norm() > max_len) continue;
      // Opposite-angle criterion: flip when the angles at c and d sum to
      // more than pi.
      Eigen::Vector2d ca = pa - pc, cb = pb - pc, da = pa - pd, db = pb - pd;
      double cos_c = ca.dot(cb) / (ca.norm() * cb.norm());
      double cos_d = da.dot(db) / (da.norm() * db.norm());
      double sin_c = std::abs(ca.x() * cb.y() - ca.y() * cb.x()) / (ca.norm() * cb.norm());
      double sin_d = std::abs(da.x() * db.y() - da.y() * db.x()) / (da.norm() * db.norm());
      if (cos_c * sin_d + cos_d * sin_c >= -1e-13) continue;  // sin(c+d) >= 0
      // New triangles (c,d,a) and (d,c,b); keep ccw orientation.
      double a1 = signed_area2(pc, pd, pa);
      double a2 = signed_area2(pd, pc, pb);
      if (a1 <= 1e-16 || a2 <= 1e-16) continue;
      t1 = {c, d, key.a};
      t2 = {d, c, key.b};
      ++flips;
    }
    if (flips == 0) break;
  }
}

struct HoleLayout;
bool on_circle(const HoleLayout& layout, const Eigen::Vector2d& p);
Eigen::Vector2d circle_projection(const HoleLayout& layout, const Eigen::Vector2d& p);

// Midpoint bisection of every edge longer than max_len. Splitting an edge
// at its midpoint always yields positive-area triangles and never creates a
// longer edge, so the pass terminates with h_max <= max_len. Hole-boundary
// chords are held to boundary_max_len (the sagitta budget) and their split
// points are projected back onto the circle.
void split_long_edges(std::vector<Eigen::Vector2d>& verts,
                      std::vector<std::array<int, 3>>& tris, double max_len,
                      const HoleLayout* layout = nullptr,
                      double boundary_max_len = 0.0) {
  for (int sweep = 0; sweep < 80; ++sweep) {
    EdgeAdjacency adj(tris);
    std::vector<EdgeKey> long_edges;
    for (const auto& [key, pair] : adj.tris) {
      double len = (verts[key.a] - verts[key.b]).norm();
      double limit = max_len;
      if (pair.second == -1 && layout && on_circle(*layout, verts[key.a]) &&
          on_circle(*layout, verts[key.b]))
        limit = std::min(limit, boundary_max_len);
      if (len > limit) long_edges.push_back(key);
    }
    if (long_edges.empty()) return;
    std::set<int> touched;
    auto split_in = [&](int t, int a, int b, int m) {
      std::array<int, 3> tri = tris[t];
      for (int e = 0; e < 3; ++e) {
        int u = tri[e], v = tri[(e + 1) % 3], w = tri[(e + 2) % 3];
        if ((u == a && v == b) || (u == b && v == a)) {
          tris[t] = {u, m, w};
          tris.push_back({m, v, w});
          return;
        }
      }
    };
    for (const auto& key : long_edges) {
      auto [t1, t2] = adj.tris.at(key);
      if (touched.count(t1) || (t2 != -1 && touched.count(t2))) continue;
      Eigen::Vector2d mid = 0.5 * (verts[key.a] + verts[key.b]);
      if (t2 == -1 && layout && on_circle(*layout, verts[key.a]) &&
          on_circle(*layout, verts[key.b])) {
        Eigen::Vector2d projected = circle_projection(*layout, mid);
        // Ordered edge (u, v) as it appears in t1 keeps the orientation test
        // honest for both traversal directions.
        int u = key.a, v = key.b;
        const auto& tri = tris[t1];
        for (int e = 0; e < 3; ++e)
          if (tri[e] == key.b && tri[(e + 1) % 3] == key.a) {
            u = key.b;
            v = key.a;
            break;
          }
        int w = third_vertex(tri, key.a, key.b);
        if (signed_area2(verts[u], projected, verts[w]) > 1e-16 &&
            signed_area2(projected, verts[v], verts[w]) > 1e-16)
          mid = projected;
      }
      int m = static_cast<int>(verts.size());
      verts.push_back(mid);
      split_in(t1, key.a, key.b, m);
      touched.insert(t1);
      if (t2 != -1) {
        split_in(t2, key.a, key.b, m);
        touched.insert(t2);
      }
    }
  }
  throw std::runtime_error("mesh generation: long-edge splitting did not terminate");
}

struct HoleLayout {
  bool any = false;
  double eps = 1.0;
  double rho = 0.0;  // physical hole radius
  int cells = 1;     // holes per side

  Eigen::Vector2d center_for(const Eigen::Vector2d& p) const {
    auto idx = [&](double x) {
      int i = static_cast<int>(std::floor(x / eps));
      return std::clamp(i, 0, cells - 1);
    };
    return eps * Eigen::Vector2d(idx(p.x()) + 0.5, idx(p.y()) + 0.5);
  }

  double signed_distance(const Eigen::Vector2d& p) const {
    return (p - center_for(p)).norm() - rho;
  }
};

bool on_circle(const HoleLayout& layout, const Eigen::Vector2d& p) {
  return std::abs(layout.signed_distance(p)) < 1e-9;
}

Eigen::Vector2d circle_projection(const HoleLayout& layout, const Eigen::Vector2d& p) {
  Eigen::Vector2d c = layout.center_for(p);
  Eigen::Vector2d d = p - c;
  double len = d.norm();
  Eigen::Vector2d dir = len > 1e-14 ? Eigen::Vector2d(d / len) : Eigen::Vector2d(1, 0);
  return c + layout.rho * dir;
}

// Shared generator for macro and cell meshes; `cell_mode` switches the
// boundary tagging of the outer square.
double min_angle_of(const std::vector<Eigen::Vector2d>& verts,
                    const std::array<int, 3>& tri) {
  double worst = 181.0;
  for (int e = 0; e < 3; ++e) {
    Eigen::Vector2d u = verts[tri[(e + 1) % 3]] - verts[tri[e]];
    Eigen::Vector2d v = verts[tri[(e + 2) % 3]] - verts[tri[e]];
    double ang = std::atan2(std::abs(u.x() * v.y() - u.y() * v.x()), u.dot(v));
    worst = std::min(worst, ang * 180.0 / kPi);
  }
  return worst;
}

// Repositions interior vertices of substandard triangles, trying the ring
// average and radially offset variants and keeping whichever maximizes the
// local minimum angle. Plain averaging cannot open the thin wedges left
// next to boundary split points.
void improve_quality(std::vector<Eigen::Vector2d>& verts,
                     std::vector<std::array<int, 3>>& tris, const HoleLayout& layout,
                     double h0, double max_edge, double floor_deg) {
  for (int round = 0; round < 15; ++round) {
    EdgeAdjacency adj(tris);
    std::vector<char> on_boundary(verts.size(), 0);
    for (const auto& [key, pair] : adj.tris)
      if (pair.second == -1) on_boundary[key.a] = on_boundary[key.b] = 1;
    for (size_t v = 0; v < verts.size(); ++v) {
      const auto& p = verts[v];
      if (p.x() < 1e-12 || p.x() > 1 - 1e-12 || p.y() < 1e-12 || p.y() > 1 - 1e-12)
        on_boundary[v] = 1;
    }
    std::vector<std::vector<int>> ring(verts.size()), tris_of(verts.size());
    for (int t = 0; t < static_cast<int>(tris.size()); ++t)
      for (int v : tris[t]) tris_of[v].push_back(t);
    for (const auto& [key, pair] : adj.tris) {
      (void)pair;
      ring[key.a].push_back(key.b);
      ring[key.b].push_back(key.a);
    }

    std::vector<char> on_outer(verts.size(), 0);
    for (size_t v = 0; v < verts.size(); ++v) {
      const auto& p = verts[v];
      if (p.x() < 1e-12 || p.x() > 1 - 1e-12 || p.y() < 1e-12 || p.y() > 1 - 1e-12)
        on_outer[v] = 1;
    }
    auto slidable = [&](int v) {
      return on_boundary[v] && !on_outer[v] &&
             std::abs(layout.signed_distance(verts[v])) < 1e-9;
    };

    std::set<int> movable;
    for (const auto& tri : tris)
      if (min_angle_of(verts, tri) < floor_deg + 0.3)
        for (int v : tri)
          if (!on_boundary[v] || slidable(v)) movable.insert(v);
    if (movable.empty()) return;

    bool changed = false;
    for (int v : movable) {
      Eigen::Vector2d avg = Eigen::Vector2d::Zero();
      for (int w : ring[v]) avg += verts[w];
      avg /= static_cast<double>(ring[v].size());
      Eigen::Vector2d c = layout.center_for(verts[v]);
      Eigen::Vector2d dir = verts[v] - c;
      dir = dir.norm() > 1e-14 ? Eigen::Vector2d(dir / dir.norm())
                               : Eigen::Vector2d(1, 0);
      bool slide = slidable(v);
      std::vector<Eigen::Vector2d> candidates;
      if (slide) {
        // Circle vertices move only along the circle, evening out the
        // chord spacing without touching the boundary accuracy.
        candidates = {circle_projection(layout, avg),
                      circle_projection(layout, 0.5 * (verts[v] + avg)),
                      circle_projection(layout, 0.25 * verts[v] + 0.75 * avg)};
      } else {
        candidates = {avg, avg + 0.35 * h0 * dir, avg + 0.7 * h0 * dir,
                      0.5 * (verts[v] + avg)};
      }

      auto local_quality = [&](const Eigen::Vector2d& pos) {
        double worst = 181.0;
        Eigen::Vector2d old = verts[v];
        verts[v] = pos;
        for (int t : tris_of[v]) {
          const auto& tr = tris[t];
          if (signed_area2(verts[tr[0]], verts[tr[1]], verts[tr[2]]) < 1e-14) {
            verts[v] = old;
            return -1.0;
          }
          worst = std::min(worst, min_angle_of(verts, tr));
        }
        for (int w : ring[v])
          if ((verts[v] - verts[w]).norm() > max_edge) {
            verts[v] = old;
            return -1.0;
          }
        if (!slide && layout.any &&
            layout.signed_distance(verts[v]) < 0.05 * h0) {
          verts[v] = old;
          return -1.0;
        }
        verts[v] = old;
        return worst;
      };

      double best = local_quality(verts[v]);
      Eigen::Vector2d best_pos = verts[v];
      for (const auto& cand : candidates) {
        double q = local_quality(cand);
        if (q > best + 1e-9) {
          best = q;
          best_pos = cand;
        }
      }
      if ((best_pos - verts[v]).squaredNorm() > 0.0) {
        verts[v] = best_pos;
        changed = true;
      }
    }
    if (!changed) return;
    delaunay_flips(verts, tris, max_edge);
  }
}

Mesh generate_impl(double eps, double r, double target_h, bool cell_mode) {
  const int inv_eps = static_cast<int>(std::lround(1.0 / eps));
  const bool holes = r > 0.0;

  int per_cell = pow2_ceil(eps / target_h);
  per_cell = std::max(per_cell, 4);
  if (holes) per_cell *= 2;  // resolve the hole boundary and the coefficient
  const int n = per_cell * inv_eps;
  const double h0 = 1.0 / n;

  std::vector<Eigen::Vector2d> verts;
  verts.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      verts.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };

  // Alternating-diagonal split keeps the triangulation symmetric under the
  // x1 <-> x2 swap and the point reflection about the domain center.
  std::vector<std::array<int, 3>> tris;
  tris.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1),
          v11 = vid(i + 1, j + 1);
      if ((i + j) % 2 == 0) {
        tris.push_back({v00, v10, v11});
        tris.push_back({v00, v11, v01});
      } else {
        tris.push_back({v00, v10, v01});
        tris.push_back({v10, v11, v01});
      }
    }
  }

  HoleLayout layout{holes, eps, eps * r, inv_eps};
  const double max_edge = std::sqrt(2.0) * h0 * (1.0 + 1e-9);

  if (holes) {
    std::vector<double> sd(verts.size());
    for (size_t v = 0; v < verts.size(); ++v) sd[v] = layout.signed_distance(verts[v]);

    // Vertices within the snap band are projected onto the circle;
    // everything deeper inside is carved away with its triangles.
    const double band = 0.3 * h0;
    std::vector<char> keep(tris.size(), 1);
    std::vector<char> snapped(verts.size(), 0);
    for (size_t t = 0; t < tris.size(); ++t) {
      bool outside = false;
      for (int v : tris[t]) outside = outside || sd[v] > band;
      keep[t] = outside ? 1 : 0;
      if (outside)
        for (int v : tris[t])
          if (sd[v] <= band) snapped[v] = 1;
    }
    for (size_t v = 0; v < verts.size(); ++v) {
      if (!snapped[v]) continue;
      Eigen::Vector2d c = layout.center_for(verts[v]);
      Eigen::Vector2d d = verts[v] - c;
      double len = d.norm();
      Eigen::Vector2d dir = len > 1e-14 ? Eigen::Vector2d(d / len) : Eigen::Vector2d(1, 0);
      verts[v] = c + layout.rho * dir;
    }

    // Drop cap slivers (all vertices on the circle lie inside the disk) and
    // anything the projection degenerated.
    std::vector<std::array<int, 3>> kept;
    kept.reserve(tris.size());
    for (size_t t = 0; t < tris.size(); ++t) {
      if (!keep[t]) continue;
      bool all_on = true;
      for (int v : tris[t]) all_on = all_on && snapped[v];
      if (all_on) continue;
      const auto& tr = tris[t];
      if (signed_area2(verts[tr[0]], verts[tr[1]], verts[tr[2]]) <= 1e-16) continue;
      kept.push_back(tr);
    }
    tris = std::move(kept);
  }

  // Compact away unused vertices.
  {
    std::vector<int> remap(verts.size(), -1);
    std::vector<Eigen::Vector2d> vkeep;
    for (auto& t : tris) {
      for (int& v : t) {
        if (remap[v] == -1) {
          remap[v] = static_cast<int>(vkeep.size());
          vkeep.push_back(verts[v]);
        }
        v = remap[v];
      }
    }
    verts = std::move(vkeep);
  }

  // Sagitta budget: chords no longer than 4 h0 sqrt(rho) deviate from the
  // circle by at most 2 h0^2 = h_max^2.
  const double boundary_max = 4.0 * h0 * std::sqrt(std::max(layout.rho, 1e-12));
  if (holes) split_long_edges(verts, tris, max_edge, &layout, boundary_max);
  delaunay_flips(verts, tris, max_edge);

  // Near-hole relaxation: Jacobi averaging of interior vertices close to a
  // circle, under-relaxed and reverted where it would squash a triangle.
  if (holes) {
    std::vector<char> on_boundary(verts.size(), 0);
    {
      EdgeAdjacency adj(tris);
      for (const auto& [key, pair] : adj.tris)
        if (pair.second == -1) on_boundary[key.a] = on_boundary[key.b] = 1;
    }
    for (size_t v = 0; v < verts.size(); ++v) {
      const auto& p = verts[v];
      if (p.x() < 1e-12 || p.x() > 1 - 1e-12 || p.y() < 1e-12 || p.y() > 1 - 1e-12)
        on_boundary[v] = 1;
    }
    std::vector<std::vector<int>> ring(verts.size());
    {
      std::set<EdgeKey> seen;
      for (const auto& t : tris)
        for (int e = 0; e < 3; ++e) {
          int a = t[e], b = t[(e + 1) % 3];
          if (seen.insert(EdgeKey(a, b)).second) {
            ring[a].push_back(b);
            ring[b].push_back(a);
          }
        }
    }
    std::vector<std::vector<int>> tris_of(verts.size());
    for (int t = 0; t < static_cast<int>(tris.size()); ++t)
      for (int v : tris[t]) tris_of[v].push_back(t);

    for (int pass = 0; pass < 3; ++pass) {
      std::vector<Eigen::Vector2d> next = verts;
      for (size_t v = 0; v < verts.size(); ++v) {
        if (on_boundary[v] || ring[v].empty()) continue;
        if (std::abs(layout.signed_distance(verts[v])) > 2.5 * h0) continue;
        Eigen::Vector2d avg = Eigen::Vector2d::Zero();
        for (int w : ring[v]) avg += verts[w];
        avg /= static_cast<double>(ring[v].size());
        next[v] = verts[v] + 0.5 * (avg - verts[v]);
      }
      // Revert moves that squash an incident triangle or stretch an edge
      // past the bulk diagonal.
      for (size_t v = 0; v < verts.size(); ++v) {
        if ((next[v] - verts[v]).squaredNorm() == 0.0) continue;
        bool ok = true;
        for (int t : tris_of[v])
          ok = ok &&
               signed_area2(next[tris[t][0]], next[tris[t][1]], next[tris[t][2]]) >=
                   0.05 * h0 * h0;
        for (int w : ring[v])
          ok = ok && (next[v] - next[w]).norm() <= max_edge &&
               (next[v] - verts[w]).norm() <= max_edge;
        if (!ok) next[v] = verts[v];
      }
      verts = std::move(next);
    }
    split_long_edges(verts, tris, max_edge, &layout, boundary_max);
    delaunay_flips(verts, tris, max_edge);
    improve_quality(verts, tris, layout, h0, max_edge, 15.0);
  }

  Mesh mesh;
  mesh.vertices = std::move(verts);
  mesh.triangles = std::move(tris);

  // Boundary extraction and tagging.
  EdgeAdjacency adj(mesh.triangles);
  auto on_line = [](double x, double v) { return std::abs(x - v) < 1e-12; };
  for (const auto& [key, pair] : adj.tris) {
    if (pair.second != -1) continue;
    const auto &pa = mesh.vertices[key.a], &pb = mesh.vertices[key.b];
    BoundaryEdge edge{key.a, key.b, BoundaryTag::Hole};
    if (on_line(pa.x(), 0) && on_line(pb.x(), 0))
      edge.tag = cell_mode ? BoundaryTag::PeriodicX : BoundaryTag::Exterior;
    else if (on_line(pa.x(), 1) && on_line(pb.x(), 1))
      edge.tag = cell_mode ? BoundaryTag::PeriodicX : BoundaryTag::Exterior;
    else if (on_line(pa.y(), 0) && on_line(pb.y(), 0))
      edge.tag = cell_mode ? BoundaryTag::PeriodicY : BoundaryTag::Exterior;
    else if (on_line(pa.y(), 1) && on_line(pb.y(), 1))
      edge.tag = cell_mode ? BoundaryTag::PeriodicY : BoundaryTag::Exterior;
    mesh.boundary_edges.push_back(edge);
  }

  double h_max = 0.0;
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e)
      h_max = std::max(
          h_max, (mesh.vertices[t[e]] - mesh.vertices[t[(e + 1) % 3]]).norm());
  mesh.h_max = h_max;

  if (mesh.h_max > 1.5 * target_h)
    throw std::runtime_error("mesh generation: h_max exceeds 1.5 * target_h");
  for (int t = 0; t < mesh.num_triangles(); ++t)
    if (mesh.triangle_area(t) <= 0.0)
      throw std::runtime_error("mesh generation: non-positive triangle " +
                               std::to_string(t));

  if (cell_mode) {
    periodic_vertex_pairs(mesh, 0);
    periodic_vertex_pairs(mesh, 1);
  }
  return mesh;
}

}  // namespace

const char* to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Exterior: return "EXTERIOR";
    case BoundaryTag::Hole: return "HOLE";
    case BoundaryTag::PeriodicX: return "PERIODIC_X";
    case BoundaryTag::PeriodicY: return "PERIODIC_Y";
  }
  return "?";
}

BoundaryTag boundary_tag_from_string(const std::string& name) {
  if (name == "EXTERIOR") return BoundaryTag::Exterior;
  if (name == "HOLE") return BoundaryTag::Hole;
  if (name == "PERIODIC_X") return BoundaryTag::PeriodicX;
  if (name == "PERIODIC_Y") return BoundaryTag::PeriodicY;
  throw std::invalid_argument("unknown boundary tag: " + name);
}

double Mesh::triangle_area(int t) const {
  const auto& tr = triangles[t];
  return 0.5 * signed_area2(vertices[tr[0]], vertices[tr[1]], vertices[tr[2]]);
}

double Mesh::total_area() const {
  double area = 0.0;
  for (int t = 0; t < num_triangles(); ++t) area += triangle_area(t);
  return area;
}

std::vector<int> Mesh::tagged_vertices(BoundaryTag tag) const {
  std::set<int> found;
  for (const auto& e : boundary_edges)
    if (e.tag == tag) {
      found.insert(e.a);
      found.insert(e.b);
    }
  return {found.begin(), found.end()};
}

void GeometrySpec::validate() const {
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  double inv = 1.0 / epsilon;
  if (std::abs(inv - std::lround(inv)) > 1e-9)
    throw std::invalid_argument("1/epsilon must be a positive integer");
  if (hole_radius < 0 || hole_radius >= 0.5)
    throw std::invalid_argument("hole_radius must lie in [0, 0.5)");
  if (target_h <= 0) throw std::invalid_argument("target_h must be positive");
  if (target_h > epsilon / 8 + 1e-15)
    throw std::invalid_argument("target_h must not exceed epsilon/8");
}

Mesh generate_perforated_mesh(const GeometrySpec& spec) {
  spec.validate();
  return generate_impl(spec.epsilon, spec.hole_radius, spec.target_h, false);
}

Mesh generate_cell_mesh(double hole_radius, double target_h) {
  if (hole_radius < 0 || hole_radius >= 0.5)
    throw std::invalid_argument("hole_radius must lie in [0, 0.5)");
  if (target_h <= 0 || target_h > 0.125 + 1e-15)
    throw std::invalid_argument("target_h must lie in (0, 1/8]");
  return generate_impl(1.0, hole_radius, target_h, true);
}

MeshQuality mesh_quality(const Mesh& mesh) {
  MeshQuality q;
  q.min_angle_deg = 180.0;
  q.h_max = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tr = mesh.triangles[t];
    double area2 = signed_area2(mesh.vertices[tr[0]], mesh.vertices[tr[1]],
                                mesh.vertices[tr[2]]);
    if (area2 <= 0.0)
      throw std::runtime_error("degenerate triangle " + std::to_string(t));
    double lmin = 1e300, lmax = 0.0;
    for (int e = 0; e < 3; ++e) {
      const auto& a = mesh.vertices[tr[e]];
      const auto& b = mesh.vertices[tr[(e + 1) % 3]];
      const auto& c = mesh.vertices[tr[(e + 2) % 3]];
      double len = (b - a).norm();
      lmin = std::min(lmin, len);
      lmax = std::max(lmax, len);
      Eigen::Vector2d u = b - a, v = c - a;
      double ang = std::atan2(std::abs(u.x() * v.y() - u.y() * v.x()), u.dot(v));
      q.min_angle_deg = std::min(q.min_angle_deg, ang * 180.0 / kPi);
    }
    q.max_aspect_ratio = std::max(q.max_aspect_ratio, lmax / lmin);
    q.h_max = std::max(q.h_max, lmax);
  }
  return q;
}

int count_hole_loops(const Mesh& mesh) {
  std::map<int, int> parent;
  std::function<int(int)> find = [&](int v) {
    return parent[v] == v ? v : parent[v] = find(parent[v]);
  };
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag != BoundaryTag::Hole) continue;
    if (!parent.count(e.a)) parent[e.a] = e.a;
    if (!parent.count(e.b)) parent[e.b] = e.b;
    parent[find(e.a)] = find(e.b);
  }
  std::set<int> roots;
  for (const auto& [v, p] : parent) roots.insert(find(v));
  return static_cast<int>(roots.size());
}

std::vector<std::pair<int, int>> periodic_vertex_pairs(const Mesh& mesh, int axis) {
  std::map<long long, int> far_side;
  auto key_of = [](double coord) { return std::llround(coord * 1e9); };
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const auto& p = mesh.vertices[v];
    double main = axis == 0 ? p.x() : p.y();
    double other = axis == 0 ? p.y() : p.x();
    if (std::abs(main - 1.0) < 1e-12) far_side[key_of(other)] = v;
  }
  std::vector<std::pair<int, int>> pairs;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const auto& p = mesh.vertices[v];
    double main = axis == 0 ? p.x() : p.y();
    double other = axis == 0 ? p.y() : p.x();
    if (std::abs(main) >= 1e-12) continue;
    auto it = far_side.find(key_of(other));
    if (it == far_side.end())
      throw std::runtime_error("periodic vertex matching failed at coordinate " +
                               std::to_string(other));
    pairs.emplace_back(v, it->second);
  }
  return pairs;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << "VERTICES " << mesh.num_vertices() << "\n";
  os.precision(17);
  for (const auto& v : mesh.vertices) os << v.x() << " " << v.y() << "\n";
  os << "TRIANGLES " << mesh.num_triangles() << "\n";
  for (const auto& t : mesh.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
  os << "BOUNDARY " << mesh.boundary_edges.size() << "\n";
  for (const auto& e : mesh.boundary_edges)
    os << e.a << " " << e.b << " " << to_string(e.tag) << "\n";
}

Mesh read_mesh(std::istream& is) {
  Mesh mesh;
  std::string section;
  int count = 0;
  if (!(is >> section >> count) || section != "VERTICES")
    throw std::runtime_error("mesh file: expected VERTICES section");
  mesh.vertices.resize(count);
  for (auto& v : mesh.vertices) is >> v.x() >> v.y();
  if (!(is >> section >> count) || section != "TRIANGLES")
    throw std::runtime_error("mesh file: expected TRIANGLES section");
  mesh.triangles.resize(count);
  for (auto& t : mesh.triangles) is >> t[0] >> t[1] >> t[2];
  if (!(is >> section >> count) || section != "BOUNDARY")
    throw std::runtime_error("mesh file: expected BOUNDARY section");
  mesh.boundary_edges.resize(count);
  for (auto& e : mesh.boundary_edges) {
    std::string tag;
    is >> e.a >> e.b >> tag;
    e.tag = boundary_tag_from_string(tag);
  }
  if (!is) throw std::runtime_error("mesh file: truncated");
  double h_max = 0.0;
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e)
      h_max = std::max(h_max,
                       (mesh.vertices[t[e]] - mesh.vertices[t[(e + 1) % 3]]).norm());
  mesh.h_max = h_max;
  return mesh;
}

}  // namespace homog
