#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace ngi {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Triangle = std::array<int, 3>;

inline constexpr int kNoHalfedge = -1;

// ---------------------------------------------------------------------------
// Mesh
// ---------------------------------------------------------------------------

// Indexed triangle surface with halfedge connectivity. Immutable once built;
// every const query is safe to call concurrently.
//
// Halfedge 3f+k runs from triangles()[f][k] to triangles()[f][(k+1)%3], so
// next/face are implicit. Boundary halfedges have twin == kNoHalfedge.
class Mesh {
 public:
  Mesh() = default;

  // Validates and builds connectivity. Throws DataError on out-of-range
  // indices, repeated corners, non-manifold edges (shared by more than two
  // triangles), inconsistent orientation, or triangles whose area is below
  // 1e-12 * (bbox diagonal)^2.
  Mesh(std::vector<Vec3> positions, std::vector<Triangle> triangles);

  [[nodiscard]] int num_vertices() const noexcept { return static_cast<int>(positions_.size()); }
  [[nodiscard]] int num_triangles() const noexcept { return static_cast<int>(triangles_.size()); }
  [[nodiscard]] int num_halfedges() const noexcept { return 3 * num_triangles(); }
  [[nodiscard]] int num_edges() const noexcept { return num_edges_; }

  [[nodiscard]] const std::vector<Vec3>& positions() const noexcept { return positions_; }
  [[nodiscard]] const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
  [[nodiscard]] const Vec3& position(int v) const { return positions_[v]; }
  [[nodiscard]] const Triangle& triangle(int f) const { return triangles_[f]; }

  [[nodiscard]] static int next(int h) noexcept { return h - h % 3 + (h % 3 + 1) % 3; }
  [[nodiscard]] static int prev(int h) noexcept { return h - h % 3 + (h % 3 + 2) % 3; }
  [[nodiscard]] static int face(int h) noexcept { return h / 3; }
  [[nodiscard]] int twin(int h) const { return twin_[h]; }
  [[nodiscard]] int tail(int h) const { return triangles_[h / 3][h % 3]; }
  [[nodiscard]] int head(int h) const { return triangles_[h / 3][(h % 3 + 1) % 3]; }
  [[nodiscard]] bool is_boundary_halfedge(int h) const { return twin_[h] == kNoHalfedge; }

  [[nodiscard]] bool is_boundary_vertex(int v) const { return boundary_vertex_[v] != 0; }
  // Any halfedge leaving v, or kNoHalfedge for isolated vertices. For
  // boundary vertices this is the outgoing boundary halfedge.
  [[nodiscard]] int outgoing(int v) const { return outgoing_[v]; }

  // Vertex indices adjacent to v (unordered, no duplicates).
  [[nodiscard]] std::vector<int> neighbors(int v) const;

  // Boundary loops as ordered vertex sequences following the triangle
  // orientation. Each loop starts at its smallest vertex index; loops are
  // sorted by that start index.
  [[nodiscard]] std::vector<std::vector<int>> boundary_loops() const;

  [[nodiscard]] double triangle_area(int f) const;
  [[nodiscard]] Vec3 triangle_normal(int f) const;  // unit
  [[nodiscard]] double total_area() const;
  [[nodiscard]] std::pair<Vec3, Vec3> bounding_box() const;
  [[nodiscard]] double bbox_diagonal() const;
  [[nodiscard]] double edge_length(int h) const { return (position(head(h)) - position(tail(h))).norm(); }

 private:
  std::vector<Vec3> positions_;
  std::vector<Triangle> triangles_;
  std::vector<int> twin_;
  std::vector<int> outgoing_;
  std::vector<std::uint8_t> boundary_vertex_;
  int num_edges_ = 0;
};

// ---------------------------------------------------------------------------
// Topology and measures
// ---------------------------------------------------------------------------

struct TopologyReport {
  int euler_characteristic = 0;
  int boundary_loops = 0;
  int genus = 0;
  bool is_disk = false;
};

[[nodiscard]] TopologyReport validate_topology(const Mesh& mesh);

// Cuts a closed genus-0 mesh open along the shortest edge path between two
// far-apart vertices (double breadth-first search). Interior path vertices
// are duplicated; the result has exactly one boundary loop.
[[nodiscard]] Mesh cut_to_disk(const Mesh& mesh);

// The vertex path used by cut_to_disk (endpoints included).
[[nodiscard]] std::vector<int> cut_path(const Mesh& mesh);

struct VertexMeasure {
  std::vector<double> nu;      // one third of incident triangle area, sums to 1
  std::vector<Vec3> normals;   // area-weighted, unit length
};

[[nodiscard]] VertexMeasure vertex_measures(const Mesh& mesh);

// ---------------------------------------------------------------------------
// I/O
// ---------------------------------------------------------------------------

// OBJ (v/f records) or PLY (ascii or binary little-endian), chosen by
// extension.
[[nodiscard]] Mesh load_mesh(const std::filesystem::path& path);

// OBJ with shortest round-trip decimal representation of every coordinate.
void save_obj(const Mesh& mesh, const std::filesystem::path& path);

}  // namespace ngi
