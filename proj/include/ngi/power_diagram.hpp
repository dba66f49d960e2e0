#pragma once

#include "ngi/mesh.hpp"

#include <span>
#include <vector>

namespace ngi {

// Polygon edge labels: a non-negative value is the neighboring site; the
// four square sides use the negative labels below.
inline constexpr int kSideBottom = -1;
inline constexpr int kSideRight = -2;
inline constexpr int kSideTop = -3;
inline constexpr int kSideLeft = -4;

struct PowerCell {
  std::vector<Vec2> polygon;   // counter-clockwise; empty when the cell is empty
  std::vector<int> labels;     // labels[k] tags the edge polygon[k] -> polygon[k+1]
  double area = 0.0;
  Vec2 centroid = Vec2::Zero();

  [[nodiscard]] bool empty() const noexcept { return !(area > 0.0); }
};

struct PowerEdge {
  int i = 0;  // i < j
  int j = 0;
  double length = 0.0;
};

// Power diagram of sites p_i with heights h_i restricted to the unit square:
// W_i = { x in [0,1]^2 : <x, p_i> + h_i >= <x, p_j> + h_j for all j }.
struct PowerDiagram {
  std::vector<double> heights;
  std::vector<PowerCell> cells;
  std::vector<PowerEdge> edges;  // shared segments, sorted by (i, j)
  bool used_fallback = false;    // regular triangulation failed its checks

  [[nodiscard]] int size() const noexcept { return static_cast<int>(cells.size()); }
  [[nodiscard]] std::vector<double> areas() const;
  [[nodiscard]] int empty_count() const;
};

// Builds the diagram from the regular triangulation (lower convex hull of
// the lifted points (p_i, -h_i)) and clips each cell against its hull
// neighbors and the square. If the resulting cells fail to tile the square
// the cells are rebuilt against every other site. Throws DataError on
// duplicate or out-of-square sites.
[[nodiscard]] PowerDiagram power_diagram(std::span<const Vec2> sites, std::span<const double> heights);

// Pairs (i, j), i < j, that are edges of the lower convex hull of the lifted
// sites, plus a flag per site telling whether it is a hull vertex. Returns
// false when the hull is degenerate (fewer than four affinely independent
// points or an inconsistent horizon).
struct RegularTriangulation {
  std::vector<std::pair<int, int>> edges;
  std::vector<bool> on_hull;
};
[[nodiscard]] bool regular_triangulation(std::span<const Vec2> sites, std::span<const double> heights,
                                         RegularTriangulation& out);

}  // namespace ngi
