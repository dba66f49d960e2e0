#pragma once

#include "ngi/mesh.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ngi {

struct PointSample {
  std::vector<Vec3> points;
  std::string source;
  std::uint64_t seed = 0;
};

// Area-weighted face choice with uniform barycentric coordinates, driven by
// mt19937_64(seed). Throws DataError for a zero-area mesh or n == 0.
[[nodiscard]] PointSample sample_surface(const Mesh& mesh, int n, std::uint64_t seed, const std::string& source = {});

// Exact nearest-neighbor index over a fixed point set.
class KdTree {
 public:
  explicit KdTree(std::span<const Vec3> points);

  struct Hit {
    int index = -1;
    double squared_distance = 0.0;
  };
  [[nodiscard]] Hit nearest(const Vec3& q) const;
  [[nodiscard]] int size() const noexcept { return static_cast<int>(points_.size()); }

 private:
  struct Node {
    int begin = 0;
    int end = 0;
    int axis = -1;  // -1 for leaves
    Vec3 lo = Vec3::Zero();
    Vec3 hi = Vec3::Zero();
    int left = -1;
    int right = -1;
  };
  int build(int begin, int end);
  void search(int node, const Vec3& q, Hit& best) const;
  [[nodiscard]] double box_distance(int node, const Vec3& q) const;

  std::vector<Vec3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

// Squared distance from every query point to its nearest neighbor in `target`.
[[nodiscard]] std::vector<double> nearest_squared_distances(std::span<const Vec3> queries, const KdTree& target);

// 0.5 * (mean_a min_b |a-b|^2 + mean_b min_a |a-b|^2).
[[nodiscard]] double chamfer_distance(std::span<const Vec3> a, std::span<const Vec3> b);
// max over both directions of the unsquared nearest distance.
[[nodiscard]] double hausdorff_distance(std::span<const Vec3> a, std::span<const Vec3> b);

[[nodiscard]] inline double chamfer_distance(const PointSample& a, const PointSample& b) {
  return chamfer_distance(a.points, b.points);
}
[[nodiscard]] inline double hausdorff_distance(const PointSample& a, const PointSample& b) {
  return hausdorff_distance(a.points, b.points);
}

// (base / stored)^2 for power-of-two resolutions with stored dividing base.
[[nodiscard]] double compression_ratio(int stored_resolution, int base_resolution = 1024);

// Uniform scale and shift taking `reference` bbox into the unit cube (longest
// side to length 1, minimum corner to the origin).
[[nodiscard]] Mesh normalize_to_unit_cube(const Mesh& mesh, const std::pair<Vec3, Vec3>& reference);

struct SurfaceDistance {
  double chamfer = 0.0;
  double hausdorff = 0.0;
};

// Normalizes both meshes by the ground truth bbox, samples n points on each
// (seeds `seed` and `seed + 1`) and measures both distances.
[[nodiscard]] SurfaceDistance compare_meshes(const Mesh& reconstruction, const Mesh& ground_truth, int n = 100000,
                                             std::uint64_t seed = 42);

}  // namespace ngi
