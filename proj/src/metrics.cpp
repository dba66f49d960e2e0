#include "ngi/metrics.hpp"

#include "ngi/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace ngi {

namespace {

constexpr int kLeafSize = 8;

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

PointSample sample_surface(const Mesh& mesh, int n, std::uint64_t seed, const std::string& source) {
  if (n <= 0) throw DataError("sample count must be positive");
  std::vector<double> cumulative(mesh.num_triangles());
  double total = 0.0;
  for (int f = 0; f < mesh.num_triangles(); ++f) {
    total += mesh.triangle_area(f);
    cumulative[f] = total;
  }
  if (!(total > 0.0)) throw DataError("cannot sample a mesh with zero area");

  PointSample s;
  s.source = source;
  s.seed = seed;
  s.points.reserve(n);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < n; ++i) {
    const double pick = uniform01(rng) * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    const int f = std::min(static_cast<int>(it - cumulative.begin()), mesh.num_triangles() - 1);
    const double r1 = uniform01(rng);
    const double r2 = uniform01(rng);
    const double q = std::sqrt(r1);
    const auto& t = mesh.triangle(f);
    s.points.push_back((1.0 - q) * mesh.position(t[0]) + q * (1.0 - r2) * mesh.position(t[1]) +
                       q * r2 * mesh.position(t[2]));
  }
  return s;
}

KdTree::KdTree(std::span<const Vec3> points) : points_(points.begin(), points.end()), order_(points.size()) {
  std::iota(order_.begin(), order_.end(), 0);
  if (!points_.empty()) build(0, static_cast<int>(points_.size()));
}

int KdTree::build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (int i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  nodes_.push_back({begin, end, -1, lo, hi});
  if (end - begin <= kLeafSize) return id;
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) { return points_[a][axis] < points_[b][axis]; });
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

double KdTree::box_distance(int node, const Vec3& q) const {
  const Node& nd = nodes_[node];
  const Vec3 gap = (nd.lo - q).cwiseMax(q - nd.hi).cwiseMax(0.0);
  return gap.squaredNorm();
}

void KdTree::search(int node, const Vec3& q, Hit& best) const {
  const Node& nd = nodes_[node];
  if (nd.axis < 0) {
    for (int i = nd.begin; i < nd.end; ++i) {
      const double d = (points_[order_[i]] - q).squaredNorm();
      if (d < best.squared_distance || (d == best.squared_distance && order_[i] < best.index)) {
        best = {order_[i], d};
      }
    }
    return;
  }
  double dl = box_distance(nd.left, q);
  double dr = box_distance(nd.right, q);
  int first = nd.left;
  int second = nd.right;
  if (dr < dl) {
    std::swap(first, second);
    std::swap(dl, dr);
  }
  if (dl <= best.squared_distance) search(first, q, best);
  if (dr <= best.squared_distance) search(second, q, best);
}

KdTree::Hit KdTree::nearest(const Vec3& q) const {
  Hit best{-1, std::numeric_limits<double>::infinity()};
  if (!nodes_.empty()) search(0, q, best);
  return best;
}

std::vector<double> nearest_squared_distances(std::span<const Vec3> queries, const KdTree& target) {
  std::vector<double> d(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) d[i] = target.nearest(queries[i]).squared_distance;
  return d;
}

double chamfer_distance(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.empty() || b.empty()) throw DataError("chamfer distance needs non-empty samples");
  const auto ab = nearest_squared_distances(a, KdTree(b));
  const auto ba = nearest_squared_distances(b, KdTree(a));
  const double mab = std::accumulate(ab.begin(), ab.end(), 0.0) / static_cast<double>(ab.size());
  const double mba = std::accumulate(ba.begin(), ba.end(), 0.0) / static_cast<double>(ba.size());
  return 0.5 * (mab + mba);
}

double hausdorff_distance(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.empty() || b.empty()) throw DataError("Hausdorff distance needs non-empty samples");
  const auto ab = nearest_squared_distances(a, KdTree(b));
  const auto ba = nearest_squared_distances(b, KdTree(a));
  return std::sqrt(std::max(*std::max_element(ab.begin(), ab.end()), *std::max_element(ba.begin(), ba.end())));
}

double compression_ratio(int stored_resolution, int base_resolution) {
  if (stored_resolution <= 0 || base_resolution <= 0 || (stored_resolution & (stored_resolution - 1)) != 0 ||
      (base_resolution & (base_resolution - 1)) != 0 || base_resolution % stored_resolution != 0) {
    throw DataError("invalid resolution " + std::to_string(stored_resolution) + " for base " +
                    std::to_string(base_resolution));
  }
  const double r = static_cast<double>(base_resolution / stored_resolution);
  return r * r;
}

Mesh normalize_to_unit_cube(const Mesh& mesh, const std::pair<Vec3, Vec3>& reference) {
  const double extent = (reference.second - reference.first).maxCoeff();
  const double scale = extent > 0.0 ? 1.0 / extent : 1.0;
  std::vector<Vec3> p(mesh.positions());
  for (auto& x : p) x = (x - reference.first) * scale;
  return Mesh(std::move(p), mesh.triangles());
}

SurfaceDistance compare_meshes(const Mesh& reconstruction, const Mesh& ground_truth, int n, std::uint64_t seed) {
  const auto box = ground_truth.bounding_box();
  const Mesh a = normalize_to_unit_cube(reconstruction, box);
  const Mesh b = normalize_to_unit_cube(ground_truth, box);
  const auto sa = sample_surface(a, n, seed);
  const auto sb = sample_surface(b, n, seed + 1);
  const KdTree ta(sa.points);
  const KdTree tb(sb.points);
  const auto ab = nearest_squared_distances(sa.points, tb);
  const auto ba = nearest_squared_distances(sb.points, ta);
  SurfaceDistance d;
  d.chamfer = 0.5 * (std::accumulate(ab.begin(), ab.end(), 0.0) / n + std::accumulate(ba.begin(), ba.end(), 0.0) / n);
  d.hausdorff =
      std::sqrt(std::max(*std::max_element(ab.begin(), ab.end()), *std::max_element(ba.begin(), ba.end())));
  return d;
}

}  // namespace ngi
