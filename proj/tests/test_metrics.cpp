#include "ngi/error.hpp"
#include "ngi/metrics.hpp"
#include "ngi/shapes.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace ngi;

namespace {

std::vector<Vec3> random_points(std::mt19937_64& rng, int n, double lo = 0.0, double hi = 1.0) {
  std::vector<Vec3> p(n);
  for (auto& x : p) x = Vec3(testing::uniform(rng, lo, hi), testing::uniform(rng, lo, hi), testing::uniform(rng, lo, hi));
  return p;
}

double brute_nearest(const std::vector<Vec3>& pts, const Vec3& q) {
  double best = 1e300;
  for (const auto& p : pts) best = std::min(best, (p - q).squaredNorm());
  return best;
}

// Two triangles in the z = 0 plane with areas 3 and 1.
Mesh two_triangles() {
  return Mesh({{0, 0, 0}, {3, 0, 0}, {0, 2, 0}, {4, 0, 0}, {5, 0, 0}, {4, 2, 0}}, {{0, 1, 2}, {3, 4, 5}});
}

}  // namespace

TEST_CASE("samples lie on the surface") {
  const Mesh m = two_triangles();
  const auto s = sample_surface(m, 5000, 3, "two");
  CHECK(s.points.size() == 5000);
  CHECK(s.seed == 3);
  CHECK(s.source == "two");
  for (const auto& p : s.points) {
    CHECK(p.z() == 0.0);
    const bool first = p.x() >= 0 && p.y() >= 0 && p.x() / 3 + p.y() / 2 <= 1 + 1e-12;
    const bool second = p.x() >= 4 - 1e-12 && p.y() >= 0 && (p.x() - 4) + p.y() / 2 <= 1 + 1e-12;
    CHECK((first || second));
  }
}

TEST_CASE("faces are chosen in proportion to their area") {
  const Mesh m = two_triangles();
  double fraction = 0.0;
  const int seeds = 10;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto s = sample_surface(m, 40000, seed);
    int in_first = 0;
    for (const auto& p : s.points) in_first += p.x() < 3.5;
    fraction += static_cast<double>(in_first) / 40000 / seeds;
  }
  CHECK(std::abs(fraction - 0.75) <= 0.01);
}

TEST_CASE("barycentric sampling is uniform inside a triangle") {
  // Mean of a uniform sample over a triangle is its centroid; the fraction in
  // the sub-triangle spanned by the edge midpoints is 1/4.
  const Mesh t({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
  const auto s = sample_surface(t, 200000, 9);
  Vec3 mean = Vec3::Zero();
  int middle = 0;
  for (const auto& p : s.points) {
    mean += p / 200000.0;
    middle += p.x() <= 0.5 && p.y() <= 0.5 && p.x() + p.y() >= 0.5;
  }
  CHECK((mean - Vec3(1.0 / 3, 1.0 / 3, 0)).norm() <= 3e-3);
  CHECK(std::abs(middle / 200000.0 - 0.25) <= 5e-3);
}

TEST_CASE("sampling is deterministic in the seed") {
  const Mesh m = shapes::spherical_cap(5);
  const auto a = sample_surface(m, 1000, 42);
  const auto b = sample_surface(m, 1000, 42);
  const auto c = sample_surface(m, 1000, 43);
  CHECK(a.points == b.points);
  CHECK(a.points != c.points);
}

TEST_CASE("sampling rejects empty requests") {
  CHECK_THROWS_AS((void)sample_surface(shapes::single_triangle(), 0, 1), DataError);
}

TEST_CASE("kd-tree nearest neighbor agrees with brute force") {
  std::mt19937_64 rng(12);
  for (int n : {1, 7, 100, 3000}) {
    const auto pts = random_points(rng, n);
    const KdTree tree(pts);
    CHECK(tree.size() == n);
    const auto queries = random_points(rng, 300, -0.5, 1.5);
    for (const auto& q : queries) {
      const auto hit = tree.nearest(q);
      CHECK(hit.squared_distance == brute_nearest(pts, q));
      CHECK((pts[hit.index] - q).squaredNorm() == hit.squared_distance);
    }
  }
}

TEST_CASE("kd-tree handles repeated points") {
  std::vector<Vec3> pts(50, Vec3(0.5, 0.5, 0.5));
  pts.emplace_back(0, 0, 0);
  const KdTree tree(pts);
  CHECK(tree.nearest(Vec3(0.1, 0, 0)).index == 50);
  CHECK(tree.nearest(Vec3(0.6, 0.5, 0.5)).squared_distance == doctest::Approx(0.01));
}

TEST_CASE("distances of identical and single-point sets") {
  std::mt19937_64 rng(1);
  const auto a = random_points(rng, 500);
  CHECK(chamfer_distance(a, a) == 0.0);
  CHECK(hausdorff_distance(a, a) == 0.0);
  const std::vector<Vec3> p{Vec3(0, 0, 0)};
  const std::vector<Vec3> q{Vec3(1, 0, 0)};
  CHECK(chamfer_distance(p, q) == 1.0);
  CHECK(hausdorff_distance(p, q) == 1.0);
}

TEST_CASE("chamfer and Hausdorff against brute-force definitions") {
  std::mt19937_64 rng(77);
  const auto a = random_points(rng, 400);
  const auto b = random_points(rng, 300, 0.2, 1.3);
  double ab = 0.0, ba = 0.0, hd = 0.0, mean_ab = 0.0;
  for (const auto& x : a) {
    const double d = brute_nearest(b, x);
    ab += d / a.size();
    mean_ab += std::sqrt(d) / a.size();
    hd = std::max(hd, std::sqrt(d));
  }
  for (const auto& x : b) {
    const double d = brute_nearest(a, x);
    ba += d / b.size();
    hd = std::max(hd, std::sqrt(d));
  }
  CHECK(chamfer_distance(a, b) == doctest::Approx(0.5 * (ab + ba)).epsilon(1e-12));
  CHECK(hausdorff_distance(a, b) == hd);
  CHECK(chamfer_distance(a, b) == doctest::Approx(chamfer_distance(b, a)).epsilon(1e-14));
  CHECK(hausdorff_distance(a, b) == hausdorff_distance(b, a));
  CHECK(hausdorff_distance(a, b) >= mean_ab);
}

TEST_CASE("scaling both sets by s scales CD by s^2 and HD by s") {
  std::mt19937_64 rng(5);
  const auto a = random_points(rng, 200);
  const auto b = random_points(rng, 250);
  std::vector<Vec3> a2, b2;
  for (const auto& p : a) a2.push_back(2 * p);
  for (const auto& p : b) b2.push_back(2 * p);
  CHECK(chamfer_distance(a2, b2) == doctest::Approx(4 * chamfer_distance(a, b)).epsilon(1e-12));
  CHECK(hausdorff_distance(a2, b2) == doctest::Approx(2 * hausdorff_distance(a, b)).epsilon(1e-12));
}

TEST_CASE("compression ratio") {
  CHECK(compression_ratio(1024) == 1.0);
  CHECK(compression_ratio(128) == 64.0);
  CHECK(compression_ratio(8) == 16384.0);
  for (int level = 0; level <= 10; ++level) CHECK(compression_ratio(1024 >> level) == std::pow(4.0, level));
  CHECK(compression_ratio(64, 256) == 16.0);
  CHECK_THROWS_AS((void)compression_ratio(0), DataError);
  CHECK_THROWS_AS((void)compression_ratio(100), DataError);
  CHECK_THROWS_AS((void)compression_ratio(2048), DataError);
}

TEST_CASE("normalization maps the reference box into the unit cube") {
  const Mesh m = shapes::height_field(5, [](double x, double) { return x; });
  std::vector<Vec3> p;
  for (const auto& x : m.positions()) p.push_back(3 * x + Vec3(1, -2, 5));
  const Mesh big(p, m.triangles());
  const Mesh n = normalize_to_unit_cube(big, big.bounding_box());
  const auto [lo, hi] = n.bounding_box();
  CHECK(lo.norm() <= 1e-12);
  CHECK((hi - Vec3::Ones()).norm() <= 1e-12);
}

TEST_CASE("comparing meshes is invariant to a common similarity") {
  const Mesh a = shapes::spherical_cap(6);
  const Mesh b = shapes::spherical_cap(4);
  std::vector<Vec3> pa, pb;
  for (const auto& x : a.positions()) pa.push_back(7 * x + Vec3(3, 3, 3));
  for (const auto& x : b.positions()) pb.push_back(7 * x + Vec3(3, 3, 3));
  const auto d0 = compare_meshes(a, b, 4000, 1);
  const auto d1 = compare_meshes(Mesh(pa, a.triangles()), Mesh(pb, b.triangles()), 4000, 1);
  CHECK(d1.chamfer == doctest::Approx(d0.chamfer).epsilon(1e-9));
  CHECK(d1.hausdorff == doctest::Approx(d0.hausdorff).epsilon(1e-9));
  CHECK(d0.chamfer > 0.0);

  const auto same = compare_meshes(a, a, 20000, 1);
  CHECK(same.chamfer < 1e-4);
}
