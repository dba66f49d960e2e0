#include "ngi/error.hpp"
#include "ngi/power_diagram.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace ngi;

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

std::vector<double> voronoi_heights(const std::vector<Vec2>& p) {
  std::vector<double> h(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) h[i] = -0.5 * p[i].squaredNorm();
  return h;
}

std::vector<Vec2> random_sites(std::mt19937_64& rng, int k) {
  std::vector<Vec2> p(k);
  for (auto& x : p) x = Vec2(testing::uniform(rng), testing::uniform(rng));
  return p;
}

// Cell areas by classifying the centers of an m x m grid with the power
// function directly.
std::vector<double> grid_area_oracle(const std::vector<Vec2>& p, const std::vector<double>& h, int m) {
  std::vector<double> area(p.size(), 0.0);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      const Vec2 x((c + 0.5) / m, (r + 0.5) / m);
      int best = 0;
      double val = -1e300;
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double v = x.dot(p[i]) + h[i];
        if (v > val) {
          val = v;
          best = static_cast<int>(i);
        }
      }
      area[best] += 1.0 / (static_cast<double>(m) * m);
    }
  }
  return area;
}

void check_diagram_invariants(const PowerDiagram& d) {
  double total = 0.0;
  for (const auto& cell : d.cells) {
    total += cell.area;
    const auto& poly = cell.polygon;
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const Vec2& a = poly[k];
      const Vec2& b = poly[(k + 1) % poly.size()];
      const Vec2& c = poly[(k + 2) % poly.size()];
      CHECK(cross2(b - a, c - b) >= -1e-12);  // convex, counter-clockwise
    }
  }
  CHECK(std::abs(total - 1.0) <= 1e-9);

  // Each shared edge appears in both cells with the same segment length.
  for (const auto& e : d.edges) {
    CHECK(e.i < e.j);
    auto side_length = [&](int from, int to) {
      double len = 0.0;
      const auto& cell = d.cells[from];
      for (std::size_t k = 0; k < cell.polygon.size(); ++k) {
        if (cell.labels[k] == to) len += (cell.polygon[(k + 1) % cell.polygon.size()] - cell.polygon[k]).norm();
      }
      return len;
    };
    CHECK(side_length(e.i, e.j) == doctest::Approx(e.length).epsilon(1e-9));
    CHECK(side_length(e.j, e.i) == doctest::Approx(e.length).epsilon(1e-9));
  }
}

}  // namespace

TEST_CASE("one site owns the whole square") {
  const std::vector<Vec2> p{Vec2(0.3, 0.7)};
  const auto d = power_diagram(p, std::vector<double>{0.4});
  CHECK(d.cells[0].area == doctest::Approx(1.0));
  CHECK(d.cells[0].centroid.isApprox(Vec2(0.5, 0.5)));
  CHECK(d.edges.empty());
}

TEST_CASE("two sites at Voronoi heights split the square at x = 0.5") {
  const std::vector<Vec2> p{Vec2(0.25, 0.5), Vec2(0.75, 0.5)};
  const auto d = power_diagram(p, voronoi_heights(p));
  CHECK(d.cells[0].area == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(d.cells[1].area == doctest::Approx(0.5).epsilon(1e-14));
  REQUIRE(d.edges.size() == 1);
  CHECK(d.edges[0].length == doctest::Approx(1.0).epsilon(1e-14));
  for (const auto& q : d.cells[0].polygon) CHECK(q.x() <= 0.5 + 1e-15);
}

TEST_CASE("two sites with heights (0.1, 0) split the square at x = 0.2") {
  // <x,p1> + 0.1 = <x,p2>  <=>  0.25 x + 0.1 = 0.75 x  <=>  x = 0.2
  const std::vector<Vec2> p{Vec2(0.25, 0.5), Vec2(0.75, 0.5)};
  const auto d = power_diagram(p, std::vector<double>{0.1, 0.0});
  CHECK(d.cells[0].area == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(d.cells[1].area == doctest::Approx(0.8).epsilon(1e-14));
}

TEST_CASE("equal raw heights put the two-site bisector on the left side") {
  // With h = 0 the bisector is x = 2 (h1 - h2) = 0, so site 0 is hidden.
  const std::vector<Vec2> p{Vec2(0.25, 0.5), Vec2(0.75, 0.5)};
  const auto d = power_diagram(p, std::vector<double>{0.0, 0.0});
  CHECK(d.cells[0].empty());
  CHECK(d.cells[1].area == doctest::Approx(1.0));
  CHECK(d.empty_count() == 1);
}

TEST_CASE("duplicate and out-of-square sites are rejected") {
  const std::vector<Vec2> dup{Vec2(0.1, 0.1), Vec2(0.5, 0.5), Vec2(0.1, 0.1)};
  CHECK_THROWS_AS((void)power_diagram(dup, std::vector<double>(3, 0.0)), DataError);
  const std::vector<Vec2> out{Vec2(0.1, 0.1), Vec2(1.5, 0.5)};
  CHECK_THROWS_AS((void)power_diagram(out, std::vector<double>(2, 0.0)), DataError);
}

TEST_CASE("lattice sites (cocircular quadruples) give exact Voronoi areas") {
  const int n = 9;
  std::vector<Vec2> p;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) p.emplace_back(static_cast<double>(c) / (n - 1), static_cast<double>(r) / (n - 1));
  }
  const auto d = power_diagram(p, voronoi_heights(p));
  const double cell = 1.0 / ((n - 1) * (n - 1));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const int on_side = (r == 0 || r == n - 1) + (c == 0 || c == n - 1);
      const double expected = cell / (on_side == 0 ? 1.0 : on_side == 1 ? 2.0 : 4.0);
      CHECK(d.cells[r * n + c].area == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  check_diagram_invariants(d);
}

TEST_CASE("random diagrams tile the square and match a grid classification oracle") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 12; ++trial) {
    const int k = trial < 6 ? 8 : 40;
    const auto p = random_sites(rng, k);
    auto h = voronoi_heights(p);
    for (auto& x : h) x += testing::uniform(rng, -0.02, 0.02);
    const auto d = power_diagram(p, h);
    check_diagram_invariants(d);
    const auto oracle = grid_area_oracle(p, h, 600);
    // Misclassified pixels straddle cell boundaries; their errors mostly cancel.
    for (int i = 0; i < k; ++i) CHECK(std::abs(d.cells[i].area - oracle[i]) <= 1e-3);
  }
}

TEST_CASE("hidden sites get empty cells and the rest still tile") {
  std::mt19937_64 rng(99);
  const auto p = random_sites(rng, 30);
  auto h = voronoi_heights(p);
  for (int i = 0; i < 30; i += 3) h[i] -= 1.0;  // far below every neighbor
  const auto d = power_diagram(p, h);
  for (int i = 0; i < 30; i += 3) CHECK(d.cells[i].empty());
  check_diagram_invariants(d);
  const auto oracle = grid_area_oracle(p, h, 400);
  for (int i = 0; i < 30; ++i) CHECK(std::abs(d.cells[i].area - oracle[i]) <= 1.5e-3);
}

TEST_CASE("regular triangulation edges connect every pair of cells sharing a side") {
  std::mt19937_64 rng(17);
  const auto p = random_sites(rng, 60);
  auto h = voronoi_heights(p);
  for (auto& x : h) x += testing::uniform(rng, -0.01, 0.01);
  RegularTriangulation rt;
  REQUIRE(regular_triangulation(p, h, rt));
  const auto d = power_diagram(p, h);
  CHECK_FALSE(d.used_fallback);
  for (const auto& e : d.edges) {
    CHECK(std::binary_search(rt.edges.begin(), rt.edges.end(), std::pair{e.i, e.j}));
  }
}

TEST_CASE("site count below four skips the hull but still builds cells") {
  const std::vector<Vec2> p{Vec2(0.2, 0.2), Vec2(0.8, 0.3), Vec2(0.5, 0.9)};
  const auto d = power_diagram(p, voronoi_heights(p));
  check_diagram_invariants(d);
  CHECK(d.empty_count() == 0);
}
