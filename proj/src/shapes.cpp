#include "ngi/shapes.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <utility>

namespace ngi::shapes {

Mesh single_triangle() {
  return Mesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {{0, 1, 2}});
}

Mesh tetrahedron() {
  std::vector<Vec3> p{Vec3(1, 1, 1), Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)};
  std::vector<Triangle> t{{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return Mesh(std::move(p), std::move(t));
}

Mesh cube() {
  std::vector<Vec3> p;
  for (int i = 0; i < 8; ++i) p.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  // Quads listed counter-clockwise seen from outside.
  const int quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  std::vector<Triangle> t;
  for (const auto& q : quads) {
    t.push_back({q[0], q[1], q[2]});
    t.push_back({q[0], q[2], q[3]});
  }
  return Mesh(std::move(p), std::move(t));
}

namespace {

std::vector<Triangle> grid_triangles(int n, Diagonal diagonal) {
  std::vector<Triangle> t;
  t.reserve(2 * static_cast<std::size_t>(n - 1) * (n - 1));
  for (int r = 0; r + 1 < n; ++r) {
    for (int c = 0; c + 1 < n; ++c) {
      const int a = r * n + c;
      const int b = a + 1;
      const int d = a + n;
      const int e = d + 1;
      const bool flip = diagonal == Diagonal::alternating && (r + c) % 2 == 1;
      if (!flip) {
        t.push_back({a, b, e});
        t.push_back({a, e, d});
      } else {
        t.push_back({a, b, d});
        t.push_back({b, e, d});
      }
    }
  }
  return t;
}

}  // namespace

Mesh grid(int n, Diagonal diagonal) {
  return height_field(n, [](double, double) { return 0.0; }, diagonal);
}

Mesh height_field(int n, const std::function<double(double, double)>& height, Diagonal diagonal) {
  std::vector<Vec3> p;
  p.reserve(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double x = static_cast<double>(c) / (n - 1);
      const double y = static_cast<double>(r) / (n - 1);
      p.emplace_back(x, y, height(x, y));
    }
  }
  return Mesh(std::move(p), grid_triangles(n, diagonal));
}

Mesh spherical_cap(int rings, double radius, double polar_extent) {
  // Hexagonal disk: ring r has 6r vertices; vertex j of ring r sits at
  // angle 2*pi*j/(6r).
  std::vector<Vec3> p;
  std::vector<int> ring_start(rings + 2, 0);
  auto place = [&](int r, int j) {
    const double theta = polar_extent * static_cast<double>(r) / rings;
    const double phi = r == 0 ? 0.0 : 2.0 * std::numbers::pi * j / (6.0 * r);
    p.emplace_back(radius * std::sin(theta) * std::cos(phi), radius * std::sin(theta) * std::sin(phi),
                   radius * std::cos(theta));
  };
  place(0, 0);
  for (int r = 1; r <= rings; ++r) {
    ring_start[r] = static_cast<int>(p.size());
    for (int j = 0; j < 6 * r; ++j) place(r, j);
  }
  auto idx = [&](int r, int j) {
    if (r == 0) return 0;
    const int n = 6 * r;
    return ring_start[r] + ((j % n) + n) % n;
  };

  std::vector<Triangle> t;
  for (int r = 1; r <= rings; ++r) {
    // Six sectors; in each, ring r has r+1 vertices (shared ends) and ring
    // r-1 has r.
    for (int s = 0; s < 6; ++s) {
      for (int k = 0; k < r; ++k) {
        const int outer0 = idx(r, s * r + k);
        const int outer1 = idx(r, s * r + k + 1);
        const int inner0 = idx(r - 1, s * (r - 1) + k);
        t.push_back({outer0, outer1, inner0});
        if (k + 1 < r) {
          const int inner1 = idx(r - 1, s * (r - 1) + k + 1);
          t.push_back({outer1, inner1, inner0});
        }
      }
    }
  }
  return Mesh(std::move(p), std::move(t));
}

Mesh icosphere(int subdivisions, double radius) {
  const double g = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> p{{-1, g, 0}, {1, g, 0},  {-1, -g, 0}, {1, -g, 0}, {0, -1, g},  {0, 1, g},
                      {0, -1, -g}, {0, 1, -g}, {g, 0, -1},  {g, 0, 1},  {-g, 0, -1}, {-g, 0, 1}};
  std::vector<Triangle> t{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                          {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                          {3, 8, 9},   {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (auto& v : p) v.normalize();
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      if (auto it = mid.find(key); it != mid.end()) return it->second;
      const int id = static_cast<int>(p.size());
      p.push_back((p[a] + p[b]).normalized());
      mid.emplace(key, id);
      return id;
    };
    std::vector<Triangle> next;
    for (const auto& tri : t) {
      const int ab = midpoint(tri[0], tri[1]);
      const int bc = midpoint(tri[1], tri[2]);
      const int ca = midpoint(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    t = std::move(next);
  }
  for (auto& v : p) v *= radius;
  return Mesh(std::move(p), std::move(t));
}

}  // namespace ngi::shapes
