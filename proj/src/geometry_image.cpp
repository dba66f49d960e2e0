#include "ngi/geometry_image.hpp"

#include "ngi/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace ngi {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Vec3 encode_normal(Vec3 n) {
  const double len = n.norm();
  n = len > 0.0 ? Vec3(n / len) : Vec3(0, 0, 1);
  return (0.5 * n).array() + 0.5;
}

Vec3 decode_normal(const Vec3& s) { return 2.0 * s.array() - 1.0; }

}  // namespace

Vec3 normalize_position(const Vec3& p, const ImageMeta& meta) {
  Vec3 s;
  for (int a = 0; a < 3; ++a) {
    const double ext = meta.bbox_max[a] - meta.bbox_min[a];
    s[a] = ext > 0.0 ? std::clamp((p[a] - meta.bbox_min[a]) / ext, 0.0, 1.0) : 0.0;
  }
  return s;
}

Vec3 denormalize_position(const Vec3& s, const ImageMeta& meta) {
  return meta.bbox_min.array() + s.array() * (meta.bbox_max - meta.bbox_min).array();
}

std::uint16_t quantize(double x) noexcept {
  if (!(x > 0.0)) return 0;
  if (x >= 1.0) return 65535;
  return static_cast<std::uint16_t>(std::lround(x * 65535.0));
}

GeometryImage rasterize_geometry_image(const Mesh& mesh, const ParamMap& map, int resolution, const std::string& source) {
  if (!is_power_of_two(resolution) || resolution > 16384) {
    throw DataError("resolution " + std::to_string(resolution) + " is not a power of two in [1, 16384]");
  }
  if (static_cast<int>(map.uv.size()) != mesh.num_vertices()) throw DataError("UV map does not match the mesh");
  if (const int flipped = count_flipped(mesh, map); flipped > 0) {
    throw DataError("UV map has " + std::to_string(flipped) + " flipped triangles");
  }

  GeometryImage img;
  img.resolution = resolution;
  const auto [lo, hi] = mesh.bounding_box();
  img.meta.bbox_min = lo;
  img.meta.bbox_max = hi;
  img.meta.resolution = resolution;
  img.meta.level = 0;
  img.meta.source = source;
  const std::size_t npix = static_cast<std::size_t>(resolution) * resolution;
  img.position.assign(npix, Vec3::Zero());
  img.normal.assign(npix, Vec3(0.5, 0.5, 1.0));
  img.covered.assign(npix, 0);

  const auto normals = vertex_measures(mesh).normals;
  const double res = resolution;
  auto pixel_range = [&](double lo_c, double hi_c) {
    const int first = std::max(0, static_cast<int>(std::ceil(lo_c * res - 0.5)));
    const int last = std::min(resolution - 1, static_cast<int>(std::floor(hi_c * res - 0.5)));
    return std::pair{first, last};
  };

  for (int f = 0; f < mesh.num_triangles(); ++f) {
    const auto& t = mesh.triangle(f);
    const Vec2& a = map.uv[t[0]];
    const Vec2& b = map.uv[t[1]];
    const Vec2& c = map.uv[t[2]];
    const double area2 = cross2(b - a, c - a);
    if (!(area2 > 0.0)) continue;
    const auto [c0, c1] = pixel_range(std::min({a.x(), b.x(), c.x()}), std::max({a.x(), b.x(), c.x()}));
    const auto [r0, r1] = pixel_range(std::min({a.y(), b.y(), c.y()}), std::max({a.y(), b.y(), c.y()}));
    for (int row = r0; row <= r1; ++row) {
      for (int col = c0; col <= c1; ++col) {
        const int idx = img.index(row, col);
        if (img.covered[idx]) continue;
        const Vec2 p((col + 0.5) / res, (row + 0.5) / res);
        const double l0 = cross2(b - p, c - p) / area2;
        const double l1 = cross2(c - p, a - p) / area2;
        const double l2 = 1.0 - l0 - l1;
        if (l0 < -1e-12 || l1 < -1e-12 || l2 < -1e-12) continue;
        const Vec3 x = l0 * mesh.position(t[0]) + l1 * mesh.position(t[1]) + l2 * mesh.position(t[2]);
        Vec3 n = l0 * normals[t[0]] + l1 * normals[t[1]] + l2 * normals[t[2]];
        if (!(n.norm() > 1e-12)) n = mesh.triangle_normal(f);
        img.position[idx] = normalize_position(x, img.meta);
        img.normal[idx] = encode_normal(n);
        img.covered[idx] = 1;
      }
    }
  }
  if (std::none_of(img.covered.begin(), img.covered.end(), [](std::uint8_t c) { return c != 0; })) {
    throw DataError("UV map covers no pixel center");
  }
  fill_uncovered(img);
  return img;
}

void fill_uncovered(GeometryImage& image) {
  const int n = image.resolution;
  const std::size_t npix = static_cast<std::size_t>(n) * n;
  std::vector<int> source(npix, -1);
  std::deque<int> queue;
  for (std::size_t i = 0; i < npix; ++i) {
    if (image.covered[i]) {
      source[i] = static_cast<int>(i);
      queue.push_back(static_cast<int>(i));
    }
  }
  if (queue.empty()) return;
  while (!queue.empty()) {
    const int i = queue.front();
    queue.pop_front();
    const int r = i / n;
    const int c = i % n;
    const int nb[4][2] = {{r - 1, c}, {r, c - 1}, {r, c + 1}, {r + 1, c}};
    for (const auto& q : nb) {
      if (q[0] < 0 || q[0] >= n || q[1] < 0 || q[1] >= n) continue;
      const int j = q[0] * n + q[1];
      if (source[j] >= 0) continue;
      source[j] = source[i];
      queue.push_back(j);
    }
  }
  for (std::size_t i = 0; i < npix; ++i) {
    if (image.covered[i]) continue;
    image.position[i] = image.position[source[i]];
    if (image.has_normals()) image.normal[i] = image.normal[source[i]];
  }
}

std::vector<GeometryImage> build_mipmap(const GeometryImage& base) {
  if (!is_power_of_two(base.resolution)) throw DataError("mipmap base resolution is not a power of two");
  std::vector<GeometryImage> levels{base};
  while (levels.back().resolution > 1) {
    const GeometryImage& prev = levels.back();
    GeometryImage next;
    next.resolution = prev.resolution / 2;
    next.meta = prev.meta;
    next.meta.resolution = next.resolution;
    next.meta.level = prev.meta.level + 1;
    const std::size_t npix = static_cast<std::size_t>(next.resolution) * next.resolution;
    next.position.resize(npix);
    next.covered.resize(npix);
    if (prev.has_normals()) next.normal.resize(npix);
    for (int r = 0; r < next.resolution; ++r) {
      for (int c = 0; c < next.resolution; ++c) {
        const int kids[4] = {prev.index(2 * r, 2 * c), prev.index(2 * r, 2 * c + 1), prev.index(2 * r + 1, 2 * c),
                             prev.index(2 * r + 1, 2 * c + 1)};
        Vec3 p = Vec3::Zero();
        Vec3 nsum = Vec3::Zero();
        std::uint8_t cov = 0;
        for (int k : kids) {
          p += prev.position[k];
          if (prev.has_normals()) nsum += decode_normal(prev.normal[k]);
          cov |= prev.covered[k];
        }
        const int i = next.index(r, c);
        next.position[i] = 0.25 * p;
        next.covered[i] = cov;
        if (prev.has_normals()) next.normal[i] = encode_normal(nsum);
      }
    }
    levels.push_back(std::move(next));
  }
  return levels;
}

}  // namespace ngi
