#include "ngi/mesh_extract.hpp"

namespace ngi {

Mesh extract_mesh(const GeometryImage& image) {
  const int n = image.resolution;
  std::vector<Vec3> p(image.position.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = denormalize_position(image.position[i], image.meta);

  const double diag = (image.meta.bbox_max - image.meta.bbox_min).norm();
  const double min_area = 1e-12 * diag * diag;
  auto area = [&](int a, int b, int c) { return 0.5 * (p[b] - p[a]).cross(p[c] - p[a]).norm(); };

  std::vector<Triangle> tris;
  tris.reserve(n > 1 ? 2 * static_cast<std::size_t>(n - 1) * (n - 1) : 0);
  auto emit = [&](int a, int b, int c) {
    const double ar = area(a, b, c);
    if (ar > 0.0 && ar >= min_area) tris.push_back({a, b, c});
  };
  for (int r = 0; r + 1 < n; ++r) {
    for (int c = 0; c + 1 < n; ++c) {
      const int a = image.index(r, c);
      const int b = image.index(r, c + 1);
      const int cc = image.index(r + 1, c);
      const int d = image.index(r + 1, c + 1);
      if ((p[d] - p[a]).norm() <= (p[cc] - p[b]).norm()) {
        emit(a, b, d);
        emit(a, d, cc);
      } else {
        emit(a, b, cc);
        emit(b, d, cc);
      }
    }
  }
  return Mesh(std::move(p), std::move(tris));
}

}  // namespace ngi
