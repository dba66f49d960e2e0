#pragma once

#include "ngi/geometry_image.hpp"
#include "ngi/mesh.hpp"

namespace ngi {

// One vertex per pixel at its denormalized position; every pixel quad is
// split along its shorter 3D diagonal (top-left to bottom-right on ties).
// Triangles with area below 1e-12 * (sidecar bbox diagonal)^2 are dropped.
[[nodiscard]] Mesh extract_mesh(const GeometryImage& image);

}  // namespace ngi
