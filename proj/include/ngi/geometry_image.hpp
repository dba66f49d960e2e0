#pragma once

#include "ngi/conformal.hpp"
#include "ngi/mesh.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ngi {

struct ImageMeta {
  Vec3 bbox_min = Vec3::Zero();
  Vec3 bbox_max = Vec3::Zero();
  int resolution = 0;
  int level = 0;
  std::string source;
};

// Square image of normalized positions and encoded normals (n/2 + 0.5), both
// in [0,1]^3 and stored row-major. Row r holds v in [r/res, (r+1)/res).
struct GeometryImage {
  int resolution = 0;
  std::vector<Vec3> position;
  std::vector<Vec3> normal;           // empty when the image carries no normals
  std::vector<std::uint8_t> covered;  // rasterization coverage before fill
  ImageMeta meta;

  [[nodiscard]] int index(int row, int col) const noexcept { return row * resolution + col; }
  [[nodiscard]] const Vec3& pos(int row, int col) const { return position[index(row, col)]; }
  [[nodiscard]] bool has_normals() const noexcept { return !normal.empty(); }
};

[[nodiscard]] constexpr bool is_power_of_two(long long n) noexcept { return n > 0 && (n & (n - 1)) == 0; }

// Per-axis mapping between model units and [0,1]; a flat axis maps to 0.
[[nodiscard]] Vec3 normalize_position(const Vec3& p, const ImageMeta& meta);
[[nodiscard]] Vec3 denormalize_position(const Vec3& s, const ImageMeta& meta);

// Samples the mesh at every pixel center through its UV map, then fills
// uncovered pixels. The first triangle in face order wins shared pixel
// centers. Throws DataError for a non-power-of-two resolution or a UV map
// with flipped triangles.
[[nodiscard]] GeometryImage rasterize_geometry_image(const Mesh& mesh, const ParamMap& map, int resolution,
                                                     const std::string& source = {});

// Copies into each uncovered pixel the value of its nearest covered pixel
// (breadth-first over 4-neighbors, sources seeded in row-major order).
// Coverage flags are left untouched.
void fill_uncovered(GeometryImage& image);

// Level 0 is the input; each next level is the 2x2 box average, down to 1x1.
// Averaged normals are renormalized to unit length before re-encoding.
[[nodiscard]] std::vector<GeometryImage> build_mipmap(const GeometryImage& base);

// round(x * 65535) after clamping to [0,1].
[[nodiscard]] std::uint16_t quantize(double x) noexcept;
[[nodiscard]] constexpr double dequantize(std::uint16_t q) noexcept { return q / 65535.0; }

// Writes <stem>.png (positions), <stem>.normal.png (if present) and
// <stem>.meta.json.
void encode_image(const GeometryImage& image, const std::filesystem::path& stem);

// Accepts either the stem or the position PNG path. The sidecar is required;
// the normal PNG is optional.
[[nodiscard]] GeometryImage decode_image(const std::filesystem::path& path);

// Stem for a position PNG path (strips ".png").
[[nodiscard]] std::filesystem::path image_stem(const std::filesystem::path& path);

// Raw 16-bit RGB PNG access.
struct Rgb16 {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> data;  // width * height * 3, row-major
};
void write_png16(const std::filesystem::path& path, const Rgb16& image);
[[nodiscard]] Rgb16 read_png16(const std::filesystem::path& path);

void write_meta(const ImageMeta& meta, const std::filesystem::path& path);
[[nodiscard]] ImageMeta read_meta(const std::filesystem::path& path);

}  // namespace ngi
