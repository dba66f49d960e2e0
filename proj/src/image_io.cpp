#include "ngi/error.hpp"
#include "ngi/geometry_image.hpp"

#include <json.hpp>
#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

namespace ngi {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* suffix) {
  return stem.string() + suffix;
}

// The setjmp frames below only hold trivially destructible locals.
bool png_write_rows(std::FILE* fp, int width, int height, png_bytep* rows) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 16, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

struct PngHeader {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
};

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
};

const char* png_read_header(png_structp png, png_infop info, std::FILE* fp, PngHeader* header) {
  if (setjmp(png_jmpbuf(png))) return "corrupt PNG header";
  png_init_io(png, fp);
  png_read_info(png, info);
  png_get_IHDR(png, info, &header->width, &header->height, &header->bit_depth, &header->color_type, nullptr,
               nullptr, nullptr);
  return nullptr;
}

const char* png_read_body(png_structp png, png_bytep* rows) {
  if (setjmp(png_jmpbuf(png))) return "corrupt PNG data";
  png_read_image(png, rows);
  png_read_end(png, nullptr);
  return nullptr;
}

Rgb16 to_rgb16(const std::vector<Vec3>& values, int res) {
  Rgb16 out;
  out.width = res;
  out.height = res;
  out.data.resize(values.size() * 3);
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (int a = 0; a < 3; ++a) out.data[3 * i + a] = quantize(values[i][a]);
  }
  return out;
}

std::vector<Vec3> from_rgb16(const Rgb16& img) {
  std::vector<Vec3> v(static_cast<std::size_t>(img.width) * img.height);
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = Vec3(dequantize(img.data[3 * i]), dequantize(img.data[3 * i + 1]), dequantize(img.data[3 * i + 2]));
  }
  return v;
}

}  // namespace

void write_png16(const std::filesystem::path& path, const Rgb16& image) {
  if (image.width <= 0 || image.height <= 0 ||
      image.data.size() != static_cast<std::size_t>(image.width) * image.height * 3) {
    throw DataError("invalid image buffer for " + path.string());
  }
  const std::size_t stride = static_cast<std::size_t>(image.width) * 6;
  std::vector<unsigned char> bytes(stride * image.height);
  for (std::size_t i = 0; i < image.data.size(); ++i) {
    bytes[2 * i] = static_cast<unsigned char>(image.data[i] >> 8);
    bytes[2 * i + 1] = static_cast<unsigned char>(image.data[i] & 0xff);
  }
  std::vector<png_bytep> rows(image.height);
  for (int r = 0; r < image.height; ++r) rows[r] = bytes.data() + r * stride;

  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) throw DataError("cannot write " + path.string());
  if (!png_write_rows(fp.get(), image.width, image.height, rows.data())) {
    throw DataError("PNG encoding failed for " + path.string());
  }
}

Rgb16 read_png16(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) throw DataError("cannot open " + path.string());
  unsigned char sig[8] = {};
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw DataError(path.string() + " is not a PNG file");
  }
  std::rewind(fp.get());
  PngReader reader;
  reader.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (reader.png) reader.info = png_create_info_struct(reader.png);
  if (!reader.info) throw DataError("cannot allocate PNG reader");
  PngHeader header;
  if (const char* err = png_read_header(reader.png, reader.info, fp.get(), &header)) {
    throw DataError(path.string() + ": " + err);
  }
  if (header.bit_depth != 16 || header.color_type != PNG_COLOR_TYPE_RGB) {
    throw DataError(path.string() + ": expected a 16-bit RGB PNG");
  }
  const std::size_t stride = static_cast<std::size_t>(header.width) * 6;
  std::vector<unsigned char> bytes(stride * header.height);
  std::vector<png_bytep> rows(header.height);
  for (png_uint_32 r = 0; r < header.height; ++r) rows[r] = bytes.data() + r * stride;
  if (const char* err = png_read_body(reader.png, rows.data())) throw DataError(path.string() + ": " + err);
  Rgb16 out;
  out.width = static_cast<int>(header.width);
  out.height = static_cast<int>(header.height);
  out.data.resize(bytes.size() / 2);
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    out.data[i] = static_cast<std::uint16_t>((bytes[2 * i] << 8) | bytes[2 * i + 1]);
  }
  return out;
}

void write_meta(const ImageMeta& meta, const std::filesystem::path& path) {
  nlohmann::json j;
  j["bbox_min"] = {meta.bbox_min.x(), meta.bbox_min.y(), meta.bbox_min.z()};
  j["bbox_max"] = {meta.bbox_max.x(), meta.bbox_max.y(), meta.bbox_max.z()};
  j["resolution"] = meta.resolution;
  j["level"] = meta.level;
  j["source"] = meta.source;
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

ImageMeta read_meta(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw DataError("missing sidecar " + path.string());
  ImageMeta meta;
  try {
    const auto j = nlohmann::json::parse(f);
    for (int a = 0; a < 3; ++a) {
      meta.bbox_min[a] = j.at("bbox_min").at(a).get<double>();
      meta.bbox_max[a] = j.at("bbox_max").at(a).get<double>();
    }
    meta.resolution = j.at("resolution").get<int>();
    meta.level = j.at("level").get<int>();
    meta.source = j.value("source", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad sidecar " + path.string() + ": " + e.what());
  }
  return meta;
}

std::filesystem::path image_stem(const std::filesystem::path& path) {
  if (path.extension() == ".png") return path.parent_path() / path.stem();
  return path;
}

void encode_image(const GeometryImage& image, const std::filesystem::path& stem) {
  write_png16(with_suffix(stem, ".png"), to_rgb16(image.position, image.resolution));
  if (image.has_normals()) write_png16(with_suffix(stem, ".normal.png"), to_rgb16(image.normal, image.resolution));
  ImageMeta meta = image.meta;
  meta.resolution = image.resolution;
  write_meta(meta, with_suffix(stem, ".meta.json"));
}

GeometryImage decode_image(const std::filesystem::path& path) {
  const auto stem = image_stem(path);
  const ImageMeta meta = read_meta(with_suffix(stem, ".meta.json"));
  const Rgb16 pos = read_png16(with_suffix(stem, ".png"));
  if (pos.width != pos.height || !is_power_of_two(pos.width)) {
    throw DataError(stem.string() + ".png is " + std::to_string(pos.width) + "x" + std::to_string(pos.height) +
                    ", expected a square power of two");
  }
  if (meta.resolution != pos.width) throw DataError("sidecar resolution does not match " + stem.string() + ".png");
  GeometryImage img;
  img.resolution = pos.width;
  img.meta = meta;
  img.position = from_rgb16(pos);
  img.covered.assign(img.position.size(), 1);
  const auto normal_path = with_suffix(stem, ".normal.png");
  if (std::filesystem::exists(normal_path)) {
    const Rgb16 nrm = read_png16(normal_path);
    if (nrm.width != pos.width || nrm.height != pos.height) throw DataError("normal image size mismatch");
    img.normal = from_rgb16(nrm);
  }
  return img;
}

}  // namespace ngi
