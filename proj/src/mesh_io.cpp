#include "ngi/error.hpp"
#include "ngi/mesh.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace ngi {

namespace {

std::string lower_ext(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

double parse_double(std::string_view tok, const std::string& where) {
  double x = 0.0;
  const auto* first = tok.data();
  if (!tok.empty() && tok.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), x);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw DataError(where + ": cannot parse number '" + std::string(tok) + "'");
  }
  return x;
}

// ---------------------------------------------------------------------------
// OBJ
// ---------------------------------------------------------------------------

Mesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());

  std::vector<Vec3> positions;
  std::vector<Triangle> triangles;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag.front() == '#') continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (tag == "v") {
      std::array<std::string, 3> tok;
      if (!(ss >> tok[0] >> tok[1] >> tok[2])) throw DataError(where + ": vertex needs three coordinates");
      positions.emplace_back(parse_double(tok[0], where), parse_double(tok[1], where), parse_double(tok[2], where));
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ss >> tok) {
        const auto slash = tok.find('/');
        const std::string head = tok.substr(0, slash);
        int i = 0;
        const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), i);
        if (ec != std::errc() || ptr != head.data() + head.size() || i == 0) {
          throw DataError(where + ": bad face index '" + tok + "'");
        }
        idx.push_back(i > 0 ? i - 1 : static_cast<int>(positions.size()) + i);
      }
      if (idx.size() != 3) {
        throw DataError(where + ": non-triangle face with " + std::to_string(idx.size()) + " vertices");
      }
      triangles.push_back({idx[0], idx[1], idx[2]});
    }
  }
  return Mesh(std::move(positions), std::move(triangles));
}

// ---------------------------------------------------------------------------
// PLY
// ---------------------------------------------------------------------------

enum class PlyType { i8, u8, i16, u16, i32, u32, f32, f64 };

PlyType ply_type(const std::string& name) {
  if (name == "char" || name == "int8") return PlyType::i8;
  if (name == "uchar" || name == "uint8") return PlyType::u8;
  if (name == "short" || name == "int16") return PlyType::i16;
  if (name == "ushort" || name == "uint16") return PlyType::u16;
  if (name == "int" || name == "int32") return PlyType::i32;
  if (name == "uint" || name == "uint32") return PlyType::u32;
  if (name == "float" || name == "float32") return PlyType::f32;
  if (name == "double" || name == "float64") return PlyType::f64;
  throw DataError("unsupported PLY property type '" + name + "'");
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::f32;
  bool is_list = false;
  PlyType count_type = PlyType::u8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

template <typename T>
T read_le(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));  // host is little-endian (x86/arm64)
  return v;
}

double read_binary(std::istream& in, PlyType t) {
  switch (t) {
    case PlyType::i8: return read_le<std::int8_t>(in);
    case PlyType::u8: return read_le<std::uint8_t>(in);
    case PlyType::i16: return read_le<std::int16_t>(in);
    case PlyType::u16: return read_le<std::uint16_t>(in);
    case PlyType::i32: return read_le<std::int32_t>(in);
    case PlyType::u32: return read_le<std::uint32_t>(in);
    case PlyType::f32: return read_le<float>(in);
    case PlyType::f64: return read_le<double>(in);
  }
  return 0.0;
}

Mesh load_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());

  std::string line;
  std::getline(in, line);
  if (line.rfind("ply", 0) != 0) throw DataError(path.string() + ": missing 'ply' magic");

  bool binary = false;
  std::vector<PlyElement> elements;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string kw;
    ss >> kw;
    if (kw == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt == "binary_little_endian") {
        binary = true;
      } else if (fmt != "ascii") {
        throw DataError(path.string() + ": unsupported PLY format '" + fmt + "'");
      }
    } else if (kw == "element") {
      PlyElement e;
      ss >> e.name >> e.count;
      elements.push_back(e);
    } else if (kw == "property") {
      if (elements.empty()) throw DataError(path.string() + ": property before element");
      PlyProperty p;
      std::string type;
      ss >> type;
      if (type == "list") {
        std::string ct;
        std::string it;
        ss >> ct >> it >> p.name;
        p.is_list = true;
        p.count_type = ply_type(ct);
        p.type = ply_type(it);
      } else {
        p.type = ply_type(type);
        ss >> p.name;
      }
      elements.back().props.push_back(p);
    } else if (kw == "end_header") {
      break;
    }
  }

  std::vector<Vec3> positions;
  std::vector<Triangle> triangles;
  for (const auto& e : elements) {
    for (std::size_t r = 0; r < e.count; ++r) {
      std::istringstream row;
      if (!binary) {
        if (!std::getline(in, line)) throw DataError(path.string() + ": truncated PLY body");
        row.str(line);
      }
      std::istream& src = binary ? static_cast<std::istream&>(in) : row;
      auto read_scalar = [&](PlyType t) {
        if (binary) return read_binary(src, t);
        double v = 0.0;
        src >> v;
        return v;
      };
      Vec3 pos = Vec3::Zero();
      std::vector<int> face;
      for (const auto& p : e.props) {
        if (p.is_list) {
          const auto n = static_cast<std::size_t>(read_scalar(p.count_type));
          std::vector<int> vals(n);
          for (auto& v : vals) v = static_cast<int>(read_scalar(p.type));
          if (e.name == "face" && (p.name == "vertex_indices" || p.name == "vertex_index")) face = vals;
        } else {
          const double v = read_scalar(p.type);
          if (e.name == "vertex") {
            if (p.name == "x") pos.x() = v;
            if (p.name == "y") pos.y() = v;
            if (p.name == "z") pos.z() = v;
          }
        }
      }
      if (!src) throw DataError(path.string() + ": truncated PLY body");
      if (e.name == "vertex") positions.push_back(pos);
      if (e.name == "face") {
        if (face.size() != 3) {
          throw DataError(path.string() + ": non-triangle face with " + std::to_string(face.size()) + " vertices");
        }
        triangles.push_back({face[0], face[1], face[2]});
      }
    }
  }
  return Mesh(std::move(positions), std::move(triangles));
}

void append_double(std::string& out, double x) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  out.append(buf.data(), ptr);
}

}  // namespace

Mesh load_mesh(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("no such file: " + path.string());
  const auto ext = lower_ext(path);
  if (ext == ".obj") return load_obj(path);
  if (ext == ".ply") return load_ply(path);
  throw DataError("unsupported mesh format '" + ext + "' (expected .obj or .ply)");
}

void save_obj(const Mesh& mesh, const std::filesystem::path& path) {
  std::string out;
  out.reserve(static_cast<std::size_t>(mesh.num_vertices()) * 64 + static_cast<std::size_t>(mesh.num_triangles()) * 24);
  for (const auto& p : mesh.positions()) {
    out += "v ";
    append_double(out, p.x());
    out += ' ';
    append_double(out, p.y());
    out += ' ';
    append_double(out, p.z());
    out += '\n';
  }
  for (const auto& t : mesh.triangles()) {
    out += "f " + std::to_string(t[0] + 1) + ' ' + std::to_string(t[1] + 1) + ' ' + std::to_string(t[2] + 1) + '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw DataError("write failed: " + path.string());
}

}  // namespace ngi
