#include "ngi/pipeline.hpp"

#include "ngi/error.hpp"
#include "ngi/mesh_extract.hpp"

#include <cstdio>

namespace ngi {

Scheme parse_scheme(const std::string& name) {
  if (name == "ot") return Scheme::ot;
  if (name == "conformal") return Scheme::conformal;
  if (name == "uniform") return Scheme::uniform;
  if (name == "harmonic") return Scheme::harmonic;
  throw UsageError("unknown scheme '" + name + "' (expected ot, conformal, uniform or harmonic)");
}

const char* scheme_name(Scheme scheme) noexcept {
  switch (scheme) {
    case Scheme::ot: return "ot";
    case Scheme::conformal: return "conformal";
    case Scheme::uniform: return "uniform";
    case Scheme::harmonic: return "harmonic";
  }
  return "?";
}

ParamOutcome parameterize(const Mesh& mesh, const ParamRequest& request) {
  ParamOutcome out;
  const auto topo = validate_topology(mesh);
  if (topo.is_disk) {
    out.mesh = mesh;
  } else if (topo.boundary_loops == 0 && topo.genus == 0) {
    out.mesh = cut_to_disk(mesh);
    out.was_cut = true;
  } else {
    throw DataError("mesh must be a disk or a closed genus-0 surface (chi = " +
                    std::to_string(topo.euler_characteristic) + ", boundary loops = " +
                    std::to_string(topo.boundary_loops) + ")");
  }
  const Corners corners = request.corners ? *request.corners : default_corners(out.mesh);

  switch (request.scheme) {
    case Scheme::uniform:
      out.map = baseline_parameterize(out.mesh, BaselineScheme::uniform, corners);
      return out;
    case Scheme::harmonic:
      out.map = baseline_parameterize(out.mesh, BaselineScheme::harmonic, corners);
      return out;
    case Scheme::conformal:
    case Scheme::ot:
      break;
  }

  out.ricci = ricci_flow(out.mesh, target_curvatures(out.mesh, corners), request.ricci);
  out.map = layout_to_square(out.mesh, out.ricci->u, corners);
  if (request.scheme == Scheme::conformal) return out;

  OtProblem problem;
  problem.sites = out.map.uv;
  problem.nu = vertex_measures(out.mesh).nu;
  out.ot = solve_ot(problem, request.ot);
  out.map = area_preserving_uv(out.mesh, out.map, *out.ot);
  return out;
}

std::filesystem::path level_stem(const std::filesystem::path& prefix, int level) {
  return prefix.string() + "_L" + std::to_string(level);
}

void write_pyramid(const std::vector<GeometryImage>& levels, const std::filesystem::path& prefix) {
  for (std::size_t k = 0; k < levels.size(); ++k) encode_image(levels[k], level_stem(prefix, static_cast<int>(k)));
}

std::vector<GeometryImage> read_pyramid(const std::filesystem::path& prefix) {
  std::vector<GeometryImage> levels;
  for (int k = 0;; ++k) {
    const auto stem = level_stem(prefix, k);
    if (!std::filesystem::exists(stem.string() + ".png")) break;
    levels.push_back(decode_image(stem));
  }
  if (levels.empty()) throw DataError("no pyramid found at " + prefix.string() + "_L0.png");
  return levels;
}

std::vector<LevelReport> report_pyramid(const std::vector<GeometryImage>& levels, const Mesh& ground_truth,
                                        int samples, std::uint64_t seed) {
  std::vector<LevelReport> rows;
  if (levels.empty()) return rows;
  const int base = levels.front().resolution;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const auto& img = levels[k];
    LevelReport r;
    r.level = static_cast<int>(k);
    r.resolution = img.resolution;
    r.compression_ratio = compression_ratio(img.resolution, base);
    const Mesh m = extract_mesh(img);
    if (m.num_triangles() > 0) {
      const auto d = compare_meshes(m, ground_truth, samples, seed);
      r.chamfer = d.chamfer;
      r.hausdorff = d.hausdorff;
    } else {
      // A single pixel has no surface; compare its point against the truth.
      const auto box = ground_truth.bounding_box();
      const double extent = (box.second - box.first).maxCoeff();
      const double scale = extent > 0.0 ? 1.0 / extent : 1.0;
      std::vector<Vec3> pts;
      for (const auto& p : m.positions()) pts.push_back((p - box.first) * scale);
      const auto gt = sample_surface(normalize_to_unit_cube(ground_truth, box), samples, seed + 1);
      r.chamfer = chamfer_distance(pts, gt.points);
      r.hausdorff = hausdorff_distance(pts, gt.points);
    }
    rows.push_back(r);
  }
  return rows;
}

std::string format_report(const std::vector<LevelReport>& rows) {
  std::string out = "level  resolution  CR / CD (x1e-4) / HD (x1e-2)\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%5d  %4dx%-5d  %.0f / %.4f / %.4f\n", r.level, r.resolution, r.resolution,
                  r.compression_ratio, r.chamfer * 1e4, r.hausdorff * 1e2);
    out += buf;
  }
  return out;
}

}  // namespace ngi
