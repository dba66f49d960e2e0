#include "ngi/error.hpp"
#include "ngi/mesh_extract.hpp"
#include "ngi/pipeline.hpp"
#include "ngi/shapes.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace {

using nlohmann::json;

const char* kind_name(ngi::ErrorKind k) {
  switch (k) {
    case ngi::ErrorKind::usage: return "usage";
    case ngi::ErrorKind::data: return "data";
    case ngi::ErrorKind::convergence: return "convergence";
  }
  return "error";
}

int fail(ngi::ErrorKind kind, const std::string& message) {
  std::cerr << json{{"error", kind_name(kind)}, {"message", message}}.dump() << '\n';
  return static_cast<int>(kind);
}

ngi::Corners parse_corners(const std::string& text) {
  ngi::Corners c{};
  std::stringstream ss(text);
  std::string item;
  int k = 0;
  while (std::getline(ss, item, ',')) {
    if (k >= 4) throw ngi::UsageError("--corners takes exactly four vertex indices");
    try {
      std::size_t used = 0;
      c[k] = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ngi::UsageError("--corners: '" + item + "' is not a vertex index");
    }
    ++k;
  }
  if (k != 4) throw ngi::UsageError("--corners takes exactly four vertex indices");
  return c;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ngi::DataError("cannot write " + path);
  f << text;
}

json level_json(const ngi::LevelReport& r) {
  return {{"level", r.level},
          {"resolution", r.resolution},
          {"compression_ratio", r.compression_ratio},
          {"chamfer", r.chamfer},
          {"hausdorff", r.hausdorff}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Area-preserving geometry images"};
  app.require_subcommand(1);

  // param
  std::string p_mesh, p_out, p_scheme = "ot", p_corners, p_cut, p_log, p_cells;
  double p_eps = 1e-6;
  auto* param = app.add_subcommand("param", "Parameterize a mesh onto the unit square");
  param->add_option("--mesh", p_mesh, "Input OBJ or PLY")->required();
  param->add_option("--out", p_out, "Output UV file")->required();
  param->add_option("--scheme", p_scheme, "ot, conformal, uniform or harmonic")->capture_default_str();
  param->add_option("--corners", p_corners, "Four boundary vertices a,b,c,d");
  param->add_option("--eps", p_eps, "OT gradient tolerance")->capture_default_str();
  param->add_option("--cut-mesh", p_cut, "Where to write the cut mesh (required for closed input)");
  param->add_option("--ot-log", p_log, "Per-iteration OT log (CSV)");
  param->add_option("--cells", p_cells, "Final power cells (polygon soup)");

  // rasterize
  std::string r_mesh, r_uv, r_out, r_source;
  int r_res = 1024;
  auto* raster = app.add_subcommand("rasterize", "Render position and normal images");
  raster->add_option("--mesh", r_mesh, "Mesh matching the UV file")->required();
  raster->add_option("--uv", r_uv, "UV file from param")->required();
  raster->add_option("--res", r_res, "Resolution (power of two)")->capture_default_str();
  raster->add_option("--out", r_out, "Output stem")->required();
  raster->add_option("--source", r_source, "Source id for the sidecar (default: mesh file name)");

  // mipmap
  std::string m_in, m_out;
  auto* mipmap = app.add_subcommand("mipmap", "Build a box-filtered pyramid");
  mipmap->add_option("--in", m_in, "Level-0 position PNG")->required();
  mipmap->add_option("--out", m_out, "Output prefix; writes <prefix>_L<k>.png")->required();

  // extract
  std::string e_in, e_out;
  auto* extract = app.add_subcommand("extract", "Triangulate a geometry image");
  extract->add_option("--in", e_in, "Position PNG")->required();
  extract->add_option("--out", e_out, "Output OBJ")->required();

  // eval
  std::string v_a, v_b, v_out;
  int v_samples = 100000;
  std::uint64_t v_seed = 42;
  auto* eval = app.add_subcommand("eval", "Chamfer and Hausdorff distance between two meshes");
  eval->add_option("--a", v_a, "Reconstruction")->required();
  eval->add_option("--b", v_b, "Ground truth (defines the normalization)")->required();
  eval->add_option("--samples", v_samples, "Points per surface")->capture_default_str();
  eval->add_option("--seed", v_seed, "Sampling seed")->capture_default_str();
  eval->add_option("--out", v_out, "JSON output (default: stdout)");

  // report
  std::string t_prefix, t_gt, t_out;
  int t_samples = 100000;
  std::uint64_t t_seed = 42;
  auto* report = app.add_subcommand("report", "Per-level CR / CD / HD for a pyramid");
  report->add_option("--pyramid", t_prefix, "Prefix given to mipmap")->required();
  report->add_option("--gt", t_gt, "Ground-truth mesh")->required();
  report->add_option("--samples", t_samples, "Points per surface")->capture_default_str();
  report->add_option("--seed", t_seed, "Sampling seed")->capture_default_str();
  report->add_option("--out", t_out, "JSON output");

  // shape
  std::string s_kind, s_out;
  int s_size = 25;
  auto* shape = app.add_subcommand("shape", "Write a procedural test mesh");
  shape->add_option("--kind", s_kind, "hemisphere, grid, bumps, icosphere, tetrahedron or cube")->required();
  shape->add_option("--size", s_size, "Rings, grid side or subdivision level")->capture_default_str();
  shape->add_option("--out", s_out, "Output OBJ")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(ngi::ErrorKind::usage, e.what());
  }

  try {
    if (*param) {
      ngi::ParamRequest req;
      req.scheme = ngi::parse_scheme(p_scheme);
      if (!(p_eps > 0.0)) throw ngi::UsageError("--eps must be positive");
      req.ot.tolerance = p_eps;
      if (!p_corners.empty()) req.corners = parse_corners(p_corners);
      const ngi::Mesh mesh = ngi::load_mesh(p_mesh);
      const auto topo = ngi::validate_topology(mesh);
      if (!topo.is_disk && p_cut.empty()) {
        throw ngi::UsageError("input is not a disk; pass --cut-mesh to store the cut mesh");
      }
      const auto res = ngi::parameterize(mesh, req);
      if (res.was_cut) {
        ngi::save_obj(res.mesh, p_cut);
        std::cerr << "cut mesh: " << res.mesh.num_vertices() << " vertices -> " << p_cut << '\n';
      }
      if (res.ricci) {
        std::cerr << "ricci flow: " << res.ricci->iterations << " iterations, residual "
                  << res.ricci->log.back().residual << '\n';
      }
      if (res.ot) {
        std::cerr << "ot: " << res.ot->iterations << " iterations, gradient " << res.ot->log.back().gradient_norm
                  << '\n';
        if (!p_log.empty()) ngi::write_ot_log(*res.ot, p_log);
        if (!p_cells.empty()) ngi::write_cells(res.ot->diagram, p_cells);
      } else if (!p_log.empty() || !p_cells.empty()) {
        std::cerr << "--ot-log and --cells only apply to --scheme ot\n";
      }
      ngi::save_param_map(res.map, p_out);
    } else if (*raster) {
      const ngi::Mesh mesh = ngi::load_mesh(r_mesh);
      const auto map = ngi::load_param_map(r_uv);
      const auto source = r_source.empty() ? std::filesystem::path(r_mesh).filename().string() : r_source;
      const auto img = ngi::rasterize_geometry_image(mesh, map, r_res, source);
      ngi::encode_image(img, r_out);
    } else if (*mipmap) {
      const auto base = ngi::decode_image(m_in);
      const auto levels = ngi::build_mipmap(base);
      ngi::write_pyramid(levels, m_out);
      std::cerr << levels.size() << " levels written\n";
    } else if (*extract) {
      const auto img = ngi::decode_image(e_in);
      ngi::save_obj(ngi::extract_mesh(img), e_out);
    } else if (*eval) {
      if (v_samples <= 0) throw ngi::UsageError("--samples must be positive");
      const auto d = ngi::compare_meshes(ngi::load_mesh(v_a), ngi::load_mesh(v_b), v_samples, v_seed);
      const json j{{"a", v_a}, {"b", v_b}, {"samples", v_samples}, {"seed", v_seed},
                   {"chamfer", d.chamfer}, {"hausdorff", d.hausdorff}};
      if (v_out.empty()) {
        std::cout << j.dump(2) << '\n';
      } else {
        write_text(v_out, j.dump(2) + "\n");
      }
    } else if (*report) {
      if (t_samples <= 0) throw ngi::UsageError("--samples must be positive");
      const auto levels = ngi::read_pyramid(t_prefix);
      const auto rows = ngi::report_pyramid(levels, ngi::load_mesh(t_gt), t_samples, t_seed);
      std::cout << ngi::format_report(rows);
      if (!t_out.empty()) {
        json j{{"pyramid", t_prefix}, {"ground_truth", t_gt}, {"samples", t_samples}, {"seed", t_seed},
               {"levels", json::array()}};
        for (const auto& r : rows) j["levels"].push_back(level_json(r));
        write_text(t_out, j.dump(2) + "\n");
      }
    } else if (*shape) {
      ngi::Mesh m;
      if (s_kind == "hemisphere") {
        m = ngi::shapes::spherical_cap(s_size);
      } else if (s_kind == "grid") {
        m = ngi::shapes::grid(s_size);
      } else if (s_kind == "bumps") {
        m = ngi::shapes::height_field(s_size, [](double x, double y) {
          const double a = (x - 0.3) * (x - 0.3) + (y - 0.35) * (y - 0.35);
          const double b = (x - 0.7) * (x - 0.7) + (y - 0.6) * (y - 0.6);
          return 0.25 * std::exp(-a / 0.004) + 0.15 * std::exp(-b / 0.002);
        });
      } else if (s_kind == "icosphere") {
        m = ngi::shapes::icosphere(s_size);
      } else if (s_kind == "tetrahedron") {
        m = ngi::shapes::tetrahedron();
      } else if (s_kind == "cube") {
        m = ngi::shapes::cube();
      } else {
        throw ngi::UsageError("unknown shape kind '" + s_kind + "'");
      }
      ngi::save_obj(m, s_out);
    }
  } catch (const ngi::Error& e) {
    return fail(e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail(ngi::ErrorKind::data, e.what());
  }
  return 0;
}
