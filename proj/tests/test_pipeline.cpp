#include "ngi/error.hpp"
#include "ngi/mesh_extract.hpp"
#include "ngi/pipeline.hpp"
#include "ngi/shapes.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace ngi;

TEST_CASE("scheme names round-trip and unknown names are usage errors") {
  for (auto s : {Scheme::ot, Scheme::conformal, Scheme::uniform, Scheme::harmonic}) {
    CHECK(parse_scheme(scheme_name(s)) == s);
  }
  CHECK_THROWS_AS((void)parse_scheme("lscm"), UsageError);
}

TEST_CASE("every scheme maps a hemisphere into the square without flips") {
  const Mesh cap = shapes::spherical_cap(8);
  for (auto s : {Scheme::ot, Scheme::conformal, Scheme::uniform, Scheme::harmonic}) {
    CAPTURE(scheme_name(s));
    ParamRequest req;
    req.scheme = s;
    const auto out = parameterize(cap, req);
    CHECK_FALSE(out.was_cut);
    CHECK(count_flipped(out.mesh, out.map) == 0);
    for (const auto& p : out.map.uv) {
      CHECK(p.minCoeff() >= -1e-12);
      CHECK(p.maxCoeff() <= 1 + 1e-12);
    }
    CHECK(out.map.uv[out.map.corners[0]].isApprox(Vec2(0, 0)));
    CHECK(out.map.uv[out.map.corners[2]].isApprox(Vec2(1, 1)));
    CHECK(out.ricci.has_value() == (s == Scheme::ot || s == Scheme::conformal));
    CHECK(out.ot.has_value() == (s == Scheme::ot));
    CHECK((out.map.stage == ParamStage::area_preserving) == (s == Scheme::ot));
  }
}

TEST_CASE("OT scheme makes UV cell areas follow the surface measure") {
  const Mesh cap = shapes::spherical_cap(8);
  ParamRequest req;
  req.ot.tolerance = 1e-9;
  const auto out = parameterize(cap, req);
  const auto nu = vertex_measures(out.mesh).nu;
  for (std::size_t i = 0; i < nu.size(); ++i) CHECK(std::abs(out.ot->diagram.cells[i].area - nu[i]) <= 1e-9);
}

TEST_CASE("closed genus-0 input is cut before parameterization") {
  const Mesh sphere = shapes::icosphere(2);
  ParamRequest req;
  req.scheme = Scheme::harmonic;
  const auto out = parameterize(sphere, req);
  CHECK(out.was_cut);
  CHECK(validate_topology(out.mesh).is_disk);
  CHECK(out.map.uv.size() == static_cast<std::size_t>(out.mesh.num_vertices()));
  CHECK(count_flipped(out.mesh, out.map) == 0);
}

TEST_CASE("other topologies are rejected") {
  // Annulus: grid with the center cell removed has two boundary loops.
  const Mesh g = shapes::grid(4);
  std::vector<Triangle> tris;
  for (int f = 0; f < g.num_triangles(); ++f) {
    const auto& t = g.triangle(f);
    const Vec3 mid = (g.position(t[0]) + g.position(t[1]) + g.position(t[2])) / 3.0;
    if (std::abs(mid.x() - 0.5) < 1.0 / 6 && std::abs(mid.y() - 0.5) < 1.0 / 6) continue;
    tris.push_back(t);
  }
  const Mesh annulus(g.positions(), tris);
  CHECK_THROWS_AS((void)parameterize(annulus, ParamRequest{}), DataError);
}

TEST_CASE("explicit corners are honored") {
  const int n = 7;
  const Mesh g = shapes::grid(n);
  ParamRequest req;
  req.scheme = Scheme::uniform;
  req.corners = Corners{n - 1, n * n - 1, n * (n - 1), 0};
  const auto out = parameterize(g, req);
  CHECK(out.map.uv[n - 1].isApprox(Vec2(0, 0)));
  CHECK(out.map.uv[0].isApprox(Vec2(0, 1)));
}

TEST_CASE("pyramid files and report rows") {
  testing::TempDir dir("pipeline_pyramid");
  const Mesh cap = shapes::spherical_cap(6);
  const auto out = parameterize(cap, ParamRequest{});
  const auto levels = build_mipmap(rasterize_geometry_image(out.mesh, out.map, 32, "cap"));
  write_pyramid(levels, dir / "cap");
  CHECK(level_stem(dir / "cap", 3).filename() == "cap_L3");
  for (int k = 0; k < 6; ++k) CHECK(std::filesystem::exists(dir / ("cap_L" + std::to_string(k) + ".png")));
  const auto back = read_pyramid(dir / "cap");
  REQUIRE(back.size() == 6);
  CHECK_THROWS_AS((void)read_pyramid(dir / "none"), DataError);

  const auto rows = report_pyramid(back, cap, 5000, 7);
  REQUIRE(rows.size() == 6);
  for (int k = 0; k < 6; ++k) {
    CHECK(rows[k].level == k);
    CHECK(rows[k].resolution == 32 >> k);
    CHECK(rows[k].compression_ratio == std::pow(4.0, k));
    CHECK(rows[k].chamfer > 0.0);
    CHECK(rows[k].hausdorff * rows[k].hausdorff >= rows[k].chamfer);  // max squared distance bounds both means
  }
  CHECK(rows[0].chamfer < rows[5].chamfer);
  const auto text = format_report(rows);
  CHECK(text.rfind("level  resolution  CR / CD (x1e-4) / HD (x1e-2)\n", 0) == 0);
  CHECK(text.find("1024 /") != std::string::npos);  // level 5: (32/1)^2
}
