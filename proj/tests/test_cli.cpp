#include "ngi/geometry_image.hpp"
#include "support.hpp"

#include <doctest.h>

#include <json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>

using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run ngi_cli(const testing::TempDir& dir, const std::string& args) {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + NGI_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = testing::read_file(out);
  r.err = testing::read_file(err);
  return r;
}

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("end-to-end run on a small hemisphere") {
  testing::TempDir dir("cli_e2e");
  REQUIRE(ngi_cli(dir, "shape --kind hemisphere --size 8 --out " + q(dir / "cap.obj")).code == 0);
  const auto param = ngi_cli(dir, "param --mesh " + q(dir / "cap.obj") + " --out " + q(dir / "cap.uv") +
                                      " --ot-log " + q(dir / "ot.csv") + " --cells " + q(dir / "cells.txt"));
  REQUIRE_MESSAGE(param.code == 0, param.err);
  CHECK(testing::read_file(dir / "ot.csv").rfind("iteration,energy,grad_inf,lambda,empty_cells", 0) == 0);
  REQUIRE(ngi_cli(dir, "rasterize --mesh " + q(dir / "cap.obj") + " --uv " + q(dir / "cap.uv") +
                           " --res 64 --out " + q(dir / "gi"))
              .code == 0);
  CHECK(std::filesystem::exists(dir / "gi.png"));
  CHECK(std::filesystem::exists(dir / "gi.normal.png"));
  CHECK(std::filesystem::exists(dir / "gi.meta.json"));
  const auto meta = json::parse(testing::read_file(dir / "gi.meta.json"));
  CHECK(meta.at("source") == "cap.obj");

  REQUIRE(ngi_cli(dir, "extract --in " + q(dir / "gi.png") + " --out " + q(dir / "back.obj")).code == 0);
  const auto eval = ngi_cli(dir, "eval --a " + q(dir / "back.obj") + " --b " + q(dir / "cap.obj") + " --samples 5000");
  REQUIRE(eval.code == 0);
  const auto j = json::parse(eval.out);
  CHECK(j.at("chamfer").get<double>() > 0.0);
  CHECK(j.at("chamfer").get<double>() < 1e-3);
  CHECK(j.at("hausdorff").get<double>() < 0.1);
  CHECK(j.at("seed") == 42);

  REQUIRE(ngi_cli(dir, "mipmap --in " + q(dir / "gi.png") + " --out " + q(dir / "pyr")).code == 0);
  CHECK(std::filesystem::exists(dir / "pyr_L6.png"));
  const auto report = ngi_cli(dir, "report --pyramid " + q(dir / "pyr") + " --gt " + q(dir / "cap.obj") +
                                       " --samples 2000 --out " + q(dir / "report.json"));
  REQUIRE(report.code == 0);
  CHECK(report.out.rfind("level  resolution", 0) == 0);
  const auto rj = json::parse(testing::read_file(dir / "report.json"));
  REQUIRE(rj.at("levels").size() == 7);
  for (int k = 0; k < 7; ++k) {
    CHECK(rj["levels"][k]["compression_ratio"].get<double>() == std::pow(4.0, k));
    CHECK(rj["levels"][k]["resolution"] == (64 >> k));
  }
}

TEST_CASE("outputs are byte-identical across runs") {
  testing::TempDir dir("cli_determinism");
  REQUIRE(ngi_cli(dir, "shape --kind bumps --size 12 --out " + q(dir / "b.obj")).code == 0);
  for (const char* tag : {"1", "2"}) {
    const std::string s = tag;
    REQUIRE(ngi_cli(dir, "param --mesh " + q(dir / "b.obj") + " --out " + q(dir / ("b" + s + ".uv"))).code == 0);
    REQUIRE(ngi_cli(dir, "rasterize --mesh " + q(dir / "b.obj") + " --uv " + q(dir / ("b" + s + ".uv")) +
                             " --res 32 --out " + q(dir / ("gi" + s)))
                .code == 0);
    REQUIRE(ngi_cli(dir, "eval --a " + q(dir / "b.obj") + " --b " + q(dir / "b.obj") + " --samples 3000 --out " +
                             q(dir / ("e" + s + ".json")))
                .code == 0);
  }
  CHECK(testing::read_file(dir / "b1.uv") == testing::read_file(dir / "b2.uv"));
  CHECK(testing::read_file(dir / "gi1.png") == testing::read_file(dir / "gi2.png"));
  CHECK(testing::read_file(dir / "gi1.normal.png") == testing::read_file(dir / "gi2.normal.png"));
  CHECK(testing::read_file(dir / "e1.json").find("\"chamfer\"") != std::string::npos);
}

TEST_CASE("non-power-of-two image is a data error naming the constraint") {
  testing::TempDir dir("cli_npot");
  ngi::Rgb16 raw{3, 3, std::vector<std::uint16_t>(27, 1000)};
  ngi::write_png16(dir / "odd.png", raw);
  ngi::ImageMeta meta;
  meta.bbox_max = ngi::Vec3::Ones();
  meta.resolution = 3;
  ngi::write_meta(meta, dir / "odd.meta.json");
  const auto r = ngi_cli(dir, "extract --in " + q(dir / "odd.png") + " --out " + q(dir / "x.obj"));
  CHECK(r.code == 3);
  const auto err = json::parse(r.err);
  CHECK(err.at("error") == "data");
  CHECK(err.at("message").get<std::string>().find("power of two") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
  testing::TempDir dir("cli_usage");
  CHECK(ngi_cli(dir, "param --bogus").code == 2);
  CHECK(ngi_cli(dir, "").code == 2);
  CHECK(ngi_cli(dir, "shape --kind torus --out " + q(dir / "t.obj")).code == 2);
  REQUIRE(ngi_cli(dir, "shape --kind hemisphere --size 3 --out " + q(dir / "c.obj")).code == 0);
  const auto r = ngi_cli(dir, "param --mesh " + q(dir / "c.obj") + " --out " + q(dir / "c.uv") + " --scheme lscm");
  CHECK(r.code == 2);
  CHECK(json::parse(r.err).at("error") == "usage");
  CHECK(ngi_cli(dir, "param --mesh " + q(dir / "c.obj") + " --out " + q(dir / "c.uv") + " --corners 1,2").code == 2);
}

TEST_CASE("closed meshes need --cut-mesh") {
  testing::TempDir dir("cli_closed");
  REQUIRE(ngi_cli(dir, "shape --kind icosphere --size 1 --out " + q(dir / "s.obj")).code == 0);
  CHECK(ngi_cli(dir, "param --mesh " + q(dir / "s.obj") + " --out " + q(dir / "s.uv")).code == 2);
  const auto r = ngi_cli(dir, "param --mesh " + q(dir / "s.obj") + " --out " + q(dir / "s.uv") + " --scheme harmonic" +
                                  " --cut-mesh " + q(dir / "s_cut.obj"));
  CHECK_MESSAGE(r.code == 0, r.err);
  CHECK(std::filesystem::exists(dir / "s_cut.obj"));
}

TEST_CASE("unreachable tolerance is a convergence error") {
  testing::TempDir dir("cli_convergence");
  REQUIRE(ngi_cli(dir, "shape --kind hemisphere --size 6 --out " + q(dir / "c.obj")).code == 0);
  const auto r = ngi_cli(dir, "param --mesh " + q(dir / "c.obj") + " --out " + q(dir / "c.uv") + " --eps 1e-300");
  CHECK(r.code == 4);
  CHECK(json::parse(r.err).at("error") == "convergence");
}

TEST_CASE("missing input files are data errors") {
  testing::TempDir dir("cli_missing");
  CHECK(ngi_cli(dir, "extract --in " + q(dir / "nothing.png") + " --out " + q(dir / "x.obj")).code == 3);
  CHECK(ngi_cli(dir, "eval --a " + q(dir / "a.obj") + " --b " + q(dir / "b.obj")).code == 3);
}
