#pragma once

#include "ngi/conformal.hpp"
#include "ngi/geometry_image.hpp"
#include "ngi/metrics.hpp"
#include "ngi/ot.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ngi {

enum class Scheme { ot, conformal, uniform, harmonic };

// Throws UsageError for unknown names.
[[nodiscard]] Scheme parse_scheme(const std::string& name);
[[nodiscard]] const char* scheme_name(Scheme scheme) noexcept;

struct ParamRequest {
  Scheme scheme = Scheme::ot;
  std::optional<Corners> corners;  // default_corners() when absent
  RicciOptions ricci;
  OtOptions ot;
};

struct ParamOutcome {
  Mesh mesh;  // the input, or its cut when the input was closed
  bool was_cut = false;
  ParamMap map;
  std::optional<RicciResult> ricci;
  std::optional<OtSolution> ot;
};

// Disk meshes are used as given; closed genus-0 meshes are cut first. Any
// other topology is a DataError.
[[nodiscard]] ParamOutcome parameterize(const Mesh& mesh, const ParamRequest& request);

// Stem of level k in a pyramid written under `prefix`: <prefix>_L<k>.
[[nodiscard]] std::filesystem::path level_stem(const std::filesystem::path& prefix, int level);
void write_pyramid(const std::vector<GeometryImage>& levels, const std::filesystem::path& prefix);
// Reads levels 0, 1, ... until the next one is missing.
[[nodiscard]] std::vector<GeometryImage> read_pyramid(const std::filesystem::path& prefix);

struct LevelReport {
  int level = 0;
  int resolution = 0;
  double compression_ratio = 0.0;  // relative to level 0
  double chamfer = 0.0;
  double hausdorff = 0.0;
};

[[nodiscard]] std::vector<LevelReport> report_pyramid(const std::vector<GeometryImage>& levels,
                                                      const Mesh& ground_truth, int samples, std::uint64_t seed);

// "CR / CD (x1e-4) / HD (x1e-2)" rows, one per level.
[[nodiscard]] std::string format_report(const std::vector<LevelReport>& rows);

}  // namespace ngi
