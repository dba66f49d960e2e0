#pragma once

#include "ngi/mesh.hpp"

#include <Eigen/SparseCore>

#include <array>
#include <filesystem>
#include <vector>

namespace ngi {

using Corners = std::array<int, 4>;

enum class ParamStage { conformal, area_preserving };

// Per-vertex UV in the unit square. Corners map to (0,0), (1,0), (1,1),
// (0,1) in that order.
struct ParamMap {
  std::vector<Vec2> uv;
  ParamStage stage = ParamStage::conformal;
  Corners corners{};
};

// Which side of the square a boundary vertex lies on.
enum class Side : signed char { interior = -1, bottom = 0, right = 1, top = 2, left = 3 };

// The single boundary loop of a disk mesh, rotated to start at corners[0].
// Throws DataError unless the corners are distinct boundary vertices in loop
// order.
[[nodiscard]] std::vector<int> corner_ordered_loop(const Mesh& mesh, const Corners& corners);

// Side for every vertex; corners report the side that starts at them.
[[nodiscard]] std::vector<Side> boundary_sides(const Mesh& mesh, const Corners& corners);

// Four boundary vertices nearest the arc-length quartiles of the loop,
// starting from its smallest vertex index.
[[nodiscard]] Corners default_corners(const Mesh& mesh);

// Signed UV area per face; positive means the face keeps its orientation.
[[nodiscard]] std::vector<double> signed_uv_areas(const Mesh& mesh, const ParamMap& map);
[[nodiscard]] int count_flipped(const Mesh& mesh, const ParamMap& map);

void save_param_map(const ParamMap& map, const std::filesystem::path& path);
[[nodiscard]] ParamMap load_param_map(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Discrete Ricci flow (vertex scaling metric l_ij = exp(u_i + u_j) l0_ij)
// ---------------------------------------------------------------------------

// pi/2 at each corner, zero elsewhere.
[[nodiscard]] std::vector<double> target_curvatures(const Mesh& mesh, const Corners& corners);

// Edge lengths of the scaled metric, indexed by halfedge.
[[nodiscard]] std::vector<double> metric_lengths(const Mesh& mesh, const Eigen::VectorXd& u);

// Corner angle at vertex k of every face, indexed by halfedge 3f+k.
// Throws DataError naming the face when a triangle inequality fails.
[[nodiscard]] std::vector<double> corner_angles(const Mesh& mesh, const std::vector<double>& lengths);

// Interior: 2pi - angle sum; boundary: pi - angle sum.
[[nodiscard]] Eigen::VectorXd compute_curvatures(const Mesh& mesh, const Eigen::VectorXd& u);

// Hessian of the Ricci energy: off-diagonal w_ij, diagonal -sum_j w_ij, with
// w_ij the sum of cotangents of the angles opposite edge ij. It equals
// d(Kbar - K)/du, i.e. minus the curvature Jacobian.
[[nodiscard]] Eigen::SparseMatrix<double> ricci_hessian(const Mesh& mesh, const Eigen::VectorXd& u);

struct RicciOptions {
  double tolerance = 1e-9;
  int max_iterations = 100;
  int max_halvings = 30;
  int pinned_vertex = 0;
};

struct RicciIteration {
  double residual = 0.0;        // max |Kbar - K|
  double curvature_sum = 0.0;   // sum K
  double step = 0.0;            // accepted step scale
};

struct RicciResult {
  Eigen::VectorXd u;
  int iterations = 0;
  std::vector<RicciIteration> log;  // entry 0 is the initial state
};

// Newton's method on the Ricci energy. Throws ConvergenceError when the
// residual does not reach the tolerance.
[[nodiscard]] RicciResult ricci_flow(const Mesh& mesh, const std::vector<double>& target,
                                     const RicciOptions& options = {});

// Lays the flat metric out in the plane and normalizes it onto the unit
// square.
[[nodiscard]] ParamMap layout_to_square(const Mesh& mesh, const Eigen::VectorXd& u, const Corners& corners);

// Raw breadth-first layout of the metric before normalization (the first
// face sits at the origin along +x). Exposed for tests.
[[nodiscard]] std::vector<Vec2> layout_metric(const Mesh& mesh, const Eigen::VectorXd& u);

[[nodiscard]] ParamMap conformal_parameterize(const Mesh& mesh, const Corners& corners, const RicciOptions& options = {});

// ---------------------------------------------------------------------------
// Linear baselines
// ---------------------------------------------------------------------------

enum class BaselineScheme { uniform, harmonic };

// Boundary on the square by arc length between corners; interior from the
// uniform (Tutte) or cotangent Laplacian.
[[nodiscard]] ParamMap baseline_parameterize(const Mesh& mesh, BaselineScheme scheme, const Corners& corners);

// Boundary placement used by the baselines.
[[nodiscard]] std::vector<Vec2> square_boundary_by_arc_length(const Mesh& mesh, const Corners& corners);

}  // namespace ngi
