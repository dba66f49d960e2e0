#pragma once

#include "ngi/conformal.hpp"
#include "ngi/power_diagram.hpp"

#include <Eigen/SparseCore>

#include <filesystem>
#include <optional>
#include <vector>

namespace ngi {

// Semi-discrete transport from the uniform unit square onto weighted sites.
struct OtProblem {
  std::vector<Vec2> sites;
  std::vector<double> nu;  // positive, sums to 1

  [[nodiscard]] int size() const noexcept { return static_cast<int>(sites.size()); }
  // Throws DataError when the invariants do not hold.
  void validate() const;
};

// h_i = -|p_i|^2 / 2 shifted so the last height is zero: the Voronoi diagram.
[[nodiscard]] Eigen::VectorXd initial_heights(const OtProblem& problem);

// E(h) = sum_i integral over W_i of (<x,p_i> + h_i) dx - sum_i nu_i h_i.
[[nodiscard]] double ot_energy(const OtProblem& problem, const PowerDiagram& diagram);
[[nodiscard]] double ot_energy(const OtProblem& problem, const Eigen::VectorXd& heights);

// w_i(h) - nu_i.
[[nodiscard]] Eigen::VectorXd ot_gradient(const OtProblem& problem, const PowerDiagram& diagram);

// Jacobian of the gradient: off-diagonal -len(e_ij) / |p_i - p_j|, diagonal
// minus the row sum.
[[nodiscard]] Eigen::SparseMatrix<double> ot_hessian(const OtProblem& problem, const PowerDiagram& diagram);

struct OtOptions {
  double tolerance = 1e-6;
  int max_iterations = 200;
  int max_halvings = 40;
};

struct OtIteration {
  double energy = 0.0;
  double gradient_norm = 0.0;  // infinity norm
  double step = 0.0;           // accepted lambda; 0 for the initial entry
  int empty_cells = 0;         // most empty cells met during the line search
};

struct OtSolution {
  Eigen::VectorXd heights;
  PowerDiagram diagram;
  std::vector<OtIteration> log;  // entry 0 is the starting point
  int iterations = 0;
};

// Damped Newton on E with the last height pinned. Trial steps are halved
// while a cell is empty or the energy fails to decrease. Throws
// ConvergenceError when the iteration or halving budget runs out.
[[nodiscard]] OtSolution solve_ot(const OtProblem& problem, const OtOptions& options = {},
                                  const std::optional<Eigen::VectorXd>& start = std::nullopt);

// Moves every vertex to the centroid of its cell. Boundary vertices are
// projected onto their side of the square and corners snap to the square
// corners.
[[nodiscard]] ParamMap area_preserving_uv(const Mesh& mesh, const ParamMap& conformal, const OtSolution& solution);

// One CSV row per log entry: iteration,energy,grad_inf,lambda,empty_cells.
void write_ot_log(const OtSolution& solution, const std::filesystem::path& path);

// Polygon soup, one line per non-empty cell: site index, vertex count, then
// the coordinates.
void write_cells(const PowerDiagram& diagram, const std::filesystem::path& path);

}  // namespace ngi
