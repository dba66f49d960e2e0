#include "ngi/ot.hpp"

#include "ngi/error.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

namespace ngi {

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Solves H d = g with the last row and column removed; d_last = 0.
Eigen::VectorXd pinned_solve(const Eigen::SparseMatrix<double>& h, const Eigen::VectorXd& g) {
  const Eigen::Index n = g.size();
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  if (n < 2) return d;
  const Eigen::Index m = n - 1;
  const Eigen::SparseMatrix<double> reduced = h.topLeftCorner(m, m);
  const Eigen::VectorXd rhs = g.head(m);

  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-12);
  cg.setMaxIterations(static_cast<Eigen::Index>(std::max<Eigen::Index>(1000, 10 * m)));
  cg.compute(reduced);
  Eigen::VectorXd x = cg.solve(rhs);
  if (cg.info() != Eigen::Success || !x.allFinite()) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(reduced);
    if (ldlt.info() != Eigen::Success) throw ConvergenceError("OT Newton system is singular");
    x = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !x.allFinite()) throw ConvergenceError("OT Newton solve failed");
  }
  d.head(m) = x;
  return d;
}

}  // namespace

void OtProblem::validate() const {
  if (sites.empty()) throw DataError("OT problem has no sites");
  if (nu.size() != sites.size()) throw DataError("OT problem: measure size does not match site count");
  double sum = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (!(nu[i] > 0.0)) throw DataError("OT problem: measure of site " + std::to_string(i) + " is not positive");
    sum += nu[i];
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DataError("OT problem: measures sum to " + std::to_string(sum));
}

Eigen::VectorXd initial_heights(const OtProblem& problem) {
  const int k = problem.size();
  Eigen::VectorXd h(k);
  for (int i = 0; i < k; ++i) h[i] = -0.5 * problem.sites[i].squaredNorm();
  h.array() -= h[k - 1];
  return h;
}

double ot_energy(const OtProblem& problem, const PowerDiagram& diagram) {
  long double e = 0.0L;
  for (int i = 0; i < diagram.size(); ++i) {
    const auto& c = diagram.cells[i];
    const double h = diagram.heights[i];
    if (!c.empty()) e += static_cast<long double>(c.area) * c.centroid.dot(problem.sites[i]);
    e += static_cast<long double>(c.area - problem.nu[i]) * h;
  }
  return static_cast<double>(e);
}

double ot_energy(const OtProblem& problem, const Eigen::VectorXd& heights) {
  const auto h = to_std(heights);
  return ot_energy(problem, power_diagram(problem.sites, h));
}

Eigen::VectorXd ot_gradient(const OtProblem& problem, const PowerDiagram& diagram) {
  Eigen::VectorXd g(diagram.size());
  for (int i = 0; i < diagram.size(); ++i) g[i] = diagram.cells[i].area - problem.nu[i];
  return g;
}

Eigen::SparseMatrix<double> ot_hessian(const OtProblem& problem, const PowerDiagram& diagram) {
  const int k = diagram.size();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * diagram.edges.size() + k);
  for (const auto& e : diagram.edges) {
    const double w = e.length / (problem.sites[e.i] - problem.sites[e.j]).norm();
    trip.emplace_back(e.i, e.j, -w);
    trip.emplace_back(e.j, e.i, -w);
    trip.emplace_back(e.i, e.i, w);
    trip.emplace_back(e.j, e.j, w);
  }
  Eigen::SparseMatrix<double> h(k, k);
  h.setFromTriplets(trip.begin(), trip.end());
  return h;
}

OtSolution solve_ot(const OtProblem& problem, const OtOptions& options, const std::optional<Eigen::VectorXd>& start) {
  problem.validate();
  if (!(options.tolerance > 0.0)) throw UsageError("OT tolerance must be positive");
  const int k = problem.size();

  OtSolution sol;
  sol.heights = start ? *start : initial_heights(problem);
  if (sol.heights.size() != k) throw DataError("OT start heights have the wrong size");
  sol.diagram = power_diagram(problem.sites, to_std(sol.heights));
  if (sol.diagram.empty_count() > 0) throw ConvergenceError("OT start has empty cells");

  double energy = ot_energy(problem, sol.diagram);
  Eigen::VectorXd grad = ot_gradient(problem, sol.diagram);
  sol.log.push_back({energy, grad.lpNorm<Eigen::Infinity>(), 0.0, 0});

  while (grad.lpNorm<Eigen::Infinity>() > options.tolerance) {
    if (sol.iterations >= options.max_iterations) {
      throw ConvergenceError("OT did not converge in " + std::to_string(options.max_iterations) +
                             " iterations (gradient " + std::to_string(grad.lpNorm<Eigen::Infinity>()) + ")");
    }
    const Eigen::VectorXd delta = pinned_solve(ot_hessian(problem, sol.diagram), grad);

    double lambda = 1.0;
    int most_empty = 0;
    bool accepted = false;
    for (int halving = 0; halving <= options.max_halvings; ++halving, lambda *= 0.5) {
      const Eigen::VectorXd trial = sol.heights - lambda * delta;
      PowerDiagram d = power_diagram(problem.sites, to_std(trial));
      const int empty = d.empty_count();
      most_empty = std::max(most_empty, empty);
      if (empty > 0) continue;
      const double e = ot_energy(problem, d);
      if (!(e < energy)) continue;
      sol.heights = trial;
      sol.diagram = std::move(d);
      energy = e;
      accepted = true;
      break;
    }
    if (!accepted) {
      throw ConvergenceError("OT line search failed after " + std::to_string(options.max_halvings) +
                             " halvings (gradient " + std::to_string(grad.lpNorm<Eigen::Infinity>()) + ")");
    }
    ++sol.iterations;
    grad = ot_gradient(problem, sol.diagram);
    sol.log.push_back({energy, grad.lpNorm<Eigen::Infinity>(), lambda, most_empty});
  }
  return sol;
}

ParamMap area_preserving_uv(const Mesh& mesh, const ParamMap& conformal, const OtSolution& solution) {
  const int n = mesh.num_vertices();
  if (solution.diagram.size() != n || static_cast<int>(conformal.uv.size()) != n) {
    throw DataError("OT solution does not match the mesh");
  }
  const auto sides = boundary_sides(mesh, conformal.corners);
  const std::array<Vec2, 4> square{Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};

  ParamMap out;
  out.stage = ParamStage::area_preserving;
  out.corners = conformal.corners;
  out.uv.resize(n);
  for (int v = 0; v < n; ++v) {
    const auto& cell = solution.diagram.cells[v];
    if (cell.empty()) throw DataError("vertex " + std::to_string(v) + " has an empty power cell");
    Vec2 p = cell.centroid.cwiseMax(0.0).cwiseMin(1.0);
    switch (sides[v]) {
      case Side::bottom: p.y() = 0.0; break;
      case Side::right: p.x() = 1.0; break;
      case Side::top: p.y() = 1.0; break;
      case Side::left: p.x() = 0.0; break;
      case Side::interior: break;
    }
    out.uv[v] = p;
  }
  for (int k = 0; k < 4; ++k) out.uv[conformal.corners[k]] = square[k];
  return out;
}

void write_ot_log(const OtSolution& solution, const std::filesystem::path& path) {
  std::string out = "iteration,energy,grad_inf,lambda,empty_cells\n";
  for (std::size_t i = 0; i < solution.log.size(); ++i) {
    const auto& it = solution.log[i];
    out += std::to_string(i) + ',';
    append_double(out, it.energy);
    out += ',';
    append_double(out, it.gradient_norm);
    out += ',';
    append_double(out, it.step);
    out += ',' + std::to_string(it.empty_cells) + '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  f << out;
}

void write_cells(const PowerDiagram& diagram, const std::filesystem::path& path) {
  std::string out = "# site count x0 y0 x1 y1 ...\n";
  for (int i = 0; i < diagram.size(); ++i) {
    const auto& c = diagram.cells[i];
    if (c.empty()) continue;
    out += std::to_string(i) + ' ' + std::to_string(c.polygon.size());
    for (const auto& p : c.polygon) {
      out += ' ';
      append_double(out, p.x());
      out += ' ';
      append_double(out, p.y());
    }
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  f << out;
}

}  // namespace ngi
