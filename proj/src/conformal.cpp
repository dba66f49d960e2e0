#include "ngi/conformal.hpp"

#include "ngi/error.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <deque>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

namespace ngi {

using std::numbers::pi;

// ---------------------------------------------------------------------------
// Boundary bookkeeping
// ---------------------------------------------------------------------------

namespace {

std::vector<int> single_loop(const Mesh& mesh) {
  auto loops = mesh.boundary_loops();
  if (loops.size() != 1) {
    throw DataError("expected a disk mesh with one boundary loop, found " + std::to_string(loops.size()));
  }
  if (loops.front().size() < 4) throw DataError("boundary loop has fewer than 4 vertices");
  return std::move(loops.front());
}

const std::array<Vec2, 4> kSquareCorners{Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};

}  // namespace

std::vector<int> corner_ordered_loop(const Mesh& mesh, const Corners& corners) {
  auto loop = single_loop(mesh);
  std::array<std::ptrdiff_t, 4> pos{};
  for (int k = 0; k < 4; ++k) {
    const auto it = std::find(loop.begin(), loop.end(), corners[k]);
    if (it == loop.end()) {
      throw DataError("corner vertex " + std::to_string(corners[k]) + " is not on the boundary loop");
    }
    pos[k] = it - loop.begin();
  }
  std::rotate(loop.begin(), loop.begin() + pos[0], loop.end());
  const auto n = static_cast<std::ptrdiff_t>(loop.size());
  std::array<std::ptrdiff_t, 4> rel{};
  for (int k = 0; k < 4; ++k) rel[k] = ((pos[k] - pos[0]) % n + n) % n;
  if (!(rel[0] < rel[1] && rel[1] < rel[2] && rel[2] < rel[3])) {
    throw DataError("corners must be distinct and listed in boundary loop order");
  }
  return loop;
}

std::vector<Side> boundary_sides(const Mesh& mesh, const Corners& corners) {
  const auto loop = corner_ordered_loop(mesh, corners);
  std::vector<Side> sides(mesh.num_vertices(), Side::interior);
  int side = -1;
  for (int v : loop) {
    if (side < 3 && v == corners[side + 1]) ++side;
    sides[v] = static_cast<Side>(side);
  }
  return sides;
}

Corners default_corners(const Mesh& mesh) {
  const auto loop = single_loop(mesh);
  const std::size_t n = loop.size();
  std::vector<double> arc(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    arc[i + 1] = arc[i] + (mesh.position(loop[(i + 1) % n]) - mesh.position(loop[i])).norm();
  }
  const double total = arc[n];
  Corners c{};
  std::size_t last = 0;
  c[0] = loop[0];
  for (int k = 1; k < 4; ++k) {
    const double target = total * k / 4.0;
    std::size_t best = last + 1;
    for (std::size_t i = last + 1; i + (4 - k) <= n; ++i) {
      if (std::abs(arc[i] - target) < std::abs(arc[best] - target)) best = i;
    }
    c[k] = loop[best];
    last = best;
  }
  return c;
}

std::vector<double> signed_uv_areas(const Mesh& mesh, const ParamMap& map) {
  std::vector<double> out(mesh.num_triangles());
  for (int f = 0; f < mesh.num_triangles(); ++f) {
    const auto& t = mesh.triangle(f);
    const Vec2 e1 = map.uv[t[1]] - map.uv[t[0]];
    const Vec2 e2 = map.uv[t[2]] - map.uv[t[0]];
    out[f] = 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
  }
  return out;
}

int count_flipped(const Mesh& mesh, const ParamMap& map) {
  const auto a = signed_uv_areas(mesh, map);
  return static_cast<int>(std::count_if(a.begin(), a.end(), [](double x) { return !(x > 0.0); }));
}

// ---------------------------------------------------------------------------
// Sidecar table
// ---------------------------------------------------------------------------

namespace {

void append_double(std::string& out, double x) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  out.append(buf.data(), ptr);
}

}  // namespace

void save_param_map(const ParamMap& map, const std::filesystem::path& path) {
  std::string out = "# ngi parameterization\n";
  out += std::string("# stage ") + (map.stage == ParamStage::conformal ? "conformal" : "area-preserving") + "\n";
  out += "# corners " + std::to_string(map.corners[0]) + ' ' + std::to_string(map.corners[1]) + ' ' +
         std::to_string(map.corners[2]) + ' ' + std::to_string(map.corners[3]) + "\n";
  out += "# vertex u v\n";
  for (std::size_t i = 0; i < map.uv.size(); ++i) {
    out += std::to_string(i) + ' ';
    append_double(out, map.uv[i].x());
    out += ' ';
    append_double(out, map.uv[i].y());
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  f << out;
}

ParamMap load_param_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  ParamMap map;
  std::string line;
  bool have_corners = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    if (line.front() == '#') {
      std::string hash;
      std::string key;
      ss >> hash >> key;
      if (key == "stage") {
        std::string s;
        ss >> s;
        if (s == "conformal") {
          map.stage = ParamStage::conformal;
        } else if (s == "area-preserving") {
          map.stage = ParamStage::area_preserving;
        } else {
          throw DataError(path.string() + ": unknown stage '" + s + "'");
        }
      } else if (key == "corners") {
        ss >> map.corners[0] >> map.corners[1] >> map.corners[2] >> map.corners[3];
        have_corners = static_cast<bool>(ss);
      }
      continue;
    }
    std::size_t idx = 0;
    double u = 0.0;
    double v = 0.0;
    if (!(ss >> idx >> u >> v) || idx != map.uv.size()) {
      throw DataError(path.string() + ": malformed row '" + line + "'");
    }
    map.uv.emplace_back(u, v);
  }
  if (!have_corners) throw DataError(path.string() + ": missing corners header");
  return map;
}

// ---------------------------------------------------------------------------
// Curvature
// ---------------------------------------------------------------------------

std::vector<double> target_curvatures(const Mesh& mesh, const Corners& corners) {
  (void)corner_ordered_loop(mesh, corners);
  std::vector<double> k(mesh.num_vertices(), 0.0);
  for (int c : corners) k[c] = pi / 2.0;
  return k;
}

std::vector<double> metric_lengths(const Mesh& mesh, const Eigen::VectorXd& u) {
  std::vector<double> l(mesh.num_halfedges());
  for (int h = 0; h < mesh.num_halfedges(); ++h) {
    l[h] = std::exp(u[mesh.tail(h)] + u[mesh.head(h)]) * mesh.edge_length(h);
  }
  return l;
}

namespace {

// Angle opposite side a in a triangle with sides (a, b, c); also returns its
// cotangent. Assumes the triangle inequality holds.
std::pair<double, double> angle_and_cot(double a, double b, double c) {
  const double area4 = std::sqrt((a + b + c) * (-a + b + c) * (a - b + c) * (a + b - c));  // 4 * area
  const double adj = b * b + c * c - a * a;
  return {std::atan2(area4, adj), adj / area4};
}

void check_triangle(const std::vector<double>& l, int f) {
  const double a = l[3 * f];
  const double b = l[3 * f + 1];
  const double c = l[3 * f + 2];
  if (!(a < b + c && b < a + c && c < a + b)) {
    throw DataError("triangle inequality violated in face " + std::to_string(f));
  }
}

}  // namespace

std::vector<double> corner_angles(const Mesh& mesh, const std::vector<double>& l) {
  std::vector<double> theta(mesh.num_halfedges());
  for (int f = 0; f < mesh.num_triangles(); ++f) {
    check_triangle(l, f);
    for (int k = 0; k < 3; ++k) {
      // Corner k sits between halfedges 3f+k and 3f+k+2; opposite is 3f+k+1.
      theta[3 * f + k] = angle_and_cot(l[3 * f + (k + 1) % 3], l[3 * f + k], l[3 * f + (k + 2) % 3]).first;
    }
  }
  return theta;
}

Eigen::VectorXd compute_curvatures(const Mesh& mesh, const Eigen::VectorXd& u) {
  const auto theta = corner_angles(mesh, metric_lengths(mesh, u));
  Eigen::VectorXd k(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) k[v] = mesh.is_boundary_vertex(v) ? pi : 2.0 * pi;
  for (int h = 0; h < mesh.num_halfedges(); ++h) k[mesh.tail(h)] -= theta[h];
  return k;
}

Eigen::SparseMatrix<double> ricci_hessian(const Mesh& mesh, const Eigen::VectorXd& u) {
  const auto l = metric_lengths(mesh, u);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * static_cast<std::size_t>(mesh.num_halfedges()));
  for (int f = 0; f < mesh.num_triangles(); ++f) {
    check_triangle(l, f);
    for (int k = 0; k < 3; ++k) {
      const int h = 3 * f + k;
      // Angle opposite halfedge h sits at corner k+2.
      const double cot = angle_and_cot(l[h], l[3 * f + (k + 1) % 3], l[3 * f + (k + 2) % 3]).second;
      const int i = mesh.tail(h);
      const int j = mesh.head(h);
      trip.emplace_back(i, j, cot);
      trip.emplace_back(j, i, cot);
      trip.emplace_back(i, i, -cot);
      trip.emplace_back(j, j, -cot);
    }
  }
  Eigen::SparseMatrix<double> hess(mesh.num_vertices(), mesh.num_vertices());
  hess.setFromTriplets(trip.begin(), trip.end());
  return hess;
}

// ---------------------------------------------------------------------------
// Newton solve
// ---------------------------------------------------------------------------

namespace {

// Removes row/column `pin` from a square sparse matrix.
Eigen::SparseMatrix<double> drop_index(const Eigen::SparseMatrix<double>& m, int pin) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(m.nonZeros()));
  for (int c = 0; c < m.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, c); it; ++it) {
      const auto r = static_cast<int>(it.row());
      if (r == pin || c == pin) continue;
      trip.emplace_back(r > pin ? r - 1 : r, c > pin ? c - 1 : c, it.value());
    }
  }
  Eigen::SparseMatrix<double> out(m.rows() - 1, m.cols() - 1);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

Eigen::VectorXd solve_pinned(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& rhs, int pin) {
  const auto n = static_cast<int>(rhs.size());
  const auto reduced = drop_index(a, pin);
  Eigen::VectorXd b(n - 1);
  for (int i = 0, r = 0; i < n; ++i) {
    if (i != pin) b[r++] = rhs[i];
  }
  Eigen::VectorXd x;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(reduced);
  if (ldlt.info() == Eigen::Success) x = ldlt.solve(b);
  if (ldlt.info() != Eigen::Success || !x.allFinite()) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(reduced);
    if (lu.info() != Eigen::Success) throw ConvergenceError("singular Newton system");
    x = lu.solve(b);
  }
  Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
  for (int i = 0, r = 0; i < n; ++i) {
    if (i != pin) full[i] = x[r++];
  }
  return full;
}

}  // namespace

RicciResult ricci_flow(const Mesh& mesh, const std::vector<double>& target, const RicciOptions& options) {
  const int n = mesh.num_vertices();
  if (static_cast<int>(target.size()) != n) throw DataError("target curvature size mismatch");
  if (!(options.tolerance > 0.0)) throw UsageError("Ricci tolerance must be positive");
  const Eigen::Map<const Eigen::VectorXd> kbar(target.data(), n);

  RicciResult res;
  res.u = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd k = compute_curvatures(mesh, res.u);
  double residual = (kbar - k).lpNorm<Eigen::Infinity>();
  res.log.push_back({residual, k.sum(), 0.0});

  while (residual > options.tolerance) {
    if (res.iterations >= options.max_iterations) {
      throw ConvergenceError("Ricci flow did not converge in " + std::to_string(options.max_iterations) +
                             " iterations (residual " + std::to_string(residual) + ")");
    }
    // Newton on E with grad = Kbar - K and Hessian H: H delta = -(Kbar - K).
    const Eigen::SparseMatrix<double> neg_hess = -ricci_hessian(mesh, res.u);
    const Eigen::VectorXd delta = solve_pinned(neg_hess, kbar - k, options.pinned_vertex);

    double step = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= options.max_halvings; ++halving, step *= 0.5) {
      const Eigen::VectorXd trial = res.u + step * delta;
      Eigen::VectorXd k_trial;
      try {
        k_trial = compute_curvatures(mesh, trial);
      } catch (const DataError&) {
        continue;
      }
      const double r_trial = (kbar - k_trial).lpNorm<Eigen::Infinity>();
      if (r_trial < residual) {
        res.u = trial;
        k = std::move(k_trial);
        residual = r_trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) throw ConvergenceError("Ricci flow: unrecoverable metric degeneracy (step underflow)");
    ++res.iterations;
    res.log.push_back({residual, k.sum(), step});
  }
  return res;
}

// ---------------------------------------------------------------------------
// Layout
// ---------------------------------------------------------------------------

std::vector<Vec2> layout_metric(const Mesh& mesh, const Eigen::VectorXd& u) {
  const auto l = metric_lengths(mesh, u);
  const int nv = mesh.num_vertices();
  std::vector<Vec2> uv(nv, Vec2::Zero());
  std::vector<std::uint8_t> placed(nv, 0);
  std::vector<std::uint8_t> visited(mesh.num_triangles(), 0);

  // Third corner of the triangle (a, b, c) given a, b and the lengths |ca|,
  // |bc|, on the left of a->b.
  auto apex = [](const Vec2& a, const Vec2& b, double ca, double bc) {
    const Vec2 ab = b - a;
    const double d = ab.norm();
    const double x = (ca * ca - bc * bc + d * d) / (2.0 * d);
    const double y = std::sqrt(std::max(0.0, ca * ca - x * x));
    const Vec2 ex = ab / d;
    const Vec2 ey(-ex.y(), ex.x());
    return Vec2(a + x * ex + y * ey);
  };

  for (int seed = 0; seed < mesh.num_triangles(); ++seed) {
    if (visited[seed]) continue;
    const auto& t = mesh.triangle(seed);
    if (!placed[t[0]]) {
      uv[t[0]] = Vec2::Zero();
      uv[t[1]] = Vec2(l[3 * seed], 0.0);
      placed[t[0]] = placed[t[1]] = 1;
    }
    if (!placed[t[2]]) {
      uv[t[2]] = apex(uv[t[0]], uv[t[1]], l[3 * seed + 2], l[3 * seed + 1]);
      placed[t[2]] = 1;
    }
    visited[seed] = 1;
    std::deque<int> queue{seed};
    while (!queue.empty()) {
      const int f = queue.front();
      queue.pop_front();
      for (int k = 0; k < 3; ++k) {
        const int g_he = mesh.twin(3 * f + k);
        if (g_he == kNoHalfedge) continue;
        const int g = Mesh::face(g_he);
        if (visited[g]) continue;
        visited[g] = 1;
        // In face g the halfedge g_he runs a -> b; the apex c follows.
        const int a = mesh.tail(g_he);
        const int b = mesh.head(g_he);
        const int c = mesh.head(Mesh::next(g_he));
        if (!placed[c]) {
          uv[c] = apex(uv[a], uv[b], l[Mesh::prev(g_he)], l[Mesh::next(g_he)]);
          placed[c] = 1;
        }
        queue.push_back(g);
      }
    }
  }
  return uv;
}

ParamMap layout_to_square(const Mesh& mesh, const Eigen::VectorXd& u, const Corners& corners) {
  const auto sides = boundary_sides(mesh, corners);
  const auto raw = layout_metric(mesh, u);

  // The flat metric is a rectangle whose aspect ratio is the conformal
  // modulus of the corner choice. Rotate it upright with the least-squares
  // similarity onto the square, then fit each axis separately.
  using C = std::complex<double>;
  C zm(0, 0);
  C wm(0, 0);
  for (int k = 0; k < 4; ++k) {
    zm += C(raw[corners[k]].x(), raw[corners[k]].y());
    wm += C(kSquareCorners[k].x(), kSquareCorners[k].y());
  }
  zm /= 4.0;
  wm /= 4.0;
  C num(0, 0);
  for (int k = 0; k < 4; ++k) {
    const C z = C(raw[corners[k]].x(), raw[corners[k]].y()) - zm;
    const C w = C(kSquareCorners[k].x(), kSquareCorners[k].y()) - wm;
    num += std::conj(z) * w;
  }
  if (!(std::abs(num) > 0.0)) throw DataError("layout inconsistent: corners coincide");
  const C rot = num / std::abs(num);

  std::array<Vec2, 4> q{};
  for (int k = 0; k < 4; ++k) {
    const C z = rot * (C(raw[corners[k]].x(), raw[corners[k]].y()) - zm);
    q[k] = Vec2(z.real(), z.imag());
  }
  Vec2 scale;
  Vec2 shift;
  for (int axis = 0; axis < 2; ++axis) {
    double sq = 0.0;
    double st = 0.0;
    double qm = 0.0;
    double tm = 0.0;
    for (int k = 0; k < 4; ++k) {
      qm += q[k][axis] / 4.0;
      tm += kSquareCorners[k][axis] / 4.0;
    }
    for (int k = 0; k < 4; ++k) {
      sq += (q[k][axis] - qm) * (q[k][axis] - qm);
      st += (q[k][axis] - qm) * (kSquareCorners[k][axis] - tm);
    }
    if (!(sq > 0.0) || !(st > 0.0)) throw DataError("layout inconsistent: corners are not in square order");
    scale[axis] = st / sq;
    shift[axis] = tm - scale[axis] * qm;
  }

  ParamMap map;
  map.stage = ParamStage::conformal;
  map.corners = corners;
  map.uv.resize(raw.size());
  double corner_misfit = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const C z = rot * (C(raw[i].x(), raw[i].y()) - zm);
    map.uv[i] = Vec2(scale.x() * z.real() + shift.x(), scale.y() * z.imag() + shift.y());
  }
  for (int k = 0; k < 4; ++k) corner_misfit = std::max(corner_misfit, (map.uv[corners[k]] - kSquareCorners[k]).norm());
  if (corner_misfit > 1e-3) {
    throw DataError("layout inconsistent: corners miss the square by " + std::to_string(corner_misfit) +
                    " (residual curvature too large)");
  }

  for (std::size_t i = 0; i < raw.size(); ++i) {
    Vec2& p = map.uv[i];
    switch (sides[i]) {
      case Side::bottom: p.y() = 0.0; break;
      case Side::right: p.x() = 1.0; break;
      case Side::top: p.y() = 1.0; break;
      case Side::left: p.x() = 0.0; break;
      case Side::interior: break;
    }
    p = p.cwiseMax(0.0).cwiseMin(1.0);
  }
  for (int k = 0; k < 4; ++k) map.uv[corners[k]] = kSquareCorners[k];

  if (const int flipped = count_flipped(mesh, map); flipped > 0) {
    throw DataError("conformal layout produced " + std::to_string(flipped) + " flipped triangles");
  }
  return map;
}

ParamMap conformal_parameterize(const Mesh& mesh, const Corners& corners, const RicciOptions& options) {
  const auto target = target_curvatures(mesh, corners);
  const auto flow = ricci_flow(mesh, target, options);
  return layout_to_square(mesh, flow.u, corners);
}

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

std::vector<Vec2> square_boundary_by_arc_length(const Mesh& mesh, const Corners& corners) {
  const auto loop = corner_ordered_loop(mesh, corners);
  std::vector<Vec2> uv(mesh.num_vertices(), Vec2::Zero());
  const std::size_t n = loop.size();
  std::size_t start = 0;
  for (int side = 0; side < 4; ++side) {
    const int end_corner = corners[(side + 1) % 4];
    std::size_t end = start + 1;
    while (loop[end % n] != end_corner) ++end;
    std::vector<double> arc{0.0};
    for (std::size_t i = start; i < end; ++i) {
      arc.push_back(arc.back() + (mesh.position(loop[(i + 1) % n]) - mesh.position(loop[i])).norm());
    }
    for (std::size_t i = start; i < end; ++i) {
      const double t = arc[i - start] / arc.back();
      uv[loop[i]] = (1.0 - t) * kSquareCorners[side] + t * kSquareCorners[(side + 1) % 4];
    }
    start = end;
  }
  return uv;
}

ParamMap baseline_parameterize(const Mesh& mesh, BaselineScheme scheme, const Corners& corners) {
  ParamMap map;
  map.stage = ParamStage::conformal;
  map.corners = corners;
  map.uv = square_boundary_by_arc_length(mesh, corners);

  const int nv = mesh.num_vertices();
  std::vector<int> slot(nv, -1);
  int ni = 0;
  for (int v = 0; v < nv; ++v) {
    if (!mesh.is_boundary_vertex(v)) slot[v] = ni++;
  }
  if (ni == 0) return map;

  // Edge weights keyed by halfedge; each halfedge contributes half of the
  // undirected weight so interior edges sum to the full value.
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(ni, 2);
  for (int f = 0; f < mesh.num_triangles(); ++f) {
    const auto& t = mesh.triangle(f);
    for (int k = 0; k < 3; ++k) {
      const int i = t[k];
      const int j = t[(k + 1) % 3];
      double w = 0.5;
      if (scheme == BaselineScheme::harmonic) {
        const int o = t[(k + 2) % 3];
        const Vec3 e1 = mesh.position(i) - mesh.position(o);
        const Vec3 e2 = mesh.position(j) - mesh.position(o);
        w = 0.5 * e1.dot(e2) / e1.cross(e2).norm();
      }
      for (const auto& [a, b] : {std::pair{i, j}, std::pair{j, i}}) {
        if (slot[a] < 0) continue;
        trip.emplace_back(slot[a], slot[a], w);
        if (slot[b] >= 0) {
          trip.emplace_back(slot[a], slot[b], -w);
        } else {
          rhs.row(slot[a]) += w * map.uv[b].transpose();
        }
      }
    }
  }
  Eigen::SparseMatrix<double> a(ni, ni);
  a.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw DataError("baseline parameterization: singular system");
  const Eigen::MatrixXd x = lu.solve(rhs);
  if (!x.allFinite()) throw DataError("baseline parameterization: singular system");
  for (int v = 0; v < nv; ++v) {
    if (slot[v] >= 0) map.uv[v] = x.row(slot[v]).transpose();
  }
  return map;
}

}  // namespace ngi
