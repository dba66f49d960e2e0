#include "ngi/power_diagram.hpp"

#include "ngi/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>
#include <tuple>

namespace ngi {

std::vector<double> PowerDiagram::areas() const {
  std::vector<double> a(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) a[i] = cells[i].area;
  return a;
}

int PowerDiagram::empty_count() const {
  return static_cast<int>(std::count_if(cells.begin(), cells.end(), [](const PowerCell& c) { return c.empty(); }));
}

// ---------------------------------------------------------------------------
// Lower convex hull of lifted sites
// ---------------------------------------------------------------------------

namespace {

struct HullFace {
  std::array<int, 3> v{};
  std::array<int, 3> nb{};  // nb[k] lies across edge v[k] -> v[k+1]
  Vec3 normal = Vec3::Zero();
  double offset = 0.0;
  bool alive = true;
};

class IncrementalHull {
 public:
  IncrementalHull(std::vector<Vec3> points, double eps) : pts_(std::move(points)), eps_(eps) {}

  bool build() {
    const int n = static_cast<int>(pts_.size());
    if (n < 4) return false;
    std::array<int, 4> init{};
    if (!initial_simplex(init)) return false;
    interior_ = (pts_[init[0]] + pts_[init[1]] + pts_[init[2]] + pts_[init[3]]) / 4.0;

    add_face(init[0], init[1], init[2]);
    add_face(init[0], init[3], init[1]);
    add_face(init[1], init[3], init[2]);
    add_face(init[2], init[3], init[0]);
    link_all();
    on_hull_.assign(n, false);
    for (int i : init) on_hull_[i] = true;

    for (int p = 0; p < n; ++p) {
      if (std::find(init.begin(), init.end(), p) != init.end()) continue;
      if (!insert(p)) return false;
    }
    return true;
  }

  [[nodiscard]] const std::vector<HullFace>& faces() const { return faces_; }

 private:
  bool initial_simplex(std::array<int, 4>& out) const {
    const int n = static_cast<int>(pts_.size());
    int a = 0;
    int b = 0;
    for (int i = 1; i < n; ++i) {
      if ((pts_[i] - pts_[a]).squaredNorm() > (pts_[b] - pts_[a]).squaredNorm()) b = i;
    }
    if ((pts_[b] - pts_[a]).norm() <= eps_) return false;
    const Vec3 dir = (pts_[b] - pts_[a]).normalized();
    int c = -1;
    double best = eps_;
    for (int i = 0; i < n; ++i) {
      const double d = (pts_[i] - pts_[a]).cross(dir).norm();
      if (d > best) {
        best = d;
        c = i;
      }
    }
    if (c < 0) return false;
    const Vec3 nrm = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]).normalized();
    int d = -1;
    best = eps_;
    for (int i = 0; i < n; ++i) {
      const double dist = std::abs(nrm.dot(pts_[i] - pts_[a]));
      if (dist > best) {
        best = dist;
        d = i;
      }
    }
    if (d < 0) return false;
    out = {a, b, c, d};
    return true;
  }

  int add_face(int a, int b, int c) {
    HullFace f;
    f.v = {a, b, c};
    f.nb = {-1, -1, -1};
    f.normal = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]);
    const double len = f.normal.norm();
    if (len > 0.0) f.normal /= len;
    f.offset = f.normal.dot(pts_[a]);
    if (f.normal.dot(interior_) - f.offset > 0.0) {
      std::swap(f.v[1], f.v[2]);
      f.normal = -f.normal;
      f.offset = -f.offset;
    }
    faces_.push_back(f);
    return static_cast<int>(faces_.size()) - 1;
  }

  // Pairs neighbors for the initial tetrahedron by brute force.
  void link_all() {
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      for (int k = 0; k < 3; ++k) {
        const int a = faces_[f].v[k];
        const int b = faces_[f].v[(k + 1) % 3];
        for (std::size_t g = 0; g < faces_.size(); ++g) {
          if (g == f) continue;
          for (int m = 0; m < 3; ++m) {
            if (faces_[g].v[m] == b && faces_[g].v[(m + 1) % 3] == a) faces_[f].nb[k] = static_cast<int>(g);
          }
        }
      }
    }
  }

  [[nodiscard]] double distance(int f, int p) const { return faces_[f].normal.dot(pts_[p]) - faces_[f].offset; }

  bool insert(int p) {
    int seed = -1;
    double best = eps_;
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      if (!faces_[f].alive) continue;
      const double d = distance(static_cast<int>(f), p);
      if (d > best) {
        best = d;
        seed = static_cast<int>(f);
      }
    }
    if (seed < 0) return true;  // inside or on the hull

    // Connected visible region around the most visible face.
    std::vector<int> visible{seed};
    visible_mark_.resize(faces_.size(), 0);
    visible_mark_[seed] = 1;
    for (std::size_t q = 0; q < visible.size(); ++q) {
      for (int nb : faces_[visible[q]].nb) {
        if (nb < 0 || visible_mark_[nb]) continue;
        if (distance(nb, p) > eps_) {
          visible_mark_[nb] = 1;
          visible.push_back(nb);
        }
      }
    }

    struct Horizon {
      int a, b, outside;
    };
    std::vector<Horizon> horizon;
    for (int f : visible) {
      for (int k = 0; k < 3; ++k) {
        const int nb = faces_[f].nb[k];
        if (nb < 0) return false;
        if (!visible_mark_[nb]) horizon.push_back({faces_[f].v[k], faces_[f].v[(k + 1) % 3], nb});
      }
    }
    for (int f : visible) {
      faces_[f].alive = false;
      visible_mark_[f] = 0;
    }

    // New faces (a, b, p); index them by a and by b to stitch the fan.
    std::vector<std::pair<int, int>> by_start;
    std::vector<std::pair<int, int>> by_end;
    std::vector<int> created;
    for (const auto& e : horizon) {
      HullFace f;
      f.v = {e.a, e.b, p};
      f.nb = {e.outside, -1, -1};
      f.normal = (pts_[e.b] - pts_[e.a]).cross(pts_[p] - pts_[e.a]);
      const double len = f.normal.norm();
      if (!(len > 0.0)) return false;
      f.normal /= len;
      f.offset = f.normal.dot(pts_[e.a]);
      faces_.push_back(f);
      const int id = static_cast<int>(faces_.size()) - 1;
      created.push_back(id);
      auto& out = faces_[e.outside];
      for (int m = 0; m < 3; ++m) {
        if (out.v[m] == e.b && out.v[(m + 1) % 3] == e.a) out.nb[m] = id;
      }
      by_start.emplace_back(e.a, id);
      by_end.emplace_back(e.b, id);
    }
    std::sort(by_start.begin(), by_start.end());
    std::sort(by_end.begin(), by_end.end());
    for (std::size_t i = 1; i < by_start.size(); ++i) {
      if (by_start[i].first == by_start[i - 1].first) return false;
    }
    auto lookup = [](const std::vector<std::pair<int, int>>& v, int key) {
      const auto it = std::lower_bound(v.begin(), v.end(), std::pair{key, -1});
      return (it != v.end() && it->first == key) ? it->second : -1;
    };
    for (int id : created) {
      auto& f = faces_[id];
      // Edge b -> p borders the new face starting at b; p -> a the one ending at a.
      f.nb[1] = lookup(by_start, f.v[1]);
      f.nb[2] = lookup(by_end, f.v[0]);
      if (f.nb[1] < 0 || f.nb[2] < 0) return false;
    }
    visible_mark_.resize(faces_.size(), 0);
    return true;
  }

  std::vector<Vec3> pts_;
  double eps_;
  Vec3 interior_ = Vec3::Zero();
  std::vector<HullFace> faces_;
  std::vector<bool> on_hull_;
  std::vector<std::uint8_t> visible_mark_;
};

// ---------------------------------------------------------------------------
// Cell clipping
// ---------------------------------------------------------------------------

PowerCell unit_square_cell() {
  PowerCell c;
  c.polygon = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
  c.labels = {kSideBottom, kSideRight, kSideTop, kSideLeft};
  return c;
}

// Keeps { x : <x, a> >= b }; the new edge along the cut carries `label`.
void clip(PowerCell& cell, const Vec2& a, double b, int label) {
  const auto& poly = cell.polygon;
  const std::size_t n = poly.size();
  if (n == 0) return;
  std::vector<double> s(n);
  bool any_out = false;
  bool any_in = false;
  for (std::size_t k = 0; k < n; ++k) {
    s[k] = a.dot(poly[k]) - b;
    if (s[k] < 0.0) any_out = true;
    if (s[k] > 0.0) any_in = true;
  }
  if (!any_out) return;
  if (!any_in) {
    cell.polygon.clear();
    cell.labels.clear();
    return;
  }
  std::vector<Vec2> out;
  std::vector<int> out_labels;
  out.reserve(n + 2);
  out_labels.reserve(n + 2);
  auto emit = [&](const Vec2& p, int lab) {
    if (!out.empty() && (out.back() - p).squaredNorm() < 1e-30) {
      out_labels.back() = lab;
      return;
    }
    out.push_back(p);
    out_labels.push_back(lab);
  };
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t m = (k + 1) % n;
    const bool in_p = s[k] >= 0.0;
    const bool in_q = s[m] >= 0.0;
    if (in_p) emit(poly[k], cell.labels[k]);
    if (in_p != in_q) {
      const double t = s[k] / (s[k] - s[m]);
      const Vec2 x = poly[k] + t * (poly[m] - poly[k]);
      emit(x, in_p ? label : cell.labels[k]);
    }
  }
  while (out.size() > 1 && (out.back() - out.front()).squaredNorm() < 1e-30) {
    out.pop_back();
    out_labels.pop_back();
  }
  if (out.size() < 3) {
    out.clear();
    out_labels.clear();
  }
  cell.polygon = std::move(out);
  cell.labels = std::move(out_labels);
}

void finish_cell(PowerCell& cell) {
  const auto& p = cell.polygon;
  double a2 = 0.0;
  Vec2 c = Vec2::Zero();
  for (std::size_t k = 0; k < p.size(); ++k) {
    const Vec2& u = p[k];
    const Vec2& v = p[(k + 1) % p.size()];
    const double cr = u.x() * v.y() - u.y() * v.x();
    a2 += cr;
    c += cr * (u + v);
  }
  if (a2 > 0.0) {
    cell.area = 0.5 * a2;
    cell.centroid = c / (3.0 * a2);
  } else {
    cell.area = 0.0;
    cell.centroid = Vec2::Zero();
    cell.polygon.clear();
    cell.labels.clear();
  }
}

PowerCell build_cell(std::span<const Vec2> sites, std::span<const double> h, int i, std::span<const int> candidates) {
  PowerCell cell = unit_square_cell();
  for (int j : candidates) {
    if (j == i) continue;
    clip(cell, sites[i] - sites[j], h[j] - h[i], j);
    if (cell.polygon.empty()) break;
  }
  finish_cell(cell);
  return cell;
}

std::vector<PowerEdge> collect_edges(const std::vector<PowerCell>& cells) {
  std::vector<std::tuple<int, int, int, double>> raw;  // (min, max, from, length)
  for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
    const auto& c = cells[i];
    for (std::size_t k = 0; k < c.polygon.size(); ++k) {
      const int j = c.labels[k];
      if (j < 0) continue;
      const double len = (c.polygon[(k + 1) % c.polygon.size()] - c.polygon[k]).norm();
      raw.emplace_back(std::min(i, j), std::max(i, j), i, len);
    }
  }
  std::sort(raw.begin(), raw.end());
  std::vector<PowerEdge> edges;
  for (std::size_t a = 0; a < raw.size();) {
    std::size_t b = a;
    double from_lo = 0.0;
    double from_hi = 0.0;
    bool has_lo = false;
    bool has_hi = false;
    while (b < raw.size() && std::get<0>(raw[b]) == std::get<0>(raw[a]) && std::get<1>(raw[b]) == std::get<1>(raw[a])) {
      if (std::get<2>(raw[b]) == std::get<0>(raw[b])) {
        from_lo += std::get<3>(raw[b]);
        has_lo = true;
      } else {
        from_hi += std::get<3>(raw[b]);
        has_hi = true;
      }
      ++b;
    }
    const double len = (has_lo && has_hi) ? 0.5 * (from_lo + from_hi) : from_lo + from_hi;
    if (len > 0.0) edges.push_back({std::get<0>(raw[a]), std::get<1>(raw[a]), len});
    a = b;
  }
  return edges;
}

}  // namespace

bool regular_triangulation(std::span<const Vec2> sites, std::span<const double> heights, RegularTriangulation& out) {
  const int n = static_cast<int>(sites.size());
  std::vector<Vec3> lifted(n);
  double scale = 0.0;
  for (int i = 0; i < n; ++i) {
    lifted[i] = Vec3(sites[i].x(), sites[i].y(), -heights[i]);
    scale = std::max(scale, lifted[i].cwiseAbs().maxCoeff());
  }
  IncrementalHull hull(std::move(lifted), 1e-12 * (1.0 + scale));
  if (!hull.build()) return false;

  out.edges.clear();
  out.on_hull.assign(n, false);
  for (const auto& f : hull.faces()) {
    if (!f.alive) continue;
    if (f.normal.z() <= 1e-12) {
      for (int v : f.v) out.on_hull[v] = true;
    }
    for (int k = 0; k < 3; ++k) {
      const int a = f.v[k];
      const int b = f.v[(k + 1) % 3];
      out.edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(out.edges.begin(), out.edges.end());
  out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());
  return true;
}

PowerDiagram power_diagram(std::span<const Vec2> sites, std::span<const double> heights) {
  const int n = static_cast<int>(sites.size());
  if (n == 0) throw DataError("power diagram needs at least one site");
  if (static_cast<int>(heights.size()) != n) throw DataError("power diagram: heights size mismatch");
  for (int i = 0; i < n; ++i) {
    const Vec2& p = sites[i];
    if (!(p.x() >= 0.0 && p.x() <= 1.0 && p.y() >= 0.0 && p.y() <= 1.0)) {
      throw DataError("site " + std::to_string(i) + " lies outside the unit square");
    }
  }
  {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::tie(sites[a].x(), sites[a].y()) < std::tie(sites[b].x(), sites[b].y());
    });
    for (int k = 1; k < n; ++k) {
      if (sites[order[k]] == sites[order[k - 1]]) {
        throw DataError("duplicate sites " + std::to_string(order[k - 1]) + " and " + std::to_string(order[k]));
      }
    }
  }

  PowerDiagram d;
  d.heights.assign(heights.begin(), heights.end());
  d.cells.resize(n);

  std::vector<int> everyone(n);
  std::iota(everyone.begin(), everyone.end(), 0);

  RegularTriangulation rt;
  bool ok = regular_triangulation(sites, heights, rt);
  if (ok) {
    std::vector<std::vector<int>> adj(n);
    for (const auto& [a, b] : rt.edges) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      // Sites off the lower hull have empty cells; clipping them against
      // everyone confirms it (and catches a hull that dropped a coplanar
      // point).
      d.cells[i] = build_cell(sites, heights, i, rt.on_hull[i] ? std::span<const int>(adj[i]) : everyone);
      total += d.cells[i].area;
    }
    ok = std::abs(total - 1.0) <= 1e-11;
  }
  if (!ok) {
    d.used_fallback = true;
    for (int i = 0; i < n; ++i) d.cells[i] = build_cell(sites, heights, i, everyone);
  }
  d.edges = collect_edges(d.cells);
  return d;
}

}  // namespace ngi
