#include "ngi/mesh.hpp"

#include "ngi/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>

namespace ngi {

namespace {

constexpr double kDegenerateAreaFactor = 1e-12;

std::string face_str(int f) { return "triangle " + std::to_string(f); }

}  // namespace

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

Mesh::Mesh(std::vector<Vec3> positions, std::vector<Triangle> triangles)
    : positions_(std::move(positions)), triangles_(std::move(triangles)) {
  const int nv = num_vertices();
  const int nf = num_triangles();

  for (int f = 0; f < nf; ++f) {
    const auto& t = triangles_[f];
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= nv) {
        throw DataError(face_str(f) + " references vertex " + std::to_string(t[k]) + " out of range");
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw DataError(face_str(f) + " repeats a vertex");
    }
  }

  const double diag = bbox_diagonal();
  const double min_area = kDegenerateAreaFactor * diag * diag;
  for (int f = 0; f < nf; ++f) {
    if (!(triangle_area(f) >= min_area) || triangle_area(f) == 0.0) {
      throw DataError(face_str(f) + " is degenerate (area " + std::to_string(triangle_area(f)) + ")");
    }
  }

  // Pair halfedges through a sort on undirected edge keys.
  const int nh = 3 * nf;
  std::vector<std::tuple<int, int, int>> keys;
  keys.reserve(nh);
  for (int h = 0; h < nh; ++h) {
    const int a = tail(h);
    const int b = head(h);
    keys.emplace_back(std::min(a, b), std::max(a, b), h);
  }
  std::sort(keys.begin(), keys.end());

  twin_.assign(nh, kNoHalfedge);
  num_edges_ = 0;
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i;
    while (j < keys.size() && std::get<0>(keys[j]) == std::get<0>(keys[i]) &&
           std::get<1>(keys[j]) == std::get<1>(keys[i])) {
      ++j;
    }
    ++num_edges_;
    const auto count = j - i;
    if (count > 2) {
      throw DataError("non-manifold edge (" + std::to_string(std::get<0>(keys[i])) + ", " +
                      std::to_string(std::get<1>(keys[i])) + ") shared by " + std::to_string(count) +
                      " triangles");
    }
    if (count == 2) {
      const int h0 = std::get<2>(keys[i]);
      const int h1 = std::get<2>(keys[i + 1]);
      if (tail(h0) == tail(h1)) {
        throw DataError("inconsistent orientation across edge (" + std::to_string(tail(h0)) + ", " +
                        std::to_string(head(h0)) + ")");
      }
      twin_[h0] = h1;
      twin_[h1] = h0;
    }
    i = j;
  }

  outgoing_.assign(nv, kNoHalfedge);
  boundary_vertex_.assign(nv, 0);
  for (int h = 0; h < nh; ++h) {
    const int v = tail(h);
    if (twin_[h] == kNoHalfedge) {
      boundary_vertex_[v] = 1;
      outgoing_[v] = h;
    } else if (outgoing_[v] == kNoHalfedge) {
      outgoing_[v] = h;
    }
  }
  for (int h = 0; h < nh; ++h) {
    if (twin_[h] == kNoHalfedge) boundary_vertex_[head(h)] = 1;
  }
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

std::vector<int> Mesh::neighbors(int v) const {
  std::vector<int> out;
  // For boundary vertices outgoing_ is the boundary halfedge, so a single
  // sweep covers the whole fan.
  const int start = outgoing_[v];
  if (start == kNoHalfedge) return out;
  int h = start;
  do {
    out.push_back(head(h));
    const int p = prev(h);
    if (twin_[p] == kNoHalfedge) {
      out.push_back(tail(p));
      break;
    }
    h = twin_[p];
  } while (h != start);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::vector<int>> Mesh::boundary_loops() const {
  const int nh = num_halfedges();
  std::vector<std::vector<int>> out_boundary(num_vertices());
  for (int h = 0; h < nh; ++h) {
    if (twin_[h] == kNoHalfedge) out_boundary[tail(h)].push_back(h);
  }
  std::vector<std::uint8_t> used(nh, 0);
  std::vector<std::vector<int>> loops;
  for (int h0 = 0; h0 < nh; ++h0) {
    if (twin_[h0] != kNoHalfedge || used[h0]) continue;
    std::vector<int> loop;
    int h = h0;
    while (!used[h]) {
      used[h] = 1;
      loop.push_back(tail(h));
      int nxt = kNoHalfedge;
      for (int cand : out_boundary[head(h)]) {
        if (!used[cand]) {
          nxt = cand;
          break;
        }
      }
      if (nxt == kNoHalfedge) break;
      h = nxt;
    }
    auto smallest = std::min_element(loop.begin(), loop.end());
    std::rotate(loop.begin(), smallest, loop.end());
    loops.push_back(std::move(loop));
  }
  std::sort(loops.begin(), loops.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return loops;
}

double Mesh::triangle_area(int f) const {
  const auto& t = triangles_[f];
  return 0.5 * (positions_[t[1]] - positions_[t[0]]).cross(positions_[t[2]] - positions_[t[0]]).norm();
}

Vec3 Mesh::triangle_normal(int f) const {
  const auto& t = triangles_[f];
  return (positions_[t[1]] - positions_[t[0]]).cross(positions_[t[2]] - positions_[t[0]]).normalized();
}

double Mesh::total_area() const {
  double a = 0.0;
  for (int f = 0; f < num_triangles(); ++f) a += triangle_area(f);
  return a;
}

std::pair<Vec3, Vec3> Mesh::bounding_box() const {
  if (positions_.empty()) return {Vec3::Zero(), Vec3::Zero()};
  Vec3 lo = positions_.front();
  Vec3 hi = positions_.front();
  for (const auto& p : positions_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return {lo, hi};
}

double Mesh::bbox_diagonal() const {
  const auto [lo, hi] = bounding_box();
  return (hi - lo).norm();
}

// ---------------------------------------------------------------------------
// Topology
// ---------------------------------------------------------------------------

TopologyReport validate_topology(const Mesh& mesh) {
  TopologyReport r;
  r.euler_characteristic = mesh.num_vertices() - mesh.num_edges() + mesh.num_triangles();
  r.boundary_loops = static_cast<int>(mesh.boundary_loops().size());
  r.genus = (2 - r.euler_characteristic - r.boundary_loops) / 2;
  r.is_disk = r.euler_characteristic == 1 && r.boundary_loops == 1;
  return r;
}

namespace {

// Hop distances and parents from `source`; neighbor lists are visited in
// ascending index order so the result is deterministic.
void bfs(const std::vector<std::vector<int>>& adj, int source, std::vector<int>& dist, std::vector<int>& parent) {
  dist.assign(adj.size(), -1);
  parent.assign(adj.size(), -1);
  std::deque<int> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int w : adj[v]) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        parent[w] = v;
        queue.push_back(w);
      }
    }
  }
}

int farthest(const std::vector<int>& dist) {
  int best = 0;
  for (int v = 0; v < static_cast<int>(dist.size()); ++v) {
    if (dist[v] > dist[best]) best = v;
  }
  return best;
}

}  // namespace

std::vector<int> cut_path(const Mesh& mesh) {
  const auto topo = validate_topology(mesh);
  if (topo.boundary_loops != 0 || topo.euler_characteristic != 2) {
    throw DataError("cut_to_disk requires a closed genus-0 mesh (chi = " +
                    std::to_string(topo.euler_characteristic) +
                    ", boundary loops = " + std::to_string(topo.boundary_loops) + ")");
  }
  const int nv = mesh.num_vertices();
  std::vector<std::vector<int>> adj(nv);
  for (int v = 0; v < nv; ++v) adj[v] = mesh.neighbors(v);

  std::vector<int> dist;
  std::vector<int> parent;
  bfs(adj, 0, dist, parent);
  const int a = farthest(dist);
  bfs(adj, a, dist, parent);
  const int b = farthest(dist);

  std::vector<int> path;
  for (int v = b; v != -1; v = parent[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());

  // A single-edge cut cannot be expressed with indexed triangles (the two
  // sides would re-pair), so extend it by one more edge.
  if (path.size() == 2) {
    const int end = path.back();
    int ext = -1;
    for (int w : adj[end]) {
      if (w != path.front()) {
        ext = w;
        break;
      }
    }
    path.push_back(ext);
  }
  return path;
}

Mesh cut_to_disk(const Mesh& mesh) {
  const auto path = cut_path(mesh);
  std::vector<Vec3> positions = mesh.positions();
  std::vector<Triangle> triangles = mesh.triangles();

  for (std::size_t k = 1; k + 1 < path.size(); ++k) {
    const int v = path[k];
    const int before = path[k - 1];
    const int after = path[k + 1];
    const int copy = static_cast<int>(positions.size());
    positions.push_back(positions[v]);

    // Find the halfedge v -> after and sweep the fan until v -> before.
    int h = mesh.outgoing(v);
    while (mesh.head(h) != after) h = mesh.twin(Mesh::prev(h));
    while (mesh.head(h) != before) {
      auto& t = triangles[Mesh::face(h)];
      for (int& idx : t) {
        if (idx == v) idx = copy;
      }
      h = mesh.twin(Mesh::prev(h));
    }
  }
  return Mesh(std::move(positions), std::move(triangles));
}

// ---------------------------------------------------------------------------
// Measures
// ---------------------------------------------------------------------------

VertexMeasure vertex_measures(const Mesh& mesh) {
  const int nv = mesh.num_vertices();
  VertexMeasure m;
  m.nu.assign(nv, 0.0);
  m.normals.assign(nv, Vec3::Zero());
  double total = 0.0;
  for (int f = 0; f < mesh.num_triangles(); ++f) {
    const auto& t = mesh.triangle(f);
    const Vec3 cross = (mesh.position(t[1]) - mesh.position(t[0])).cross(mesh.position(t[2]) - mesh.position(t[0]));
    const double area = 0.5 * cross.norm();
    total += area;
    for (int v : t) {
      m.nu[v] += area / 3.0;
      m.normals[v] += 0.5 * cross;
    }
  }
  if (!(total > 0.0)) throw DataError("vertex_measures: mesh has zero total area");
  for (int v = 0; v < nv; ++v) {
    if (!(m.nu[v] > 0.0)) throw DataError("vertex_measures: vertex " + std::to_string(v) + " has no incident area");
    m.nu[v] /= total;
    m.normals[v].normalize();
  }
  // Renormalize so the sum is 1 to rounding.
  const double sum = std::accumulate(m.nu.begin(), m.nu.end(), 0.0);
  for (double& x : m.nu) x /= sum;
  return m;
}

}  // namespace ngi
