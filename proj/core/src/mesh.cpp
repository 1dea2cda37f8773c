#include "curlspec/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "curlspec/error.hpp"

namespace curlspec {

namespace {

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

std::array<Index, 3> sorted3(Index a, Index b, Index c) {
  std::array<Index, 3> f{a, b, c};
  std::sort(f.begin(), f.end());
  return f;
}

// Tag 1..6 for normals along -x,+x,-y,+y,-z,+z; 0 otherwise.
int axis_region(const Vec3& n) {
  for (int d = 0; d < 3; ++d) {
    if (std::abs(std::abs(n[d]) - 1.0) < 1e-12) return 2 * d + (n[d] > 0 ? 2 : 1);
  }
  return 0;
}

struct FaceRef {
  std::array<Index, 3> key;
  Index tet;
  int opposite;  // local index of the vertex not on the face
};

}  // namespace

double signed_volume(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3) {
  return dot(sub(p1, p0), cross(sub(p2, p0), sub(p3, p0))) / 6.0;
}

void BoxSpec::validate() const {
  if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0) || !std::isfinite(a) || !std::isfinite(b) ||
      !std::isfinite(c)) {
    throw InvalidSpecError("box side lengths must be positive and finite");
  }
  if (nx < 1 || ny < 1 || nz < 1) {
    throw InvalidSpecError("box subdivision counts must be >= 1");
  }
}

TetMesh TetMesh::from_arrays(std::vector<Vec3> vertices, std::vector<std::array<Index, 4>> tets,
                             const std::vector<std::pair<std::array<Index, 3>, int>>& face_tags) {
  if (tets.empty()) throw ValidationError("no tetrahedra");
  TetMesh m;
  m.vertices_ = std::move(vertices);
  m.tets_ = std::move(tets);
  const auto nv = static_cast<Index>(m.vertices_.size());

  for (auto& t : m.tets_) {
    for (Index v : t) {
      if (v < 0 || v >= nv) throw ValidationError("tet references a vertex out of range");
    }
    std::array<Index, 4> s = t;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
      throw ValidationError("tet with repeated vertex");
    }
    const auto& p = m.vertices_;
    double vol = signed_volume(p[t[0]], p[t[1]], p[t[2]], p[t[3]]);
    double longest = 0.0;
    for (const auto& e : kTetEdgeVertices) {
      longest = std::max(longest, norm(sub(p[t[e[0]]], p[t[e[1]]])));
    }
    m.h_max_ = std::max(m.h_max_, longest);
    if (std::abs(vol) < 1e-14 * longest * longest * longest) {
      throw DegenerateElementError("degenerate tetrahedron (volume below 1e-14 h^3)");
    }
    if (vol < 0.0) std::swap(t[2], t[3]);
  }

  m.index_edges();
  m.classify_boundary(face_tags);
  m.check_invariants();
  return m;
}

void TetMesh::index_edges() {
  std::vector<Edge> all;
  all.reserve(tets_.size() * 6);
  for (const auto& t : tets_) {
    for (const auto& e : kTetEdgeVertices) {
      Index a = t[e[0]];
      Index b = t[e[1]];
      all.push_back({std::min(a, b), std::max(a, b)});
    }
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  edges_ = std::move(all);

  tet_edges_.resize(tets_.size());
  for (std::size_t t = 0; t < tets_.size(); ++t) {
    for (std::size_t le = 0; le < 6; ++le) {
      Index a = tets_[t][kTetEdgeVertices[le][0]];
      Index b = tets_[t][kTetEdgeVertices[le][1]];
      tet_edges_[t][le] = {find_edge(a, b), static_cast<std::int8_t>(a < b ? 1 : -1)};
    }
  }
}

Index TetMesh::find_edge(Index a, Index b) const {
  Edge key{std::min(a, b), std::max(a, b)};
  auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
  if (it == edges_.end() || *it != key) return -1;
  return static_cast<Index>(it - edges_.begin());
}

void TetMesh::classify_boundary(const std::vector<std::pair<std::array<Index, 3>, int>>& face_tags) {
  static constexpr std::array<std::array<int, 3>, 4> kFaces{{{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}};
  std::vector<FaceRef> faces;
  faces.reserve(tets_.size() * 4);
  for (std::size_t t = 0; t < tets_.size(); ++t) {
    const auto& tv = tets_[t];
    for (int f = 0; f < 4; ++f) {
      faces.push_back({sorted3(tv[kFaces[f][0]], tv[kFaces[f][1]], tv[kFaces[f][2]]),
                       static_cast<Index>(t), f});
    }
  }
  std::sort(faces.begin(), faces.end(), [](const FaceRef& x, const FaceRef& y) {
    return std::tie(x.key, x.tet) < std::tie(y.key, y.tet);
  });

  std::map<std::array<Index, 3>, int> tags;
  for (const auto& [key, region] : face_tags) tags[sorted3(key[0], key[1], key[2])] = region;

  boundary_faces_.clear();
  num_faces_ = 0;
  std::size_t i = 0;
  while (i < faces.size()) {
    std::size_t j = i;
    while (j < faces.size() && faces[j].key == faces[i].key) ++j;
    const std::size_t count = j - i;
    ++num_faces_;
    if (count > 2) {
      throw ValidationError("non-conforming mesh: face shared by more than two tetrahedra");
    }
    if (count == 2) tags.erase(faces[i].key);  // interface triangle, tag not needed
    if (count == 1) {
      const FaceRef& f = faces[i];
      const auto& tv = tets_[f.tet];
      std::array<Index, 3> fv{tv[kFaces[f.opposite][0]], tv[kFaces[f.opposite][1]],
                              tv[kFaces[f.opposite][2]]};
      const Vec3& p0 = vertices_[fv[0]];
      Vec3 n = cross(sub(vertices_[fv[1]], p0), sub(vertices_[fv[2]], p0));
      if (dot(n, sub(vertices_[tv[f.opposite]], p0)) > 0.0) {
        std::swap(fv[1], fv[2]);
        n = {-n[0], -n[1], -n[2]};
      }
      const double len = norm(n);
      n = {n[0] / len, n[1] / len, n[2] / len};
      BoundaryFace bf{fv, n, 0, f.tet};
      if (auto it = tags.find(f.key); it != tags.end()) {
        bf.region = it->second;
        tags.erase(it);
      } else {
        bf.region = axis_region(n);
      }
      boundary_faces_.push_back(bf);
    }
    i = j;
  }
  if (!tags.empty()) {
    throw ValidationError("non-conforming mesh: dangling face (triangle is not a face of any tetrahedron)");
  }

  // Closed boundary surface: each boundary-face edge is used by exactly two boundary faces.
  std::vector<Edge> face_edges;
  face_edges.reserve(boundary_faces_.size() * 3);
  for (const auto& bf : boundary_faces_) {
    for (int k = 0; k < 3; ++k) {
      Index a = bf.vertices[k];
      Index b = bf.vertices[(k + 1) % 3];
      face_edges.push_back({std::min(a, b), std::max(a, b)});
    }
  }
  std::sort(face_edges.begin(), face_edges.end());
  for (std::size_t k = 0; k < face_edges.size();) {
    std::size_t l = k;
    while (l < face_edges.size() && face_edges[l] == face_edges[k]) ++l;
    if (l - k != 2) throw ValidationError("non-conforming mesh: dangling face (open boundary surface)");
    k = l;
  }

  boundary_vertex_.assign(vertices_.size(), 0);
  boundary_edge_.assign(edges_.size(), 0);
  vertex_faces_.assign(vertices_.size(), {});
  for (std::size_t f = 0; f < boundary_faces_.size(); ++f) {
    const auto& bf = boundary_faces_[f];
    for (int k = 0; k < 3; ++k) {
      boundary_vertex_[bf.vertices[k]] = 1;
      vertex_faces_[bf.vertices[k]].push_back(static_cast<Index>(f));
      boundary_edge_[find_edge(bf.vertices[k], bf.vertices[(k + 1) % 3])] = 1;
    }
  }
}

std::size_t TetMesh::num_interior_vertices() const noexcept {
  return static_cast<std::size_t>(std::count(boundary_vertex_.begin(), boundary_vertex_.end(), 0));
}

std::size_t TetMesh::num_boundary_edges() const noexcept {
  return static_cast<std::size_t>(std::count(boundary_edge_.begin(), boundary_edge_.end(), 1));
}

std::array<Vec3, 4> TetMesh::tet_coords(std::size_t t) const {
  const auto& tv = tets_[t];
  return {vertices_[tv[0]], vertices_[tv[1]], vertices_[tv[2]], vertices_[tv[3]]};
}

double TetMesh::tet_volume(std::size_t t) const {
  auto p = tet_coords(t);
  return signed_volume(p[0], p[1], p[2], p[3]);
}

long TetMesh::euler_characteristic() const noexcept {
  return static_cast<long>(vertices_.size()) - static_cast<long>(edges_.size()) +
         static_cast<long>(num_faces_) - static_cast<long>(tets_.size());
}

bool TetMesh::is_convex(double rel_tol) const {
  // Deduplicate supporting planes before scanning vertices.
  std::vector<std::pair<Vec3, double>> planes;
  for (const auto& bf : boundary_faces_) {
    double offset = dot(bf.normal, vertices_[bf.vertices[0]]);
    bool seen = false;
    for (const auto& [n, d] : planes) {
      if (norm(sub(n, bf.normal)) < 1e-9 && std::abs(d - offset) < 1e-9 * std::max(1.0, h_max_)) {
        seen = true;
        break;
      }
    }
    if (!seen) planes.emplace_back(bf.normal, offset);
  }
  double diam = 0.0;
  for (const auto& v : vertices_) diam = std::max(diam, norm(sub(v, vertices_.front())));
  const double tol = rel_tol * std::max(diam, 1e-300);
  for (const auto& [n, d] : planes) {
    for (const auto& v : vertices_) {
      if (dot(n, v) - d > tol) return false;
    }
  }
  return true;
}

std::vector<Vec3> TetMesh::vertex_boundary_normals(Index v, double tol) const {
  std::vector<Vec3> out;
  for (Index f : vertex_faces_[v]) {
    const Vec3& n = boundary_faces_[f].normal;
    bool seen = std::any_of(out.begin(), out.end(), [&](const Vec3& m) { return norm(sub(m, n)) < tol; });
    if (!seen) out.push_back(n);
  }
  return out;
}

void TetMesh::check_invariants() const {
  for (std::size_t t = 0; t < tets_.size(); ++t) {
    if (!(tet_volume(t) > 0.0)) throw ValidationError("tet with non-positive volume");
  }
  for (std::size_t e = 1; e < edges_.size(); ++e) {
    if (!(edges_[e - 1] < edges_[e])) throw ValidationError("edge table not strictly sorted");
  }
  for (const auto& e : edges_) {
    if (!(e.lo < e.hi)) throw ValidationError("edge with lo >= hi");
  }
  for (const auto& bf : boundary_faces_) {
    if (std::abs(norm(bf.normal) - 1.0) > 1e-12) throw ValidationError("boundary normal not unit");
    const auto& tv = tets_[bf.tet];
    Vec3 centroid{0, 0, 0};
    for (Index v : tv) {
      for (int d = 0; d < 3; ++d) centroid[d] += 0.25 * vertices_[v][d];
    }
    if (dot(bf.normal, sub(vertices_[bf.vertices[0]], centroid)) <= 0.0) {
      throw ValidationError("boundary normal points into the adjacent tet");
    }
  }
}

namespace {

// Emits the 6 Kuhn tets of every grid cell accepted by `keep`.
template <class Keep>
TetMesh kuhn_grid(const BoxSpec& spec, Keep keep, const std::string& name) {
  spec.validate();
  const int nx = spec.nx, ny = spec.ny, nz = spec.nz;
  auto vid = [&](int i, int j, int k) { return static_cast<Index>(i + (nx + 1) * (j + (ny + 1) * k)); };

  std::vector<Vec3> vertices;
  vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1) * (nz + 1));
  for (int k = 0; k <= nz; ++k) {
    for (int j = 0; j <= ny; ++j) {
      for (int i = 0; i <= nx; ++i) {
        vertices.push_back({spec.a * i / nx, spec.b * j / ny, spec.c * k / nz});
      }
    }
  }

  static constexpr std::array<std::array<int, 3>, 6> kPerms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  std::vector<std::array<Index, 4>> tets;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        if (!keep(i, j, k)) continue;
        for (const auto& perm : kPerms) {
          std::array<int, 3> at{i, j, k};
          std::array<Index, 4> tet{};
          tet[0] = vid(at[0], at[1], at[2]);
          for (int s = 0; s < 3; ++s) {
            ++at[perm[s]];
            tet[s + 1] = vid(at[0], at[1], at[2]);
          }
          tets.push_back(tet);
        }
      }
    }
  }

  // Drop vertices not referenced by any kept cell.
  std::vector<Index> remap(vertices.size(), -1);
  for (const auto& t : tets) {
    for (Index v : t) remap[v] = 0;
  }
  std::vector<Vec3> used;
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    if (remap[v] == 0) {
      remap[v] = static_cast<Index>(used.size());
      used.push_back(vertices[v]);
    }
  }
  for (auto& t : tets) {
    for (Index& v : t) v = remap[v];
  }

  TetMesh mesh = TetMesh::from_arrays(std::move(used), std::move(tets));
  std::ostringstream os;
  os.precision(17);
  os << name << "(" << spec.a << "," << spec.b << "," << spec.c << "," << nx << "," << ny << ","
     << nz << ")";
  mesh.descriptor = os.str();
  return mesh;
}

}  // namespace

TetMesh build_box_mesh(const BoxSpec& spec) {
  return kuhn_grid(spec, [](int, int, int) { return true; }, "box");
}

TetMesh build_lshape_mesh(const BoxSpec& spec) {
  spec.validate();
  if (spec.nx % 2 || spec.ny % 2) throw InvalidSpecError("L-shape needs even nx and ny");
  const int hx = spec.nx / 2, hy = spec.ny / 2;
  return kuhn_grid(spec, [=](int i, int j, int) { return !(i >= hx && j >= hy); }, "lshape");
}

TetMesh build_fichera_mesh(const BoxSpec& spec) {
  spec.validate();
  if (spec.nx % 2 || spec.ny % 2 || spec.nz % 2) throw InvalidSpecError("Fichera corner needs even counts");
  const int hx = spec.nx / 2, hy = spec.ny / 2, hz = spec.nz / 2;
  return kuhn_grid(spec, [=](int i, int j, int k) { return !(i >= hx && j >= hy && k >= hz); }, "fichera");
}

}  // namespace curlspec
