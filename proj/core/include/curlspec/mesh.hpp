#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace curlspec {

using Vec3 = std::array<double, 3>;
using Index = std::int32_t;

struct BoxSpec {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  int nx = 1;
  int ny = 1;
  int nz = 1;

  // Throws InvalidSpecError.
  void validate() const;
};

struct Edge {
  Index lo;
  Index hi;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct TetEdge {
  Index edge;
  std::int8_t sign;  // +1 iff local traversal runs lo -> hi
};

struct BoundaryFace {
  std::array<Index, 3> vertices;
  Vec3 normal;  // outward, unit length
  int region = 0;
  Index tet = -1;  // owning tet
};

// Local edge (i, j) of a tet in the fixed order used by every element routine.
inline constexpr std::array<std::array<int, 2>, 6> kTetEdgeVertices{{
    {0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

// Conforming tetrahedral mesh. Built once, then read-only.
class TetMesh {
public:
  TetMesh() = default;

  // Takes ownership of vertex and tet arrays, repairs tet orientation, builds
  // the edge table and boundary classification, and checks every invariant.
  // Region tags for boundary faces can be supplied keyed by sorted vertex ids.
  static TetMesh from_arrays(std::vector<Vec3> vertices, std::vector<std::array<Index, 4>> tets,
                             const std::vector<std::pair<std::array<Index, 3>, int>>& face_tags = {});

  std::span<const Vec3> vertices() const noexcept { return vertices_; }
  std::span<const std::array<Index, 4>> tets() const noexcept { return tets_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const std::array<TetEdge, 6>> tet_edges() const noexcept { return tet_edges_; }
  std::span<const BoundaryFace> boundary_faces() const noexcept { return boundary_faces_; }
  std::span<const std::uint8_t> boundary_vertex_flags() const noexcept { return boundary_vertex_; }
  std::span<const std::uint8_t> boundary_edge_flags() const noexcept { return boundary_edge_; }

  std::size_t num_vertices() const noexcept { return vertices_.size(); }
  std::size_t num_tets() const noexcept { return tets_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  std::size_t num_faces() const noexcept { return num_faces_; }
  std::size_t num_boundary_faces() const noexcept { return boundary_faces_.size(); }
  std::size_t num_interior_vertices() const noexcept;
  std::size_t num_boundary_edges() const noexcept;

  std::array<Vec3, 4> tet_coords(std::size_t t) const;
  double tet_volume(std::size_t t) const;

  // Longest edge of the mesh; used as the mesh size h.
  double max_edge_length() const noexcept { return h_max_; }

  // V - E + F - T.
  long euler_characteristic() const noexcept;

  // True when every vertex lies on the inner side of every boundary face plane.
  bool is_convex(double rel_tol = 1e-10) const;

  // Throws ValidationError describing the first violated invariant.
  void check_invariants() const;

  // Edge id for the sorted vertex pair, or -1.
  Index find_edge(Index a, Index b) const;

  // Distinct outward normals of the boundary planes touching vertex v
  // (normals closer than `tol` merged).
  std::vector<Vec3> vertex_boundary_normals(Index v, double tol = 1e-8) const;

  std::string descriptor;  // free-form, e.g. "box(pi,pi,pi,8,8,8)"

private:
  void index_edges();
  void classify_boundary(const std::vector<std::pair<std::array<Index, 3>, int>>& face_tags);

  std::vector<Vec3> vertices_;
  std::vector<std::array<Index, 4>> tets_;
  std::vector<Edge> edges_;
  std::vector<std::array<TetEdge, 6>> tet_edges_;
  std::vector<BoundaryFace> boundary_faces_;
  std::vector<std::uint8_t> boundary_vertex_;
  std::vector<std::uint8_t> boundary_edge_;
  std::vector<std::vector<Index>> vertex_faces_;  // boundary faces per vertex
  std::size_t num_faces_ = 0;
  double h_max_ = 0.0;
};

// Kuhn/Freudenthal split of an nx x ny x nz grid on [0,a]x[0,b]x[0,c]; every
// cell becomes 6 tets sharing the (0,0,0)-(1,1,1) diagonal. Boundary face
// regions are 1..6 for x=0, x=a, y=0, y=b, z=0, z=c.
TetMesh build_box_mesh(const BoxSpec& spec);

// Box [0,a]x[0,b]x[0,c] with the cells of the quadrant x > a/2, y > b/2 removed
// (prism over an L-shaped section). nx, ny must be even.
TetMesh build_lshape_mesh(const BoxSpec& spec);

// Box with the octant x > a/2, y > b/2, z > c/2 removed. All counts even.
TetMesh build_fichera_mesh(const BoxSpec& spec);

double signed_volume(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3);

}  // namespace curlspec
