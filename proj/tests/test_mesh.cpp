#include <gtest/gtest.h>

#include <map>

#include "curlspec/error.hpp"
#include "curlspec/mesh.hpp"
#include "curlspec/mesh_json.hpp"
#include "support.hpp"

using namespace curlspec;
using testing_support::kPi;

namespace {

Eigen::Vector3d centroid(const TetMesh& m, std::size_t t) {
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& p : m.tet_coords(t)) c += Eigen::Vector3d(p[0], p[1], p[2]) / 4.0;
  return c;
}

// Barycentric coordinates of x in tet t.
Eigen::Vector4d barycentric(const TetMesh& m, std::size_t t, const Eigen::Vector3d& x) {
  const auto p = m.tet_coords(t);
  Eigen::Matrix4d A;
  for (int a = 0; a < 4; ++a) A.col(a) << p[a][0], p[a][1], p[a][2], 1.0;
  return A.fullPivLu().solve(Eigen::Vector4d(x[0], x[1], x[2], 1.0));
}

}  // namespace

TEST(BoxMesh, SingleCubeHasNineteenEdges) {
  const TetMesh m = build_box_mesh({kPi, kPi, kPi, 1, 1, 1});
  EXPECT_EQ(m.num_vertices(), 8u);
  EXPECT_EQ(m.num_tets(), 6u);
  // 12 cube edges + 6 face diagonals + 1 body diagonal, and a direct count.
  EXPECT_EQ(m.num_edges(), 12u + 6u + 1u);
  EXPECT_EQ(testing_support::brute_edges(m).size(), 19u);
}

TEST(BoxMesh, TwoByTwoByTwoGridArithmetic) {
  const TetMesh m = build_box_mesh({1, 1, 1, 2, 2, 2});
  EXPECT_EQ(m.num_vertices(), 27u);
  EXPECT_EQ(m.num_tets(), 48u);
  EXPECT_EQ(m.num_interior_vertices(), 1u);
}

TEST(BoxMesh, CountsVolumesAndEuler) {
  for (const BoxSpec s : {BoxSpec{1, 2, 3, 1, 2, 3}, BoxSpec{kPi, kPi, kPi, 3, 3, 3}, BoxSpec{0.5, 1, 2, 4, 1, 2}}) {
    const TetMesh m = build_box_mesh(s);
    EXPECT_EQ(m.num_vertices(), static_cast<std::size_t>((s.nx + 1) * (s.ny + 1) * (s.nz + 1)));
    EXPECT_EQ(m.num_tets(), static_cast<std::size_t>(6 * s.nx * s.ny * s.nz));
    EXPECT_EQ(m.euler_characteristic(), 1);
    double vol = 0.0;
    for (std::size_t t = 0; t < m.num_tets(); ++t) {
      EXPECT_GT(m.tet_volume(t), 0.0);
      vol += m.tet_volume(t);
    }
    EXPECT_NEAR(vol, s.a * s.b * s.c, 1e-12 * s.a * s.b * s.c);
    EXPECT_TRUE(m.is_convex());
  }
}

TEST(BoxMesh, InvalidSpecsThrow) {
  EXPECT_THROW(build_box_mesh({0, 1, 1, 1, 1, 1}), InvalidSpecError);
  EXPECT_THROW(build_box_mesh({1, -1, 1, 1, 1, 1}), InvalidSpecError);
  EXPECT_THROW(build_box_mesh({1, 1, 1, 0, 1, 1}), InvalidSpecError);
  EXPECT_THROW(build_box_mesh({1, 1, 1, 1, 1, -2}), InvalidSpecError);
}

TEST(BoxMesh, EdgesSortedUniqueAndMatchBruteForce) {
  const TetMesh m = build_box_mesh({1, 1, 1, 3, 2, 2});
  const auto e = m.edges();
  for (std::size_t i = 0; i < e.size(); ++i) {
    EXPECT_LT(e[i].lo, e[i].hi);
    if (i > 0) {
      EXPECT_TRUE(e[i - 1] < e[i]);
    }
  }
  const auto brute = testing_support::brute_edges(m);
  ASSERT_EQ(brute.size(), e.size());
  std::size_t i = 0;
  for (const auto& [lo, hi] : brute) {
    EXPECT_EQ(e[i].lo, lo);
    EXPECT_EQ(e[i].hi, hi);
    ++i;
  }
}

TEST(BoxMesh, TetEdgeSignsFollowGlobalOrder) {
  const TetMesh m = build_box_mesh({1, 1, 1, 2, 2, 2});
  for (std::size_t t = 0; t < m.num_tets(); ++t) {
    const auto& tv = m.tets()[t];
    for (int k = 0; k < 6; ++k) {
      const Index a = tv[kTetEdgeVertices[k][0]];
      const Index b = tv[kTetEdgeVertices[k][1]];
      const auto& te = m.tet_edges()[t][k];
      EXPECT_EQ(m.edges()[te.edge], (Edge{std::min(a, b), std::max(a, b)}));
      EXPECT_EQ(te.sign, a < b ? 1 : -1);
    }
  }
}

TEST(BoxMesh, FacesSharedByAtMostTwoTets) {
  const TetMesh m = build_box_mesh({1, 1, 1, 2, 3, 2});
  std::map<std::array<Index, 3>, int> uses;
  for (const auto& t : m.tets()) {
    for (int skip = 0; skip < 4; ++skip) {
      std::array<Index, 3> f{};
      int k = 0;
      for (int i = 0; i < 4; ++i) {
        if (i != skip) f[k++] = t[i];
      }
      std::sort(f.begin(), f.end());
      ++uses[f];
    }
  }
  std::size_t boundary = 0;
  for (const auto& [f, n] : uses) {
    EXPECT_TRUE(n == 1 || n == 2);
    boundary += n == 1;
  }
  EXPECT_EQ(boundary, m.num_boundary_faces());
  EXPECT_EQ(uses.size(), m.num_faces());
}

TEST(BoxMesh, BoundaryNormalsUnitAndOutward) {
  const TetMesh m = build_box_mesh({1, 2, 3, 2, 2, 3});
  for (const auto& f : m.boundary_faces()) {
    const Eigen::Vector3d n(f.normal[0], f.normal[1], f.normal[2]);
    EXPECT_NEAR(n.norm(), 1.0, 1e-12);
    const auto& p = m.vertices()[f.vertices[0]];
    EXPECT_GT(n.dot(Eigen::Vector3d(p[0], p[1], p[2]) - centroid(m, static_cast<std::size_t>(f.tet))), 0.0);
    EXPECT_GE(f.region, 1);
    EXPECT_LE(f.region, 6);
  }
}

TEST(BoxMesh, BoundaryEdgesMatchFaceScan) {
  const TetMesh m = build_box_mesh({1, 1, 1, 2, 2, 2});
  std::set<std::pair<int, int>> from_faces;
  for (const auto& f : m.boundary_faces()) {
    for (int i = 0; i < 3; ++i) {
      const int a = f.vertices[i], b = f.vertices[(i + 1) % 3];
      from_faces.insert({std::min(a, b), std::max(a, b)});
    }
  }
  std::size_t flagged = 0;
  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    const bool in_face = from_faces.count({m.edges()[e].lo, m.edges()[e].hi}) > 0;
    EXPECT_EQ(static_cast<bool>(m.boundary_edge_flags()[e]), in_face);
    flagged += m.boundary_edge_flags()[e];
  }
  EXPECT_EQ(flagged, m.num_boundary_edges());
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    EXPECT_EQ(static_cast<bool>(m.boundary_vertex_flags()[v]),
              testing_support::on_box_boundary(m.vertices()[v], 1, 1, 1));
  }
}

TEST(BoxMesh, RefinementIsNested) {
  const TetMesh coarse = build_box_mesh({kPi, kPi, kPi, 2, 2, 2});
  const TetMesh fine = build_box_mesh({kPi, kPi, kPi, 4, 4, 4});
  std::vector<int> children(coarse.num_tets(), 0);
  for (std::size_t t = 0; t < fine.num_tets(); ++t) {
    const Eigen::Vector3d x = centroid(fine, t);
    int owner = -1;
    for (std::size_t c = 0; c < coarse.num_tets(); ++c) {
      if (barycentric(coarse, c, x).minCoeff() > -1e-12) {
        owner = static_cast<int>(c);
        break;
      }
    }
    ASSERT_GE(owner, 0);
    ++children[owner];
    // The whole fine tet lies in the coarse tet of its centroid.
    for (const auto& p : fine.tet_coords(t)) {
      EXPECT_GT(barycentric(coarse, owner, Eigen::Vector3d(p[0], p[1], p[2])).minCoeff(), -1e-12);
    }
  }
  for (int n : children) EXPECT_EQ(n, 8);
}

TEST(BoxMesh, SerializationIsDeterministic) {
  const BoxSpec s{1, 2, 3, 3, 2, 1};
  EXPECT_EQ(serialize_mesh(build_box_mesh(s)), serialize_mesh(build_box_mesh(s)));
}

TEST(Fixtures, LShapeAndFichera) {
  const TetMesh l = build_lshape_mesh({1, 1, 1, 4, 4, 2});
  EXPECT_EQ(l.num_tets(), 6u * (16 - 4) * 2);
  EXPECT_EQ(l.euler_characteristic(), 1);
  EXPECT_FALSE(l.is_convex());
  const TetMesh f = build_fichera_mesh({1, 1, 1, 2, 2, 2});
  EXPECT_EQ(f.num_tets(), 6u * 7);
  EXPECT_EQ(f.euler_characteristic(), 1);
  EXPECT_FALSE(f.is_convex());
  EXPECT_THROW(build_lshape_mesh({1, 1, 1, 3, 4, 2}), InvalidSpecError);
  EXPECT_THROW(build_fichera_mesh({1, 1, 1, 2, 2, 1}), InvalidSpecError);
}

TEST(FromArrays, SingleTetAllSignsPositive) {
  const auto m = TetMesh::from_arrays({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {{0, 1, 2, 3}});
  EXPECT_EQ(m.num_edges(), 6u);
  for (const auto& te : m.tet_edges()[0]) EXPECT_EQ(te.sign, 1);
  EXPECT_EQ(m.num_boundary_faces(), 4u);
  EXPECT_EQ(m.euler_characteristic(), 1);
}

TEST(FromArrays, TwoTetsSharingAFace) {
  const auto m = TetMesh::from_arrays({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}},
                                      {{0, 1, 2, 3}, {1, 2, 3, 4}});
  EXPECT_EQ(m.num_edges(), 9u);
  EXPECT_EQ(m.num_faces(), 7u);
  EXPECT_EQ(m.num_boundary_faces(), 6u);
}

TEST(FromArrays, NegativeOrientationRepaired) {
  const auto m = TetMesh::from_arrays({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {{0, 1, 3, 2}});
  EXPECT_NEAR(m.tet_volume(0), 1.0 / 6.0, 1e-15);
}

TEST(FromArrays, DegenerateTetRejected) {
  EXPECT_THROW(TetMesh::from_arrays({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}}, {{0, 1, 2, 3}}),
               DegenerateElementError);
}

TEST(FromArrays, DanglingFaceTagRejected) {
  EXPECT_THROW(TetMesh::from_arrays({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {5, 5, 5}}, {{0, 1, 2, 3}},
                                    {{{0, 1, 4}, 7}}),
               ValidationError);
}

TEST(FromArrays, FaceTagsBecomeRegions) {
  const auto m = TetMesh::from_arrays({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {{0, 1, 2, 3}},
                                      {{{0, 1, 2}, 42}});
  int tagged = 0;
  for (const auto& f : m.boundary_faces()) tagged += f.region == 42;
  EXPECT_EQ(tagged, 1);
}

TEST(Mesh, VertexBoundaryNormals) {
  const TetMesh m = build_box_mesh({1, 1, 1, 2, 2, 2});
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    const auto& x = m.vertices()[v];
    int planes = 0;
    for (int k = 0; k < 3; ++k) planes += (std::abs(x[k]) < 1e-12 || std::abs(x[k] - 1) < 1e-12);
    EXPECT_EQ(m.vertex_boundary_normals(static_cast<Index>(v)).size(), static_cast<std::size_t>(planes));
  }
}
