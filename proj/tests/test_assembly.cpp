#include <gtest/gtest.h>

#include <sstream>

#include "curlspec/assembly.hpp"
#include "curlspec/eigensolve.hpp"
#include "curlspec/elements.hpp"
#include "curlspec/error.hpp"
#include "support.hpp"

using namespace curlspec;
using testing_support::kPi;

namespace {

// Dense assembly over all entities (no elimination), straight from the local matrices.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> dense_full(const TetMesh& m, OperatorKind op, int order = 1) {
  const std::size_t nv = m.num_vertices(), ne = m.num_edges();
  std::size_t n = nv;
  if (op == OperatorKind::CurlCurl) n = ne;
  if (op == OperatorKind::BForm) n = 3 * nv;
  if (order == 2) n = nv + ne;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n), M = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t t = 0; t < m.num_tets(); ++t) {
    const auto p = m.tet_coords(t);
    const auto& tv = m.tets()[t];
    const auto& te = m.tet_edges()[t];
    std::vector<int> idx;
    std::vector<double> sgn;
    LocalMatrices lm;
    switch (op) {
      case OperatorKind::DirichletLaplacian:
      case OperatorKind::NeumannLaplacian:
        lm = lagrange_local(p, order);
        for (int a = 0; a < 4; ++a) idx.push_back(tv[a]);
        if (order == 2) {
          for (int e = 0; e < 6; ++e) idx.push_back(static_cast<int>(nv) + te[e].edge);
        }
        sgn.assign(idx.size(), 1.0);
        break;
      case OperatorKind::CurlCurl:
        lm = nedelec_local(p);
        for (int e = 0; e < 6; ++e) {
          idx.push_back(te[e].edge);
          // Orientation from the vertex ids directly.
          const int a = tv[kTetEdgeVertices[e][0]], b = tv[kTetEdgeVertices[e][1]];
          sgn.push_back(a < b ? 1.0 : -1.0);
        }
        break;
      case OperatorKind::BForm:
        lm = vector_p1_divcurl_local(p);
        for (int a = 0; a < 4; ++a) {
          for (int i = 0; i < 3; ++i) idx.push_back(3 * tv[a] + i);
        }
        sgn.assign(idx.size(), 1.0);
        break;
    }
    for (std::size_t i = 0; i < idx.size(); ++i) {
      for (std::size_t j = 0; j < idx.size(); ++j) {
        K(idx[i], idx[j]) += sgn[i] * sgn[j] * lm.stiffness(i, j);
        M(idx[i], idx[j]) += sgn[i] * sgn[j] * lm.mass(i, j);
      }
    }
  }
  return {K, M};
}

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

Eigen::MatrixXd restrict_to(const Eigen::MatrixXd& A, const std::vector<int>& keep) {
  Eigen::MatrixXd R(keep.size(), keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    for (std::size_t j = 0; j < keep.size(); ++j) R(i, j) = A(keep[i], keep[j]);
  }
  return R;
}

}  // namespace

TEST(Assembly, OneInteriorVertexGivesOneByOne) {
  const Pencil p = assemble(build_box_mesh({kPi, kPi, kPi, 2, 2, 2}), OperatorKind::DirichletLaplacian);
  EXPECT_EQ(p.K.dim(), 1);
  EXPECT_EQ(p.M.dim(), 1);
}

TEST(Assembly, NoFreeDofs) {
  const TetMesh m = build_box_mesh({kPi, kPi, kPi, 1, 1, 1});
  try {
    assemble(m, OperatorKind::DirichletLaplacian);
    FAIL();
  } catch (const NoFreeDofsError& e) {
    EXPECT_NE(std::string(e.what()).find("no free dofs"), std::string::npos);
  }
  EXPECT_THROW(assemble(m, OperatorKind::BForm), NoFreeDofsError);
  // The cube diagonal is the only edge off the boundary.
  EXPECT_EQ(assemble(m, OperatorKind::CurlCurl).K.dim(), 1);
}

class AssemblyOracle : public ::testing::TestWithParam<OperatorKind> {};

TEST_P(AssemblyOracle, MatchesDenseScatterAndElimination) {
  const TetMesh m = build_box_mesh({1.0, 1.3, 0.8, 3, 2, 2});
  const OperatorKind op = GetParam();
  const auto [Kd, Md] = dense_full(m, op);
  const Pencil full = assemble(m, op, {1, 1, false});
  ASSERT_EQ(full.K.dim(), Kd.rows());
  EXPECT_LE(max_abs_diff(full.K.to_dense(), Kd), 1e-13 * Kd.cwiseAbs().maxCoeff());
  EXPECT_LE(max_abs_diff(full.M.to_dense(), Md), 1e-13 * Md.cwiseAbs().maxCoeff());

  // Elimination: the free pencil is the full one seen through the prolongation.
  const Pencil freep = assemble(m, op);
  const Eigen::MatrixXd P = Eigen::MatrixXd(prolongation(freep.dofs));
  EXPECT_LE(max_abs_diff(freep.K.to_dense(), P.transpose() * Kd * P), 1e-13 * Kd.cwiseAbs().maxCoeff());
  EXPECT_LE(max_abs_diff(freep.M.to_dense(), P.transpose() * Md * P), 1e-13 * Md.cwiseAbs().maxCoeff());
  // Extending x by zeros and applying the full matrix reproduces K x on free rows.
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Eigen::VectorXd x(freep.K.dim());
  for (auto& v : x) v = g(rng);
  const Eigen::VectorXd lhs = freep.K.multiply(x);
  const Eigen::VectorXd rhs = P.transpose() * (Kd * (P * x));
  EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-13 * Kd.cwiseAbs().maxCoeff() * x.cwiseAbs().maxCoeff() * 10);
  EXPECT_LT(freep.K.symmetry_defect(), 1e-14);
  EXPECT_LT(freep.M.symmetry_defect(), 1e-14);
}

INSTANTIATE_TEST_SUITE_P(Operators, AssemblyOracle,
                         ::testing::Values(OperatorKind::DirichletLaplacian, OperatorKind::NeumannLaplacian,
                                           OperatorKind::CurlCurl, OperatorKind::BForm),
                         [](const auto& info) { return to_string(info.param); });

TEST(Assembly, P2MatchesDenseScatter) {
  const TetMesh m = build_box_mesh({1, 1, 1, 2, 2, 1});
  const auto [Kd, Md] = dense_full(m, OperatorKind::NeumannLaplacian, 2);
  const Pencil p = assemble(m, OperatorKind::NeumannLaplacian, {2, 1, true});
  EXPECT_LE(max_abs_diff(p.K.to_dense(), Kd), 1e-13 * Kd.cwiseAbs().maxCoeff());
  EXPECT_LE(max_abs_diff(p.M.to_dense(), Md), 1e-13 * Md.cwiseAbs().maxCoeff());
}

TEST(Assembly, ConstrainedSetsFromGeometry) {
  const double a = 1.0, b = 1.3, c = 0.8;
  const TetMesh m = build_box_mesh({a, b, c, 3, 2, 2});
  std::vector<int> interior_vertices, interior_edges;
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    if (!testing_support::on_box_boundary(m.vertices()[v], a, b, c)) interior_vertices.push_back(static_cast<int>(v));
  }
  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    const auto& x = m.vertices()[m.edges()[e].lo];
    const auto& y = m.vertices()[m.edges()[e].hi];
    if (!testing_support::edge_on_box_boundary(x, y, a, b, c)) interior_edges.push_back(static_cast<int>(e));
  }
  const auto [Kp, Mp] = dense_full(m, OperatorKind::DirichletLaplacian);
  const Pencil d = assemble(m, OperatorKind::DirichletLaplacian);
  EXPECT_LE(max_abs_diff(d.K.to_dense(), restrict_to(Kp, interior_vertices)), 1e-13);
  const auto [Kc, Mc] = dense_full(m, OperatorKind::CurlCurl);
  const Pencil cc = assemble(m, OperatorKind::CurlCurl);
  EXPECT_LE(max_abs_diff(cc.K.to_dense(), restrict_to(Kc, interior_edges)), 1e-13);
  EXPECT_LE(max_abs_diff(cc.M.to_dense(), restrict_to(Mc, interior_edges)), 1e-13);

  // BForm keeps 3 dofs inside, 1 on face interiors, 0 on box edges and corners.
  std::size_t expected = 0;
  for (const auto& x : m.vertices()) {
    int planes = 0;
    const std::array<double, 3> side{a, b, c};
    for (int k = 0; k < 3; ++k) planes += std::abs(x[k]) < 1e-12 || std::abs(x[k] - side[k]) < 1e-12;
    expected += planes == 0 ? 3 : (planes == 1 ? 1 : 0);
  }
  EXPECT_EQ(assemble(m, OperatorKind::BForm).dofs.free_count, expected);
  const DofMap dm = make_dof_map(m, OperatorKind::BForm, 1);
  EXPECT_EQ(dm.free_count + dm.constrained_count, 3 * m.num_vertices());
}

TEST(Assembly, FormsNonNegativeOnRandomVectors) {
  const TetMesh m = build_box_mesh({1, 2, 1, 2, 3, 2});
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  for (auto op : {OperatorKind::DirichletLaplacian, OperatorKind::NeumannLaplacian, OperatorKind::CurlCurl,
                  OperatorKind::BForm}) {
    const Pencil p = assemble(m, op);
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd x(p.K.dim());
      for (auto& v : x) v = g(rng);
      EXPECT_GE(p.K.quadratic_form(x), -1e-12 * x.squaredNorm() * p.K.max_abs());
      EXPECT_GT(p.M.quadratic_form(x), 0.0);
    }
  }
}

TEST(Assembly, DeterministicAcrossThreadCounts) {
  const TetMesh m = build_box_mesh({1, 1, 1, 4, 3, 3});
  for (auto op : {OperatorKind::DirichletLaplacian, OperatorKind::CurlCurl, OperatorKind::BForm}) {
    const Pencil one = assemble(m, op, {1, 1, true});
    for (int threads : {2, 3, 7}) {
      const Pencil many = assemble(m, op, {1, threads, true});
      ASSERT_EQ(one.K.nonzeros(), many.K.nonzeros());
      EXPECT_TRUE(std::equal(one.K.values().begin(), one.K.values().end(), many.K.values().begin()));
      EXPECT_TRUE(std::equal(one.M.values().begin(), one.M.values().end(), many.M.values().begin()));
      EXPECT_TRUE(std::equal(one.K.column_indices().begin(), one.K.column_indices().end(),
                             many.K.column_indices().begin()));
    }
  }
}

TEST(Assembly, BFormRefusedOnNonConvexMesh) {
  EXPECT_THROW(assemble(build_lshape_mesh({1, 1, 1, 2, 2, 2}), OperatorKind::BForm), NotConvexError);
  EXPECT_THROW(assemble(build_fichera_mesh({1, 1, 1, 2, 2, 2}), OperatorKind::BForm), NotConvexError);
}

TEST(Assembly, OperatorNames) {
  for (auto op : {OperatorKind::DirichletLaplacian, OperatorKind::NeumannLaplacian, OperatorKind::CurlCurl,
                  OperatorKind::BForm}) {
    EXPECT_EQ(parse_operator(to_string(op)), op);
  }
  EXPECT_THROW(parse_operator("stokes"), InvalidSpecError);
  EXPECT_THROW(assemble(build_box_mesh({1, 1, 1, 2, 2, 2}), OperatorKind::CurlCurl, {2, 1, true}), InvalidSpecError);
}

TEST(GradientEmbedding, KernelOfCurlCurl) {
  for (const TetMesh& m : {build_box_mesh({kPi, kPi, kPi, 3, 3, 3}), build_lshape_mesh({1, 1, 1, 4, 4, 2}),
                           build_fichera_mesh({1, 1, 1, 4, 4, 4})}) {
    const Pencil c = assemble(m, OperatorKind::CurlCurl);
    const Eigen::SparseMatrix<double> G = gradient_embedding(m);
    const Eigen::MatrixXd KG = c.K.to_dense() * Eigen::MatrixXd(G);
    EXPECT_LE(KG.cwiseAbs().maxCoeff(), 1e-12 * c.K.max_abs());
    EXPECT_EQ(static_cast<std::size_t>(G.cols()), m.num_interior_vertices());
  }
}

TEST(GradientEmbedding, ColumnsAndEnergies) {
  const TetMesh m = build_box_mesh({kPi, kPi, kPi, 3, 3, 3});
  const Pencil c = assemble(m, OperatorKind::CurlCurl);
  const Pencil d = assemble(m, OperatorKind::DirichletLaplacian);
  const Eigen::SparseMatrix<double> G = gradient_embedding(m, d.dofs, c.dofs);
  const Eigen::MatrixXd Gd(G);
  const Eigen::MatrixXd Md = c.M.to_dense();
  const Eigen::MatrixXd Kd = d.K.to_dense();
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    const Index p = d.dofs.dof_of_entity[v];
    if (p < 0) continue;
    int incident = 0;
    for (const auto& e : m.edges()) incident += (e.lo == static_cast<Index>(v) || e.hi == static_cast<Index>(v));
    EXPECT_EQ((Gd.col(p).array() != 0.0).count(), incident);
    const double energy = Gd.col(p).dot(Md * Gd.col(p));
    EXPECT_NEAR(energy, Kd(p, p), 1e-12 * Kd(p, p));
  }
  // Full Gram: G^T M_curl G equals the P1 Dirichlet stiffness.
  EXPECT_LE(max_abs_diff(Gd.transpose() * Md * Gd, Kd), 1e-12 * Kd.cwiseAbs().maxCoeff());
}

TEST(GradientEmbedding, ZeroEigenvaluesEqualInteriorVertices) {
  for (int n : {2, 3}) {
    const TetMesh m = build_box_mesh({kPi, kPi, kPi, n, n, n});
    const Pencil c = assemble(m, OperatorKind::CurlCurl);
    const Eigen::VectorXd ev = dense_eigenvalues(c.K, c.M);
    const double top = ev.maxCoeff();
    std::size_t zeros = 0;
    for (double v : ev) zeros += std::abs(v) < 1e-8 * top;
    EXPECT_EQ(zeros, m.num_interior_vertices());
  }
}

TEST(SymSparse, TripletsSumAndMatrixMarket) {
  const SymSparse a = SymSparse::from_triplets(3, {{0, 0, 1.0}, {1, 0, 2.0}, {0, 1, 2.0}, {0, 0, 0.5}, {2, 2, 4.0}});
  EXPECT_EQ(a.dim(), 3);
  EXPECT_DOUBLE_EQ(a.to_dense()(0, 0), 1.5);
  EXPECT_DOUBLE_EQ(a.max_abs(), 4.0);
  EXPECT_EQ(a.symmetry_defect(), 0.0);
  std::ostringstream mm;
  write_matrix_market(a, mm);
  std::istringstream in(mm.str());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "%%MatrixMarket matrix coordinate real symmetric");
  std::string line;
  while (std::getline(in, line) && line[0] == '%') {
  }
  std::istringstream dims(line);
  int r = 0, c = 0, nnz = 0;
  dims >> r >> c >> nnz;
  EXPECT_EQ(r, 3);
  EXPECT_EQ(c, 3);
  EXPECT_EQ(nnz, 3);  // lower triangle: (1,1), (2,1), (3,3)
  int i = 0, j = 0;
  double v = 0;
  while (in >> i >> j >> v) {
    EXPECT_GE(i, j);
    EXPECT_GE(j, 1);
  }
}
