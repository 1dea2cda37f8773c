#pragma once

#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "curlspec/mesh.hpp"
#include "curlspec/sparse.hpp"

namespace curlspec {

enum class OperatorKind { DirichletLaplacian, NeumannLaplacian, CurlCurl, BForm };

std::string to_string(OperatorKind op);
// Accepts "dirichlet", "neumann", "curlcurl", "bform". Throws InvalidSpecError.
OperatorKind parse_operator(const std::string& name);

enum class DofKind { VertexP1, VertexEdgeP2, EdgeNedelec, VectorP1 };

// Entity -> free dof map. For the scalar kinds `dof_of_entity` is indexed by
// vertex (P1), vertex then edge (P2) or edge (Nedelec) and holds -1 for
// constrained entities. For VectorP1 it holds the first dof of each vertex,
// `vertex_dof_count` how many, and the leading columns of `vertex_frame` the
// Cartesian direction of each of them.
struct DofMap {
  DofKind kind = DofKind::VertexP1;
  std::size_t entity_count = 0;  // entities times components
  std::size_t free_count = 0;
  std::size_t constrained_count = 0;
  std::vector<Index> dof_of_entity;
  std::vector<std::uint8_t> vertex_dof_count;
  std::vector<Eigen::Matrix3d> vertex_frame;
};

DofMap make_dof_map(const TetMesh& mesh, OperatorKind op, int order, bool eliminate = true);

// entity_count x free_count map extending a free-dof vector to all entities
// (Cartesian components for VectorP1), zeros on constrained entities.
Eigen::SparseMatrix<double> prolongation(const DofMap& dofs);

struct AssemblyOptions {
  int order = 1;          // 1 or 2 for the Laplacians; 1 otherwise
  int threads = 0;        // 0: CURLSPEC_THREADS or 1
  bool eliminate = true;  // false keeps every entity (for elimination checks)
};

struct Pencil {
  OperatorKind op = OperatorKind::DirichletLaplacian;
  int order = 1;
  SymSparse K;
  SymSparse M;
  DofMap dofs;
  double h = 0.0;
};

// Galerkin stiffness/mass pair on the free dofs. Throws NoFreeDofsError,
// NotConvexError (BForm on a non-convex mesh) or DegenerateElementError.
Pencil assemble(const TetMesh& mesh, OperatorKind op, const AssemblyOptions& options = {});

// Columns: interior vertices of the P1 Dirichlet map; rows: free edges of the
// Nedelec map. Entry +1 where the edge enters the vertex, -1 where it leaves.
Eigen::SparseMatrix<double> gradient_embedding(const TetMesh& mesh, const DofMap& p1_dirichlet,
                                               const DofMap& nedelec);
Eigen::SparseMatrix<double> gradient_embedding(const TetMesh& mesh);

int resolve_thread_count(int requested);

}  // namespace curlspec
