#include "curlspec/assembly.hpp"

#include <cstdlib>
#include <thread>

#include "curlspec/elements.hpp"
#include "curlspec/error.hpp"

namespace curlspec {

std::string to_string(OperatorKind op) {
  switch (op) {
    case OperatorKind::DirichletLaplacian: return "dirichlet";
    case OperatorKind::NeumannLaplacian: return "neumann";
    case OperatorKind::CurlCurl: return "curlcurl";
    case OperatorKind::BForm: return "bform";
  }
  return "unknown";
}

OperatorKind parse_operator(const std::string& name) {
  if (name == "dirichlet") return OperatorKind::DirichletLaplacian;
  if (name == "neumann") return OperatorKind::NeumannLaplacian;
  if (name == "curlcurl") return OperatorKind::CurlCurl;
  if (name == "bform") return OperatorKind::BForm;
  throw InvalidSpecError("unknown operator '" + name + "' (dirichlet|neumann|curlcurl|bform)");
}

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CURLSPEC_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

DofMap make_dof_map(const TetMesh& mesh, OperatorKind op, int order, bool eliminate) {
  DofMap d;
  const auto bv = mesh.boundary_vertex_flags();
  const auto be = mesh.boundary_edge_flags();
  const bool dirichlet = eliminate && op == OperatorKind::DirichletLaplacian;

  auto number = [&](std::size_t count, auto constrained) {
    d.dof_of_entity.assign(count, -1);
    Index next = 0;
    for (std::size_t e = 0; e < count; ++e) {
      if (!constrained(e)) d.dof_of_entity[e] = next++;
    }
    d.entity_count = count;
    d.free_count = static_cast<std::size_t>(next);
    d.constrained_count = count - d.free_count;
  };

  switch (op) {
    case OperatorKind::DirichletLaplacian:
    case OperatorKind::NeumannLaplacian:
      if (order == 1) {
        d.kind = DofKind::VertexP1;
        number(mesh.num_vertices(), [&](std::size_t v) { return dirichlet && bv[v]; });
      } else if (order == 2) {
        d.kind = DofKind::VertexEdgeP2;
        const std::size_t nv = mesh.num_vertices();
        number(nv + mesh.num_edges(), [&](std::size_t e) { return dirichlet && (e < nv ? bv[e] : be[e - nv]); });
      } else {
        throw InvalidSpecError("Lagrange order must be 1 or 2");
      }
      break;
    case OperatorKind::CurlCurl:
      if (order != 1) throw InvalidSpecError("only lowest-order Nedelec elements are available");
      d.kind = DofKind::EdgeNedelec;
      number(mesh.num_edges(), [&](std::size_t e) { return eliminate && be[e]; });
      break;
    case OperatorKind::BForm: {
      if (order != 1) throw InvalidSpecError("BForm uses vector P1 elements only");
      d.kind = DofKind::VectorP1;
      const std::size_t nv = mesh.num_vertices();
      d.dof_of_entity.assign(nv, 0);
      d.vertex_dof_count.assign(nv, 3);
      d.vertex_frame.assign(nv, Eigen::Matrix3d::Identity());
      Index next = 0;
      for (std::size_t v = 0; v < nv; ++v) {
        if (eliminate && bv[v]) {
          const auto normals = mesh.vertex_boundary_normals(static_cast<Index>(v));
          if (normals.size() == 1) {
            // u x n = 0 leaves only the normal component.
            d.vertex_dof_count[v] = 1;
            d.vertex_frame[v].col(0) = Eigen::Vector3d(normals[0][0], normals[0][1], normals[0][2]);
          } else {
            d.vertex_dof_count[v] = 0;
          }
        }
        d.dof_of_entity[v] = next;
        next += d.vertex_dof_count[v];
      }
      d.entity_count = 3 * nv;
      d.free_count = static_cast<std::size_t>(next);
      d.constrained_count = d.entity_count - d.free_count;
      break;
    }
  }
  return d;
}

Eigen::SparseMatrix<double> prolongation(const DofMap& dofs) {
  std::vector<Eigen::Triplet<double>> t;
  if (dofs.kind == DofKind::VectorP1) {
    for (std::size_t v = 0; v < dofs.vertex_dof_count.size(); ++v) {
      for (int k = 0; k < dofs.vertex_dof_count[v]; ++k) {
        for (int i = 0; i < 3; ++i) {
          const double c = dofs.vertex_frame[v](i, k);
          if (c != 0.0) t.emplace_back(static_cast<int>(3 * v + i), dofs.dof_of_entity[v] + k, c);
        }
      }
    }
  } else {
    for (std::size_t e = 0; e < dofs.dof_of_entity.size(); ++e) {
      if (dofs.dof_of_entity[e] >= 0) t.emplace_back(static_cast<int>(e), dofs.dof_of_entity[e], 1.0);
    }
  }
  Eigen::SparseMatrix<double> P(static_cast<int>(dofs.entity_count), static_cast<int>(dofs.free_count));
  P.setFromTriplets(t.begin(), t.end());
  return P;
}

namespace {

struct LocalDof {
  int local;
  int global;
  double coeff;
};

// Local-to-global scatter list of one tet.
void gather_dofs(const TetMesh& mesh, const DofMap& d, std::size_t t, std::vector<LocalDof>& out) {
  out.clear();
  const auto& tv = mesh.tets()[t];
  const auto& te = mesh.tet_edges()[t];
  switch (d.kind) {
    case DofKind::VertexP1:
      for (int i = 0; i < 4; ++i) {
        if (Index g = d.dof_of_entity[tv[i]]; g >= 0) out.push_back({i, g, 1.0});
      }
      break;
    case DofKind::VertexEdgeP2: {
      const std::size_t nv = mesh.num_vertices();
      for (int i = 0; i < 4; ++i) {
        if (Index g = d.dof_of_entity[tv[i]]; g >= 0) out.push_back({i, g, 1.0});
      }
      for (int e = 0; e < 6; ++e) {
        if (Index g = d.dof_of_entity[nv + te[e].edge]; g >= 0) out.push_back({4 + e, g, 1.0});
      }
      break;
    }
    case DofKind::EdgeNedelec:
      for (int e = 0; e < 6; ++e) {
        if (Index g = d.dof_of_entity[te[e].edge]; g >= 0) out.push_back({e, g, static_cast<double>(te[e].sign)});
      }
      break;
    case DofKind::VectorP1:
      for (int a = 0; a < 4; ++a) {
        const Index v = tv[a];
        for (int k = 0; k < d.vertex_dof_count[v]; ++k) {
          for (int i = 0; i < 3; ++i) {
            const double c = d.vertex_frame[v](i, k);
            if (c != 0.0) out.push_back({3 * a + i, d.dof_of_entity[v] + k, c});
          }
        }
      }
      break;
  }
}

LocalMatrices local_matrices(const TetMesh& mesh, OperatorKind op, int order, std::size_t t) {
  const auto p = mesh.tet_coords(t);
  switch (op) {
    case OperatorKind::DirichletLaplacian:
    case OperatorKind::NeumannLaplacian: return lagrange_local(p, order);
    case OperatorKind::CurlCurl: return nedelec_local(p);  // signs applied in the scatter
    case OperatorKind::BForm: return vector_p1_divcurl_local(p);
  }
  throw Error("unreachable");
}

void scatter(const Eigen::MatrixXd& local, const std::vector<LocalDof>& dofs, std::vector<Triplet>& out) {
  for (const auto& r : dofs) {
    for (const auto& c : dofs) {
      const double v = r.coeff * c.coeff * local(r.local, c.local);
      out.push_back({r.global, c.global, v});
    }
  }
}

}  // namespace

Pencil assemble(const TetMesh& mesh, OperatorKind op, const AssemblyOptions& options) {
  if (op == OperatorKind::BForm && !mesh.is_convex()) throw NotConvexError();

  Pencil pencil;
  pencil.op = op;
  pencil.order = options.order;
  pencil.h = mesh.max_edge_length();
  pencil.dofs = make_dof_map(mesh, op, options.order, options.eliminate);
  if (pencil.dofs.free_count == 0) throw NoFreeDofsError();

  // Disjoint tet ranges per worker; buffers are concatenated in range order so
  // the triplet sequence (and hence every summation) is independent of the
  // number of workers.
  const std::size_t nt = mesh.num_tets();
  const int workers = std::max(1, std::min<int>(resolve_thread_count(options.threads), static_cast<int>(nt)));
  std::vector<std::vector<Triplet>> kbuf(workers), mbuf(workers);
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](int w) {
    try {
      const std::size_t begin = nt * w / workers;
      const std::size_t end = nt * (w + 1) / workers;
      std::vector<LocalDof> dofs;
      for (std::size_t t = begin; t < end; ++t) {
        const LocalMatrices lm = local_matrices(mesh, op, options.order, t);
        gather_dofs(mesh, pencil.dofs, t, dofs);
        scatter(lm.stiffness, dofs, kbuf[w]);
        scatter(lm.mass, dofs, mbuf[w]);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  auto merge = [](std::vector<std::vector<Triplet>>& bufs) {
    std::vector<Triplet> all;
    std::size_t total = 0;
    for (const auto& b : bufs) total += b.size();
    all.reserve(total);
    for (auto& b : bufs) {
      all.insert(all.end(), b.begin(), b.end());
      std::vector<Triplet>().swap(b);
    }
    return all;
  };
  const int n = static_cast<int>(pencil.dofs.free_count);
  pencil.K = SymSparse::from_triplets(n, merge(kbuf));
  pencil.M = SymSparse::from_triplets(n, merge(mbuf));
  return pencil;
}

Eigen::SparseMatrix<double> gradient_embedding(const TetMesh& mesh, const DofMap& p1, const DofMap& ned) {
  if (p1.kind != DofKind::VertexP1 || ned.kind != DofKind::EdgeNedelec) {
    throw InvalidSpecError("gradient embedding needs a P1 and a Nedelec dof map");
  }
  std::vector<Eigen::Triplet<double>> t;
  const auto edges = mesh.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Index row = ned.dof_of_entity[e];
    if (row < 0) continue;
    if (Index c = p1.dof_of_entity[edges[e].lo]; c >= 0) t.emplace_back(row, c, -1.0);
    if (Index c = p1.dof_of_entity[edges[e].hi]; c >= 0) t.emplace_back(row, c, 1.0);
  }
  Eigen::SparseMatrix<double> G(static_cast<int>(ned.free_count), static_cast<int>(p1.free_count));
  G.setFromTriplets(t.begin(), t.end());
  return G;
}

Eigen::SparseMatrix<double> gradient_embedding(const TetMesh& mesh) {
  return gradient_embedding(mesh, make_dof_map(mesh, OperatorKind::DirichletLaplacian, 1),
                            make_dof_map(mesh, OperatorKind::CurlCurl, 1));
}

}  // namespace curlspec
