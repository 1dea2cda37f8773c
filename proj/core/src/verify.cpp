#include "curlspec/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include <Eigen/SparseCholesky>

#include "curlspec/elements.hpp"
#include "curlspec/error.hpp"
#include "curlspec/gmsh.hpp"
#include "curlspec/mesh_json.hpp"

namespace curlspec {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_length(double x) {
  if (std::abs(x - std::numbers::pi) <= 1e-15 * std::numbers::pi) return "pi";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

bool starts_with(const std::string& s, const char* prefix) { return s.rfind(prefix, 0) == 0; }

bool is_cube(const StudySpec& s) { return s.a == s.b && s.b == s.c; }

SolverSettings settings_of(const StudySpec& s) {
  SolverSettings st;
  st.order = s.order;
  st.tol = s.solver_tol;
  st.max_iterations = s.max_iterations;
  st.preconditioner = s.preconditioner;
  st.threads = s.threads;
  st.seed = s.seed;
  return st;
}

std::vector<int> mesh_levels(const StudySpec& s) {
  if (s.domain == DomainKind::File) return {0};
  return s.levels;
}

}  // namespace

std::string to_string(DomainKind d) {
  switch (d) {
    case DomainKind::Box: return "box";
    case DomainKind::LShape: return "lshape";
    case DomainKind::Fichera: return "fichera";
    case DomainKind::File: return "file";
  }
  return "unknown";
}

void StudySpec::validate() const {
  if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0)) throw InvalidSpecError("domain sides must be positive");
  if (kmax < 1) throw InvalidSpecError("kmax must be >= 1");
  if (nev < 1) throw InvalidSpecError("nev must be >= 1");
  if (order != 1 && order != 2) throw InvalidSpecError("order must be 1 or 2");
  if (!(solver_tol > 0.0)) throw InvalidSpecError("solver tolerance must be positive");
  if (max_iterations < 1) throw InvalidSpecError("max_iterations must be >= 1");
  if (!(union_rel_tol >= 0.0)) throw InvalidSpecError("union tolerance must be non-negative");
  if (domain == DomainKind::File) {
    if (mesh_path.empty()) throw InvalidSpecError("mesh file domain needs a path");
    return;
  }
  if (levels.empty()) throw InvalidSpecError("at least one refinement level is required");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 1) throw InvalidSpecError("refinement levels must be >= 1");
    if (i > 0 && levels[i] <= levels[i - 1]) throw InvalidSpecError("refinement levels must be increasing");
    if (domain != DomainKind::Box && levels[i] % 2 != 0) {
      throw InvalidSpecError(to_string(domain) + " meshes need even subdivision counts");
    }
  }
}

std::string StudySpec::describe() const {
  if (domain == DomainKind::File) return "file(" + mesh_path + ")";
  return to_string(domain) + "(" + format_length(a) + "," + format_length(b) + "," + format_length(c) + ")";
}

TetMesh build_level_mesh(const StudySpec& spec, int n) {
  if (spec.domain == DomainKind::File) {
    const std::string& p = spec.mesh_path;
    if (p.size() >= 5 && p.substr(p.size() - 5) == ".json") return read_mesh_json(p);
    return read_gmsh(p);
  }
  const BoxSpec box{spec.a, spec.b, spec.c, n, n, n};
  switch (spec.domain) {
    case DomainKind::LShape: return build_lshape_mesh(box);
    case DomainKind::Fichera: return build_fichera_mesh(box);
    default: return build_box_mesh(box);
  }
}

OperatorSolve solve_operator(const TetMesh& mesh, OperatorKind op, int nev, const SolverSettings& settings) {
  if (nev < 1) throw InvalidSpecError("nev must be >= 1");
  const bool lagrange = op == OperatorKind::DirichletLaplacian || op == OperatorKind::NeumannLaplacian;
  OperatorSolve out;
  AssemblyOptions ao;
  ao.order = lagrange ? settings.order : 1;
  ao.threads = settings.threads;
  out.pencil = assemble(mesh, op, ao);

  SolveOptions so;
  so.nev = nev;
  so.tol = settings.tol;
  so.max_iterations = settings.max_iterations;
  so.preconditioner = settings.preconditioner;
  so.seed = settings.seed;

  const auto& K = out.pencil.K;
  const auto& M = out.pencil.M;
  const std::size_t free = out.pencil.dofs.free_count;
  if (op == OperatorKind::CurlCurl) {
    const DofMap p1 = make_dof_map(mesh, OperatorKind::DirichletLaplacian, 1);
    const Eigen::SparseMatrix<double> G = gradient_embedding(mesh, p1, out.pencil.dofs);
    const std::size_t available = free - static_cast<std::size_t>(G.cols());
    if (static_cast<std::size_t>(nev) > available) {
      throw InsufficientSpectrumError("requested " + std::to_string(nev) + " eigenvalues but only " +
                                      std::to_string(available) + " non-gradient dofs are free");
    }
    out.result = solve_lowest(K, M, so, G.cols() > 0 ? &G : nullptr);

    KernelInfo info;
    info.interior_vertices = mesh.num_interior_vertices();
    info.deflated = static_cast<std::size_t>(G.cols());
    const CsrMatrix KG = K.eigen() * CsrMatrix(G);
    double kg = 0.0;
    for (int k = 0; k < KG.outerSize(); ++k) {
      for (CsrMatrix::InnerIterator it(KG, k); it; ++it) kg = std::max(kg, std::abs(it.value()));
    }
    info.kg_ratio = kg / K.max_abs();
    double top = 1.0;
    for (const auto& p : out.result.pairs) top = std::max(top, p.value);
    for (const auto& p : out.result.pairs) {
      if (p.value < 1e-8 * top) ++info.extra_zero_modes;
    }
    out.kernel = info;
  } else {
    if (static_cast<std::size_t>(nev) > free) {
      throw InsufficientSpectrumError("requested " + std::to_string(nev) + " eigenvalues but only " +
                                      std::to_string(free) + " dofs are free");
    }
    out.result = solve_lowest(K, M, so);
  }
  out.spectrum = make_spectrum(to_string(op), out.result.pairs, out.pencil.h, ao.order, free);
  return out;
}

std::vector<Track> build_tracks(const std::vector<Spectrum>& levels, int count) {
  std::vector<Track> out;
  if (levels.empty()) throw InvalidSpecError("no spectra to track");
  for (int i = 0; i < count; ++i) {
    Track t;
    t.op = levels.front().op;
    t.index = i + 1;
    for (const auto& s : levels) {
      if (s.values.size() <= static_cast<std::size_t>(i)) {
        throw InsufficientSpectrumError(s.op + " spectrum at h=" + std::to_string(s.h) + " has " +
                                        std::to_string(s.values.size()) + " values, need " +
                                        std::to_string(count));
      }
      t.h.push_back(s.h);
      t.values.push_back(s.values[i]);
      if (i < static_cast<int>(s.converged.size()) && !s.converged[i]) t.resolved = false;
    }
    t.extrapolation = richardson(t.h, t.values);
    t.observed_rate = t.values.size() >= 3 ? observed_rate(t.h, t.values) : kNaN;
    out.push_back(std::move(t));
  }
  return out;
}

InterlaceReport build_interlace_report(std::string domain, const std::vector<Spectrum>& alpha_levels,
                                       const std::vector<Spectrum>& lambda_levels, int kmax) {
  if (alpha_levels.empty() || alpha_levels.size() != lambda_levels.size()) {
    throw InvalidSpecError("alpha and lambda need the same, non-zero number of levels");
  }
  InterlaceReport r;
  r.domain = std::move(domain);
  r.kmax = kmax;
  r.alpha_levels = alpha_levels;
  r.lambda_levels = lambda_levels;

  const bool oracle = starts_with(alpha_levels.front().op, "oracle:") && starts_with(lambda_levels.front().op, "oracle:");
  if (oracle) {
    if (alpha_levels.size() != 1) throw InvalidSpecError("oracle spectra come as a single level");
    r.provenance = {{"alpha", "oracle", {}}, {"lambda", "oracle", {}}};
    r.check = interlace_check(alpha_levels[0].values, lambda_levels[0].values, kmax, 0.0);
    r.pass = r.check.pass;
    return r;
  }

  const auto alpha = build_tracks(alpha_levels, 2 * kmax + 1);
  const auto lambda = build_tracks(lambda_levels, kmax);
  const std::string source = alpha_levels.size() > 1 ? "richardson" : "fem";
  r.provenance = {{"alpha", source, alpha.front().h}, {"lambda", source, lambda.front().h}};

  std::vector<double> av, lv, tol;
  for (const auto& t : alpha) av.push_back(t.extrapolation.value);
  for (const auto& t : lambda) lv.push_back(t.extrapolation.value);
  for (int k = 1; k <= kmax; ++k) {
    const double res = alpha[2 * k].extrapolation.residual + lambda[k - 1].extrapolation.residual;
    tol.push_back(std::max(2.0 * res, 1e-6 * std::abs(lv[k - 1])));
  }
  r.check = interlace_check(av, lv, kmax, tol);
  r.check.pass = true;
  for (auto& rec : r.check.records) {
    rec.resolved = alpha[2 * rec.k].resolved && lambda[rec.k - 1].resolved;
    rec.pass = rec.pass && rec.resolved;
    rec.strict = rec.strict && rec.resolved;
    r.check.pass = r.check.pass && rec.pass;
  }
  r.convergence = alpha;
  r.convergence.insert(r.convergence.end(), lambda.begin(), lambda.end());
  r.pass = r.check.pass;
  return r;
}

InterlaceReport oracle_interlace_report(const StudySpec& spec) {
  spec.validate();
  if (!spec.is_box()) throw InvalidSpecError("oracle spectra exist for box domains only");
  const int na = 2 * spec.kmax + 1;
  auto alpha = make_oracle_spectrum("maxwell", box_maxwell_spectrum(spec.a, spec.b, spec.c, na));
  auto lambda = make_oracle_spectrum("dirichlet", box_dirichlet_spectrum(spec.a, spec.b, spec.c, spec.kmax));
  InterlaceReport r = build_interlace_report(spec.describe(), {alpha}, {lambda}, spec.kmax);
  if (is_cube(spec)) {
    // Verdicts from integer arithmetic; the floating values above are q (pi/a)^2.
    const auto qa = cube_spectrum_integers(ModeFamily::Maxwell, na);
    const auto ql = cube_spectrum_integers(ModeFamily::Dirichlet, spec.kmax);
    const InterlaceCheck exact = interlace_check_exact(qa, ql, spec.kmax);
    for (std::size_t i = 0; i < exact.records.size(); ++i) {
      r.check.records[i].pass = exact.records[i].pass;
      r.check.records[i].strict = exact.records[i].strict;
    }
    r.check.pass = exact.pass;
    r.pass = exact.pass;
  }
  return r;
}

InterlaceReport run_interlace_study(const StudySpec& spec) {
  spec.validate();
  if (spec.oracle_only) return oracle_interlace_report(spec);
  const SolverSettings st = settings_of(spec);
  std::vector<Spectrum> alpha, lambda;
  std::vector<LevelInfo> info;
  for (int n : mesh_levels(spec)) {
    const TetMesh mesh = build_level_mesh(spec, n);
    const OperatorSolve curl = solve_operator(mesh, OperatorKind::CurlCurl, 2 * spec.kmax + 1, st);
    const OperatorSolve lap = solve_operator(mesh, OperatorKind::DirichletLaplacian, spec.kmax, st);
    alpha.push_back(curl.spectrum);
    lambda.push_back(lap.spectrum);
    info.push_back({n, mesh.max_edge_length(), curl.pencil.dofs.free_count, lap.pencil.dofs.free_count, curl.kernel});
  }
  InterlaceReport r = build_interlace_report(spec.describe(), alpha, lambda, spec.kmax);
  r.levels = std::move(info);
  return r;
}

UnionReport run_union_check(const StudySpec& spec) {
  spec.validate();
  if (!spec.is_box()) throw InvalidSpecError("the union check needs a box domain");
  UnionReport r;
  r.domain = spec.describe();
  r.nev = spec.nev;
  r.dirichlet = box_dirichlet_spectrum(spec.a, spec.b, spec.c, spec.nev);
  r.maxwell = box_maxwell_spectrum(spec.a, spec.b, spec.c, spec.nev);

  // Tagged merge; Dirichlet first on ties.
  std::vector<std::pair<double, const char*>> tagged;
  {
    std::size_t i = 0, j = 0;
    while (tagged.size() < static_cast<std::size_t>(spec.nev)) {
      if (j >= r.maxwell.size() || (i < r.dirichlet.size() && r.dirichlet[i] <= r.maxwell[j])) {
        tagged.emplace_back(r.dirichlet[i++], "dirichlet");
      } else {
        tagged.emplace_back(r.maxwell[j++], "maxwell");
      }
    }
  }
  for (const auto& t : tagged) r.merged.push_back(t.first);

  // Counting identity on exhaustive enumerations below the ceiling.
  const double smin = std::min({spec.a, spec.b, spec.c});
  r.count_ceiling = 6.5 * (std::numbers::pi / smin) * (std::numbers::pi / smin);
  const auto d = enumerate_box_modes(ModeFamily::Dirichlet, spec.a, spec.b, spec.c, r.count_ceiling).values;
  const auto m = enumerate_box_modes(ModeFamily::Maxwell, spec.a, spec.b, spec.c, r.count_ceiling).values;
  const auto u = merge_spectra(d, m);
  r.count_dirichlet = d.size();
  r.count_maxwell = m.size();
  r.count_union = counting_function(u, r.count_ceiling);
  r.counting_identity = r.count_union == r.count_dirichlet + r.count_maxwell;
  for (double v : u) {
    r.counting_identity = r.counting_identity &&
                          counting_function(u, v) == counting_function(d, v) + counting_function(m, v);
  }

  r.pass = r.counting_identity;
  if (spec.oracle_only) return r;

  const SolverSettings st = settings_of(spec);
  for (int n : mesh_levels(spec)) {
    const TetMesh mesh = build_level_mesh(spec, n);
    r.levels.push_back(solve_operator(mesh, OperatorKind::BForm, spec.nev, st).spectrum);
  }
  const auto tracks = build_tracks(r.levels, spec.nev);
  for (int i = 0; i < spec.nev; ++i) {
    UnionTrack ut;
    ut.index = i + 1;
    ut.oracle = tagged[i].first;
    ut.family = tagged[i].second;
    ut.track = tracks[i];
    ut.rel_error = std::abs(ut.track.extrapolation.value - ut.oracle) / ut.oracle;
    ut.pass = ut.rel_error <= spec.union_rel_tol && ut.track.resolved;
    r.pass = r.pass && ut.pass;
    r.tracks.push_back(std::move(ut));
  }
  return r;
}

TrialSubspaceReport run_trial_subspace_check(const TetMesh& mesh, int k, const SolverSettings& settings) {
  if (k < 1) throw InvalidSpecError("k must be >= 1");
  SolverSettings st = settings;
  st.order = 1;
  const OperatorSolve lap = solve_operator(mesh, OperatorKind::DirichletLaplacian, k, st);
  const Pencil bform = assemble(mesh, OperatorKind::BForm, {1, settings.threads, true});

  TrialSubspaceReport r;
  r.k = k;
  r.lambda_k = lap.result.pairs.at(k - 1).value;

  const int np = lap.pencil.K.dim();
  Eigen::MatrixXd Phi(np, k);
  for (int l = 0; l < k; ++l) Phi.col(l) = lap.result.pairs[l].vector;
  const Eigen::MatrixXd KPhi = lap.pencil.K.eigen() * Phi;
  const Eigen::MatrixXd MPhi = lap.pencil.M.eigen() * Phi;
  r.lambda_k_ritz = max_rayleigh_over_span(Phi.transpose() * KPhi, Phi.transpose() * MPhi);

  // Each eigenvector in one Cartesian component; it vanishes on the boundary,
  // so only interior vertices (identity frames) carry values.
  const std::size_t nv = mesh.num_vertices();
  const Eigen::SparseMatrix<double> P = prolongation(bform.dofs);
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(3 * nv), 3 * k);
  for (std::size_t v = 0; v < nv; ++v) {
    const Index p = lap.pencil.dofs.dof_of_entity[v];
    if (p < 0) continue;
    for (int l = 0; l < k; ++l) {
      for (int i = 0; i < 3; ++i) U(static_cast<Eigen::Index>(3 * v + i), 3 * l + i) = Phi(p, l);
    }
  }
  const Eigen::MatrixXd B = P.transpose() * U;
  const Eigen::MatrixXd Kb = B.transpose() * (bform.K.eigen() * B);
  const Eigen::MatrixXd Mb = B.transpose() * (bform.M.eigen() * B);
  r.max_quotient = max_rayleigh_over_span(Kb, Mb);

  for (int l = 0; l < k; ++l) {
    const double energy = Phi.col(l).dot(KPhi.col(l));
    for (int i = 0; i < 3; ++i) {
      r.rows.push_back({l + 1, i, energy, Kb(3 * l + i, 3 * l + i)});
      r.gradient_sum += energy;
      r.sb_sum += Kb(3 * l + i, 3 * l + i);
    }
  }
  for (int i = 0; i < Kb.rows(); ++i) {
    for (int j = 0; j < Kb.cols(); ++j) {
      if (i != j) r.cross_term = std::max(r.cross_term, std::abs(Kb(i, j)));
    }
  }
  r.pass = r.max_quotient <= r.lambda_k_ritz * (1.0 + 1e-8);
  return r;
}

NeumannReport neumann_table(std::span<const double> mu, std::span<const double> lambda, int kmax) {
  if (kmax < 1) throw InvalidSpecError("kmax must be >= 1");
  if (mu.size() < static_cast<std::size_t>(kmax + 3) || lambda.size() < static_cast<std::size_t>(kmax)) {
    throw InsufficientSpectrumError("need kmax + 3 = " + std::to_string(kmax + 3) + " Neumann and kmax = " +
                                    std::to_string(kmax) + " Dirichlet values, got " + std::to_string(mu.size()) +
                                    " and " + std::to_string(lambda.size()));
  }
  NeumannReport r;
  r.holds = true;
  for (int k = 1; k <= kmax; ++k) {
    NeumannRecord rec{k, mu[k + 2], lambda[k - 1], lambda[k - 1] - mu[k + 2], mu[k + 2] <= lambda[k - 1]};
    r.holds = r.holds && rec.holds;
    r.records.push_back(rec);
  }
  return r;
}

NeumannReport run_neumann_exploration(const StudySpec& spec) {
  spec.validate();
  NeumannReport r;
  if (spec.is_box() && spec.oracle_only) {
    r = neumann_table(box_neumann_spectrum(spec.a, spec.b, spec.c, spec.kmax + 3),
                      box_dirichlet_spectrum(spec.a, spec.b, spec.c, spec.kmax), spec.kmax);
    r.source = "oracle";
  } else {
    if (spec.oracle_only) throw InvalidSpecError("oracle spectra exist for box domains only");
    const SolverSettings st = settings_of(spec);
    const TetMesh mesh = build_level_mesh(spec, mesh_levels(spec).back());
    const auto mu = solve_operator(mesh, OperatorKind::NeumannLaplacian, spec.kmax + 3, st).spectrum;
    const auto la = solve_operator(mesh, OperatorKind::DirichletLaplacian, spec.kmax, st).spectrum;
    r = neumann_table(mu.values, la.values, spec.kmax);
    char buf[64];
    std::snprintf(buf, sizeof buf, "fem h=%.17g", mesh.max_edge_length());
    r.source = buf;
  }
  r.domain = spec.describe();
  return r;
}

namespace {

// Per-tet divergence and curl of Cartesian vertex fields (3 per vertex, one column per field).
struct TetDerivatives {
  Eigen::MatrixXd div;  // tets x fields, scaled by sqrt(volume)
  Eigen::MatrixXd raw_div;
  Eigen::VectorXd volume;
  double curl_energy = 0.0;  // first field only
};

TetDerivatives tet_derivatives(const TetMesh& mesh, const Eigen::MatrixXd& fields) {
  const auto nt = static_cast<Eigen::Index>(mesh.num_tets());
  TetDerivatives d;
  d.div.resize(nt, fields.cols());
  d.raw_div.resize(nt, fields.cols());
  d.volume.resize(nt);
  for (Eigen::Index t = 0; t < nt; ++t) {
    const TetGeometry g = tet_geometry(mesh.tet_coords(static_cast<std::size_t>(t)));
    const auto& tv = mesh.tets()[static_cast<std::size_t>(t)];
    d.volume(t) = g.volume;
    for (Eigen::Index f = 0; f < fields.cols(); ++f) {
      double div = 0.0;
      Eigen::Vector3d curl = Eigen::Vector3d::Zero();
      for (int a = 0; a < 4; ++a) {
        const Eigen::Vector3d u(fields(3 * tv[a], f), fields(3 * tv[a] + 1, f), fields(3 * tv[a] + 2, f));
        const Eigen::Vector3d grad = g.grad.row(a).transpose();
        div += grad.dot(u);
        curl += grad.cross(u);
      }
      d.raw_div(t, f) = div;
      d.div(t, f) = div * std::sqrt(g.volume);
      if (f == 0) d.curl_energy += curl.squaredNorm() * g.volume;
    }
  }
  return d;
}

DivTraceRecord trace_record(const TetMesh& mesh, const Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>& llt,
                            const Eigen::VectorXd& field) {
  const TetDerivatives d = tet_derivatives(mesh, field);
  const std::size_t nv = mesh.num_vertices();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nv));
  for (std::size_t t = 0; t < mesh.num_tets(); ++t) {
    const double share = d.raw_div(static_cast<Eigen::Index>(t), 0) * d.volume(static_cast<Eigen::Index>(t)) / 4.0;
    for (Index v : mesh.tets()[t]) rhs(v) += share;
  }
  const Eigen::VectorXd proj = llt.solve(rhs);
  const auto bflags = mesh.boundary_vertex_flags();
  double sb = 0.0, si = 0.0;
  std::size_t nb = 0, ni = 0;
  for (std::size_t v = 0; v < nv; ++v) {
    const double x = proj(static_cast<Eigen::Index>(v));
    if (bflags[v]) {
      sb += x * x;
      ++nb;
    } else {
      si += x * x;
      ++ni;
    }
  }
  DivTraceRecord r;
  r.boundary_rms = nb ? std::sqrt(sb / static_cast<double>(nb)) : 0.0;
  r.interior_rms = ni ? std::sqrt(si / static_cast<double>(ni)) : 0.0;
  r.ratio = r.interior_rms > 0.0 ? r.boundary_rms / r.interior_rms : std::numeric_limits<double>::infinity();
  const double div_energy = d.div.col(0).squaredNorm();
  const double total = div_energy + d.curl_energy;
  r.div_fraction = total > 0.0 ? div_energy / total : 0.0;
  return r;
}

Eigen::SparseMatrix<double> p1_mass(const TetMesh& mesh) {
  const Pencil p = assemble(mesh, OperatorKind::NeumannLaplacian);
  return Eigen::SparseMatrix<double>(p.M.eigen());
}

}  // namespace

DivTraceRecord div_trace(const TetMesh& mesh, const Eigen::VectorXd& field) {
  if (field.size() != static_cast<Eigen::Index>(3 * mesh.num_vertices())) {
    throw InvalidSpecError("field needs 3 values per vertex");
  }
  const auto M = p1_mass(mesh);
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(M);
  return trace_record(mesh, llt, field);
}

std::vector<DivTraceRecord> div_trace_diagnostic(const TetMesh& mesh, const Pencil& bform,
                                                 const std::vector<EigenPair>& pairs, double group_gap) {
  if (bform.op != OperatorKind::BForm) throw InvalidSpecError("div trace needs BForm eigenpairs");
  const auto M = p1_mass(mesh);
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(M);
  const Eigen::SparseMatrix<double> P = prolongation(bform.dofs);

  std::vector<DivTraceRecord> out;
  std::size_t start = 0;
  while (start < pairs.size()) {
    std::size_t end = start + 1;
    while (end < pairs.size() &&
           pairs[end].value - pairs[end - 1].value <= group_gap * std::max(std::abs(pairs[end].value), 1e-300)) {
      ++end;
    }
    const auto g = static_cast<Eigen::Index>(end - start);
    Eigen::MatrixXd X(bform.K.dim(), g);
    for (Eigen::Index j = 0; j < g; ++j) X.col(j) = pairs[start + static_cast<std::size_t>(j)].vector;
    Eigen::MatrixXd U = P * X;
    if (g > 1) {
      // Rotate inside the group so divergence energies decouple.
      const TetDerivatives d = tet_derivatives(mesh, U);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d.div.transpose() * d.div);
      X = X * es.eigenvectors();
      U = P * X;
    }
    for (Eigen::Index j = 0; j < g; ++j) {
      DivTraceRecord r = trace_record(mesh, llt, U.col(j));
      r.value = rayleigh_quotient(bform.K, bform.M, X.col(j));
      out.push_back(r);
    }
    start = end;
  }
  return out;
}

DivTraceReport run_div_trace_diagnostic(const StudySpec& spec) {
  spec.validate();
  DivTraceReport r;
  r.domain = spec.describe();
  const SolverSettings st = settings_of(spec);
  TetMesh finest;
  for (int n : mesh_levels(spec)) {
    TetMesh mesh = build_level_mesh(spec, n);
    const OperatorSolve s = solve_operator(mesh, OperatorKind::BForm, spec.nev, st);
    r.levels.push_back({n, mesh.max_edge_length(), div_trace_diagnostic(mesh, s.pencil, s.result.pairs)});
    finest = std::move(mesh);
  }
  // Negative control: u = (x, 0, 0), constant divergence up to the boundary.
  Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(3 * finest.num_vertices()));
  for (std::size_t v = 0; v < finest.num_vertices(); ++v) u(static_cast<Eigen::Index>(3 * v)) = finest.vertices()[v][0];
  r.control = div_trace(finest, u);
  return r;
}

}  // namespace curlspec
