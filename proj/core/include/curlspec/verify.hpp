#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "curlspec/assembly.hpp"
#include "curlspec/eigensolve.hpp"
#include "curlspec/extrapolate.hpp"
#include "curlspec/mesh.hpp"
#include "curlspec/oracle.hpp"
#include "curlspec/spectrum.hpp"

namespace curlspec {

enum class DomainKind { Box, LShape, Fichera, File };

std::string to_string(DomainKind d);

struct StudySpec {
  DomainKind domain = DomainKind::Box;
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  std::string mesh_path;          // DomainKind::File (single level)
  int kmax = 3;
  std::vector<int> levels{4, 8, 16};  // subdivisions per axis
  int order = 1;                  // Lagrange order of the Dirichlet track
  int nev = 6;                    // union / div-trace requests
  bool oracle_only = false;
  double solver_tol = 1e-9;
  int max_iterations = 500;
  PreconditionerKind preconditioner = PreconditionerKind::Factorized;
  int threads = 0;
  double union_rel_tol = 0.02;
  std::uint64_t seed = 0x5eed;

  // Throws InvalidSpecError.
  void validate() const;
  bool is_box() const noexcept { return domain == DomainKind::Box; }
  std::string describe() const;
};

// Mesh of one refinement level (ignored for DomainKind::File).
TetMesh build_level_mesh(const StudySpec& spec, int n);

// Kernel bookkeeping for the deflated curl-curl pencil.
struct KernelInfo {
  std::size_t interior_vertices = 0;
  std::size_t deflated = 0;        // columns of G; G^T M G SPD so all independent
  double kg_ratio = 0.0;           // ||K G||_max / ||K||_max
  std::size_t extra_zero_modes = 0;  // near-zero values left after deflation
  bool exact() const noexcept { return deflated == interior_vertices && extra_zero_modes == 0; }
};

struct OperatorSolve {
  Pencil pencil;
  SolveResult result;
  Spectrum spectrum;
  std::optional<KernelInfo> kernel;  // CurlCurl only
};

struct SolverSettings {
  int order = 1;
  double tol = 1e-9;
  int max_iterations = 500;
  PreconditionerKind preconditioner = PreconditionerKind::Factorized;
  int threads = 0;
  std::uint64_t seed = 0x5eed;
};

// Assemble and solve the lowest `nev` pairs; curl-curl runs with the gradient
// kernel deflated.
OperatorSolve solve_operator(const TetMesh& mesh, OperatorKind op, int nev, const SolverSettings& settings = {});

// One eigenvalue track across refinement levels.
struct Track {
  std::string op;
  int index = 0;  // 1-based
  std::vector<double> h;
  std::vector<double> values;
  Extrapolation extrapolation;
  double observed_rate = 0.0;  // NaN with fewer than 3 levels
  bool resolved = true;        // converged at every level
};

// Tracks 1..count matched by ascending index across the levels.
std::vector<Track> build_tracks(const std::vector<Spectrum>& levels, int count);

struct Provenance {
  std::string spectrum;  // "alpha" | "lambda"
  std::string source;    // "oracle" | "fem" | "richardson"
  std::vector<double> h;
};

struct LevelInfo {
  int n = 0;
  double h = 0.0;
  std::size_t curl_dofs = 0;
  std::size_t lagrange_dofs = 0;
  std::optional<KernelInfo> kernel;
};

struct InterlaceReport {
  std::string domain;
  int kmax = 0;
  InterlaceCheck check;
  std::vector<Provenance> provenance;
  std::vector<Track> convergence;  // empty in oracle mode
  std::vector<LevelInfo> levels;
  std::vector<Spectrum> alpha_levels;
  std::vector<Spectrum> lambda_levels;
  bool pass = false;
};

// Verdicts from spectra alone: Richardson per track, then the check with
// tolerance max(2 (r_alpha + r_lambda), 1e-6 lambda_k). One level means raw values.
InterlaceReport build_interlace_report(std::string domain, const std::vector<Spectrum>& alpha_levels,
                                       const std::vector<Spectrum>& lambda_levels, int kmax);

// Exact oracle report for boxes (integer arithmetic on cubes).
InterlaceReport oracle_interlace_report(const StudySpec& spec);

InterlaceReport run_interlace_study(const StudySpec& spec);

struct UnionTrack {
  int index = 0;
  double oracle = 0.0;
  std::string family;  // "maxwell" | "dirichlet"
  Track track;
  double rel_error = 0.0;
  bool pass = false;
};

struct UnionReport {
  std::string domain;
  int nev = 0;
  std::vector<double> dirichlet;
  std::vector<double> maxwell;
  std::vector<double> merged;
  std::vector<UnionTrack> tracks;  // empty in oracle mode
  double count_ceiling = 6.5;
  std::size_t count_union = 0;
  std::size_t count_dirichlet = 0;
  std::size_t count_maxwell = 0;
  bool counting_identity = false;  // holds at the ceiling and at every merged value
  std::vector<Spectrum> levels;
  bool pass = false;
};

// Box domains only. Throws InvalidSpecError otherwise.
UnionReport run_union_check(const StudySpec& spec);

struct TrialRow {
  int l = 0;          // Dirichlet eigenvector index (1-based)
  int component = 0;  // 0, 1, 2
  double gradient_energy = 0.0;  // integral of |grad u_l|^2
  double sb = 0.0;               // sb(u, u) for u = u_l e_component
};

struct TrialSubspaceReport {
  int k = 0;
  double lambda_k = 0.0;        // k-th discrete Dirichlet eigenvalue
  double lambda_k_ritz = 0.0;   // max Dirichlet quotient over the k computed eigenvectors
  double max_quotient = 0.0;    // max BForm quotient over the 3k span
  double gradient_sum = 0.0;    // sum of gradient energies
  double sb_sum = 0.0;          // trace of the projected BForm stiffness
  double cross_term = 0.0;      // max |off-diagonal| of the projected BForm stiffness
  std::vector<TrialRow> rows;
  bool pass = false;            // max_quotient <= lambda_k_ritz (1 + 1e-8)
};

// Throws NotConvexError on non-convex meshes and Error on a rank-deficient span.
TrialSubspaceReport run_trial_subspace_check(const TetMesh& mesh, int k, const SolverSettings& settings = {});

struct NeumannRecord {
  int k = 0;
  double mu_k3 = 0.0;
  double lambda_k = 0.0;
  double margin = 0.0;
  bool holds = false;
};

struct NeumannReport {
  std::string domain;
  std::string source;  // "oracle" or "fem h=..."
  std::vector<NeumannRecord> records;
  bool holds = false;  // exploratory, not a gate
};

// mu_{k+3} <= lambda_k from given spectra; throws InsufficientSpectrumError.
NeumannReport neumann_table(std::span<const double> mu, std::span<const double> lambda, int kmax);
// Oracle table for boxes, or FEM on the finest level otherwise / when not oracle_only.
NeumannReport run_neumann_exploration(const StudySpec& spec);

struct DivTraceRecord {
  double value = 0.0;
  double div_fraction = 0.0;   // ||div u||^2 / sb(u, u)
  double interior_rms = 0.0;
  double boundary_rms = 0.0;
  double ratio = 0.0;          // boundary_rms / interior_rms
};

// Piecewise-constant divergence L2-projected to P1, RMS over boundary and
// interior vertices. `field` holds Cartesian vertex values (3 per vertex).
DivTraceRecord div_trace(const TetMesh& mesh, const Eigen::VectorXd& field);

// One record per eigenvector; eigenvectors of nearly equal values
// (relative gap <= group_gap) are rotated to diagonalize the divergence energy.
std::vector<DivTraceRecord> div_trace_diagnostic(const TetMesh& mesh, const Pencil& bform,
                                                 const std::vector<EigenPair>& pairs, double group_gap = 0.02);

struct DivTraceLevel {
  int n = 0;
  double h = 0.0;
  std::vector<DivTraceRecord> records;
};

struct DivTraceReport {
  std::string domain;
  std::vector<DivTraceLevel> levels;
  DivTraceRecord control;  // u = (x, 0, 0) on the finest mesh
};

DivTraceReport run_div_trace_diagnostic(const StudySpec& spec);

}  // namespace curlspec
