#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "curlspec/sparse.hpp"

namespace curlspec {

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;  // M-normalized
  double residual = 0.0;   // ||K x - value M x||_{M^-1}
  bool converged = false;
};

enum class PreconditionerKind {
  Factorized,  // sparse LDL^T of K + M
  Diagonal,    // diag(K + M)^-1
};

struct SolveOptions {
  int nev = 1;
  double tol = 1e-9;         // residual <= tol * (|value| + 1)
  int max_iterations = 500;
  int block_size = 0;        // 0: nev + min(nev, 10)
  PreconditionerKind preconditioner = PreconditionerKind::Factorized;
  std::uint64_t seed = 0x5eed;
};

struct SolveResult {
  std::vector<EigenPair> pairs;  // ascending
  int iterations = 0;
  bool converged = false;  // every returned pair converged
};

// Lowest `nev` eigenpairs of K x = value M x by block preconditioned
// conjugate-gradient iteration (LOBPCG). When `deflation` is given its column
// span is removed exactly: every iterate is M-orthogonal to it, so the
// returned pairs are the lowest ones of the pencil restricted to that
// M-orthogonal complement.
// Throws NotPositiveDefiniteError when M (or the deflation Gram matrix) is not SPD.
SolveResult solve_lowest(const SymSparse& K, const SymSparse& M, const SolveOptions& options,
                         const Eigen::SparseMatrix<double>* deflation = nullptr);

// `nev` eigenpairs closest to `sigma` via Lanczos on (K - sigma M)^-1 M with
// full M-reorthogonalization. Throws SingularShiftError when sigma is an
// eigenvalue of the pencil to working precision.
SolveResult solve_shift_invert(const SymSparse& K, const SymSparse& M, double sigma, int nev,
                               double tol = 1e-9, std::uint64_t seed = 0x5eed);

// Values below 1e-8 * max(1, sigma) are dropped (kernel modes of the curl-curl pencil).
std::vector<EigenPair> drop_zero_modes(std::vector<EigenPair> pairs, double sigma);

// (x.Kx) / (x.Mx); throws InvalidSpecError for x = 0.
double rayleigh_quotient(const SymSparse& K, const SymSparse& M, const Eigen::VectorXd& x);

// Every eigenvalue of the pencil, ascending, by a dense symmetric-definite solve.
Eigen::VectorXd dense_eigenvalues(const SymSparse& K, const SymSparse& M);

// Largest Rayleigh quotient over a span B, given the projected pair
// Kb = B^T K B, Mb = B^T M B. Throws Error when Mb is singular.
double max_rayleigh_over_span(const Eigen::MatrixXd& Kb, const Eigen::MatrixXd& Mb);

}  // namespace curlspec
