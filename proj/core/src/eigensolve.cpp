#include "curlspec/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "curlspec/error.hpp"
#include "spd_factor.hpp"

namespace curlspec {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using ColMatrix = Eigen::SparseMatrix<double>;

namespace {

MatrixXd random_block(int n, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  MatrixXd X(n, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < n; ++i) X(i, j) = dist(rng);
  }
  return X;
}

// Cholesky of M: SPD check and the M^-1 norm used for residuals.
class MassFactor {
public:
  explicit MassFactor(const SymSparse& M) {
    if (!llt_.compute(ColMatrix(M.eigen()))) {
      throw NotPositiveDefiniteError("mass matrix is not SPD (Cholesky failed)");
    }
  }

  // ||r_j||_{M^-1} = sqrt(r_j . M^-1 r_j) per column.
  std::vector<double> inverse_norms(const MatrixXd& R) const {
    const MatrixXd Z = llt_.solve(R);
    std::vector<double> out(static_cast<std::size_t>(R.cols()));
    for (int j = 0; j < R.cols(); ++j) out[j] = std::sqrt(std::max(0.0, R.col(j).dot(Z.col(j))));
    return out;
  }

  double inverse_norm(const VectorXd& r) const { return inverse_norms(r).front(); }

private:
  detail::SpdFactor llt_;
};

// x <- x - Z (Z^T M Z)^-1 Z^T M x
class Deflator {
public:
  Deflator(const ColMatrix& Z, const SymSparse& M) : Z_(Z) {
    MZ_ = ColMatrix(M.eigen()) * Z_;
    ColMatrix gram = ColMatrix(Z_.transpose()) * MZ_;
    if (!llt_.compute(gram)) {
      throw NotPositiveDefiniteError("deflation basis is not M-orthonormalizable (rank deficient)");
    }
  }

  void apply(MatrixXd& X) const {
    MatrixXd c = MZ_.transpose() * X;
    MatrixXd y = llt_.solve(c);
    X.noalias() -= Z_ * y;
  }

private:
  ColMatrix Z_;
  ColMatrix MZ_;
  detail::SpdFactor llt_;
};

class Preconditioner {
public:
  Preconditioner(const SymSparse& K, const SymSparse& M, PreconditionerKind kind) : kind_(kind) {
    ColMatrix A = ColMatrix(K.eigen()) + ColMatrix(M.eigen());
    if (kind_ == PreconditionerKind::Factorized) {
      if (!factor_.compute(A)) throw NotPositiveDefiniteError("K + M is not factorizable");
    } else {
      inv_diag_ = A.diagonal().cwiseInverse();
    }
  }

  MatrixXd apply(const MatrixXd& R) const {
    if (kind_ == PreconditionerKind::Factorized) return factor_.solve(R);
    return inv_diag_.asDiagonal() * R;
  }

private:
  PreconditionerKind kind_;
  detail::SpdFactor factor_;
  VectorXd inv_diag_;
};

// Returns V with V^T M V = I spanning (numerically) the columns of V;
// directions with relative Gram eigenvalue below `drop` are discarded.
MatrixXd m_orthonormalize(const MatrixXd& V, const CsrMatrix& M, double drop = 1e-13) {
  if (V.cols() == 0) return V;
  MatrixXd W = V;
  for (int pass = 0; pass < 2; ++pass) {
    MatrixXd G = W.transpose() * (M * W);
    G = 0.5 * (G + G.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(G);
    const VectorXd& d = es.eigenvalues();
    const double dmax = d.cwiseAbs().maxCoeff();
    if (!(dmax > 0.0)) return MatrixXd(V.rows(), 0);
    std::vector<int> keep;
    for (int k = 0; k < d.size(); ++k) {
      if (d(k) > drop * dmax) keep.push_back(k);
    }
    MatrixXd U(W.cols(), static_cast<int>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
      U.col(static_cast<int>(k)) = es.eigenvectors().col(keep[k]) / std::sqrt(d(keep[k]));
    }
    W = W * U;
  }
  return W;
}

// V <- V - B (B^T M V) twice; B is M-orthonormal.
void m_orthogonalize_against(MatrixXd& V, const MatrixXd& B, const CsrMatrix& M) {
  if (B.cols() == 0 || V.cols() == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    MatrixXd c = B.transpose() * (M * V);
    V.noalias() -= B * c;
  }
}

}  // namespace

SolveResult solve_lowest(const SymSparse& K, const SymSparse& M, const SolveOptions& opt,
                         const ColMatrix* deflation) {
  const int n = K.dim();
  if (M.dim() != n) throw InvalidSpecError("K and M dimensions differ");
  if (opt.nev < 1) throw InvalidSpecError("nev must be >= 1");
  const int available = n - (deflation ? static_cast<int>(deflation->cols()) : 0);
  if (opt.nev > available) throw InvalidSpecError("nev exceeds the number of free dofs");

  const MassFactor mass(M);
  std::optional<Deflator> deflator;
  if (deflation && deflation->cols() > 0) deflator.emplace(*deflation, M);
  const Preconditioner prec(K, M, opt.preconditioner);
  const CsrMatrix& Km = K.eigen();
  const CsrMatrix& Mm = M.eigen();

  const int block = std::min(available, opt.block_size > 0 ? std::max(opt.block_size, opt.nev)
                                                          : opt.nev + std::min(opt.nev, 10));

  MatrixXd X = random_block(n, block, opt.seed);
  if (deflator) deflator->apply(X);
  X = m_orthonormalize(X, Mm);

  VectorXd theta;
  auto rayleigh_ritz = [&](const MatrixXd& S, int want, MatrixXd& C) {
    MatrixXd A = S.transpose() * (Km * S);
    MatrixXd B = S.transpose() * (Mm * S);
    A = 0.5 * (A + A.transpose());
    B = 0.5 * (B + B.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(A, B);
    theta = es.eigenvalues().head(want);
    C = es.eigenvectors().leftCols(want);
  };

  MatrixXd C;
  rayleigh_ritz(X, static_cast<int>(X.cols()), C);
  X = X * C;

  MatrixXd P(n, 0);
  SolveResult result;
  std::vector<double> res(X.cols(), 0.0);
  int it = 0;
  for (; it <= opt.max_iterations; ++it) {
    const int b = static_cast<int>(X.cols());
    MatrixXd R = Km * X - (Mm * X) * theta.asDiagonal();
    std::vector<int> active;
    bool wanted_done = true;
    res = mass.inverse_norms(R);
    for (int j = 0; j < b; ++j) {
      const bool ok = res[j] <= opt.tol * (std::abs(theta(j)) + 1.0);
      if (!ok) active.push_back(j);
      if (j < opt.nev && !ok) wanted_done = false;
    }
    if (wanted_done || it == opt.max_iterations) break;

    MatrixXd Ra(n, static_cast<int>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) Ra.col(static_cast<int>(k)) = R.col(active[k]);
    MatrixXd W = prec.apply(Ra);
    if (deflator) deflator->apply(W);
    m_orthogonalize_against(W, X, Mm);
    W = m_orthonormalize(W, Mm);
    if (P.cols() > 0) {
      if (deflator) deflator->apply(P);
      m_orthogonalize_against(P, X, Mm);
      m_orthogonalize_against(P, W, Mm);
      P = m_orthonormalize(P, Mm);
    }

    const int nw = static_cast<int>(W.cols());
    const int np = static_cast<int>(P.cols());
    MatrixXd S(n, b + nw + np);
    S << X, W, P;
    rayleigh_ritz(S, b, C);
    MatrixXd Xnew = S * C;
    // Search direction: the W and P components of the new Ritz vectors.
    P = S.rightCols(nw + np) * C.bottomRows(nw + np);
    X = std::move(Xnew);
    if (deflator && it % 10 == 9) deflator->apply(X);
  }
  result.iterations = it;

  // Final M-normalization and residuals.
  result.converged = true;
  for (int j = 0; j < opt.nev; ++j) {
    EigenPair pr;
    VectorXd x = X.col(j);
    x /= std::sqrt(x.dot(Mm * x));
    pr.value = x.dot(Km * x);
    pr.residual = mass.inverse_norm(Km * x - pr.value * (Mm * x));
    pr.converged = pr.residual <= opt.tol * (std::abs(pr.value) + 1.0);
    result.converged = result.converged && pr.converged;
    pr.vector = std::move(x);
    result.pairs.push_back(std::move(pr));
  }
  std::stable_sort(result.pairs.begin(), result.pairs.end(),
                   [](const EigenPair& a, const EigenPair& b) { return a.value < b.value; });
  return result;
}

SolveResult solve_shift_invert(const SymSparse& K, const SymSparse& M, double sigma, int nev, double tol,
                               std::uint64_t seed) {
  const int n = K.dim();
  if (nev < 1 || nev > n) throw InvalidSpecError("nev must be in [1, dim]");
  const MassFactor mass(M);
  const CsrMatrix& Km = K.eigen();
  const CsrMatrix& Mm = M.eigen();

  ColMatrix A = ColMatrix(Km) - sigma * ColMatrix(Mm);
  Eigen::SimplicialLDLT<ColMatrix> ldlt(A);
  const VectorXd d = ldlt.vectorD();
  const double dmax = d.size() ? d.cwiseAbs().maxCoeff() : 0.0;
  if (ldlt.info() != Eigen::Success || !(d.cwiseAbs().minCoeff() > 64.0 * 2.2e-16 * dmax)) {
    throw SingularShiftError(sigma, sigma * (1.0 + 1e-3) + 1e-6);
  }

  const int max_dim = std::min(n, std::max(2 * nev + 20, 4 * nev));
  MatrixXd Q(n, max_dim);
  VectorXd start = random_block(n, 1, seed).col(0);
  SolveResult result;

  for (int restart = 0; restart < 20; ++restart) {
    std::vector<double> alpha, beta;
    Q.col(0) = start / std::sqrt(start.dot(Mm * start));
    int m = 0;
    for (int j = 0; j < max_dim; ++j) {
      VectorXd w = ldlt.solve(Mm * Q.col(j));
      const double a = Q.col(j).dot(Mm * w);
      alpha.push_back(a);
      // Full reorthogonalization in the M inner product, twice.
      for (int pass = 0; pass < 2; ++pass) {
        VectorXd c = Q.leftCols(j + 1).transpose() * (Mm * w);
        w.noalias() -= Q.leftCols(j + 1) * c;
      }
      const double bnorm = std::sqrt(std::max(0.0, w.dot(Mm * w)));
      m = j + 1;
      if (j + 1 == max_dim || bnorm < 1e-13 * std::abs(a) || bnorm == 0.0) {
        beta.push_back(bnorm);
        break;
      }
      beta.push_back(bnorm);
      Q.col(j + 1) = w / bnorm;
    }

    MatrixXd T = MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
      T(j, j) = alpha[j];
      if (j + 1 < m) T(j, j + 1) = T(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(T);
    // Largest |theta| are the eigenvalues nearest sigma.
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
      return std::abs(es.eigenvalues()(x)) > std::abs(es.eigenvalues()(y));
    });
    const int take = std::min(nev, m);

    result.pairs.clear();
    bool all = true;
    VectorXd next = VectorXd::Zero(n);
    for (int k = 0; k < take; ++k) {
      const int idx = order[k];
      VectorXd x = Q.leftCols(m) * es.eigenvectors().col(idx);
      x /= std::sqrt(x.dot(Mm * x));
      EigenPair pr;
      pr.value = x.dot(Km * x);
      pr.residual = mass.inverse_norm(Km * x - pr.value * (Mm * x));
      pr.converged = pr.residual <= tol * (std::abs(pr.value) + 1.0);
      all = all && pr.converged;
      next += x;
      pr.vector = std::move(x);
      result.pairs.push_back(std::move(pr));
    }
    result.iterations += m;
    if (all || take < nev) {
      result.converged = all;
      break;
    }
    start = next;
  }
  std::sort(result.pairs.begin(), result.pairs.end(),
            [](const EigenPair& a, const EigenPair& b) { return a.value < b.value; });
  return result;
}

std::vector<EigenPair> drop_zero_modes(std::vector<EigenPair> pairs, double sigma) {
  const double threshold = 1e-8 * std::max(1.0, sigma);
  std::erase_if(pairs, [&](const EigenPair& p) { return p.value < threshold; });
  return pairs;
}

double rayleigh_quotient(const SymSparse& K, const SymSparse& M, const VectorXd& x) {
  const double den = M.quadratic_form(x);
  if (x.size() == 0 || x.isZero(0.0) || !(den > 0.0)) {
    throw InvalidSpecError("Rayleigh quotient of the zero vector");
  }
  return K.quadratic_form(x) / den;
}

VectorXd dense_eigenvalues(const SymSparse& K, const SymSparse& M) {
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(K.to_dense(), M.to_dense(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NotPositiveDefiniteError("dense pencil solve failed (M not SPD?)");
  return es.eigenvalues();
}

double max_rayleigh_over_span(const MatrixXd& Kb, const MatrixXd& Mb) {
  Eigen::LLT<MatrixXd> llt(Mb);
  if (llt.info() != Eigen::Success) throw Error("trial Gram matrix is rank deficient");
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(Kb, Mb, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace curlspec
