#pragma once

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#ifdef CURLSPEC_HAVE_CHOLMOD
#include <Eigen/CholmodSupport>
#endif

namespace curlspec::detail {

// Sparse Cholesky of an SPD matrix: CHOLMOD supernodal when available,
// Eigen's simplicial LLT otherwise.
class SpdFactor {
public:
  using Matrix = Eigen::SparseMatrix<double>;

  SpdFactor() {
#ifdef CURLSPEC_HAVE_CHOLMOD
    solver_.cholmod().print = 0;
#endif
  }
  explicit SpdFactor(const Matrix& a) : SpdFactor() { compute(a); }

  bool compute(const Matrix& a) {
    solver_.compute(a);
    ok_ = solver_.info() == Eigen::Success;
    return ok_;
  }

  bool ok() const noexcept { return ok_; }

  template <class Rhs>
  Eigen::MatrixXd solve(const Rhs& b) const {
    return solver_.solve(b);
  }

private:
#ifdef CURLSPEC_HAVE_CHOLMOD
  Eigen::CholmodSupernodalLLT<Matrix> solver_;
#else
  Eigen::SimplicialLLT<Matrix> solver_;
#endif
  bool ok_ = false;
};

}  // namespace curlspec::detail
