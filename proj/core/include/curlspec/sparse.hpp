#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace curlspec {

struct Triplet {
  int row;
  int col;
  double value;
};

using CsrMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

// Symmetric sparse matrix, both triangles stored in compressed rows.
class SymSparse {
public:
  SymSparse() = default;

  // Sums duplicates after a stable sort on (row, col), so the result depends
  // only on the order of `entries`, never on how they were produced.
  static SymSparse from_triplets(int dim, std::vector<Triplet> entries);
  static SymSparse from_eigen(CsrMatrix m);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  std::size_t nonzeros() const noexcept { return static_cast<std::size_t>(m_.nonZeros()); }

  std::span<const int> row_offsets() const noexcept {
    return {m_.outerIndexPtr(), static_cast<std::size_t>(m_.outerSize() + 1)};
  }
  std::span<const int> column_indices() const noexcept {
    return {m_.innerIndexPtr(), nonzeros()};
  }
  std::span<const double> values() const noexcept { return {m_.valuePtr(), nonzeros()}; }

  const CsrMatrix& eigen() const noexcept { return m_; }

  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const { return m_ * x; }
  double quadratic_form(const Eigen::VectorXd& x) const { return x.dot(m_ * x); }
  Eigen::VectorXd diagonal() const { return m_.diagonal(); }
  double max_abs() const noexcept;
  Eigen::MatrixXd to_dense() const { return Eigen::MatrixXd(m_); }

  // max |a_ij - a_ji| / max |a_ij|
  double symmetry_defect() const;

private:
  CsrMatrix m_;
};

// Matrix Market coordinate real symmetric; lower triangle, 1-based, 17 digits.
void write_matrix_market(const SymSparse& a, std::ostream& out);

}  // namespace curlspec
