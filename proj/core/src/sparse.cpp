#include "curlspec/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace curlspec {

SymSparse SymSparse::from_triplets(int dim, std::vector<Triplet> entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  std::vector<int> offsets(static_cast<std::size_t>(dim) + 1, 0);
  std::vector<int> cols;
  std::vector<double> vals;
  cols.reserve(entries.size() / 4);
  vals.reserve(entries.size() / 4);
  for (std::size_t k = 0; k < entries.size();) {
    std::size_t l = k;
    double sum = 0.0;
    while (l < entries.size() && entries[l].row == entries[k].row && entries[l].col == entries[k].col) {
      sum += entries[l].value;
      ++l;
    }
    cols.push_back(entries[k].col);
    vals.push_back(sum);
    ++offsets[entries[k].row + 1];
    k = l;
  }
  for (int r = 0; r < dim; ++r) offsets[r + 1] += offsets[r];

  Eigen::Map<const CsrMatrix> view(dim, dim, static_cast<int>(vals.size()), offsets.data(), cols.data(),
                                   vals.data());
  SymSparse s;
  s.m_ = view;
  s.m_.makeCompressed();
  return s;
}

SymSparse SymSparse::from_eigen(CsrMatrix m) {
  SymSparse s;
  s.m_ = std::move(m);
  s.m_.makeCompressed();
  return s;
}

double SymSparse::max_abs() const noexcept {
  double mx = 0.0;
  for (double v : values()) mx = std::max(mx, std::abs(v));
  return mx;
}

double SymSparse::symmetry_defect() const {
  const double scale = max_abs();
  if (scale == 0.0) return 0.0;
  CsrMatrix t = m_.transpose();
  CsrMatrix diff = m_ - t;
  double mx = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (CsrMatrix::InnerIterator it(diff, k); it; ++it) mx = std::max(mx, std::abs(it.value()));
  }
  return mx / scale;
}

void write_matrix_market(const SymSparse& a, std::ostream& out) {
  const auto offsets = a.row_offsets();
  const auto cols = a.column_indices();
  const auto vals = a.values();
  std::size_t lower = 0;
  for (int r = 0; r < a.dim(); ++r) {
    for (int k = offsets[r]; k < offsets[r + 1]; ++k) lower += cols[k] <= r;
  }
  const auto old = out.precision(17);
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << a.dim() << " " << a.dim() << " " << lower << "\n";
  for (int r = 0; r < a.dim(); ++r) {
    for (int k = offsets[r]; k < offsets[r + 1]; ++k) {
      if (cols[k] <= r) out << r + 1 << " " << cols[k] + 1 << " " << vals[k] << "\n";
    }
  }
  out.precision(old);
}

}  // namespace curlspec
