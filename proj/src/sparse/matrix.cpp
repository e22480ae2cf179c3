#include "hessfem/sparse/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hessfem::sparse {

SparseMatrix from_triplets(std::int32_t n_rows, std::int32_t n_cols,
                           std::span<const Triplet> entries) {
  if (n_rows < 0 || n_cols < 0)
    throw std::invalid_argument("sparse: negative dimension");
  for (const auto& t : entries) {
    if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols)
      throw std::out_of_range("sparse: triplet index (" +
                              std::to_string(t.row) + "," +
                              std::to_string(t.col) + ") out of range");
    if (!std::isfinite(t.value))
      throw std::invalid_argument("sparse: non-finite triplet value");
  }

  std::vector<Triplet> sorted(entries.begin(), entries.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Triplet& a, const Triplet& b) {
                     return a.row != b.row ? a.row < b.row : a.col < b.col;
                   });

  SparseMatrix m;
  m.n_rows = n_rows;
  m.n_cols = n_cols;
  m.row_offsets.assign(static_cast<std::size_t>(n_rows) + 1, 0);
  m.col_indices.reserve(sorted.size());
  m.values.reserve(sorted.size());

  std::size_t i = 0;
  for (std::int32_t row = 0; row < n_rows; ++row) {
    while (i < sorted.size() && sorted[i].row == row) {
      std::int32_t col = sorted[i].col;
      double sum = 0.0;
      while (i < sorted.size() && sorted[i].row == row && sorted[i].col == col)
        sum += sorted[i++].value;
      m.col_indices.push_back(col);
      m.values.push_back(sum);
    }
    m.row_offsets[static_cast<std::size_t>(row) + 1] =
        static_cast<std::int32_t>(m.values.size());
  }
  return m;
}

std::vector<double> matvec(const SparseMatrix& a, std::span<const double> x) {
  if (static_cast<std::int32_t>(x.size()) != a.n_cols)
    throw std::invalid_argument("sparse: matvec length mismatch");
  std::vector<double> y(static_cast<std::size_t>(a.n_rows), 0.0);
  for (std::int32_t row = 0; row < a.n_rows; ++row) {
    double acc = 0.0;
    for (std::int32_t k = a.row_offsets[row]; k < a.row_offsets[row + 1]; ++k)
      acc += a.values[k] * x[a.col_indices[k]];
    y[row] = acc;
  }
  return y;
}

std::vector<double> matvec_transpose(const SparseMatrix& a,
                                     std::span<const double> x) {
  if (static_cast<std::int32_t>(x.size()) != a.n_rows)
    throw std::invalid_argument("sparse: matvec length mismatch");
  std::vector<double> y(static_cast<std::size_t>(a.n_cols), 0.0);
  for (std::int32_t row = 0; row < a.n_rows; ++row) {
    for (std::int32_t k = a.row_offsets[row]; k < a.row_offsets[row + 1]; ++k)
      y[a.col_indices[k]] += a.values[k] * x[row];
  }
  return y;
}

}  // namespace hessfem::sparse
