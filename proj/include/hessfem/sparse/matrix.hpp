#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hessfem::sparse {

struct Triplet {
  std::int32_t row = 0;
  std::int32_t col = 0;
  double value = 0.0;
};

// Compressed-row square or rectangular matrix. Column indices are strictly
// increasing within each row and offsets are monotone; construction enforces
// both.
struct SparseMatrix {
  std::int32_t n_rows = 0;
  std::int32_t n_cols = 0;
  std::vector<std::int32_t> row_offsets;  // length n_rows + 1
  std::vector<std::int32_t> col_indices;
  std::vector<double> values;

  std::int32_t nnz() const { return static_cast<std::int32_t>(values.size()); }
};

// Duplicates are summed; the result is row-major with sorted columns, so the
// layout is deterministic regardless of input order.
SparseMatrix from_triplets(std::int32_t n_rows, std::int32_t n_cols,
                           std::span<const Triplet> entries);

std::vector<double> matvec(const SparseMatrix& a, std::span<const double> x);
std::vector<double> matvec_transpose(const SparseMatrix& a,
                                     std::span<const double> x);

}  // namespace hessfem::sparse
