#pragma once

#include <memory>
#include <span>
#include <vector>

#include "hessfem/sparse/matrix.hpp"

namespace hessfem::sparse {

// Direct LU factorization of one square matrix snapshot. Immutable once
// built; concurrent solves against the same instance are safe. The transpose
// solve reuses the factors, no second factorization is performed.
class Factorization {
 public:
  explicit Factorization(const SparseMatrix& a);
  ~Factorization();
  Factorization(Factorization&&) noexcept;
  Factorization& operator=(Factorization&&) noexcept;
  Factorization(const Factorization&) = delete;
  Factorization& operator=(const Factorization&) = delete;

  std::int32_t size() const;
  std::vector<double> solve(std::span<const double> b) const;
  std::vector<double> solve_transpose(std::span<const double> b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

inline Factorization factorize(const SparseMatrix& a) {
  return Factorization(a);
}

}  // namespace hessfem::sparse
