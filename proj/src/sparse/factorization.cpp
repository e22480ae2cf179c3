#include "hessfem/sparse/factorization.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <stdexcept>
#include <string>
#include <utility>

namespace hessfem::sparse {

struct Factorization::Impl {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  std::int32_t n = 0;
};

Factorization::Factorization(const SparseMatrix& a)
    : impl_(std::make_unique<Impl>()) {
  if (a.n_rows != a.n_cols)
    throw std::invalid_argument("sparse: factorize requires a square matrix");
  impl_->n = a.n_rows;

  Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor, std::int32_t>>
      mapped(a.n_rows, a.n_cols, a.nnz(), a.row_offsets.data(),
             a.col_indices.data(), a.values.data());
  Eigen::SparseMatrix<double> col_major = mapped;

  impl_->lu.compute(col_major);
  if (impl_->lu.info() != Eigen::Success)
    throw std::runtime_error("sparse: singular matrix (" +
                             impl_->lu.lastErrorMessage() + ")");
}

Factorization::~Factorization() = default;
Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;

std::int32_t Factorization::size() const { return impl_->n; }

std::vector<double> Factorization::solve(std::span<const double> b) const {
  if (static_cast<std::int32_t>(b.size()) != impl_->n)
    throw std::invalid_argument("sparse: solve rhs length mismatch");
  Eigen::Map<const Eigen::VectorXd> rhs(b.data(), impl_->n);
  Eigen::VectorXd x = impl_->lu.solve(rhs);
  return std::vector<double>(x.data(), x.data() + impl_->n);
}

std::vector<double> Factorization::solve_transpose(
    std::span<const double> b) const {
  if (static_cast<std::int32_t>(b.size()) != impl_->n)
    throw std::invalid_argument("sparse: solve rhs length mismatch");
  Eigen::Map<const Eigen::VectorXd> rhs(b.data(), impl_->n);
  Eigen::VectorXd x = impl_->lu.transpose().solve(rhs);
  return std::vector<double>(x.data(), x.data() + impl_->n);
}

}  // namespace hessfem::sparse
