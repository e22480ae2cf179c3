#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "hessfem/sparse/factorization.hpp"
#include "hessfem/sparse/matrix.hpp"

using namespace hessfem::sparse;

namespace {

// Dense Gaussian elimination with partial pivoting; independent oracle for
// the sparse LU path.
std::vector<double> dense_solve(std::vector<std::vector<double>> a,
                                std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    std::swap(a[k], a[piv]);
    std::swap(b[k], b[piv]);
    REQUIRE(std::abs(a[k][k]) > 1e-14);
    for (std::size_t i = k + 1; i < n; ++i) {
      double f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

std::vector<std::vector<double>> to_dense(const SparseMatrix& m) {
  std::vector<std::vector<double>> d(
      m.n_rows, std::vector<double>(static_cast<std::size_t>(m.n_cols), 0.0));
  for (std::int32_t r = 0; r < m.n_rows; ++r)
    for (std::int32_t k = m.row_offsets[r]; k < m.row_offsets[r + 1]; ++k)
      d[r][m.col_indices[k]] += m.values[k];
  return d;
}

std::vector<std::vector<double>> transpose_dense(
    const std::vector<std::vector<double>>& a) {
  std::vector<std::vector<double>> t(a[0].size(),
                                     std::vector<double>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
  return t;
}

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double inf_norm_matrix(const SparseMatrix& a) {
  double m = 0.0;
  for (std::int32_t r = 0; r < a.n_rows; ++r) {
    double s = 0.0;
    for (std::int32_t k = a.row_offsets[r]; k < a.row_offsets[r + 1]; ++k)
      s += std::abs(a.values[k]);
    m = std::max(m, s);
  }
  return m;
}

// 5-node chain of unit elements, each contributing [[1,-1],[-1,1]].
SparseMatrix chain_laplacian() {
  std::vector<Triplet> t;
  for (std::int32_t e = 0; e < 4; ++e) {
    t.push_back({e, e, 1.0});
    t.push_back({e, e + 1, -1.0});
    t.push_back({e + 1, e, -1.0});
    t.push_back({e + 1, e + 1, 1.0});
  }
  return from_triplets(5, 5, t);
}

}  // namespace

TEST_CASE("from_triplets builds the identity") {
  std::vector<Triplet> t = {{0, 0, 1.0}, {1, 1, 1.0}};
  auto m = from_triplets(2, 2, t);
  CHECK(m.nnz() == 2);
  CHECK(m.row_offsets == std::vector<std::int32_t>{0, 1, 2});
  CHECK(m.col_indices == std::vector<std::int32_t>{0, 1});
  CHECK(m.values == std::vector<double>{1.0, 1.0});
}

TEST_CASE("from_triplets sums duplicates") {
  std::vector<Triplet> t = {{0, 0, 1.0}, {0, 0, 2.0}};
  auto m = from_triplets(1, 1, t);
  REQUIRE(m.nnz() == 1);
  CHECK(m.values[0] == 3.0);
}

TEST_CASE("from_triplets is deterministic regardless of input order") {
  std::vector<Triplet> fwd = {{0, 1, 2.0}, {1, 0, 3.0}, {0, 0, 1.0}};
  std::vector<Triplet> rev(fwd.rbegin(), fwd.rend());
  auto a = from_triplets(2, 2, fwd);
  auto b = from_triplets(2, 2, rev);
  CHECK(a.row_offsets == b.row_offsets);
  CHECK(a.col_indices == b.col_indices);
  CHECK(a.values == b.values);
  for (std::int32_t r = 0; r < a.n_rows; ++r)
    for (std::int32_t k = a.row_offsets[r] + 1; k < a.row_offsets[r + 1]; ++k)
      CHECK(a.col_indices[k - 1] < a.col_indices[k]);
}

TEST_CASE("assembled chain of four unit elements is tridiagonal [2,-1]") {
  auto m = chain_laplacian();
  auto d = to_dense(m);
  for (std::int32_t i = 0; i < 5; ++i) {
    for (std::int32_t j = 0; j < 5; ++j) {
      double expect = 0.0;
      if (i == j) expect = (i == 0 || i == 4) ? 1.0 : 2.0;
      if (std::abs(i - j) == 1) expect = -1.0;
      CHECK(d[i][j] == expect);
    }
  }
}

TEST_CASE("from_triplets rejects bad input") {
  std::vector<Triplet> oob = {{2, 0, 1.0}};
  CHECK_THROWS_AS(from_triplets(2, 2, oob), std::out_of_range);
  std::vector<Triplet> neg = {{-1, 0, 1.0}};
  CHECK_THROWS_AS(from_triplets(2, 2, neg), std::out_of_range);
  std::vector<Triplet> nan = {{0, 0, std::nan("")}};
  CHECK_THROWS_AS(from_triplets(2, 2, nan), std::invalid_argument);
}

TEST_CASE("identity factorization returns the rhs unchanged") {
  std::vector<Triplet> t = {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}};
  auto f = factorize(from_triplets(3, 3, t));
  std::vector<double> b = {0.25, -3.0, 7.5};
  auto x = f.solve(b);
  CHECK(x == b);
}

TEST_CASE("diagonal solve") {
  std::vector<Triplet> t = {{0, 0, 2.0}, {1, 1, 4.0}};
  auto f = factorize(from_triplets(2, 2, t));
  auto x = f.solve(std::vector<double>{2.0, 4.0});
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("constrained chain solve matches dense elimination and the closed form") {
  auto m = chain_laplacian();
  // pin both ends: replace first and last rows with identity rows
  auto dense = to_dense(m);
  std::vector<Triplet> t;
  for (std::int32_t r = 1; r < 4; ++r)
    for (std::int32_t c = 0; c < 5; ++c)
      if (dense[r][c] != 0.0) t.push_back({r, c, dense[r][c]});
  t.push_back({0, 0, 1.0});
  t.push_back({4, 4, 1.0});
  auto a = from_triplets(5, 5, t);

  std::vector<double> b = {0.0, 1.0, 1.0, 1.0, 0.0};
  auto f = factorize(a);
  auto x = f.solve(b);
  auto x_dense = dense_solve(to_dense(a), b);
  for (int i = 0; i < 5; ++i)
    CHECK(x[i] == doctest::Approx(x_dense[i]).epsilon(1e-12));

  // -u'' = 1 with unit spacing: u_i = i(4-i)/2
  std::vector<double> closed = {0.0, 1.5, 2.0, 1.5, 0.0};
  for (int i = 0; i < 5; ++i)
    CHECK(x[i] == doctest::Approx(closed[i]).epsilon(1e-12));
}

TEST_CASE("solve residual stays within the factorization bound") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Triplet> t;
  const std::int32_t n = 30;
  for (std::int32_t i = 0; i < n; ++i) {
    t.push_back({i, i, 10.0 + u(rng)});
    t.push_back({i, (i + 7) % n, u(rng)});
    t.push_back({i, (i + 13) % n, u(rng)});
  }
  auto a = from_triplets(n, n, t);
  auto f = factorize(a);
  std::vector<double> b(n);
  for (auto& v : b) v = u(rng);
  auto x = f.solve(b);
  auto ax = matvec(a, x);
  double res = 0.0;
  for (std::int32_t i = 0; i < n; ++i) res = std::max(res, std::abs(ax[i] - b[i]));
  CHECK(res <= 1e-10 * (inf_norm_matrix(a) * inf_norm(x) + inf_norm(b)));
}

TEST_CASE("transpose solve of an upper triangular 2x2") {
  std::vector<Triplet> t = {{0, 0, 1.0}, {0, 1, 2.0}, {1, 1, 1.0}};
  auto f = factorize(from_triplets(2, 2, t));
  auto x = f.solve_transpose(std::vector<double>{1.0, 1.0});
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("solve and solve_transpose agree on a symmetric matrix") {
  auto m = chain_laplacian();
  std::vector<Triplet> t;
  auto dense = to_dense(m);
  for (std::int32_t r = 0; r < 5; ++r)
    for (std::int32_t c = 0; c < 5; ++c)
      if (dense[r][c] != 0.0) t.push_back({r, c, dense[r][c]});
  t.push_back({0, 0, 10.0});  // keep it nonsingular, still symmetric
  t.push_back({4, 4, 10.0});
  auto f = factorize(from_triplets(5, 5, t));
  std::vector<double> b = {1.0, -2.0, 0.5, 3.0, -1.0};
  auto x = f.solve(b);
  auto xt = f.solve_transpose(b);
  for (int i = 0; i < 5; ++i)
    CHECK(x[i] == doctest::Approx(xt[i]).epsilon(1e-12));
}

TEST_CASE("random 10x10 transpose solves satisfy the residual bound") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Triplet> t;
  const std::int32_t n = 10;
  for (std::int32_t i = 0; i < n; ++i) {
    t.push_back({i, i, 8.0 + u(rng)});
    for (std::int32_t j = 0; j < n; ++j)
      if (j != i && std::abs(u(rng)) > 0.5) t.push_back({i, j, u(rng)});
  }
  auto a = from_triplets(n, n, t);
  auto f = factorize(a);
  auto at_dense = transpose_dense(to_dense(a));
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> b(n);
    for (auto& v : b) v = u(rng);
    auto x = f.solve_transpose(b);
    auto atx = matvec_transpose(a, x);
    double res = 0.0;
    for (std::int32_t i = 0; i < n; ++i)
      res = std::max(res, std::abs(atx[i] - b[i]));
    CHECK(res <= 1e-10 * (inf_norm_matrix(a) * inf_norm(x) + inf_norm(b)));
    auto x_dense = dense_solve(at_dense, b);
    for (std::int32_t i = 0; i < n; ++i)
      CHECK(x[i] == doctest::Approx(x_dense[i]).epsilon(1e-10));
  }
}

TEST_CASE("repeat solves are bit-identical") {
  auto m = chain_laplacian();
  std::vector<Triplet> t = {{0, 0, 5.0}, {4, 4, 5.0}};
  auto dense = to_dense(m);
  for (std::int32_t r = 0; r < 5; ++r)
    for (std::int32_t c = 0; c < 5; ++c)
      if (dense[r][c] != 0.0) t.push_back({r, c, dense[r][c]});
  auto f = factorize(from_triplets(5, 5, t));
  std::vector<double> b = {0.1, 0.2, 0.3, 0.4, 0.5};
  auto x1 = f.solve(b);
  auto x2 = f.solve(b);
  CHECK(std::memcmp(x1.data(), x2.data(), x1.size() * sizeof(double)) == 0);
}

TEST_CASE("concurrent solves against one factorization are consistent") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Triplet> t;
  const std::int32_t n = 40;
  for (std::int32_t i = 0; i < n; ++i) {
    t.push_back({i, i, 6.0 + u(rng)});
    t.push_back({i, (i + 3) % n, u(rng)});
  }
  auto f = factorize(from_triplets(n, n, t));
  std::vector<double> b(n);
  for (auto& v : b) v = u(rng);
  auto serial = f.solve(b);

  std::vector<std::vector<double>> results(4);
  std::vector<std::thread> workers;
  for (int w = 0; w < 4; ++w)
    workers.emplace_back([&, w] {
      std::vector<double> last;
      for (int rep = 0; rep < 50; ++rep) last = f.solve(b);
      results[w] = std::move(last);
    });
  for (auto& th : workers) th.join();
  for (const auto& r : results)
    CHECK(std::memcmp(r.data(), serial.data(), n * sizeof(double)) == 0);
}

TEST_CASE("singular and malformed systems are rejected") {
  std::vector<Triplet> sing = {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}};
  CHECK_THROWS_AS(factorize(from_triplets(2, 2, sing)), std::runtime_error);

  std::vector<Triplet> rect = {{0, 0, 1.0}};
  CHECK_THROWS_AS(factorize(from_triplets(2, 3, rect)), std::invalid_argument);

  std::vector<Triplet> ok = {{0, 0, 1.0}, {1, 1, 1.0}};
  auto f = factorize(from_triplets(2, 2, ok));
  CHECK_THROWS_AS(f.solve(std::vector<double>{1.0}), std::invalid_argument);
}
