#include <array>

#include "corescope/clock.hpp"
#include "corescope/error.hpp"
#include "corescope/rng.hpp"
#include "corescope/workloads.hpp"

namespace corescope {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void MatmulSpec::validate() const {
  if (n == 0) throw UsageError("matmul: n must be >= 1");
  if (recursions > 5) throw UsageError("matmul: recursions must be in [0, 5]");
  if (n % (std::size_t{1} << recursions) != 0) {
    throw UsageError("matmul: n=" + std::to_string(n) + " is not divisible by 2^" +
                     std::to_string(recursions));
  }
}

std::uint64_t leaf_flops(const MatmulSpec& spec) {
  spec.validate();
  const std::uint64_t m = spec.leaf_dim();
  return 2 * m * m * m;
}

MatmulTaskCount matmul_task_count(const MatmulSpec& spec) {
  spec.validate();
  MatmulTaskCount c;
  std::uint64_t level = 1;  // 8^d
  for (unsigned d = 0; d < spec.recursions; ++d) {
    c.addition_tasks += 4 * level;
    level *= 8;
    c.multiply_tasks += level;
  }
  c.leaf_tasks = level;
  return c;
}

namespace {

Matrix leaf_multiply(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.dim();
  Matrix c(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < n; ++l) {
      const double ail = a(i, l);
      for (std::size_t j = 0; j < n; ++j) c(i, j) += ail * b(l, j);
    }
  }
  return c;
}

// Quadrant q of m: 0 = top-left, 1 = top-right, 2 = bottom-left, 3 = bottom-right.
Matrix quadrant(const Matrix& m, int q) {
  const std::size_t h = m.dim() / 2;
  const std::size_t r0 = (q / 2) * h;
  const std::size_t c0 = (q % 2) * h;
  Matrix out(h);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < h; ++j) out(i, j) = m(r0 + i, c0 + j);
  }
  return out;
}

void add_into_quadrant(Matrix& dst, int q, const Matrix& x, const Matrix& y) {
  const std::size_t h = x.dim();
  const std::size_t r0 = (q / 2) * h;
  const std::size_t c0 = (q % 2) * h;
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < h; ++j) dst(r0 + i, c0 + j) = x(i, j) + y(i, j);
  }
}

Matrix multiply(const Matrix& a, const Matrix& b, unsigned depth, TaskPool& pool) {
  if (depth == 0) return leaf_multiply(a, b);

  std::array<Matrix, 4> aq, bq;
  for (int q = 0; q < 4; ++q) {
    aq[q] = quadrant(a, q);
    bq[q] = quadrant(b, q);
  }

  // C[q] = A[row(q)][0] * B[0][col(q)] + A[row(q)][1] * B[1][col(q)]
  // products[2q] and products[2q+1] are the two terms of C[q].
  std::array<Matrix, 8> products;
  std::array<Ticket, 8> mul;
  for (int q = 0; q < 4; ++q) {
    const int row = q / 2;
    const int col = q % 2;
    for (int t = 0; t < 2; ++t) {
      const Matrix* lhs = &aq[row * 2 + t];
      const Matrix* rhs = &bq[t * 2 + col];
      Matrix* out = &products[2 * q + t];
      mul[2 * q + t] = pool.spawn([lhs, rhs, out, depth, &pool] { *out = multiply(*lhs, *rhs, depth - 1, pool); });
    }
  }
  for (auto& t : mul) t.wait();
  for (auto& t : mul) t.get();

  Matrix c(a.dim());
  std::array<Ticket, 4> add;
  for (int q = 0; q < 4; ++q) {
    add[q] = pool.spawn([&c, &products, q] { add_into_quadrant(c, q, products[2 * q], products[2 * q + 1]); });
  }
  for (auto& t : add) t.wait();
  for (auto& t : add) t.get();
  return c;
}

}  // namespace

MatmulResult matmul_run(const Matrix& a, const Matrix& b, unsigned recursions, TaskPool& pool) {
  if (a.dim() != b.dim()) throw UsageError("matmul: operand dimensions differ");
  MatmulSpec{a.dim(), recursions}.validate();

  MatmulResult r;
  const SpinStats before = pool.snapshot_stats();
  const std::int64_t t0 = now_ns();
  r.product = multiply(a, b, recursions, pool);
  r.wall_ns = now_ns() - t0;
  pool.wait_idle();
  r.stats = stats_delta(pool.snapshot_stats(), before);
  return r;
}

std::pair<Matrix, Matrix> make_matmul_operands(std::size_t n, std::uint64_t seed) {
  SeededStream rng(seed);
  Matrix a(n), b(n);
  for (auto& v : a.values()) v = rng.unit();
  for (auto& v : b.values()) v = rng.unit();
  return {std::move(a), std::move(b)};
}

double checksum(const Matrix& m) {
  double s = 0.0;
  for (double v : m.values()) s += v;
  return s;
}

}  // namespace corescope
