#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "corescope/taskpool.hpp"

namespace corescope {

using Complex = std::complex<double>;

// Stats accumulated between two snapshots of the same pool.
SpinStats stats_delta(const SpinStats& after, const SpinStats& before);

// ---- FFT -----------------------------------------------------------------

struct FftSpec {
  unsigned size_log2 = 10;  // 1..16
  std::size_t cutoff = 64;  // subproblems of at most this many points run inline

  void validate() const;
  std::size_t points() const { return std::size_t{1} << size_log2; }
};

struct FftResult {
  std::vector<Complex> spectrum;
  SpinStats stats;
  std::int64_t wall_ns = 0;
  std::uint64_t tasks_spawned = 0;
};

// Forward DFT, X[k] = sum_j x[j] exp(-2 pi i jk / n), by recursive radix-2
// decimation in time. Every split of a subproblem larger than `cutoff`
// spawns its even and odd halves as two pool tasks and waits for both.
// Throws UsageError unless input.size() is a power of two.
FftResult fft_run(std::span<const Complex> input, std::size_t cutoff, TaskPool& pool);

// Tasks fft_run spawns: 2 * 2^L - 2, L = number of split levels above cutoff.
std::uint64_t fft_task_count(std::size_t points, std::size_t cutoff);

// Deterministic pseudo-random input in [-1, 1) for both parts.
std::vector<Complex> make_fft_input(std::size_t points, std::uint64_t seed);

// ---- Matrix multiplication ----------------------------------------------

// Dense square row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t dim() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  static Matrix identity(std::size_t n);

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct MatmulSpec {
  std::size_t n = 256;
  unsigned recursions = 2;  // 0..5; 0 multiplies inline

  void validate() const;
  std::size_t leaf_dim() const { return n >> recursions; }
};

// 2 m^3 for leaf dimension m.
std::uint64_t leaf_flops(const MatmulSpec& spec);

struct MatmulTaskCount {
  std::uint64_t leaf_tasks = 0;         // 8^k
  std::uint64_t multiply_tasks = 0;     // sum_{d=1..k} 8^d
  std::uint64_t addition_tasks = 0;     // sum_{d=0..k-1} 4 * 8^d
  std::uint64_t total_spawned() const { return multiply_tasks + addition_tasks; }
};

MatmulTaskCount matmul_task_count(const MatmulSpec& spec);

struct MatmulResult {
  Matrix product;
  SpinStats stats;
  std::int64_t wall_ns = 0;
};

// Recursive block product. Each level splits both operands into quadrants,
// spawns the 8 quadrant products as tasks, waits, then spawns the 4 quadrant
// sums as tasks and waits. Leaves run a plain triple loop with the inner
// index ascending, so the result is independent of scheduling and pool.
MatmulResult matmul_run(const Matrix& a, const Matrix& b, unsigned recursions, TaskPool& pool);

// Deterministic operands with entries uniform in [0, 1).
std::pair<Matrix, Matrix> make_matmul_operands(std::size_t n, std::uint64_t seed);

// Sum of all entries in row-major order.
double checksum(const Matrix& m);

// ---- Pool benchmark ------------------------------------------------------

struct PoolBenchSpec {
  PoolConfig pool;
  std::size_t tasks = 100000;
  // Threads issuing spawns concurrently; tasks are split evenly between them.
  std::size_t spawners = 1;
  // Each spawner waits for its outstanding tasks after every `batch` spawns.
  std::size_t batch = 64;

  void validate() const;
};

struct PoolBenchResult {
  SpinStats stats;
  std::int64_t wall_ns = 0;
  std::size_t tasks = 0;
  std::size_t executed_once = 0;  // tasks whose body ran exactly once
  std::size_t pool_size_after = 0;
};

// Spawns `tasks` no-op tasks and counts how often each one ran.
PoolBenchResult run_pool_bench(const PoolBenchSpec& spec);

}  // namespace corescope
