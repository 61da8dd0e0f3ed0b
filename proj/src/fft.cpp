#include <atomic>
#include <bit>
#include <cmath>
#include <numbers>

#include "corescope/clock.hpp"
#include "corescope/error.hpp"
#include "corescope/rng.hpp"
#include "corescope/workloads.hpp"

namespace corescope {

SpinStats stats_delta(const SpinStats& after, const SpinStats& before) {
  SpinStats d;
  d.cas_retries = after.cas_retries - before.cas_retries;
  d.threads_created = after.threads_created - before.threads_created;
  d.pool_hits = after.pool_hits - before.pool_hits;
  d.pool_misses = after.pool_misses - before.pool_misses;
  d.pooled_retires = after.pooled_retires - before.pooled_retires;
  d.exited_retires = after.exited_retires - before.exited_retires;
  d.peak_pool_size = after.peak_pool_size;
  d.cap_violations = after.cap_violations - before.cap_violations;
  return d;
}

void FftSpec::validate() const {
  if (size_log2 < 1 || size_log2 > 16) throw UsageError("fft: size_log2 must be in [1, 16]");
  if (cutoff < 1) throw UsageError("fft: cutoff must be >= 1");
}

namespace {

struct FftContext {
  std::size_t cutoff;
  TaskPool& pool;
  std::atomic<std::uint64_t> spawned{0};
};

// out[0..n) = DFT of in[0], in[stride], ..., in[(n-1) stride]
void fft_rec(const Complex* in, std::size_t stride, Complex* out, std::size_t n, FftContext& ctx) {
  if (n == 1) {
    out[0] = in[0];
    return;
  }
  const std::size_t half = n / 2;
  if (n <= ctx.cutoff) {
    fft_rec(in, 2 * stride, out, half, ctx);
    fft_rec(in + stride, 2 * stride, out + half, half, ctx);
  } else {
    ctx.spawned.fetch_add(2, std::memory_order_relaxed);
    Ticket even = ctx.pool.spawn([=, &ctx] { fft_rec(in, 2 * stride, out, half, ctx); });
    Ticket odd = ctx.pool.spawn([=, &ctx] { fft_rec(in + stride, 2 * stride, out + half, half, ctx); });
    even.wait();
    odd.wait();
    even.get();
    odd.get();
  }
  const double step = -2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t k = 0; k < half; ++k) {
    const Complex w = std::polar(1.0, step * static_cast<double>(k));
    const Complex e = out[k];
    const Complex t = w * out[k + half];
    out[k] = e + t;
    out[k + half] = e - t;
  }
}

}  // namespace

FftResult fft_run(std::span<const Complex> input, std::size_t cutoff, TaskPool& pool) {
  if (input.empty() || !std::has_single_bit(input.size())) {
    throw UsageError("fft: input length " + std::to_string(input.size()) + " is not a power of two");
  }
  if (cutoff < 1) throw UsageError("fft: cutoff must be >= 1");

  FftResult r;
  r.spectrum.resize(input.size());
  FftContext ctx{cutoff, pool};
  const SpinStats before = pool.snapshot_stats();
  const std::int64_t t0 = now_ns();
  fft_rec(input.data(), 1, r.spectrum.data(), input.size(), ctx);
  r.wall_ns = now_ns() - t0;
  pool.wait_idle();
  r.stats = stats_delta(pool.snapshot_stats(), before);
  r.tasks_spawned = ctx.spawned.load();
  return r;
}

std::uint64_t fft_task_count(std::size_t points, std::size_t cutoff) {
  if (points == 0 || !std::has_single_bit(points)) throw UsageError("fft: points must be a power of two");
  if (cutoff < 1) throw UsageError("fft: cutoff must be >= 1");
  unsigned levels = 0;
  for (std::size_t s = points; s > 1 && s > cutoff; s /= 2) ++levels;
  return (std::uint64_t{2} << levels) - 2;
}

std::vector<Complex> make_fft_input(std::size_t points, std::uint64_t seed) {
  std::vector<Complex> x(points);
  SeededStream rng(seed);
  for (auto& v : x) {
    const double re = rng.symmetric(1.0);
    v = Complex(re, rng.symmetric(1.0));
  }
  return x;
}

}  // namespace corescope
