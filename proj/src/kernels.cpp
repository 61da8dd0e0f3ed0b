#include "corescope/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

#if defined(__unix__)
#include <unistd.h>
#endif

#include "corescope/clock.hpp"
#include "corescope/error.hpp"
#include "corescope/rng.hpp"

namespace corescope {

std::string_view to_string(ComputeKind kind) {
  return kind == ComputeKind::IntChain ? "int" : "float";
}

std::string_view to_string(MemoryKind kind) {
  return kind == MemoryKind::Read ? "read" : "write";
}

void ComputeKernelSpec::validate() const {
  if (dataset_len == 0) throw UsageError("compute kernel: dataset_len must be >= 1");
  if (iterations == 0) throw UsageError("compute kernel: iterations must be >= 1");
}

void MemoryKernelSpec::validate() const {
  if (element_width != 1 && element_width != 2 && element_width != 4 && element_width != 8) {
    throw UsageError("memory kernel: element_width must be 1, 2, 4 or 8");
  }
  if (block_bytes < kMiB) throw UsageError("memory kernel: block must be at least 1 MiB");
  if (block_bytes % element_width != 0) {
    throw UsageError("memory kernel: block size not divisible by element width");
  }
}

std::uint64_t units_per_thread(const KernelSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::uint64_t {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, ComputeKernelSpec>) {
          return s.ops_per_thread();
        } else {
          return s.bytes_per_thread();
        }
      },
      spec);
}

std::uint64_t total_units(std::uint64_t per_thread_units, std::size_t n_threads) {
  return per_thread_units * static_cast<std::uint64_t>(n_threads);
}

namespace {

template <typename T>
[[gnu::noinline]] T run_chain(const ChainInputs<T>& in, std::uint64_t iterations) {
  const T* const data = in.dataset.data();
  const std::size_t len = in.dataset.size();
  const T c1 = in.c1;
  const T c2 = in.c2;
  const T c3 = in.c3;
  T acc = in.acc0;
  std::size_t idx = 0;
  for (std::uint64_t i = 0; i < iterations; ++i) {
    const T x = data[idx];
    if (++idx == len) idx = 0;
    const T t1 = acc * x;
    const T t2 = t1 + c1;
    const T t3 = t2 * acc;
    const T t4 = t3 - x;
    const T t5 = t4 * c2;
    const T t6 = t5 + x;
    const T t7 = t6 * t1;
    acc = t7 - c3;
  }
  do_not_optimize(acc);
  return acc;
}

}  // namespace

IntChainInputs make_int_inputs(std::size_t dataset_len, std::uint64_t seed) {
  SeededStream rng(seed);
  IntChainInputs in;
  in.dataset.resize(dataset_len);
  for (auto& x : in.dataset) x = rng.bits();
  in.acc0 = rng.bits();
  in.c1 = rng.bits();
  in.c2 = rng.bits();
  in.c3 = rng.bits();
  return in;
}

FloatChainInputs make_float_inputs(std::size_t dataset_len, std::uint64_t seed) {
  SeededStream rng(seed);
  FloatChainInputs in;
  in.dataset.resize(dataset_len);
  for (auto& x : in.dataset) x = rng.symmetric(0.5);
  in.acc0 = rng.symmetric(1.0);
  in.c1 = rng.symmetric(0.25);
  in.c2 = rng.symmetric(0.25);
  in.c3 = rng.symmetric(0.25);
  return in;
}

std::uint64_t run_int_chain(const IntChainInputs& in, std::uint64_t iterations) {
  if (in.dataset.empty()) throw UsageError("compute kernel: empty dataset");
  return run_chain(in, iterations);
}

double run_float_chain(const FloatChainInputs& in, std::uint64_t iterations) {
  if (in.dataset.empty()) throw UsageError("compute kernel: empty dataset");
  return run_chain(in, iterations);
}

ComputeValue run_compute_body(const ComputeKernelSpec& spec, std::uint64_t seed) {
  spec.validate();
  if (spec.kind == ComputeKind::IntChain) {
    return run_int_chain(make_int_inputs(spec.dataset_len, seed), spec.iterations);
  }
  return run_float_chain(make_float_inputs(spec.dataset_len, seed), spec.iterations);
}

void MemoryBlock::Free::operator()(std::byte* p) const noexcept {
  ::operator delete[](p, std::align_val_t{64});
}

MemoryBlock::MemoryBlock(std::size_t bytes) : size_(bytes) {
  auto* raw = static_cast<std::byte*>(::operator new[](bytes, std::align_val_t{64}, std::nothrow));
  if (raw == nullptr) {
    throw ResourceError("memory kernel: failed to allocate " + std::to_string(bytes / kMiB) +
                        " MiB per thread");
  }
  data_.reset(raw);
  std::memset(raw, 0, bytes);
}

std::uint64_t run_mem_write(MemoryBlock& block) {
  std::memset(block.data(), 0, block.size());
  do_not_optimize(block.data());
  clobber_memory();
  return block.size();
}

namespace {

template <typename T>
[[gnu::noinline]] std::uint64_t sum_elements(const std::byte* data, std::size_t bytes) {
  const T* p = reinterpret_cast<const T*>(data);
  const std::size_t n = bytes / sizeof(T);
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc += p[i];
  do_not_optimize(acc);
  return acc;
}

}  // namespace

std::uint64_t run_mem_read(const MemoryBlock& block, std::size_t element_width) {
  clobber_memory();
  switch (element_width) {
    case 1: return sum_elements<std::uint8_t>(block.data(), block.size());
    case 2: return sum_elements<std::uint16_t>(block.data(), block.size());
    case 4: return sum_elements<std::uint32_t>(block.data(), block.size());
    case 8: return sum_elements<std::uint64_t>(block.data(), block.size());
    default: throw UsageError("memory kernel: element_width must be 1, 2, 4 or 8");
  }
}

std::uint64_t available_memory_bytes() {
  std::ifstream in("/proc/meminfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("MemAvailable:", 0) == 0) {
      return std::strtoull(line.c_str() + 13, nullptr, 10) * 1024;
    }
  }
#if defined(_SC_AVPHYS_PAGES)
  long pages = sysconf(_SC_AVPHYS_PAGES);
  long page = sysconf(_SC_PAGESIZE);
  if (pages > 0 && page > 0) return static_cast<std::uint64_t>(pages) * static_cast<std::uint64_t>(page);
#endif
  return 0;
}

void check_memory_capacity(std::size_t n_threads, std::size_t block_bytes,
                           std::uint64_t available_bytes) {
  if (available_bytes == 0) return;
  const std::uint64_t need = static_cast<std::uint64_t>(n_threads) * block_bytes;
  if (need > available_bytes) {
    throw ResourceError("memory kernel: " + std::to_string(n_threads) + " threads x " +
                        std::to_string(block_bytes / kMiB) + " MiB per thread = " +
                        std::to_string(need / kMiB) + " MiB exceeds available " +
                        std::to_string(available_bytes / kMiB) + " MiB");
  }
}

}  // namespace corescope
