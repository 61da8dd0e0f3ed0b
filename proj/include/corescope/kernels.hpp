#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace corescope {

enum class ComputeKind { IntChain, FloatChain };
enum class MemoryKind { Read, Write };

std::string_view to_string(ComputeKind kind);
std::string_view to_string(MemoryKind kind);

inline constexpr std::size_t kMiB = std::size_t{1} << 20;

struct ComputeKernelSpec {
  // 2 add, 2 sub, 4 mul per body execution.
  static constexpr std::uint64_t kOpsPerIteration = 8;

  ComputeKind kind = ComputeKind::IntChain;
  std::size_t dataset_len = 128;
  std::uint64_t iterations = 1'000'000'000;

  void validate() const;
  std::uint64_t ops_per_thread() const { return kOpsPerIteration * iterations; }
};

struct MemoryKernelSpec {
  MemoryKind kind = MemoryKind::Read;
  std::size_t block_bytes = 256 * kMiB;
  std::size_t element_width = sizeof(std::uintptr_t);

  void validate() const;
  std::uint64_t bytes_per_thread() const { return block_bytes; }
};

using KernelSpec = std::variant<ComputeKernelSpec, MemoryKernelSpec>;

// Units (operations or bytes) one thread contributes.
std::uint64_t units_per_thread(const KernelSpec& spec);
std::uint64_t total_units(std::uint64_t per_thread_units, std::size_t n_threads);

template <typename T>
struct ChainInputs {
  std::vector<T> dataset;
  T acc0{};
  T c1{}, c2{}, c3{};
};

using IntChainInputs = ChainInputs<std::uint64_t>;
using FloatChainInputs = ChainInputs<double>;

// Derives dataset and constants from a runtime seed. Float inputs are drawn
// from ranges that keep the recurrence bounded (|x| <= 0.5, |c| <= 0.25,
// |acc0| <= 1), so long runs never reach inf or denormals.
IntChainInputs make_int_inputs(std::size_t dataset_len, std::uint64_t seed);
FloatChainInputs make_float_inputs(std::size_t dataset_len, std::uint64_t seed);

// The 8-op recurrence, `iterations` times, cycling through the dataset:
//   t1=acc*x; t2=t1+c1; t3=t2*acc; t4=t3-x; t5=t4*c2; t6=t5+x; t7=t6*t1; acc=t7-c3
// Integer arithmetic wraps modulo 2^64. The result is also published to an
// optimization sink.
std::uint64_t run_int_chain(const IntChainInputs& in, std::uint64_t iterations);
double run_float_chain(const FloatChainInputs& in, std::uint64_t iterations);

using ComputeValue = std::variant<std::uint64_t, double>;

// Builds inputs from `seed` and runs the chain selected by spec.kind.
ComputeValue run_compute_body(const ComputeKernelSpec& spec, std::uint64_t seed);

// Thread-private block for the memory kernels. Allocation touches every byte
// (zero fill), so no page is first-faulted inside a timed region.
class MemoryBlock {
 public:
  explicit MemoryBlock(std::size_t bytes);

  std::size_t size() const { return size_; }
  std::byte* data() { return data_.get(); }
  const std::byte* data() const { return data_.get(); }
  std::span<std::byte> bytes() { return {data_.get(), size_}; }

 private:
  struct Free {
    void operator()(std::byte* p) const noexcept;
  };
  std::unique_ptr<std::byte[], Free> data_;
  std::size_t size_;
};

// Zeroes the whole block once. Returns bytes written.
std::uint64_t run_mem_write(MemoryBlock& block);

// Sums the block as unsigned integers of `element_width` bytes (1, 2, 4 or 8),
// stride one element. Returns the checksum.
std::uint64_t run_mem_read(const MemoryBlock& block, std::size_t element_width);

// Available physical memory in bytes, or 0 if unknown.
std::uint64_t available_memory_bytes();

// Throws ResourceError when n_threads blocks cannot fit in available_bytes.
// available_bytes == 0 disables the check.
void check_memory_capacity(std::size_t n_threads, std::size_t block_bytes,
                           std::uint64_t available_bytes);

}  // namespace corescope
