#pragma once

#include <cstdint>
#include <random>

namespace corescope {

// Seeded stream of reproducible values. mt19937_64 output is fully specified,
// and the scaling to doubles is done here rather than by a std distribution,
// so streams match across standard library implementations.
class SeededStream {
 public:
  explicit SeededStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in [-scale, scale).
  double symmetric(double scale) { return (2.0 * unit() - 1.0) * scale; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace corescope
