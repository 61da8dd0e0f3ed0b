#pragma once

#include <chrono>
#include <cstdint>

namespace corescope {

using MonotonicClock = std::chrono::steady_clock;

inline constexpr const char* kClockName = "steady_clock";

inline std::int64_t now_ns() noexcept {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             MonotonicClock::now().time_since_epoch())
      .count();
}

// Keeps a value alive as far as the optimizer is concerned.
template <typename T>
inline void do_not_optimize(T const& value) noexcept {
#if defined(__GNUC__) || defined(__clang__)
  asm volatile("" : : "r,m"(value) : "memory");
#else
  static volatile T sink;
  sink = value;
#endif
}

inline void clobber_memory() noexcept {
#if defined(__GNUC__) || defined(__clang__)
  asm volatile("" : : : "memory");
#endif
}

inline void cpu_relax() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_ia32_pause();
#elif defined(__aarch64__)
  asm volatile("yield" ::: "memory");
#endif
}

}  // namespace corescope
