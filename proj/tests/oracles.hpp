#pragma once

// Reference implementations used by the unit and acceptance tests. Each one
// is written independently of the library code it checks.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

struct Slot {
  std::uint32_t package;
  std::uint32_t core;
  std::uint32_t slot;
  bool operator==(const Slot&) const = default;
};

// Round-robin placement by nested enumeration: for each slot in interleaved
// order, every core, every package; the sequence repeats for n > total.
inline std::vector<Slot> round_robin_plan(std::uint32_t packages, std::uint32_t cores,
                                          std::uint32_t tpc, std::size_t n) {
  std::vector<std::uint32_t> slots;
  if (tpc % 2 == 0) {
    for (std::uint32_t i = 0; i < tpc / 2; ++i) {
      slots.push_back(i);
      slots.push_back(i + tpc / 2);
    }
  } else {
    for (std::uint32_t i = 0; i < tpc; ++i) slots.push_back(i);
  }
  std::vector<Slot> cycle;
  for (std::uint32_t s : slots) {
    for (std::uint32_t c = 0; c < cores; ++c) {
      for (std::uint32_t p = 0; p < packages; ++p) cycle.push_back({p, c, s});
    }
  }
  std::vector<Slot> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(cycle[i % cycle.size()]);
  return out;
}

inline std::uint32_t logical_id(const Slot& s, std::uint32_t cores, std::uint32_t tpc) {
  return s.package * cores * tpc + s.core * tpc + s.slot;
}

// Interprets the kernel body as data: eight three-address instructions over a
// small register file.
enum Reg { ACC, X, C1, C2, C3, T1, T2, T3, T4, T5, T6, T7, kRegs };
enum class Op { Mul, Add, Sub };
struct Instr {
  Reg dst;
  Op op;
  Reg lhs;
  Reg rhs;
};

inline constexpr std::array<Instr, 8> kKernelProgram = {{
    {T1, Op::Mul, ACC, X},
    {T2, Op::Add, T1, C1},
    {T3, Op::Mul, T2, ACC},
    {T4, Op::Sub, T3, X},
    {T5, Op::Mul, T4, C2},
    {T6, Op::Add, T5, X},
    {T7, Op::Mul, T6, T1},
    {ACC, Op::Sub, T7, C3},
}};

template <typename T>
T interpret_kernel(const std::vector<T>& data, T acc0, T c1, T c2, T c3, std::uint64_t iterations) {
  std::array<T, kRegs> r{};
  r[ACC] = acc0;
  r[C1] = c1;
  r[C2] = c2;
  r[C3] = c3;
  for (std::uint64_t i = 0; i < iterations; ++i) {
    r[X] = data[i % data.size()];
    for (const Instr& in : kKernelProgram) {
      const T a = r[in.lhs];
      const T b = r[in.rhs];
      switch (in.op) {
        case Op::Mul: r[in.dst] = a * b; break;
        case Op::Add: r[in.dst] = a + b; break;
        case Op::Sub: r[in.dst] = a - b; break;
      }
    }
  }
  return r[ACC];
}

// X[k] = sum_j x[j] e^{-2 pi i jk/n}, accumulated in long double.
inline std::vector<std::complex<double>> direct_dft(const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    long double re = 0.0L, im = 0.0L;
    for (std::size_t j = 0; j < n; ++j) {
      const long double angle =
          -2.0L * std::numbers::pi_v<long double> * static_cast<long double>((j * k) % n) / n;
      const long double c = std::cos(angle), s = std::sin(angle);
      re += x[j].real() * c - x[j].imag() * s;
      im += x[j].real() * s + x[j].imag() * c;
    }
    out[k] = {static_cast<double>(re), static_cast<double>(im)};
  }
  return out;
}

// Row-major n x n product, i-j-k order.
inline std::vector<double> naive_matmul(const std::vector<double>& a, const std::vector<double>& b,
                                        std::size_t n) {
  std::vector<double> c(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += a[i * n + k] * b[k * n + j];
      c[i * n + j] = s;
    }
  }
  return c;
}

// Every v <= max that is a power of two or three times a power of two.
inline std::vector<std::size_t> ladder(std::size_t max) {
  std::vector<std::size_t> out;
  for (std::size_t v = 1; v <= max; ++v) {
    if (std::has_single_bit(v) || (v % 3 == 0 && std::has_single_bit(v / 3))) out.push_back(v);
  }
  return out;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Counts per bin by direct tally.
inline std::map<std::int64_t, std::uint64_t> tally(const std::vector<std::int64_t>& values,
                                                   std::int64_t width) {
  std::map<std::int64_t, std::uint64_t> out;
  for (auto v : values) ++out[floor_div(v, width)];
  return out;
}

}  // namespace oracle
