#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "corescope/samples.hpp"
#include "corescope/topology.hpp"

namespace corescope {

enum class CreateMode { Joinable, Detached };
enum class CondvarMode { Signal, Broadcast };

std::string_view to_string(CreateMode mode);
std::string_view to_string(CondvarMode mode);

// Options shared by the two-thread benchmarks. Thread A signals, thread B waits.
struct PairOptions {
  double clock_ghz = 1.0;
  std::optional<Topology> topology;  // required when pinning
  std::optional<std::uint32_t> pin_a;
  std::optional<std::uint32_t> pin_b;
  std::chrono::nanoseconds settle{std::chrono::microseconds(10)};
  std::chrono::milliseconds watchdog{std::chrono::seconds(10)};
};

// Per sample: t0, spawn, t1 in the parent; the child stamps its first
// instruction. a = t1 - t0, b = t_start - t0. Samples never overlap.
// A spawn failure truncates the set and records the error.
SampleSet bench_thread_create(CreateMode mode, std::size_t samples, double clock_ghz);

// Average cycles for one lock+unlock pair on an uncontended mutex.
double bench_mutex_uncontended(std::size_t pairs, double clock_ghz);

// Unlock duration (a) and wake latency (b) of a mutex with one blocked waiter.
// The signaler holds the mutex, waits for the waiter's about-to-block flag,
// settles for `settle`, then unlocks. Samples where the waiter found the mutex
// already free are flagged. Counters: exclusion_violations, flagged_no_block.
// Throws WatchdogTimeout if either side stalls longer than `watchdog`.
SampleSet bench_mutex_handoff(std::size_t samples, const PairOptions& opts);

// Signal/broadcast call duration (a) and wake latency (b) with one waiter
// blocked on a predicate-guarded condition variable.
SampleSet bench_condvar(CondvarMode mode, std::size_t samples, const PairOptions& opts);

}  // namespace corescope
