#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corescope/kernels.hpp"
#include "corescope/topology.hpp"

namespace corescope {

struct TrialConfig {
  std::size_t n_threads = 1;
  MappingStrategy strategy = MappingStrategy::Auto;
  KernelSpec kernel = ComputeKernelSpec{};
  std::size_t repeats = 3;

  void validate() const;
};

struct ThreadTiming {
  std::int64_t start_ns = 0;
  std::int64_t end_ns = 0;
  std::optional<std::uint32_t> pinned_to;
  bool pin_honored = true;
  std::string pin_note;
};

struct TrialMetadata {
  std::optional<Topology> topology;
  MappingStrategy strategy = MappingStrategy::Auto;
  std::string clock = "steady_clock";
  std::string timestamp;            // UTC, ISO 8601
  std::int64_t release_ns = 0;      // barrier release, same clock as per_thread
  std::vector<std::size_t> start_order;  // worker indices by ascending start_ns
};

struct TrialResult {
  std::vector<ThreadTiming> per_thread;
  std::int64_t span_ns = 0;
  std::uint64_t total_units = 0;
  double throughput = 0.0;  // units per second
  TrialMetadata metadata;
};

// span = max(end) - min(start), floored at 1 ns; total = per-thread units x
// threads; throughput = total / (span * 1e-9). Throws UsageError on an empty
// timing list or an end preceding its start.
TrialResult make_trial_result(std::vector<ThreadTiming> timings, std::uint64_t units_per_thread,
                              TrialMetadata metadata);

// One barrier-released run of cfg.n_threads workers.
TrialResult run_trial(const TrialConfig& cfg, const Topology& topo);

// Index of the highest-throughput result; first wins on ties.
std::size_t best_index(std::span<const TrialResult> results);
TrialResult aggregate(std::span<const TrialResult> results);

struct SweepPoint {
  std::size_t n_threads = 0;
  TrialResult best;
  std::size_t repeats = 0;
  std::size_t kept_index = 0;
};

// aggregate(run_trial x repeats) for each count. Counts must be nonempty and
// strictly ascending. Errors are rethrown with the failing count prefixed.
std::vector<SweepPoint> sweep(std::span<const std::size_t> thread_counts,
                              const TrialConfig& cfg_template, const Topology& topo);

// 1, 2, 3, 4, 6, 8, 12, 16, ... : every 2^n and 2^n + 2^(n-1) up to max.
std::vector<std::size_t> thread_ladder(std::size_t max);

std::string utc_timestamp();

}  // namespace corescope
