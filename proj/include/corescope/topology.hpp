#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corescope/config.hpp"

namespace corescope {

struct CpuLocation {
  std::uint32_t package = 0;
  std::uint32_t core = 0;
  std::uint32_t slot = 0;

  auto operator<=>(const CpuLocation&) const = default;
};

enum class TopologySource { Detected, FlatFallback, Config };

std::string_view to_string(TopologySource source);

// Machine shape: packages x cores x hardware threads.
//
// Logical ids are laid out package-major, then core, then slot, so that every
// run of `threads_per_core` consecutive ids is one core and every run of
// `cores_per_package * threads_per_core` ids is one package. A detected
// topology also carries the OS CPU number behind each logical id; overridden
// and synthetic topologies map logical id i to OS CPU i.
class Topology {
 public:
  Topology(std::uint32_t packages, std::uint32_t cores_per_package,
           std::uint32_t threads_per_core, double clock_ghz,
           TopologySource source = TopologySource::Config,
           std::vector<int> os_cpus = {});

  std::uint32_t packages() const { return packages_; }
  std::uint32_t cores_per_package() const { return cores_per_package_; }
  std::uint32_t threads_per_core() const { return threads_per_core_; }
  std::uint32_t total() const { return packages_ * cores_per_package_ * threads_per_core_; }
  std::uint32_t total_cores() const { return packages_ * cores_per_package_; }
  double clock_ghz() const { return clock_ghz_; }
  TopologySource source() const { return source_; }
  bool flat_fallback() const { return source_ == TopologySource::FlatFallback; }
  const std::string& clock_source() const { return clock_source_; }

  std::uint32_t logical_id(CpuLocation loc) const;
  CpuLocation location(std::uint32_t logical_id) const;

  // OS CPU number to bind to for a logical id.
  int os_cpu(std::uint32_t logical_id) const;

  Topology with_clock(double clock_ghz, std::string clock_source) const;

  bool operator==(const Topology&) const = default;

 private:
  std::uint32_t packages_;
  std::uint32_t cores_per_package_;
  std::uint32_t threads_per_core_;
  double clock_ghz_;
  TopologySource source_;
  std::vector<int> os_cpus_;
  std::string clock_source_ = "config";
};

// Best-effort discovery from the OS. Falls back to a flat 1 x N x 1 shape
// when no uniform hierarchy is visible.
Topology detect_topology();

// Applies config overrides on top of a detected topology. Reshaping drops the
// detected OS CPU numbering.
Topology apply_overrides(const Topology& detected, const TopologyOverrides& overrides);

enum class MappingStrategy { Dumb, RoundRobin, Auto };

std::string_view to_string(MappingStrategy strategy);
// Accepts dumb, rr, round-robin, auto. Throws UsageError otherwise.
MappingStrategy parse_strategy(std::string_view text);

// Interleaves the two halves of a core's slots: 8 -> [0,4,1,5,2,6,3,7].
// Odd slot counts are returned in ascending order.
std::vector<std::uint32_t> round_robin_slot_order(std::uint32_t threads_per_core);

struct PinPlan {
  MappingStrategy strategy;
  Topology topology;
  std::vector<std::optional<std::uint32_t>> assignments;
};

// Worker index -> logical CPU for n workers. Throws UsageError for n == 0.
PinPlan pin_plan(MappingStrategy strategy, std::size_t n, const Topology& topo);

struct PinOutcome {
  std::optional<std::uint32_t> logical_id;
  int os_cpu = -1;
  bool honored = true;
  std::string note;
};

// Binds the calling thread to one logical CPU, or does nothing for an empty
// assignment. A platform refusal is reported in the outcome, never thrown;
// an id outside the topology throws UsageError before any syscall.
PinOutcome apply_pin(std::optional<std::uint32_t> assignment, const Topology& topo);

// OS CPUs the calling thread may run on.
std::vector<int> current_affinity();

}  // namespace corescope
