#include "corescope/topology.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#if defined(__linux__)
#include <pthread.h>
#include <sched.h>
#endif

#include "corescope/error.hpp"

namespace corescope {

std::string_view to_string(TopologySource source) {
  switch (source) {
    case TopologySource::Detected: return "detected";
    case TopologySource::FlatFallback: return "flat-fallback";
    case TopologySource::Config: return "config";
  }
  return "unknown";
}

Topology::Topology(std::uint32_t packages, std::uint32_t cores_per_package,
                   std::uint32_t threads_per_core, double clock_ghz, TopologySource source,
                   std::vector<int> os_cpus)
    : packages_(packages),
      cores_per_package_(cores_per_package),
      threads_per_core_(threads_per_core),
      clock_ghz_(clock_ghz),
      source_(source),
      os_cpus_(std::move(os_cpus)) {
  if (packages == 0 || cores_per_package == 0 || threads_per_core == 0) {
    throw UsageError("topology: packages, cores_per_package and threads_per_core must be >= 1");
  }
  if (!(clock_ghz > 0.0)) {
    throw UsageError("topology: clock_ghz must be > 0");
  }
  if (!os_cpus_.empty() && os_cpus_.size() != total()) {
    throw UsageError("topology: OS CPU table does not match the shape");
  }
}

std::uint32_t Topology::logical_id(CpuLocation loc) const {
  if (loc.package >= packages_ || loc.core >= cores_per_package_ || loc.slot >= threads_per_core_) {
    throw UsageError("topology: location out of range");
  }
  return (loc.package * cores_per_package_ + loc.core) * threads_per_core_ + loc.slot;
}

CpuLocation Topology::location(std::uint32_t id) const {
  if (id >= total()) throw UsageError("topology: logical id out of range");
  CpuLocation loc;
  loc.slot = id % threads_per_core_;
  id /= threads_per_core_;
  loc.core = id % cores_per_package_;
  loc.package = id / cores_per_package_;
  return loc;
}

int Topology::os_cpu(std::uint32_t logical_id) const {
  if (logical_id >= total()) throw UsageError("topology: logical id out of range");
  return os_cpus_.empty() ? static_cast<int>(logical_id) : os_cpus_[logical_id];
}

Topology Topology::with_clock(double clock_ghz, std::string clock_source) const {
  Topology out(packages_, cores_per_package_, threads_per_core_, clock_ghz, source_, os_cpus_);
  out.clock_source_ = std::move(clock_source);
  return out;
}

namespace {

std::optional<long> read_long(const std::string& path) {
  std::ifstream in(path);
  long v = 0;
  if (in >> v) return v;
  return std::nullopt;
}

std::pair<double, std::string> detect_clock_ghz() {
  if (auto khz = read_long("/sys/devices/system/cpu/cpu0/cpufreq/cpuinfo_max_freq"); khz && *khz > 0) {
    return {static_cast<double>(*khz) / 1e6, "cpufreq"};
  }
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("cpu MHz", 0) == 0) {
      auto colon = line.find(':');
      if (colon != std::string::npos) {
        double mhz = std::strtod(line.c_str() + colon + 1, nullptr);
        if (mhz > 0) return {mhz / 1e3, "cpuinfo"};
      }
    }
  }
  return {1.0, "default"};
}

}  // namespace

Topology detect_topology() {
  std::vector<int> cpus = current_affinity();
  if (cpus.empty()) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    for (unsigned i = 0; i < n; ++i) cpus.push_back(static_cast<int>(i));
  }
  auto [ghz, clock_source] = detect_clock_ghz();

  // (package id, core id) -> cpus
  std::map<std::pair<long, long>, std::vector<int>> cores;
  bool hierarchy_visible = true;
  for (int cpu : cpus) {
    std::string base = "/sys/devices/system/cpu/cpu" + std::to_string(cpu) + "/topology/";
    auto pkg = read_long(base + "physical_package_id");
    auto core = read_long(base + "core_id");
    if (!pkg || !core) {
      hierarchy_visible = false;
      break;
    }
    cores[{*pkg, *core}].push_back(cpu);
  }

  if (hierarchy_visible) {
    std::map<long, std::vector<std::vector<int>>> packages;
    for (auto& [key, members] : cores) {
      std::sort(members.begin(), members.end());
      packages[key.first].push_back(members);
    }
    const std::size_t cores_per_pkg = packages.begin()->second.size();
    const std::size_t threads = packages.begin()->second.front().size();
    bool uniform = true;
    for (auto& [id, pkg_cores] : packages) {
      if (pkg_cores.size() != cores_per_pkg) uniform = false;
      for (auto& c : pkg_cores) {
        if (c.size() != threads) uniform = false;
      }
    }
    if (uniform) {
      std::vector<int> os_cpus;
      for (auto& [id, pkg_cores] : packages) {
        for (auto& c : pkg_cores) os_cpus.insert(os_cpus.end(), c.begin(), c.end());
      }
      return Topology(static_cast<std::uint32_t>(packages.size()),
                      static_cast<std::uint32_t>(cores_per_pkg), static_cast<std::uint32_t>(threads),
                      ghz, TopologySource::Detected, std::move(os_cpus))
          .with_clock(ghz, clock_source);
    }
  }

  std::sort(cpus.begin(), cpus.end());
  const auto n = static_cast<std::uint32_t>(cpus.size());
  return Topology(1, n, 1, ghz, TopologySource::FlatFallback, std::move(cpus))
      .with_clock(ghz, clock_source);
}

Topology apply_overrides(const Topology& detected, const TopologyOverrides& ov) {
  double ghz = ov.clock_ghz.value_or(detected.clock_ghz());
  std::string clock_source = ov.clock_ghz ? "config" : detected.clock_source();
  if (!ov.reshapes()) {
    return detected.with_clock(ghz, clock_source);
  }
  return Topology(ov.packages.value_or(detected.packages()),
                  ov.cores_per_package.value_or(detected.cores_per_package()),
                  ov.threads_per_core.value_or(detected.threads_per_core()), ghz,
                  TopologySource::Config)
      .with_clock(ghz, clock_source);
}

std::string_view to_string(MappingStrategy strategy) {
  switch (strategy) {
    case MappingStrategy::Dumb: return "dumb";
    case MappingStrategy::RoundRobin: return "rr";
    case MappingStrategy::Auto: return "auto";
  }
  return "unknown";
}

MappingStrategy parse_strategy(std::string_view text) {
  if (text == "dumb") return MappingStrategy::Dumb;
  if (text == "rr" || text == "round-robin") return MappingStrategy::RoundRobin;
  if (text == "auto") return MappingStrategy::Auto;
  throw UsageError("unknown mapping strategy '" + std::string(text) + "' (dumb|rr|auto)");
}

std::vector<std::uint32_t> round_robin_slot_order(std::uint32_t threads_per_core) {
  std::vector<std::uint32_t> order;
  order.reserve(threads_per_core);
  if (threads_per_core % 2 != 0) {
    for (std::uint32_t s = 0; s < threads_per_core; ++s) order.push_back(s);
    return order;
  }
  const std::uint32_t half = threads_per_core / 2;
  for (std::uint32_t s = 0; s < half; ++s) {
    order.push_back(s);
    order.push_back(s + half);
  }
  return order;
}

PinPlan pin_plan(MappingStrategy strategy, std::size_t n, const Topology& topo) {
  if (n == 0) throw UsageError("pin_plan: worker count must be >= 1");
  PinPlan plan{strategy, topo, std::vector<std::optional<std::uint32_t>>(n)};

  switch (strategy) {
    case MappingStrategy::Auto:
      break;
    case MappingStrategy::Dumb:
      for (std::size_t i = 0; i < n; ++i) {
        plan.assignments[i] = static_cast<std::uint32_t>(i % topo.total());
      }
      break;
    case MappingStrategy::RoundRobin: {
      const auto slots = round_robin_slot_order(topo.threads_per_core());
      const std::size_t per_group = topo.total_cores();
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t group = i / per_group;
        const std::size_t j = i % per_group;
        CpuLocation loc;
        loc.package = static_cast<std::uint32_t>(j % topo.packages());
        loc.core = static_cast<std::uint32_t>((j / topo.packages()) % topo.cores_per_package());
        loc.slot = slots[group % topo.threads_per_core()];
        plan.assignments[i] = topo.logical_id(loc);
      }
      break;
    }
  }
  return plan;
}

PinOutcome apply_pin(std::optional<std::uint32_t> assignment, const Topology& topo) {
  PinOutcome out;
  if (!assignment) return out;
  if (*assignment >= topo.total()) {
    throw UsageError("apply_pin: logical id " + std::to_string(*assignment) +
                     " outside topology of " + std::to_string(topo.total()) + " CPUs");
  }
  out.logical_id = assignment;
  out.os_cpu = topo.os_cpu(*assignment);

#if defined(__linux__)
  if (out.os_cpu >= CPU_SETSIZE) {
    out.honored = false;
    out.note = "os cpu beyond CPU_SETSIZE";
    return out;
  }
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(out.os_cpu, &set);
  int rc = pthread_setaffinity_np(pthread_self(), sizeof(set), &set);
  if (rc != 0) {
    out.honored = false;
    out.note = std::string("pthread_setaffinity_np: ") + std::strerror(rc);
  }
#else
  out.honored = false;
  out.note = "pin-unsupported-platform";
#endif
  return out;
}

std::vector<int> current_affinity() {
  std::vector<int> cpus;
#if defined(__linux__)
  cpu_set_t set;
  CPU_ZERO(&set);
  if (pthread_getaffinity_np(pthread_self(), sizeof(set), &set) == 0) {
    for (int i = 0; i < CPU_SETSIZE; ++i) {
      if (CPU_ISSET(i, &set)) cpus.push_back(i);
    }
  }
#endif
  return cpus;
}

}  // namespace corescope
