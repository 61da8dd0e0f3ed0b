#include "corescope/harness.hpp"

#include <algorithm>
#include <ctime>
#include <exception>
#include <numeric>
#include <system_error>
#include <thread>

#include "corescope/barrier.hpp"
#include "corescope/clock.hpp"
#include "corescope/error.hpp"

namespace corescope {

void TrialConfig::validate() const {
  if (n_threads == 0) throw UsageError("trial: n_threads must be >= 1");
  if (repeats == 0) throw UsageError("trial: repeats must be >= 1");
  std::visit([](const auto& k) { k.validate(); }, kernel);
}

std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

TrialResult make_trial_result(std::vector<ThreadTiming> timings, std::uint64_t units_per_thread,
                              TrialMetadata metadata) {
  if (timings.empty()) throw UsageError("trial result: no thread timings");
  std::int64_t first_start = timings.front().start_ns;
  std::int64_t last_end = timings.front().end_ns;
  for (const auto& t : timings) {
    if (t.end_ns < t.start_ns) throw UsageError("trial result: end precedes start");
    first_start = std::min(first_start, t.start_ns);
    last_end = std::max(last_end, t.end_ns);
  }

  std::vector<std::size_t> order(timings.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return timings[a].start_ns < timings[b].start_ns; });
  metadata.start_order = std::move(order);

  TrialResult r;
  r.span_ns = std::max<std::int64_t>(1, last_end - first_start);
  r.total_units = total_units(units_per_thread, timings.size());
  r.throughput = static_cast<double>(r.total_units) * 1e9 / static_cast<double>(r.span_ns);
  r.per_thread = std::move(timings);
  r.metadata = std::move(metadata);
  return r;
}

namespace {

struct WorkerSlot {
  ThreadTiming timing;
  std::exception_ptr error;
};

std::uint64_t runtime_seed(std::size_t worker) {
  auto s = static_cast<std::uint64_t>(now_ns());
  return s ^ (0x9e3779b97f4a7c15ULL * (worker + 1));
}

void worker_main(std::size_t index, const TrialConfig& cfg, const Topology& topo,
                 const PinPlan& plan, StartBarrier& barrier, WorkerSlot& slot) {
  std::optional<IntChainInputs> int_in;
  std::optional<FloatChainInputs> float_in;
  std::optional<MemoryBlock> block;
  std::uint64_t iterations = 0;
  std::size_t element_width = 0;
  MemoryKind mem_kind = MemoryKind::Read;

  try {
    if (const auto* c = std::get_if<ComputeKernelSpec>(&cfg.kernel)) {
      iterations = c->iterations;
      if (c->kind == ComputeKind::IntChain) {
        int_in = make_int_inputs(c->dataset_len, runtime_seed(index));
      } else {
        float_in = make_float_inputs(c->dataset_len, runtime_seed(index));
      }
    } else {
      const auto& m = std::get<MemoryKernelSpec>(cfg.kernel);
      block.emplace(m.block_bytes);
      element_width = m.element_width;
      mem_kind = m.kind;
    }
    auto pin = apply_pin(plan.assignments[index], topo);
    slot.timing.pinned_to = pin.logical_id;
    slot.timing.pin_honored = pin.honored;
    slot.timing.pin_note = std::move(pin.note);
  } catch (...) {
    slot.error = std::current_exception();
  }

  if (!barrier.check_in_and_wait()) return;

  const std::int64_t start = now_ns();
  if (int_in) {
    run_int_chain(*int_in, iterations);
  } else if (float_in) {
    run_float_chain(*float_in, iterations);
  } else if (block) {
    if (mem_kind == MemoryKind::Write) {
      run_mem_write(*block);
    } else {
      run_mem_read(*block, element_width);
    }
  }
  const std::int64_t end = now_ns();
  slot.timing.start_ns = start;
  slot.timing.end_ns = end;
}

}  // namespace

TrialResult run_trial(const TrialConfig& cfg, const Topology& topo) {
  cfg.validate();
  if (const auto* m = std::get_if<MemoryKernelSpec>(&cfg.kernel)) {
    check_memory_capacity(cfg.n_threads, m->block_bytes, available_memory_bytes());
  }

  const PinPlan plan = pin_plan(cfg.strategy, cfg.n_threads, topo);
  StartBarrier barrier(cfg.n_threads);
  std::vector<WorkerSlot> slots(cfg.n_threads);
  std::vector<std::thread> workers;
  workers.reserve(cfg.n_threads);

  auto join_all = [&] {
    for (auto& w : workers) {
      if (w.joinable()) w.join();
    }
  };

  try {
    for (std::size_t i = 0; i < cfg.n_threads; ++i) {
      workers.emplace_back(worker_main, i, std::cref(cfg), std::cref(topo), std::cref(plan),
                           std::ref(barrier), std::ref(slots[i]));
    }
  } catch (const std::system_error& e) {
    barrier.abort();
    join_all();
    throw ResourceError("trial: failed to spawn worker " + std::to_string(workers.size()) +
                        " of " + std::to_string(cfg.n_threads) + ": " + e.what());
  }

  barrier.wait_for_check_ins();
  bool failed = std::any_of(slots.begin(), slots.end(), [](const auto& s) { return s.error != nullptr; });
  if (failed) {
    barrier.abort();
    join_all();
    for (auto& s : slots) {
      if (s.error) std::rethrow_exception(s.error);
    }
  }

  TrialMetadata meta;
  meta.topology = topo;
  meta.strategy = cfg.strategy;
  meta.clock = kClockName;
  meta.timestamp = utc_timestamp();
  meta.release_ns = barrier.release();
  join_all();

  std::vector<ThreadTiming> timings;
  timings.reserve(slots.size());
  for (auto& s : slots) timings.push_back(std::move(s.timing));
  return make_trial_result(std::move(timings), units_per_thread(cfg.kernel), std::move(meta));
}

std::size_t best_index(std::span<const TrialResult> results) {
  if (results.empty()) throw UsageError("aggregate: no results");
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].throughput > results[best].throughput) best = i;
  }
  return best;
}

TrialResult aggregate(std::span<const TrialResult> results) {
  return results[best_index(results)];
}

std::vector<SweepPoint> sweep(std::span<const std::size_t> thread_counts,
                              const TrialConfig& cfg_template, const Topology& topo) {
  if (thread_counts.empty()) throw UsageError("sweep: no thread counts");
  for (std::size_t i = 1; i < thread_counts.size(); ++i) {
    if (thread_counts[i] <= thread_counts[i - 1]) {
      throw UsageError("sweep: thread counts must be strictly ascending");
    }
  }

  std::vector<SweepPoint> points;
  for (std::size_t n : thread_counts) {
    TrialConfig cfg = cfg_template;
    cfg.n_threads = n;
    const std::string where = "sweep n=" + std::to_string(n) + ": ";
    try {
      cfg.validate();
      std::vector<TrialResult> runs;
      for (std::size_t r = 0; r < cfg.repeats; ++r) runs.push_back(run_trial(cfg, topo));
      const std::size_t kept = best_index(runs);
      points.push_back(SweepPoint{n, std::move(runs[kept]), cfg.repeats, kept});
    } catch (const UsageError& e) {
      throw UsageError(where + e.what());
    } catch (const ResourceError& e) {
      throw ResourceError(where + e.what());
    }
  }
  return points;
}

std::vector<std::size_t> thread_ladder(std::size_t max) {
  std::vector<std::size_t> out;
  for (std::size_t p = 1; p <= max; p *= 2) {
    out.push_back(p);
    if (p >= 2 && p + p / 2 <= max) out.push_back(p + p / 2);
  }
  return out;
}

}  // namespace corescope
