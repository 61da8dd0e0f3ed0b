#include <atomic>
#include <exception>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "corescope/clock.hpp"
#include "corescope/error.hpp"
#include "corescope/workloads.hpp"

namespace corescope {

void PoolBenchSpec::validate() const {
  if (tasks == 0) throw UsageError("pool-bench: tasks must be >= 1");
  if (spawners == 0) throw UsageError("pool-bench: spawners must be >= 1");
  if (batch == 0) throw UsageError("pool-bench: batch must be >= 1");
}

PoolBenchResult run_pool_bench(const PoolBenchSpec& spec) {
  spec.validate();
  auto runs = std::make_unique<std::atomic<std::uint32_t>[]>(spec.tasks);
  for (std::size_t i = 0; i < spec.tasks; ++i) runs[i].store(0, std::memory_order_relaxed);

  PoolBenchResult r;
  r.tasks = spec.tasks;
  {
    TaskPool pool(spec.pool);
    const SpinStats before = pool.snapshot_stats();

    std::exception_ptr error;
    std::mutex error_mu;
    auto spawner = [&](std::size_t first, std::size_t last) {
      try {
        std::vector<Ticket> pending;
        pending.reserve(spec.batch);
        for (std::size_t i = first; i < last; ++i) {
          pending.push_back(pool.spawn([&runs, i] { runs[i].fetch_add(1, std::memory_order_relaxed); }));
          if (pending.size() == spec.batch || i + 1 == last) {
            for (auto& t : pending) t.get();
            pending.clear();
          }
        }
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    };

    const std::int64_t t0 = now_ns();
    if (spec.spawners == 1) {
      spawner(0, spec.tasks);
    } else {
      std::vector<std::thread> threads;
      threads.reserve(spec.spawners);
      const std::size_t per = spec.tasks / spec.spawners;
      const std::size_t extra = spec.tasks % spec.spawners;
      std::size_t first = 0;
      for (std::size_t s = 0; s < spec.spawners; ++s) {
        const std::size_t count = per + (s < extra ? 1 : 0);
        threads.emplace_back(spawner, first, first + count);
        first += count;
      }
      for (auto& t : threads) t.join();
    }
    pool.wait_idle();
    r.wall_ns = now_ns() - t0;
    if (error) std::rethrow_exception(error);
    r.stats = stats_delta(pool.snapshot_stats(), before);
    r.pool_size_after = pool.pool_size();
  }

  for (std::size_t i = 0; i < spec.tasks; ++i) {
    if (runs[i].load(std::memory_order_relaxed) == 1) ++r.executed_once;
  }
  return r;
}

}  // namespace corescope
