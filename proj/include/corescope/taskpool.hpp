#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <string_view>
#include <thread>
#include <vector>

#include "corescope/index_stack.hpp"

namespace corescope {

enum class PoolVariant { Mutex, Cas };

std::string_view to_string(PoolVariant variant);
// Accepts mutex, cas.
PoolVariant parse_pool_variant(std::string_view text);
std::string_view to_string(Backoff backoff);
Backoff parse_backoff(std::string_view text);

struct PoolConfig {
  PoolVariant variant = PoolVariant::Mutex;
  std::size_t max_pool_size = 64;
  // Workers started up front and parked in the pool (bounded by max_pool_size).
  std::size_t initial_workers = 0;
  // Ceiling on live OS threads; a miss beyond it fails the spawn.
  std::size_t max_threads = 32768;
  Backoff backoff = Backoff::None;
};

struct SpinStats {
  std::uint64_t cas_retries = 0;
  std::uint64_t threads_created = 0;
  std::uint64_t pool_hits = 0;
  std::uint64_t pool_misses = 0;
  std::uint64_t pooled_retires = 0;
  std::uint64_t exited_retires = 0;
  std::uint64_t peak_pool_size = 0;
  std::uint64_t cap_violations = 0;
};

namespace detail {

struct TaskState {
  std::atomic<bool> done{false};
  std::exception_ptr error;

  void complete(std::exception_ptr err) {
    error = std::move(err);
    done.store(true, std::memory_order_release);
    done.notify_all();
  }
};

}  // namespace detail

// Completion handle for a spawned task.
class Ticket {
 public:
  Ticket() = default;
  explicit Ticket(std::shared_ptr<detail::TaskState> state) : state_(std::move(state)) {}

  bool valid() const { return state_ != nullptr; }
  bool ready() const { return state_->done.load(std::memory_order_acquire); }
  void wait() const { state_->done.wait(false, std::memory_order_acquire); }
  // Waits, then rethrows the task's exception or its spawn failure.
  void get() const {
    wait();
    if (state_->error) std::rethrow_exception(state_->error);
  }

 private:
  std::shared_ptr<detail::TaskState> state_;
};

enum class RetireOutcome { Pooled, Exited };

// Pool of OS threads that tasks are handed to. A spawn pops an idle worker
// from the pool, or starts a new thread when the pool is empty. A worker that
// finishes a task puts itself back unless the pool is full, in which case it
// exits. Idle workers block on a per-worker latch.
//
// The pool itself is either a mutex-guarded stack or the lock-free CAS stack;
// every failed CAS is counted in SpinStats::cas_retries.
//
// Tasks may spawn and wait on further tasks from inside a worker. The
// destructor waits for every spawned task to finish.
class TaskPool {
 public:
  explicit TaskPool(PoolConfig cfg);
  ~TaskPool();

  TaskPool(const TaskPool&) = delete;
  TaskPool& operator=(const TaskPool&) = delete;

  Ticket spawn(std::function<void()> work);

  SpinStats snapshot_stats() const;
  std::size_t pool_size() const;
  std::size_t live_threads() const { return live_.load(std::memory_order_acquire); }
  const PoolConfig& config() const { return cfg_; }

  // Blocks until every task spawned so far has completed.
  void wait_idle();

 private:
  struct Job {
    std::function<void()> work;
    std::shared_ptr<detail::TaskState> state;
  };
  struct Worker;
  class IdleStack;

  void worker_main(Worker* w);
  void run_job(Job job);
  RetireOutcome worker_retire(Worker& w);
  Worker& acquire_worker_slot();
  void launch(Worker& w);
  void reap_locked();
  void task_finished();
  void shutdown();

  PoolConfig cfg_;
  std::unique_ptr<IdleStack> idle_;

  mutable std::mutex registry_mu_;
  std::vector<std::unique_ptr<Worker>> workers_;
  std::vector<std::uint32_t> free_ids_;
  std::vector<std::uint32_t> exited_ids_;
  std::size_t next_unused_ = 0;

  std::atomic<bool> shutting_down_{false};
  std::atomic<std::size_t> live_{0};
  std::atomic<std::uint64_t> in_flight_{0};

  std::atomic<std::uint64_t> cas_retries_{0};
  std::atomic<std::uint64_t> threads_created_{0};
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> misses_{0};
  std::atomic<std::uint64_t> pooled_retires_{0};
  std::atomic<std::uint64_t> exited_retires_{0};
  std::atomic<std::uint64_t> peak_size_{0};
  std::atomic<std::uint64_t> cap_violations_{0};
};

}  // namespace corescope
