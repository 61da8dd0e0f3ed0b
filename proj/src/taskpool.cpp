#include "corescope/taskpool.hpp"

#include <condition_variable>
#include <system_error>
#include <variant>

#include "corescope/error.hpp"

namespace corescope {

std::string_view to_string(PoolVariant variant) {
  return variant == PoolVariant::Mutex ? "mutex" : "cas";
}

PoolVariant parse_pool_variant(std::string_view text) {
  if (text == "mutex") return PoolVariant::Mutex;
  if (text == "cas") return PoolVariant::Cas;
  throw UsageError("unknown pool variant '" + std::string(text) + "' (mutex|cas)");
}

std::string_view to_string(Backoff backoff) {
  return backoff == Backoff::None ? "none" : "exp";
}

Backoff parse_backoff(std::string_view text) {
  if (text == "none") return Backoff::None;
  if (text == "exp") return Backoff::Exponential;
  throw UsageError("unknown backoff '" + std::string(text) + "' (none|exp)");
}

class TaskPool::IdleStack {
 public:
  IdleStack(const PoolConfig& cfg, std::atomic<std::uint64_t>* retries) {
    if (cfg.variant == PoolVariant::Cas) {
      impl_ = std::make_unique<CasIndexStack>(cfg.max_threads, cfg.max_pool_size, retries, cfg.backoff);
    } else {
      impl_ = std::make_unique<MutexIndexStack>(cfg.max_threads, cfg.max_pool_size);
    }
  }

  bool try_push(std::uint32_t id) {
    return std::visit([&](auto& s) { return s->try_push(id); }, impl_);
  }
  std::optional<std::uint32_t> pop() {
    return std::visit([](auto& s) { return s->pop(); }, impl_);
  }
  std::size_t size() const {
    return std::visit([](const auto& s) { return s->size(); }, impl_);
  }

 private:
  std::variant<std::unique_ptr<CasIndexStack>, std::unique_ptr<MutexIndexStack>> impl_;
};

struct TaskPool::Worker {
  explicit Worker(std::uint32_t id) : id(id) {}

  const std::uint32_t id;
  std::mutex mu;
  std::condition_variable cv;
  Job job;
  bool has_job = false;
  bool shutdown = false;
  std::thread thread;
};

TaskPool::TaskPool(PoolConfig cfg) : cfg_(cfg) {
  if (cfg_.max_threads == 0) throw UsageError("pool: max_threads must be >= 1");
  if (cfg_.max_pool_size > cfg_.max_threads) cfg_.max_pool_size = cfg_.max_threads;
  idle_ = std::make_unique<IdleStack>(cfg_, &cas_retries_);
  workers_.resize(cfg_.max_threads);

  const std::size_t initial = std::min(cfg_.initial_workers, cfg_.max_pool_size);
  try {
    std::lock_guard lock(registry_mu_);
    for (std::size_t i = 0; i < initial; ++i) {
      Worker& w = acquire_worker_slot();
      launch(w);
      idle_->try_push(w.id);
    }
  } catch (...) {
    shutdown();
    throw;
  }
  peak_size_.store(idle_->size());
}

TaskPool::~TaskPool() { shutdown(); }

void TaskPool::shutdown() {
  wait_idle();
  shutting_down_.store(true, std::memory_order_release);
  while (live_.load(std::memory_order_acquire) > 0) {
    while (auto id = idle_->pop()) {
      Worker* w = workers_[*id].get();
      {
        std::lock_guard lk(w->mu);
        w->shutdown = true;
      }
      w->cv.notify_one();
    }
    std::this_thread::yield();
  }
  std::lock_guard lock(registry_mu_);
  reap_locked();
}

TaskPool::Worker& TaskPool::acquire_worker_slot() {
  reap_locked();
  std::uint32_t id;
  if (!free_ids_.empty()) {
    id = free_ids_.back();
    free_ids_.pop_back();
  } else {
    if (next_unused_ == workers_.size()) {
      throw ResourceError("pool: live thread ceiling of " + std::to_string(cfg_.max_threads) +
                          " reached");
    }
    id = static_cast<std::uint32_t>(next_unused_++);
    workers_[id] = std::make_unique<Worker>(id);
  }
  Worker& w = *workers_[id];
  w.has_job = false;
  w.shutdown = false;
  return w;
}

void TaskPool::launch(Worker& w) {
  live_.fetch_add(1, std::memory_order_acq_rel);
  try {
    w.thread = std::thread(&TaskPool::worker_main, this, &w);
  } catch (const std::system_error& e) {
    live_.fetch_sub(1, std::memory_order_acq_rel);
    w.job = Job{};
    free_ids_.push_back(w.id);
    throw ResourceError(std::string("pool: thread creation failed: ") + e.what());
  }
  threads_created_.fetch_add(1, std::memory_order_relaxed);
}

void TaskPool::reap_locked() {
  for (std::uint32_t id : exited_ids_) {
    Worker& w = *workers_[id];
    if (w.thread.joinable()) w.thread.join();
    free_ids_.push_back(id);
  }
  exited_ids_.clear();
}

Ticket TaskPool::spawn(std::function<void()> work) {
  auto state = std::make_shared<detail::TaskState>();
  in_flight_.fetch_add(1, std::memory_order_acq_rel);

  if (auto id = idle_->pop()) {
    hits_.fetch_add(1, std::memory_order_relaxed);
    Worker* w = workers_[*id].get();
    {
      std::lock_guard lk(w->mu);
      w->job = Job{std::move(work), state};
      w->has_job = true;
    }
    w->cv.notify_one();
    return Ticket(state);
  }

  misses_.fetch_add(1, std::memory_order_relaxed);
  try {
    std::lock_guard lock(registry_mu_);
    Worker& w = acquire_worker_slot();
    w.job = Job{std::move(work), state};
    w.has_job = true;
    launch(w);
  } catch (const ResourceError&) {
    state->complete(std::current_exception());
    task_finished();
  }
  return Ticket(state);
}

void TaskPool::worker_main(Worker* w) {
  for (;;) {
    Job job;
    {
      std::unique_lock lk(w->mu);
      w->cv.wait(lk, [&] { return w->has_job || w->shutdown; });
      if (!w->has_job) break;
      job = std::move(w->job);
      w->has_job = false;
    }
    run_job(std::move(job));
    if (worker_retire(*w) == RetireOutcome::Exited) break;
  }
  {
    std::lock_guard lock(registry_mu_);
    exited_ids_.push_back(w->id);
  }
  live_.fetch_sub(1, std::memory_order_acq_rel);
}

void TaskPool::run_job(Job job) {
  std::exception_ptr err;
  try {
    job.work();
  } catch (...) {
    err = std::current_exception();
  }
  job.work = nullptr;
  job.state->complete(std::move(err));
  job.state.reset();
  task_finished();
}

RetireOutcome TaskPool::worker_retire(Worker& w) {
  if (shutting_down_.load(std::memory_order_acquire) || !idle_->try_push(w.id)) {
    exited_retires_.fetch_add(1, std::memory_order_relaxed);
    return RetireOutcome::Exited;
  }
  pooled_retires_.fetch_add(1, std::memory_order_relaxed);
  const std::uint64_t size = idle_->size();
  if (size > cfg_.max_pool_size) cap_violations_.fetch_add(1, std::memory_order_relaxed);
  std::uint64_t peak = peak_size_.load(std::memory_order_relaxed);
  while (size > peak && !peak_size_.compare_exchange_weak(peak, size, std::memory_order_relaxed)) {
  }
  return RetireOutcome::Pooled;
}

void TaskPool::task_finished() {
  if (in_flight_.fetch_sub(1, std::memory_order_acq_rel) == 1) in_flight_.notify_all();
}

void TaskPool::wait_idle() {
  for (;;) {
    const std::uint64_t n = in_flight_.load(std::memory_order_acquire);
    if (n == 0) return;
    in_flight_.wait(n, std::memory_order_acquire);
  }
}

SpinStats TaskPool::snapshot_stats() const {
  SpinStats s;
  s.cas_retries = cas_retries_.load(std::memory_order_relaxed);
  s.threads_created = threads_created_.load(std::memory_order_relaxed);
  s.pool_hits = hits_.load(std::memory_order_relaxed);
  s.pool_misses = misses_.load(std::memory_order_relaxed);
  s.pooled_retires = pooled_retires_.load(std::memory_order_relaxed);
  s.exited_retires = exited_retires_.load(std::memory_order_relaxed);
  s.peak_pool_size = peak_size_.load(std::memory_order_relaxed);
  s.cap_violations = cap_violations_.load(std::memory_order_relaxed);
  return s;
}

std::size_t TaskPool::pool_size() const { return idle_->size(); }

}  // namespace corescope
