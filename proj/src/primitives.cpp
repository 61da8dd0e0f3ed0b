#include "corescope/primitives.hpp"

#include <atomic>
#include <condition_variable>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <system_error>
#include <thread>

#include "corescope/clock.hpp"
#include "corescope/error.hpp"

namespace corescope {

std::string_view to_string(CreateMode mode) {
  return mode == CreateMode::Joinable ? "joinable" : "detached";
}

std::string_view to_string(CondvarMode mode) {
  return mode == CondvarMode::Signal ? "signal" : "broadcast";
}

namespace {

void require_samples(std::size_t samples) {
  if (samples == 0) throw UsageError("primitives: samples must be >= 1");
}

void validate_pair_options(const PairOptions& opts) {
  if (!(opts.clock_ghz > 0.0)) throw UsageError("primitives: clock_ghz must be > 0");
  if ((opts.pin_a || opts.pin_b) && !opts.topology) {
    throw UsageError("primitives: pinning requires a topology");
  }
  if (opts.watchdog.count() <= 0) throw UsageError("primitives: watchdog must be > 0");
}

void pin_if_requested(const PairOptions& opts, std::optional<std::uint32_t> pin) {
  if (pin) apply_pin(pin, *opts.topology);
}

// Deadline tracking for the spin-yield waits inside the two-thread protocols.
class Watchdog {
 public:
  Watchdog(std::chrono::milliseconds limit, std::atomic<bool>& abort) : limit_(limit), abort_(abort) {}

  // Spins with yield until pred() holds. Returns false when aborted.
  template <typename Pred>
  bool wait(Pred pred, const char* phase, std::size_t sample) {
    const auto deadline = MonotonicClock::now() + limit_;
    while (!pred()) {
      if (abort_.load(std::memory_order_acquire)) return false;
      if (MonotonicClock::now() > deadline) {
        abort_.store(true, std::memory_order_release);
        throw WatchdogTimeout("watchdog: no progress for " + std::to_string(limit_.count()) +
                              " ms at sample " + std::to_string(sample) + " (" + phase + ")");
      }
      std::this_thread::yield();
    }
    return true;
  }

 private:
  std::chrono::milliseconds limit_;
  std::atomic<bool>& abort_;
};

void settle_for(std::chrono::nanoseconds d) {
  const std::int64_t until = now_ns() + d.count();
  while (now_ns() < until) std::this_thread::yield();
}

SampleSet make_set(std::string benchmark, std::string mode, double clock_ghz, std::size_t requested) {
  SampleSet set;
  set.benchmark = std::move(benchmark);
  set.mode = std::move(mode);
  set.clock_ghz = clock_ghz;
  set.requested = requested;
  set.samples.reserve(requested);
  return set;
}

void run_pair(const std::function<void()>& a, const std::function<void()>& b,
              std::atomic<bool>& abort) {
  std::exception_ptr err_a, err_b;
  std::thread ta([&] {
    try {
      a();
    } catch (...) {
      err_a = std::current_exception();
      abort.store(true);
    }
  });
  std::thread tb;
  try {
    tb = std::thread([&] {
      try {
        b();
      } catch (...) {
        err_b = std::current_exception();
        abort.store(true);
      }
    });
  } catch (const std::system_error& e) {
    abort.store(true);
    ta.join();
    throw ResourceError(std::string("primitives: failed to spawn waiter: ") + e.what());
  }
  ta.join();
  tb.join();
  if (err_a) std::rethrow_exception(err_a);
  if (err_b) std::rethrow_exception(err_b);
}

}  // namespace

SampleSet bench_thread_create(CreateMode mode, std::size_t samples, double clock_ghz) {
  require_samples(samples);
  if (!(clock_ghz > 0.0)) throw UsageError("primitives: clock_ghz must be > 0");
  SampleSet set = make_set("thread-create", std::string(to_string(mode)), clock_ghz, samples);

  struct ChildState {
    std::atomic<std::int64_t> started_ns{0};
    std::atomic<bool> done{false};
  };

  for (std::size_t i = 0; i < samples; ++i) {
    auto state = std::make_shared<ChildState>();
    std::int64_t t0 = 0;
    std::int64_t t1 = 0;
    try {
      t0 = now_ns();
      std::thread child([state] {
        state->started_ns.store(now_ns(), std::memory_order_release);
        state->done.store(true, std::memory_order_release);
        state->done.notify_one();
      });
      t1 = now_ns();
      if (mode == CreateMode::Joinable) {
        child.join();
      } else {
        child.detach();
        state->done.wait(false, std::memory_order_acquire);
      }
    } catch (const std::system_error& e) {
      set.truncated = true;
      set.error = "thread spawn failed at sample " + std::to_string(i) + ": " + e.what();
      break;
    }
    const std::int64_t started = state->started_ns.load(std::memory_order_acquire);
    set.samples.push_back({t1 - t0, started - t0, false});
  }
  return set;
}

double bench_mutex_uncontended(std::size_t pairs, double clock_ghz) {
  if (pairs == 0) throw UsageError("primitives: pairs must be >= 1");
  if (!(clock_ghz > 0.0)) throw UsageError("primitives: clock_ghz must be > 0");
  std::mutex m;
  for (int i = 0; i < 64; ++i) {
    m.lock();
    m.unlock();
  }
  const std::int64_t t0 = now_ns();
  for (std::size_t i = 0; i < pairs; ++i) {
    m.lock();
    clobber_memory();
    m.unlock();
  }
  const std::int64_t t1 = now_ns();
  return static_cast<double>(t1 - t0) * clock_ghz / static_cast<double>(pairs);
}

SampleSet bench_mutex_handoff(std::size_t samples, const PairOptions& opts) {
  require_samples(samples);
  validate_pair_options(opts);
  SampleSet set = make_set("mutex-handoff", "unlock", opts.clock_ghz, samples);
  set.samples.resize(samples);
  set.notes.push_back("about-to-block flag precedes the actual block; settle spin of " +
                      std::to_string(opts.settle.count()) + " ns before unlock");

  std::mutex m;
  std::atomic<std::int64_t> armed{-1};
  std::atomic<std::int64_t> about_to_block{-1};
  std::atomic<std::int64_t> done{-1};
  std::atomic<std::int64_t> woke_ns{0};
  std::atomic<bool> found_free{false};
  std::atomic<int> holders{0};
  std::atomic<std::uint64_t> violations{0};
  std::atomic<bool> abort{false};

  auto enter = [&] {
    if (holders.fetch_add(1, std::memory_order_acq_rel) != 0) violations.fetch_add(1);
  };
  auto leave = [&] { holders.fetch_sub(1, std::memory_order_acq_rel); };

  auto signaler = [&] {
    pin_if_requested(opts, opts.pin_a);
    Watchdog dog(opts.watchdog, abort);
    for (std::size_t i = 0; i < samples; ++i) {
      const auto idx = static_cast<std::int64_t>(i);
      std::unique_lock lock(m);
      enter();
      armed.store(idx, std::memory_order_release);
      bool ok = false;
      try {
        ok = dog.wait([&] { return about_to_block.load(std::memory_order_acquire) == idx; },
                      "waiting for about-to-block flag", i);
      } catch (...) {
        leave();
        throw;  // unique_lock releases m so the waiter can drain
      }
      if (!ok) {
        leave();
        return;
      }
      settle_for(opts.settle);
      leave();
      const std::int64_t t0 = now_ns();
      lock.unlock();
      const std::int64_t t1 = now_ns();
      if (!dog.wait([&] { return done.load(std::memory_order_acquire) == idx; },
                    "waiting for waiter to wake", i)) {
        return;
      }
      set.samples[i] = {t1 - t0, woke_ns.load(std::memory_order_acquire) - t0,
                        found_free.load(std::memory_order_acquire)};
    }
  };

  auto waiter = [&] {
    pin_if_requested(opts, opts.pin_b);
    Watchdog dog(opts.watchdog, abort);
    for (std::size_t i = 0; i < samples; ++i) {
      const auto idx = static_cast<std::int64_t>(i);
      if (!dog.wait([&] { return armed.load(std::memory_order_acquire) == idx; },
                    "waiting for signaler to arm", i)) {
        return;
      }
      about_to_block.store(idx, std::memory_order_release);
      const bool free = m.try_lock();
      if (!free) m.lock();
      const std::int64_t t2 = now_ns();
      enter();
      woke_ns.store(t2, std::memory_order_relaxed);
      found_free.store(free, std::memory_order_relaxed);
      leave();
      m.unlock();
      done.store(idx, std::memory_order_release);
    }
  };

  run_pair(signaler, waiter, abort);

  std::size_t flagged = 0;
  for (const auto& s : set.samples) flagged += s.flagged ? 1 : 0;
  set.counters["exclusion_violations"] = static_cast<double>(violations.load());
  set.counters["flagged_no_block"] = static_cast<double>(flagged);
  set.counters["settle_ns"] = static_cast<double>(opts.settle.count());
  return set;
}

SampleSet bench_condvar(CondvarMode mode, std::size_t samples, const PairOptions& opts) {
  require_samples(samples);
  validate_pair_options(opts);
  SampleSet set = make_set("condvar", std::string(to_string(mode)), opts.clock_ghz, samples);
  set.samples.resize(samples);

  std::mutex m;
  std::condition_variable cv;
  std::int64_t ready = -1;  // guarded by m
  std::int64_t go = -1;     // guarded by m
  std::atomic<std::int64_t> done{-1};
  std::atomic<std::int64_t> woke_ns{0};
  std::atomic<std::uint64_t> spurious{0};
  std::atomic<bool> abort{false};

  auto signaler = [&] {
    pin_if_requested(opts, opts.pin_a);
    Watchdog dog(opts.watchdog, abort);
    for (std::size_t i = 0; i < samples; ++i) {
      const auto idx = static_cast<std::int64_t>(i);
      std::unique_lock lock(m, std::defer_lock);
      // Seeing ready == idx under m means the waiter has released m inside wait().
      bool ok = dog.wait(
          [&] {
            lock.lock();
            if (ready == idx) return true;
            lock.unlock();
            return false;
          },
          "waiting for waiter to block", i);
      if (!ok) return;
      go = idx;
      const std::int64_t t0 = now_ns();
      if (mode == CondvarMode::Signal) {
        cv.notify_one();
      } else {
        cv.notify_all();
      }
      const std::int64_t t1 = now_ns();
      lock.unlock();
      if (!dog.wait([&] { return done.load(std::memory_order_acquire) == idx; },
                    "waiting for waiter to wake", i)) {
        return;
      }
      set.samples[i] = {t1 - t0, woke_ns.load(std::memory_order_acquire) - t0, false};
    }
  };

  auto waiter = [&] {
    pin_if_requested(opts, opts.pin_b);
    for (std::size_t i = 0; i < samples; ++i) {
      const auto idx = static_cast<std::int64_t>(i);
      std::unique_lock lock(m);
      ready = idx;
      const auto deadline = MonotonicClock::now() + opts.watchdog;
      while (go != idx) {
        if (abort.load(std::memory_order_acquire)) return;
        if (cv.wait_until(lock, deadline) == std::cv_status::timeout && go != idx) {
          abort.store(true, std::memory_order_release);
          throw WatchdogTimeout("watchdog: no signal for " + std::to_string(opts.watchdog.count()) +
                                " ms at sample " + std::to_string(i));
        }
        if (go != idx) spurious.fetch_add(1, std::memory_order_relaxed);
      }
      const std::int64_t t2 = now_ns();
      woke_ns.store(t2, std::memory_order_relaxed);
      lock.unlock();
      done.store(idx, std::memory_order_release);
    }
  };

  run_pair(signaler, waiter, abort);
  set.counters["spurious_wakeups"] = static_cast<double>(spurious.load());
  return set;
}

}  // namespace corescope
