#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "corescope/clock.hpp"
#include "corescope/error.hpp"

namespace corescope {

enum class Backoff { None, Exponential };

// Atomic policy used in production. Tests substitute a policy whose
// operations are scheduling points for an interleaving explorer.
struct StdAtomics {
  template <typename T>
  using atomic = std::atomic<T>;
};

// Bounded Treiber stack of small integer ids (worker slots).
//
// The head packs {top id, version} into one 64-bit word; every successful
// push or pop bumps the version, so a head that was popped and re-pushed
// between a reader's load and its CAS no longer compares equal (ABA).
// A separate size word is reserved by CAS before linking, so the number of
// linked ids never exceeds max_size. Every failed CAS on either word counts
// as one retry.
template <typename Atomics = StdAtomics, bool kVersioned = true>
class BasicCasIndexStack {
 public:
  static constexpr std::uint32_t kNull = std::numeric_limits<std::uint32_t>::max();

  BasicCasIndexStack(std::size_t capacity, std::size_t max_size,
                     std::atomic<std::uint64_t>* retries = nullptr, Backoff backoff = Backoff::None)
      : head_(pack(kNull, 0)),
        size_(0),
        next_(std::make_unique<typename Atomics::template atomic<std::uint32_t>[]>(capacity)),
        capacity_(capacity),
        max_size_(static_cast<std::uint32_t>(
            std::min<std::size_t>(max_size, std::numeric_limits<std::uint32_t>::max() - 1))),
        retries_(retries),
        backoff_(backoff) {
    if (capacity >= kNull) throw UsageError("index stack: capacity too large");
    for (std::size_t i = 0; i < capacity; ++i) next_[i].store(kNull, std::memory_order_relaxed);
  }

  // Links id unless the stack already holds max_size ids.
  bool try_push(std::uint32_t id) {
    check_id(id);
    if (!reserve()) return false;
    link(id);
    return true;
  }

  std::optional<std::uint32_t> pop() {
    std::uint64_t head = head_.load(std::memory_order_acquire);
    unsigned attempt = 0;
    for (;;) {
      const std::uint32_t top = top_of(head);
      if (top == kNull) return std::nullopt;
      const std::uint32_t next = next_[top].load(std::memory_order_relaxed);
      if (head_.compare_exchange_strong(head, pack(next, version_of(head) + 1),
                                        std::memory_order_acq_rel, std::memory_order_acquire)) {
        size_.fetch_sub(1, std::memory_order_acq_rel);
        return top;
      }
      on_failed_cas(attempt++);
    }
  }

  std::size_t size() const { return size_.load(std::memory_order_acquire); }
  std::size_t max_size() const { return max_size_; }
  std::size_t capacity() const { return capacity_; }

 private:
  static constexpr std::uint64_t pack(std::uint32_t top, std::uint32_t version) {
    return (static_cast<std::uint64_t>(kVersioned ? version : 0) << 32) | top;
  }
  static constexpr std::uint32_t top_of(std::uint64_t head) { return static_cast<std::uint32_t>(head); }
  static constexpr std::uint32_t version_of(std::uint64_t head) {
    return static_cast<std::uint32_t>(head >> 32);
  }

  void check_id(std::uint32_t id) const {
    if (id >= capacity_) throw UsageError("index stack: id out of range");
  }

  bool reserve() {
    std::uint32_t size = size_.load(std::memory_order_acquire);
    unsigned attempt = 0;
    for (;;) {
      if (size >= max_size_) return false;
      if (size_.compare_exchange_strong(size, size + 1, std::memory_order_acq_rel,
                                        std::memory_order_acquire)) {
        return true;
      }
      on_failed_cas(attempt++);
    }
  }

  void link(std::uint32_t id) {
    std::uint64_t head = head_.load(std::memory_order_acquire);
    unsigned attempt = 0;
    for (;;) {
      next_[id].store(top_of(head), std::memory_order_relaxed);
      if (head_.compare_exchange_strong(head, pack(id, version_of(head) + 1),
                                        std::memory_order_acq_rel, std::memory_order_acquire)) {
        return;
      }
      on_failed_cas(attempt++);
    }
  }

  void on_failed_cas(unsigned attempt) {
    if (retries_ != nullptr) retries_->fetch_add(1, std::memory_order_relaxed);
    if (backoff_ == Backoff::Exponential) {
      const unsigned spins = 1u << std::min(attempt, 10u);
      for (unsigned i = 0; i < spins; ++i) cpu_relax();
    }
  }

  typename Atomics::template atomic<std::uint64_t> head_;
  typename Atomics::template atomic<std::uint32_t> size_;
  std::unique_ptr<typename Atomics::template atomic<std::uint32_t>[]> next_;
  std::size_t capacity_;
  std::uint32_t max_size_;
  std::atomic<std::uint64_t>* retries_;
  Backoff backoff_;
};

using CasIndexStack = BasicCasIndexStack<>;

// Same contract behind one mutex. Performs no CAS.
class MutexIndexStack {
 public:
  MutexIndexStack(std::size_t capacity, std::size_t max_size) : capacity_(capacity), max_size_(max_size) {}

  bool try_push(std::uint32_t id) {
    if (id >= capacity_) throw UsageError("index stack: id out of range");
    std::lock_guard lock(mu_);
    if (items_.size() >= max_size_) return false;
    items_.push_back(id);
    return true;
  }

  std::optional<std::uint32_t> pop() {
    std::lock_guard lock(mu_);
    if (items_.empty()) return std::nullopt;
    std::uint32_t id = items_.back();
    items_.pop_back();
    return id;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return items_.size();
  }
  std::size_t max_size() const { return max_size_; }

 private:
  mutable std::mutex mu_;
  std::vector<std::uint32_t> items_;
  std::size_t capacity_;
  std::size_t max_size_;
};

}  // namespace corescope
