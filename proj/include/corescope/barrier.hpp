#pragma once

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <mutex>

namespace corescope {

// Start line for a trial: workers check in and block on a condition variable;
// an orchestrating thread waits for all check-ins, stamps the release time,
// bumps the generation and broadcasts.
class StartBarrier {
 public:
  explicit StartBarrier(std::size_t parties);

  StartBarrier(const StartBarrier&) = delete;
  StartBarrier& operator=(const StartBarrier&) = delete;

  // Worker side. Returns false when the barrier was aborted.
  bool check_in_and_wait();

  // Orchestrator side. Returns false when aborted before everyone arrived.
  bool wait_for_check_ins();

  // Reads the clock, then releases every waiter. Returns the release time.
  std::int64_t release();

  void abort();

  std::size_t checked_in() const;

 private:
  mutable std::mutex mu_;
  std::condition_variable arrived_cv_;
  std::condition_variable release_cv_;
  std::size_t parties_;
  std::size_t arrived_ = 0;
  std::uint64_t generation_ = 0;
  bool aborted_ = false;
};

}  // namespace corescope
