#include "corescope/barrier.hpp"

#include "corescope/clock.hpp"
#include "corescope/error.hpp"

namespace corescope {

StartBarrier::StartBarrier(std::size_t parties) : parties_(parties) {
  if (parties == 0) throw UsageError("barrier: parties must be >= 1");
}

bool StartBarrier::check_in_and_wait() {
  std::unique_lock lock(mu_);
  const std::uint64_t gen = generation_;
  if (++arrived_ == parties_) arrived_cv_.notify_all();
  release_cv_.wait(lock, [&] { return generation_ != gen || aborted_; });
  return !aborted_;
}

bool StartBarrier::wait_for_check_ins() {
  std::unique_lock lock(mu_);
  arrived_cv_.wait(lock, [&] { return arrived_ >= parties_ || aborted_; });
  return !aborted_;
}

std::int64_t StartBarrier::release() {
  std::int64_t release_ns;
  {
    std::lock_guard lock(mu_);
    release_ns = now_ns();
    arrived_ = 0;
    ++generation_;
  }
  release_cv_.notify_all();
  return release_ns;
}

void StartBarrier::abort() {
  {
    std::lock_guard lock(mu_);
    aborted_ = true;
  }
  arrived_cv_.notify_all();
  release_cv_.notify_all();
}

std::size_t StartBarrier::checked_in() const {
  std::lock_guard lock(mu_);
  return arrived_;
}

}  // namespace corescope
