#include <gtest/gtest.h>

#include <algorithm>

#include "corescope/error.hpp"
#include "corescope/primitives.hpp"
#include "corescope/stats.hpp"

using namespace corescope;

namespace {

void expect_complete(const SampleSet& s, std::size_t n) {
  EXPECT_FALSE(s.truncated) << s.error;
  EXPECT_TRUE(s.error.empty()) << s.error;
  EXPECT_EQ(s.requested, n);
  ASSERT_EQ(s.samples.size(), n);
  for (const auto& x : s.samples) {
    ASSERT_GE(x.a_ns, 0);
    ASSERT_GE(x.b_ns, 0);
  }
}

double percent_total(const Histogram& h) {
  double t = 0.0;
  for (const auto& [bin, c] : h.bins) t += h.percent(bin);
  return t;
}

}  // namespace

TEST(ThreadCreate, JoinableSamples) {
  const SampleSet s = bench_thread_create(CreateMode::Joinable, 300, 2.0);
  expect_complete(s, 300);
  EXPECT_EQ(s.benchmark, "thread-create");
  EXPECT_EQ(s.mode, "joinable");
  EXPECT_EQ(s.clock_ghz, 2.0);
  for (const auto& x : s.samples) EXPECT_GT(x.a_ns, 0);
  const SampleSummary sum = summarize(s, 2000);
  EXPECT_NEAR(percent_total(sum.b), 100.0, 0.1);
}

TEST(ThreadCreate, DetachedSamples) {
  const SampleSet s = bench_thread_create(CreateMode::Detached, 300, 1.0);
  expect_complete(s, 300);
  EXPECT_EQ(s.mode, "detached");
}

TEST(ThreadCreate, SingleSample) {
  const SampleSet s = bench_thread_create(CreateMode::Joinable, 1, 1.0);
  expect_complete(s, 1);
  EXPECT_GT(s.samples[0].a_ns, 0);
  EXPECT_GT(s.samples[0].b_ns, 0);
}

TEST(ThreadCreate, RejectsBadArguments) {
  EXPECT_THROW(bench_thread_create(CreateMode::Joinable, 0, 1.0), UsageError);
  EXPECT_THROW(bench_thread_create(CreateMode::Joinable, 1, 0.0), UsageError);
}

TEST(MutexUncontended, PositiveAndStable) {
  EXPECT_GT(bench_mutex_uncontended(1000, 1.0), 0.0);
  // Best of several runs, so a preempted run does not decide the comparison.
  auto best = [](std::size_t pairs) {
    double b = 1e300;
    for (int i = 0; i < 7; ++i) b = std::min(b, bench_mutex_uncontended(pairs, 1.0));
    return b;
  };
  const double one = best(100000);
  const double two = best(200000);
  EXPECT_LT(std::abs(two - one) / one, 0.25) << one << " vs " << two;
  EXPECT_THROW(bench_mutex_uncontended(0, 1.0), UsageError);
}

TEST(MutexHandoff, CompletesWithExclusion) {
  PairOptions opts;
  opts.clock_ghz = 1.67;
  const SampleSet s = bench_mutex_handoff(1000, opts);
  expect_complete(s, 1000);
  EXPECT_EQ(s.benchmark, "mutex-handoff");
  EXPECT_EQ(s.counters.at("exclusion_violations"), 0.0);
  EXPECT_EQ(s.counters.at("settle_ns"), 10000.0);
  EXPECT_FALSE(s.notes.empty());
  std::size_t flagged = 0;
  for (const auto& x : s.samples) flagged += x.flagged ? 1 : 0;
  EXPECT_EQ(s.counters.at("flagged_no_block"), static_cast<double>(flagged));
}

TEST(MutexHandoff, ZeroSettleStillCompletes) {
  PairOptions opts;
  opts.settle = std::chrono::nanoseconds(0);
  const SampleSet s = bench_mutex_handoff(500, opts);
  expect_complete(s, 500);
  EXPECT_EQ(s.counters.at("exclusion_violations"), 0.0);
}

TEST(MutexHandoff, PinnedRun) {
  PairOptions opts;
  opts.topology = detect_topology();
  opts.pin_a = 0;
  opts.pin_b = opts.topology->total() - 1;
  const SampleSet s = bench_mutex_handoff(200, opts);
  expect_complete(s, 200);
}

TEST(Condvar, SignalAndBroadcastComplete) {
  for (auto mode : {CondvarMode::Signal, CondvarMode::Broadcast}) {
    PairOptions opts;
    const SampleSet s = bench_condvar(mode, 1000, opts);
    expect_complete(s, 1000);
    EXPECT_EQ(s.benchmark, "condvar");
    EXPECT_EQ(s.mode, to_string(mode));
    EXPECT_TRUE(s.counters.count("spurious_wakeups"));
    const SampleSummary sum = summarize(s, 2000);
    EXPECT_NEAR(percent_total(sum.a), 100.0, 0.1);
    EXPECT_NEAR(percent_total(sum.b), 100.0, 0.1);
  }
}

TEST(PairOptions, Validation) {
  PairOptions opts;
  opts.pin_a = 0;
  EXPECT_THROW(bench_mutex_handoff(1, opts), UsageError);  // pin without topology
  PairOptions bad_clock;
  bad_clock.clock_ghz = 0.0;
  EXPECT_THROW(bench_condvar(CondvarMode::Signal, 1, bad_clock), UsageError);
  PairOptions bad_dog;
  bad_dog.watchdog = std::chrono::milliseconds(0);
  EXPECT_THROW(bench_mutex_handoff(1, bad_dog), UsageError);
  EXPECT_THROW(bench_condvar(CondvarMode::Broadcast, 0, PairOptions{}), UsageError);
}

TEST(Modes, Names) {
  EXPECT_EQ(to_string(CreateMode::Joinable), "joinable");
  EXPECT_EQ(to_string(CreateMode::Detached), "detached");
  EXPECT_EQ(to_string(CondvarMode::Signal), "signal");
  EXPECT_EQ(to_string(CondvarMode::Broadcast), "broadcast");
}
