// Acceptance run: one PASS/FAIL/SKIP line per criterion. Exits non-zero when
// any criterion fails. SKIP is printed, with the measured values, only when
// the host lacks the hardware threads a criterion is defined for.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <fmt/core.h>

#include "corescope/harness.hpp"
#include "corescope/kernels.hpp"
#include "corescope/primitives.hpp"
#include "corescope/stats.hpp"
#include "corescope/taskpool.hpp"
#include "corescope/topology.hpp"
#include "corescope/workloads.hpp"
#include "oracles.hpp"
#include "stack_history.hpp"

using namespace corescope;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
  Verdict verdict = Verdict::Pass;
  std::string detail;
};

Outcome pass(std::string d) { return {Verdict::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {Verdict::Fail, std::move(d)}; }
Outcome check(bool ok, std::string d) { return {ok ? Verdict::Pass : Verdict::Fail, std::move(d)}; }

std::size_t hardware_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

// ---- criteria ----------------------------------------------------------------

Outcome pin_plan_conformance() {
  const Topology t(4, 16, 8, 1.67);
  const std::size_t n = 2 * t.total() + 37;  // wraps past the last group
  const PinPlan plan = pin_plan(MappingStrategy::RoundRobin, n, t);
  const auto want = oracle::round_robin_plan(4, 16, 8, n);
  for (std::size_t i = 0; i < n; ++i) {
    const CpuLocation got = t.location(*plan.assignments[i]);
    if (got.package != want[i].package || got.core != want[i].core || got.slot != want[i].slot) {
      return fail(fmt::format("worker {} placed at ({},{},{}), expected ({},{},{})", i, got.package, got.core,
                              got.slot, want[i].package, want[i].core, want[i].slot));
    }
  }
  std::vector<bool> core_seen(64, false);
  for (std::size_t i = 0; i < 64; ++i) {
    const CpuLocation loc = t.location(*plan.assignments[i]);
    if (loc.slot != 0) return fail(fmt::format("worker {} not in slot 0", i));
    core_seen[loc.package * 16 + loc.core] = true;
  }
  if (!std::all_of(core_seen.begin(), core_seen.end(), [](bool b) { return b; })) {
    return fail("workers 0-63 do not cover every core once");
  }
  const CpuLocation w64 = t.location(*plan.assignments[64]);
  if (w64 != CpuLocation{0, 0, 4}) return fail("worker 64 not at (0,0,4)");
  const std::vector<std::uint32_t> order{0, 4, 1, 5, 2, 6, 3, 7};
  if (round_robin_slot_order(8) != order) return fail("slot order differs from 0,4,1,5,2,6,3,7");
  return pass(fmt::format("{} workers match the enumeration; worker 64 -> (0,0,4)", n));
}

Outcome kernel_oracle() {
  std::mt19937_64 gen(4242);
  double worst = 0.0;
  for (int c = 0; c < 1000; ++c) {
    const std::size_t len = 1 + gen() % 256;
    const std::uint64_t iters = gen() % 10001;
    const auto in = make_int_inputs(len, gen());
    if (run_int_chain(in, iters) != oracle::interpret_kernel(in.dataset, in.acc0, in.c1, in.c2, in.c3, iters)) {
      return fail(fmt::format("int case {} differs", c));
    }
  }
  for (int c = 0; c < 1000; ++c) {
    const std::size_t len = 1 + gen() % 256;
    const std::uint64_t iters = gen() % 10001;
    const auto in = make_float_inputs(len, gen());
    const double want = oracle::interpret_kernel(in.dataset, in.acc0, in.c1, in.c2, in.c3, iters);
    const double got = run_float_chain(in, iters);
    const double scale = std::max(std::abs(want), std::numeric_limits<double>::min());
    worst = std::max(worst, std::abs(got - want) / scale);
    if (!std::isfinite(got)) return fail(fmt::format("float case {} not finite", c));
  }
  return check(worst <= 1e-9, fmt::format("1000 int cases bit-exact; float max rel err {:.3g}", worst));
}

Outcome accounting() {
  ComputeKernelSpec k;
  k.iterations = 1'000'000;
  auto timing = [](std::int64_t s, std::int64_t e) {
    ThreadTiming t;
    t.start_ns = s;
    t.end_ns = e;
    return t;
  };
  const std::vector<ThreadTiming> fake{timing(100, 8'000'100), timing(50, 7'000'000), timing(300, 6'500'000)};
  const TrialResult r = make_trial_result(fake, units_per_thread(k), {});
  const std::uint64_t want_units = 8ull * 1'000'000 * 3;
  const double want_tp = static_cast<double>(want_units) * 1e9 / static_cast<double>(8'000'100 - 50);
  const bool ok = r.total_units == want_units && r.span_ns == 8'000'050 && r.throughput == want_tp;

  const TrialResult two = make_trial_result({timing(0, 4'000'000), timing(0, 4'000'000)}, 4'000'000, {});
  return check(ok && two.throughput == 2e9,
               fmt::format("units={} span={} throughput={:.17g} (expected {:.17g})", r.total_units, r.span_ns,
                           r.throughput, want_tp));
}

std::int64_t best_span(std::uint64_t iterations, const Topology& topo) {
  TrialConfig cfg;
  cfg.n_threads = 1;
  ComputeKernelSpec k;
  k.iterations = iterations;
  cfg.kernel = k;
  cfg.repeats = 1;
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (int i = 0; i < 5; ++i) best = std::min(best, run_trial(cfg, topo).span_ns);
  return best;
}

Outcome proportionality(const Topology& topo) {
  const std::int64_t one = best_span(1'000'000, topo);
  const std::int64_t two = best_span(2'000'000, topo);
  const double ratio = static_cast<double>(two) / static_cast<double>(one);
  return check(ratio >= 1.8, fmt::format("runtime ratio 2e6/1e6 iterations = {:.3f} ({} ns vs {} ns)", ratio,
                                         two, one));
}

Outcome scaling_smoke(const Topology& topo) {
  const std::size_t h = hardware_threads();
  TrialConfig cfg;
  ComputeKernelSpec k;
  k.iterations = 2'000'000;
  cfg.kernel = k;
  cfg.repeats = 3;
  const std::vector<std::size_t> counts = h > 1 ? std::vector<std::size_t>{1, h} : std::vector<std::size_t>{1};
  cfg.n_threads = 1;
  const auto points = sweep(counts, cfg, topo);
  const double ratio = points.back().best.throughput / points.front().best.throughput;
  const std::string detail = fmt::format("H={} throughput(n=H)/throughput(n=1) = {:.3f}", h, ratio);
  if (h < 4) return {Verdict::Skip, detail + "; needs >= 4 hardware threads"};
  return check(ratio >= 1.5, detail);
}

Outcome pool_correctness() {
  std::string detail;
  for (PoolVariant v : {PoolVariant::Mutex, PoolVariant::Cas}) {
    PoolBenchSpec spec;
    spec.pool.variant = v;
    spec.pool.max_pool_size = 16;
    spec.tasks = 100000;
    spec.spawners = 4;
    const PoolBenchResult r = run_pool_bench(spec);
    const auto& s = r.stats;
    if (r.executed_once != spec.tasks) {
      return fail(fmt::format("{}: {} of {} tasks ran exactly once", to_string(v), r.executed_once, spec.tasks));
    }
    if (s.cap_violations != 0 || s.peak_pool_size > 16 || r.pool_size_after > 16) {
      return fail(fmt::format("{}: pool exceeded cap (peak {}, violations {})", to_string(v), s.peak_pool_size,
                              s.cap_violations));
    }
    if (v == PoolVariant::Mutex && s.cas_retries != 0) {
      return fail(fmt::format("mutex variant counted {} cas retries", s.cas_retries));
    }
    detail += fmt::format("{}: 1e5 once, peak {}; ", to_string(v), s.peak_pool_size);
  }
  const auto lin = history::check_all_programs<true>(1);
  if (lin.violations != 0) return fail("history not linearizable: " + lin.first_violation);
  history::Report cap;
  for (std::size_t k = 1; k <= 4; ++k) {
    for (std::size_t c = 0; c <= 2; ++c) {
      for (std::size_t s = 0; s <= c; ++s) cap.merge(history::check_capacity(k, c, s, 2));
    }
  }
  if (cap.violations != 0) return fail("capacity model check: " + cap.first_violation);
  return pass(detail + fmt::format("{} histories over {} programs linearizable; {} capacity schedules",
                                   lin.executions, lin.programs, cap.executions));
}

Outcome cas_contention() {
  auto retries = [](std::size_t spawners) {
    PoolBenchSpec spec;
    spec.pool.variant = PoolVariant::Cas;
    spec.tasks = 10000;
    spec.spawners = spawners;
    spec.batch = 8;
    return run_pool_bench(spec).stats.cas_retries;
  };
  const std::uint64_t r1 = retries(1), r2 = retries(2), r4 = retries(4), r8 = retries(8);
  const std::string detail = fmt::format("cas_retries spawners 1/2/4/8 = {}/{}/{}/{}", r1, r2, r4, r8);
  if (hardware_threads() < 8) {
    return {Verdict::Skip, detail + fmt::format("; needs >= 8 hardware threads, host has {}", hardware_threads())};
  }
  return check(r8 > 1000 && r2 <= r4 && r4 <= r8, detail);
}

Outcome fft_oracle() {
  double worst = 0.0;
  for (PoolVariant v : {PoolVariant::Mutex, PoolVariant::Cas}) {
    PoolConfig cfg;
    cfg.variant = v;
    TaskPool pool(cfg);
    for (unsigned log2 = 1; log2 <= 10; ++log2) {
      const std::size_t n = std::size_t{1} << log2;
      const auto x = make_fft_input(n, log2);
      const auto want = oracle::direct_dft(x);
      for (std::size_t cutoff : {std::size_t{1}, std::size_t{64}}) {
        const FftResult r = fft_run(x, cutoff, pool);
        if (r.tasks_spawned != fft_task_count(n, cutoff)) {
          return fail(fmt::format("n={} cutoff={}: {} tasks", n, cutoff, r.tasks_spawned));
        }
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(r.spectrum[i] - want[i]));
      }
    }
  }
  return check(worst <= 1e-6, fmt::format("sizes 2^1..2^10, both pools, max abs err {:.3g}", worst));
}

Outcome matmul_oracle() {
  double worst = 0.0;
  for (PoolVariant v : {PoolVariant::Mutex, PoolVariant::Cas}) {
    PoolConfig cfg;
    cfg.variant = v;
    TaskPool pool(cfg);
    for (std::size_t n : {8u, 24u, 64u, 128u}) {
      const auto [a, b] = make_matmul_operands(n, n + 1);
      const std::vector<double> av(a.values().begin(), a.values().end());
      const std::vector<double> bv(b.values().begin(), b.values().end());
      const auto want = oracle::naive_matmul(av, bv, n);
      for (unsigned k = 0; k <= 3; ++k) {
        if (n % (std::size_t{1} << k) != 0) continue;
        const MatmulResult r = matmul_run(a, b, k, pool);
        for (std::size_t i = 0; i < n * n; ++i) {
          worst = std::max(worst, std::abs(r.product.values()[i] - want[i]) / std::abs(want[i]));
        }
      }
    }
  }
  const std::uint64_t small = leaf_flops(MatmulSpec{1024, 5});
  const std::uint64_t large = leaf_flops(MatmulSpec{8192, 1});
  const bool flops_ok = small == 65536 && std::abs(static_cast<double>(large) - 1.37e11) <= 0.005e11;
  return check(worst <= 1e-12 && flops_ok, fmt::format("max rel err {:.3g}; leaf flops {} and {:.4g}", worst,
                                                       small, static_cast<double>(large)));
}

Outcome primitive_benches(const Topology& topo) {
  constexpr std::size_t kSamples = 10000;
  const double ghz = topo.clock_ghz();
  std::vector<SampleSet> sets;
  sets.push_back(bench_thread_create(CreateMode::Joinable, kSamples, ghz));
  sets.push_back(bench_thread_create(CreateMode::Detached, kSamples, ghz));
  PairOptions opts;
  opts.clock_ghz = ghz;
  sets.push_back(bench_mutex_handoff(kSamples, opts));
  sets.push_back(bench_condvar(CondvarMode::Signal, kSamples, opts));
  sets.push_back(bench_condvar(CondvarMode::Broadcast, kSamples, opts));
  const double pair_cycles = bench_mutex_uncontended(kSamples, ghz);
  if (!(pair_cycles > 0.0)) return fail("mutex pair cost not positive");

  for (const SampleSet& s : sets) {
    const std::string name = s.benchmark + "/" + s.mode;
    if (s.truncated || s.samples.size() != kSamples) {
      return fail(fmt::format("{}: {} samples, error '{}'", name, s.samples.size(), s.error));
    }
    for (const auto& x : s.samples) {
      if (x.a_ns < 0 || x.b_ns < 0) return fail(name + ": negative interval");
    }
    const SampleSummary sum = summarize(s);
    for (const Histogram* h : {&sum.a, &sum.b}) {
      double pct = 0.0;
      for (const auto& [bin, count] : h->bins) pct += h->percent(bin);
      if (std::abs(pct - 100.0) > 0.1) return fail(fmt::format("{}: percentages sum to {}", name, pct));
    }
  }
  return pass(fmt::format("5 sample benches x 1e4 complete; mutex pair {:.1f} cycles", pair_cycles));
}

Outcome stats_checks() {
  const std::int64_t c = to_cycles(259, 1.67);
  std::mt19937_64 gen(99);
  std::lognormal_distribution<double> dist(8.5, 1.0);
  std::vector<IntervalSample> samples(10000);
  for (auto& s : samples) {
    s.a_ns = static_cast<std::int64_t>(dist(gen));
    s.b_ns = static_cast<std::int64_t>(dist(gen));
  }
  const IntensityGrid g = build_intensity(samples, 1.67, 2000);
  std::vector<std::int64_t> a, b;
  for (const auto& s : samples) {
    a.push_back(std::llround(static_cast<double>(s.a_ns) * 1.67));
    b.push_back(std::llround(static_cast<double>(s.b_ns) * 1.67));
  }
  const bool marginals = g.marginal_a().bins == oracle::tally(a, 2000) && g.marginal_b().bins == oracle::tally(b, 2000);
  return check(c == 433 && marginals && g.total == samples.size(),
               fmt::format("to_cycles(259 ns, 1.67 GHz) = {}; marginals {} over 1e4 samples", c,
                           marginals ? "match" : "differ"));
}

}  // namespace

int main() {
  const Topology topo = detect_topology();
  std::printf("host: %u logical CPUs (%ux%ux%u), clock %.3f GHz, %zu hardware threads\n", topo.total(),
              topo.packages(), topo.cores_per_package(), topo.threads_per_core(), topo.clock_ghz(),
              hardware_threads());

  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"pin-plan-conformance", 1, pin_plan_conformance},
      {"kernel-oracle", 30, kernel_oracle},
      {"accounting-exactness", 1, accounting},
      {"proportionality", 10, [&] { return proportionality(topo); }},
      {"scaling-smoke", 120, [&] { return scaling_smoke(topo); }},
      {"pool-correctness", 120, pool_correctness},
      {"cas-contention", 60, cas_contention},
      {"fft-oracle", 30, fft_oracle},
      {"matmul-oracle", 60, matmul_oracle},
      {"primitive-benches", 120, [&] { return primitive_benches(topo); }},
      {"stats", 10, stats_checks},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = fail(std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.verdict != Verdict::Skip && secs > c.budget_s) {
      o = fail(fmt::format("{} (took {:.1f} s, budget {:.0f} s)", o.detail, secs, c.budget_s));
    }
    const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Skip ? "SKIP" : "FAIL";
    if (o.verdict == Verdict::Fail) ++failures;
    std::printf("%s %s [%.2f s]: %s\n", tag, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
