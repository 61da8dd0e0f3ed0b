#include "corescope/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "corescope/config.hpp"
#include "corescope/error.hpp"
#include "corescope/harness.hpp"
#include "corescope/json_io.hpp"
#include "corescope/primitives.hpp"
#include "corescope/topology.hpp"
#include "corescope/workloads.hpp"

#ifndef CORESCOPE_VERSION
#define CORESCOPE_VERSION "0.0.0"
#endif

namespace corescope {

std::string_view suite_version() { return CORESCOPE_VERSION; }

namespace {

constexpr std::uint64_t kDeskIterations = 10'000'000;
constexpr std::uint64_t kFullScaleIterations = 1'000'000'000;
constexpr std::size_t kDeskBlockMb = 64;
constexpr std::size_t kFullScaleBlockMb = 256;
constexpr std::size_t kDeskSamples = 10'000;
constexpr std::size_t kFullScaleSamples = 100'000;

std::size_t parse_count(std::string_view text, std::string_view what) {
  std::size_t v = 0;
  const char* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc{} || p != end) {
    throw UsageError(std::string(what) + ": '" + std::string(text) + "' is not a non-negative integer");
  }
  return v;
}

struct GlobalOptions {
  std::string out_path;
  std::string config_path;
};

struct Context {
  std::vector<std::string> command_line;
  Config config;
  Topology topology;
  std::string started_at;
  std::map<std::string, std::string> outputs;
};

Config load_config(const GlobalOptions& g) {
  if (!g.config_path.empty()) return load_config_file(g.config_path);
  if (auto env = load_config_from_env()) return *env;
  return Config{};
}

Topology resolve_topology(const Config& cfg) {
  const Topology detected = detect_topology();
  return apply_overrides(detected, cfg.topology);
}

void emit(json doc, Context& ctx, const GlobalOptions& g, std::ostream& out) {
  ctx.outputs["json"] = g.out_path.empty() ? "-" : g.out_path;
  RunManifest m;
  m.suite_version = std::string(suite_version());
  m.command_line = ctx.command_line;
  m.topology = ctx.topology;
  m.config_source = ctx.config.source;
  m.config_values = ctx.config.entries;
  m.outputs = ctx.outputs;
  m.started_at = ctx.started_at;
  m.finished_at = utc_timestamp();
  doc["manifest"] = to_json(m);

  if (g.out_path.empty()) {
    out << doc.dump(2) << '\n';
    return;
  }
  std::ofstream file(g.out_path);
  if (!file) throw ResourceError("cannot open output file " + g.out_path);
  file << doc.dump(2) << '\n';
  if (!file) throw ResourceError("failed writing output file " + g.out_path);
}

void write_raw(const std::string& path, const SampleSet& set, Context& ctx) {
  if (path.empty()) return;
  std::ofstream file(path);
  if (!file) throw ResourceError("cannot open raw output file " + path);
  write_raw_csv(file, set);
  if (!file) throw ResourceError("failed writing raw output file " + path);
  ctx.outputs["raw"] = path;
}

double effective_clock(const Topology& topo, double flag_value) {
  return flag_value > 0.0 ? flag_value : topo.clock_ghz();
}

// ---- subcommand options ------------------------------------------------------

struct TopoOpts {
  std::string strategy = "rr";
  std::size_t threads = 0;
};

struct SweepOpts {
  std::string kind;
  std::string strategy = "auto";
  std::string threads = "ladder";
  std::uint64_t iterations = kDeskIterations;
  std::size_t dataset_len = 128;
  std::size_t block_mb = kDeskBlockMb;
  std::size_t element_width = sizeof(std::uintptr_t);
  std::size_t repeats = 3;
  bool full_scale = false;
  CLI::Option* iterations_opt = nullptr;
  CLI::Option* block_opt = nullptr;
};

struct SampleOpts {
  std::string mode = "joinable";
  std::string primitive;
  std::size_t samples = kDeskSamples;
  bool full_scale = false;
  std::string raw;
  std::int64_t bins = kDefaultBinWidthCycles;
  double clock_ghz = 0.0;
  std::string pin;
  double settle_us = 10.0;
  double watchdog_s = 10.0;
  CLI::Option* samples_opt = nullptr;
};

struct PoolOpts {
  std::string variant = "mutex";
  std::size_t tasks = 100'000;
  std::size_t workers_cap = 64;
  std::string backoff = "none";
  std::size_t spawners = 1;
  std::size_t batch = 64;
  std::size_t initial_workers = 0;
  std::size_t max_threads = 32768;
};

struct WorkloadOpts {
  std::string pool = "mutex";
  std::size_t workers_cap = 64;
  std::string backoff = "none";
  std::size_t max_threads = 32768;
  std::uint64_t seed = 1;
  unsigned log2 = 10;
  std::size_t cutoff = 64;
  std::size_t n = 256;
  unsigned recursions = 2;
};

struct ReportOpts {
  std::string in;
  std::int64_t bins = kDefaultBinWidthCycles;
  double clock_ghz = 0.0;
};

void add_pool_flags(CLI::App* sub, WorkloadOpts& o) {
  sub->add_option("--pool", o.pool, "Idle-worker pool variant: mutex|cas")->capture_default_str();
  sub->add_option("--workers-cap", o.workers_cap, "Maximum idle workers kept in the pool")->capture_default_str();
  sub->add_option("--backoff", o.backoff, "CAS retry backoff: none|exp")->capture_default_str();
  sub->add_option("--max-threads", o.max_threads, "Ceiling on live worker threads")->capture_default_str();
  sub->add_option("--seed", o.seed, "Input seed")->capture_default_str();
}

PoolConfig pool_config(const std::string& variant, std::size_t cap, const std::string& backoff,
                       std::size_t max_threads, std::size_t initial = 0) {
  PoolConfig cfg;
  cfg.variant = parse_pool_variant(variant);
  cfg.max_pool_size = cap;
  cfg.backoff = parse_backoff(backoff);
  cfg.max_threads = max_threads;
  cfg.initial_workers = initial;
  return cfg;
}

// ---- subcommand bodies -------------------------------------------------------

json cmd_topo(const TopoOpts& o, Context& ctx) {
  const std::size_t n = o.threads == 0 ? ctx.topology.total() : o.threads;
  json doc = {{"benchmark", "topo"}, {"topology", to_json(ctx.topology)}};
  doc["plan"] = to_json(pin_plan(parse_strategy(o.strategy), n, ctx.topology));
  return doc;
}

json kernel_json(const KernelSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, ComputeKernelSpec>) {
          return {{"kind", std::string(to_string(s.kind))},
                  {"iterations", s.iterations},
                  {"dataset_len", s.dataset_len},
                  {"ops_per_iteration", ComputeKernelSpec::kOpsPerIteration}};
        } else {
          return {{"kind", std::string(to_string(s.kind))},
                  {"block_bytes", s.block_bytes},
                  {"element_width", s.element_width}};
        }
      },
      spec);
}

json run_sweep(const std::string& benchmark, const KernelSpec& kernel, const SweepOpts& o, Context& ctx) {
  TrialConfig cfg;
  cfg.strategy = parse_strategy(o.strategy);
  cfg.kernel = kernel;
  cfg.repeats = o.repeats;
  const auto counts = parse_thread_counts(o.threads, ctx.topology.total());
  cfg.n_threads = counts.front();
  cfg.validate();

  const auto points = sweep(counts, cfg, ctx.topology);
  json pts = json::array();
  for (const auto& p : points) pts.push_back(to_json(p));
  return {{"benchmark", benchmark},
          {"kernel", kernel_json(kernel)},
          {"topology", to_json(ctx.topology)},
          {"points", std::move(pts)}};
}

json cmd_compute(const SweepOpts& o, Context& ctx) {
  ComputeKernelSpec spec;
  if (o.kind == "int") {
    spec.kind = ComputeKind::IntChain;
  } else if (o.kind == "float") {
    spec.kind = ComputeKind::FloatChain;
  } else {
    throw UsageError("compute: --kind must be int or float, got '" + o.kind + "'");
  }
  spec.iterations = (o.full_scale && o.iterations_opt->count() == 0) ? kFullScaleIterations : o.iterations;
  spec.dataset_len = o.dataset_len;
  spec.validate();
  return run_sweep("compute", spec, o, ctx);
}

json cmd_membw(const SweepOpts& o, Context& ctx) {
  MemoryKernelSpec spec;
  if (o.kind == "read") {
    spec.kind = MemoryKind::Read;
  } else if (o.kind == "write") {
    spec.kind = MemoryKind::Write;
  } else {
    throw UsageError("membw: --kind must be read or write, got '" + o.kind + "'");
  }
  const std::size_t mb = (o.full_scale && o.block_opt->count() == 0) ? kFullScaleBlockMb : o.block_mb;
  spec.block_bytes = mb * kMiB;
  spec.element_width = o.element_width;
  spec.validate();
  return run_sweep("membw", spec, o, ctx);
}

std::size_t sample_count(const SampleOpts& o) {
  if (o.samples_opt->count() == 0 && o.full_scale) return kFullScaleSamples;
  if (o.samples == 0) throw UsageError("--samples must be >= 1");
  return o.samples;
}

json samples_doc(const SampleSet& set, const SampleOpts& o, Context& ctx) {
  if (o.bins <= 0) throw UsageError("--bins must be >= 1");
  write_raw(o.raw, set, ctx);
  return to_json(set, o.bins);
}

json cmd_threads(const SampleOpts& o, Context& ctx) {
  CreateMode mode;
  if (o.mode == "joinable") {
    mode = CreateMode::Joinable;
  } else if (o.mode == "detached") {
    mode = CreateMode::Detached;
  } else {
    throw UsageError("threads: --mode must be joinable or detached, got '" + o.mode + "'");
  }
  const std::size_t n = sample_count(o);
  const SampleSet set = bench_thread_create(mode, n, effective_clock(ctx.topology, o.clock_ghz));
  return samples_doc(set, o, ctx);
}

PairOptions pair_options(const SampleOpts& o, const Context& ctx) {
  PairOptions p;
  p.clock_ghz = effective_clock(ctx.topology, o.clock_ghz);
  if (o.settle_us < 0) throw UsageError("--settle-us must be >= 0");
  if (o.watchdog_s <= 0) throw UsageError("--watchdog-s must be > 0");
  p.settle = std::chrono::nanoseconds(static_cast<std::int64_t>(o.settle_us * 1000.0));
  p.watchdog = std::chrono::milliseconds(static_cast<std::int64_t>(o.watchdog_s * 1000.0));
  if (!o.pin.empty()) {
    const auto comma = o.pin.find(',');
    if (comma == std::string::npos) throw UsageError("--pin expects two logical ids 'a,b'");
    p.topology = ctx.topology;
    p.pin_a = static_cast<std::uint32_t>(parse_count(std::string_view(o.pin).substr(0, comma), "--pin"));
    p.pin_b = static_cast<std::uint32_t>(parse_count(std::string_view(o.pin).substr(comma + 1), "--pin"));
    for (auto id : {*p.pin_a, *p.pin_b}) {
      if (id >= ctx.topology.total()) {
        throw UsageError("--pin: logical id " + std::to_string(id) + " outside topology of " +
                         std::to_string(ctx.topology.total()));
      }
    }
  }
  return p;
}

json cmd_sync(const SampleOpts& o, Context& ctx) {
  const PairOptions p = pair_options(o, ctx);
  if (o.primitive == "mutex-pair") {
    const std::size_t pairs = o.samples_opt->count() == 0 ? 1000 : o.samples;
    if (pairs == 0) throw UsageError("--samples must be >= 1");
    const double cycles = bench_mutex_uncontended(pairs, p.clock_ghz);
    return {{"benchmark", "mutex-pair"},
            {"mode", "uncontended"},
            {"clock_ghz", p.clock_ghz},
            {"pairs", pairs},
            {"cycles_per_pair", cycles}};
  }
  const std::size_t n = sample_count(o);
  SampleSet set;
  if (o.primitive == "mutex-handoff") {
    set = bench_mutex_handoff(n, p);
  } else if (o.primitive == "cond-signal") {
    set = bench_condvar(CondvarMode::Signal, n, p);
  } else if (o.primitive == "cond-broadcast") {
    set = bench_condvar(CondvarMode::Broadcast, n, p);
  } else {
    throw UsageError("sync: --primitive must be mutex-pair, mutex-handoff, cond-signal or cond-broadcast");
  }
  return samples_doc(set, o, ctx);
}

json cmd_pool_bench(const PoolOpts& o) {
  PoolBenchSpec spec;
  spec.pool = pool_config(o.variant, o.workers_cap, o.backoff, o.max_threads, o.initial_workers);
  spec.tasks = o.tasks;
  spec.spawners = o.spawners;
  spec.batch = o.batch;
  const PoolBenchResult r = run_pool_bench(spec);
  return {{"benchmark", "pool-bench"},
          {"variant", std::string(to_string(spec.pool.variant))},
          {"wall_ns", r.wall_ns},
          {"spin_stats", to_json(r.stats)},
          {"tasks", r.tasks},
          {"executed_once", r.executed_once},
          {"params",
           {{"workers_cap", o.workers_cap},
            {"backoff", std::string(to_string(spec.pool.backoff))},
            {"spawners", o.spawners},
            {"batch", o.batch},
            {"initial_workers", o.initial_workers},
            {"max_threads", o.max_threads}}}};
}

json workload_params(const WorkloadOpts& o) {
  return {{"pool", o.pool},
          {"workers_cap", o.workers_cap},
          {"backoff", o.backoff},
          {"max_threads", o.max_threads},
          {"seed", o.seed}};
}

json cmd_fft(const WorkloadOpts& o) {
  FftSpec spec;
  spec.size_log2 = o.log2;
  spec.cutoff = o.cutoff;
  spec.validate();
  TaskPool pool(pool_config(o.pool, o.workers_cap, o.backoff, o.max_threads));
  const auto input = make_fft_input(spec.points(), o.seed);
  const FftResult r = fft_run(input, spec.cutoff, pool);

  double sum = 0.0;
  for (const auto& v : r.spectrum) sum += v.real() + v.imag();
  json params = workload_params(o);
  params["log2"] = spec.size_log2;
  params["points"] = spec.points();
  params["cutoff"] = spec.cutoff;
  return {{"workload", "fft"},
          {"params", std::move(params)},
          {"wall_ms", static_cast<double>(r.wall_ns) / 1e6},
          {"spin_stats", to_json(r.stats)},
          {"checksum", sum},
          {"tasks_spawned", r.tasks_spawned},
          {"expected_tasks", fft_task_count(spec.points(), spec.cutoff)}};
}

json cmd_matmul(const WorkloadOpts& o) {
  MatmulSpec spec{o.n, o.recursions};
  spec.validate();
  TaskPool pool(pool_config(o.pool, o.workers_cap, o.backoff, o.max_threads));
  const auto [a, b] = make_matmul_operands(spec.n, o.seed);
  const MatmulResult r = matmul_run(a, b, spec.recursions, pool);
  const MatmulTaskCount tc = matmul_task_count(spec);

  json params = workload_params(o);
  params["n"] = spec.n;
  params["recursions"] = spec.recursions;
  params["leaf_dim"] = spec.leaf_dim();
  params["leaf_flops"] = leaf_flops(spec);
  const double flops = 2.0 * static_cast<double>(spec.n) * static_cast<double>(spec.n) *
                       static_cast<double>(spec.n);
  return {{"workload", "matmul"},
          {"params", std::move(params)},
          {"wall_ms", static_cast<double>(r.wall_ns) / 1e6},
          {"spin_stats", to_json(r.stats)},
          {"checksum", checksum(r.product)},
          {"gflops", r.wall_ns > 0 ? flops / static_cast<double>(r.wall_ns) : 0.0},
          {"tasks",
           {{"leaf", tc.leaf_tasks},
            {"multiply", tc.multiply_tasks},
            {"addition", tc.addition_tasks},
            {"total_spawned", tc.total_spawned()}}}};
}

json cmd_report(const ReportOpts& o, Context& ctx) {
  if (o.bins <= 0) throw UsageError("--bins must be >= 1");
  std::ifstream in(o.in);
  if (!in) throw UsageError("report: cannot open input " + o.in);

  SampleSet set;
  in >> std::ws;
  if (in.peek() == '{') {
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError("report: " + o.in + " is not valid JSON: " + e.what());
    }
    set = sample_set_from_json(doc);
  } else {
    set.samples = read_raw_csv(in);
    set.benchmark = "raw";
    set.clock_ghz = ctx.topology.clock_ghz();
    set.requested = set.samples.size();
  }
  if (o.clock_ghz > 0.0) set.clock_ghz = o.clock_ghz;
  if (set.samples.empty()) throw UsageError("report: " + o.in + " holds no samples");

  ctx.outputs["input"] = o.in;
  return {{"benchmark", "report"},
          {"source_benchmark", set.benchmark},
          {"mode", set.mode},
          {"clock_ghz", set.clock_ghz},
          {"input", o.in},
          {"summary", summary_json(set, o.bins)}};
}

void add_sweep_flags(CLI::App* sub, SweepOpts& o) {
  sub->add_option("--strategy", o.strategy, "Pin mapping: dumb|rr|auto")->capture_default_str();
  sub->add_option("--threads", o.threads, "Thread counts: ladder, ladder:N, or a list like 1,2,4")
      ->capture_default_str();
  sub->add_option("--repeats", o.repeats, "Trials per count; the best is kept")->capture_default_str();
  sub->add_flag("--paper-scale", o.full_scale, "Use the full-size defaults (1e9 iterations, 256 MB blocks)");
}

void add_sample_flags(CLI::App* sub, SampleOpts& o) {
  o.samples_opt = sub->add_option("--samples", o.samples, "Number of samples")->capture_default_str();
  sub->add_flag("--paper-scale", o.full_scale, "Use 1e5 samples unless --samples is given");
  sub->add_option("--raw", o.raw, "Also write raw a_ns,b_ns rows to this CSV file");
  sub->add_option("--bins", o.bins, "Histogram bin width in cycles")->capture_default_str();
  sub->add_option("--clock-ghz", o.clock_ghz, "Clock used for cycle conversion (default: topology)");
}

}  // namespace

std::vector<std::size_t> parse_thread_counts(std::string_view text, std::size_t ladder_max) {
  if (text == "ladder") return thread_ladder(std::max<std::size_t>(ladder_max, 1));
  if (text.rfind("ladder:", 0) == 0) {
    const std::size_t max = parse_count(text.substr(7), "--threads ladder");
    if (max == 0) throw UsageError("--threads ladder:N needs N >= 1");
    return thread_ladder(max);
  }
  std::vector<std::size_t> counts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::size_t n = parse_count(text.substr(pos, comma - pos), "--threads");
    if (n == 0) throw UsageError("--threads: counts must be >= 1");
    if (!counts.empty() && n <= counts.back()) {
      throw UsageError("--threads: counts must be strictly ascending");
    }
    counts.push_back(n);
    pos = comma + 1;
  }
  return counts;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"corescope: multicore characterization suite", "corescope"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(suite_version()));

  GlobalOptions g;
  app.add_option("--out", g.out_path, "Write JSON here instead of stdout");
  app.add_option("--config", g.config_path, "key=value config file (default: $CORESCOPE_CONFIG)");

  TopoOpts topo_o;
  auto* topo = app.add_subcommand("topo", "Print the topology and a sample pin plan");
  topo->add_option("--strategy", topo_o.strategy, "Pin mapping: dumb|rr|auto")->capture_default_str();
  topo->add_option("--threads", topo_o.threads, "Workers in the sample plan (default: all)");

  SweepOpts compute_o;
  compute_o.kind = "int";
  auto* compute = app.add_subcommand("compute", "Integer/float arithmetic throughput sweep");
  compute->add_option("--kind", compute_o.kind, "int|float")->capture_default_str();
  compute_o.iterations_opt =
      compute->add_option("--iterations", compute_o.iterations, "Loop iterations per thread")
          ->capture_default_str();
  compute->add_option("--dataset-len", compute_o.dataset_len, "Input values cycled by the loop")
      ->capture_default_str();
  add_sweep_flags(compute, compute_o);

  SweepOpts membw_o;
  membw_o.kind = "read";
  auto* membw = app.add_subcommand("membw", "Memory read/write throughput sweep");
  membw->add_option("--kind", membw_o.kind, "read|write")->capture_default_str();
  membw_o.block_opt =
      membw->add_option("--block-mb", membw_o.block_mb, "Block size per thread in MiB")->capture_default_str();
  membw->add_option("--element-width", membw_o.element_width, "Read width in bytes: 1|2|4|8")
      ->capture_default_str();
  add_sweep_flags(membw, membw_o);

  SampleOpts threads_o;
  auto* threads = app.add_subcommand("threads", "Thread creation intervals");
  threads->add_option("--mode", threads_o.mode, "joinable|detached")->capture_default_str();
  add_sample_flags(threads, threads_o);

  SampleOpts sync_o;
  auto* sync = app.add_subcommand("sync", "Mutex and condition variable intervals");
  sync->add_option("--primitive", sync_o.primitive, "mutex-pair|mutex-handoff|cond-signal|cond-broadcast")
      ->required();
  add_sample_flags(sync, sync_o);
  sync->add_option("--pin", sync_o.pin, "Pin signaler and waiter to logical ids a,b");
  sync->add_option("--settle-us", sync_o.settle_us, "Settle delay before unlocking (mutex-handoff)")
      ->capture_default_str();
  sync->add_option("--watchdog-s", sync_o.watchdog_s, "Abort when a side stalls this long")
      ->capture_default_str();

  PoolOpts pool_o;
  auto* pool = app.add_subcommand("pool-bench", "Spawn no-op tasks through the thread pool");
  pool->add_option("--variant", pool_o.variant, "mutex|cas")->capture_default_str();
  pool->add_option("--tasks", pool_o.tasks, "Tasks to spawn")->capture_default_str();
  pool->add_option("--workers-cap", pool_o.workers_cap, "Maximum idle workers kept in the pool")
      ->capture_default_str();
  pool->add_option("--backoff", pool_o.backoff, "CAS retry backoff: none|exp")->capture_default_str();
  pool->add_option("--spawners", pool_o.spawners, "Concurrent spawning threads")->capture_default_str();
  pool->add_option("--batch", pool_o.batch, "Spawns between waits, per spawner")->capture_default_str();
  pool->add_option("--initial-workers", pool_o.initial_workers, "Workers parked at startup")
      ->capture_default_str();
  pool->add_option("--max-threads", pool_o.max_threads, "Ceiling on live worker threads")
      ->capture_default_str();

  WorkloadOpts fft_o;
  auto* fft = app.add_subcommand("fft", "Recursive radix-2 FFT on the thread pool");
  fft->add_option("--log2", fft_o.log2, "Transform size as log2 of the point count (1..16)")
      ->capture_default_str();
  fft->add_option("--cutoff", fft_o.cutoff, "Subproblems at most this size run inline")->capture_default_str();
  add_pool_flags(fft, fft_o);

  WorkloadOpts mm_o;
  auto* mm = app.add_subcommand("matmul", "Recursive block matrix multiplication on the thread pool");
  mm->add_option("--n", mm_o.n, "Matrix dimension")->capture_default_str();
  mm->add_option("--recursions", mm_o.recursions, "Recursion depth (0..5)")->capture_default_str();
  add_pool_flags(mm, mm_o);

  ReportOpts report_o;
  auto* report = app.add_subcommand("report", "Recompute summaries from a samples JSON or raw CSV");
  report->add_option("--in", report_o.in, "Samples JSON or raw a_ns,b_ns CSV")->required();
  report->add_option("--bins", report_o.bins, "Histogram bin width in cycles")->capture_default_str();
  report->add_option("--clock-ghz", report_o.clock_ghz, "Clock for cycle conversion (default: from input)");

  std::vector<const char*> argv;
  argv.push_back("corescope");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << suite_version() << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return 1;
  }

  try {
    Context ctx{{"corescope"}, {}, Topology(1, 1, 1, 1.0), utc_timestamp(), {}};
    ctx.command_line.insert(ctx.command_line.end(), args.begin(), args.end());
    ctx.config = load_config(g);
    ctx.topology = resolve_topology(ctx.config);

    json doc;
    if (*topo) {
      doc = cmd_topo(topo_o, ctx);
    } else if (*compute) {
      doc = cmd_compute(compute_o, ctx);
    } else if (*membw) {
      doc = cmd_membw(membw_o, ctx);
    } else if (*threads) {
      doc = cmd_threads(threads_o, ctx);
    } else if (*sync) {
      doc = cmd_sync(sync_o, ctx);
    } else if (*pool) {
      doc = cmd_pool_bench(pool_o);
    } else if (*fft) {
      doc = cmd_fft(fft_o);
    } else if (*mm) {
      doc = cmd_matmul(mm_o);
    } else {
      doc = cmd_report(report_o, ctx);
    }
    emit(std::move(doc), ctx, g, out);
    return 0;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace corescope
