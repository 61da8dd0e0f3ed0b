#include "corescope/json_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <string>

#include "corescope/error.hpp"

namespace corescope {

json to_json(const Topology& topo) {
  json j = {
      {"packages", topo.packages()},
      {"cores_per_package", topo.cores_per_package()},
      {"threads_per_core", topo.threads_per_core()},
      {"total", topo.total()},
      {"clock_ghz", topo.clock_ghz()},
      {"clock_source", topo.clock_source()},
      {"source", std::string(to_string(topo.source()))},
      {"flat_fallback", topo.flat_fallback()},
  };
  json cpus = json::array();
  for (std::uint32_t i = 0; i < topo.total(); ++i) cpus.push_back(topo.os_cpu(i));
  j["os_cpus"] = std::move(cpus);
  return j;
}

json to_json(const PinPlan& plan) {
  json assignments = json::array();
  for (std::size_t i = 0; i < plan.assignments.size(); ++i) {
    const auto& a = plan.assignments[i];
    if (!a) {
      assignments.push_back({{"worker", i}, {"logical_id", nullptr}});
      continue;
    }
    const CpuLocation loc = plan.topology.location(*a);
    assignments.push_back({{"worker", i},
                           {"logical_id", *a},
                           {"os_cpu", plan.topology.os_cpu(*a)},
                           {"package", loc.package},
                           {"core", loc.core},
                           {"slot", loc.slot}});
  }
  return {{"strategy", std::string(to_string(plan.strategy))},
          {"n", plan.assignments.size()},
          {"assignments", std::move(assignments)}};
}

json to_json(const SpinStats& s) {
  return {{"cas_retries", s.cas_retries},
          {"threads_created", s.threads_created},
          {"pool_hits", s.pool_hits},
          {"pool_misses", s.pool_misses},
          {"pooled_retires", s.pooled_retires},
          {"exited_retires", s.exited_retires},
          {"peak_pool_size", s.peak_pool_size},
          {"cap_violations", s.cap_violations}};
}

json to_json(const Histogram& hist) {
  json bins = json::array();
  for (const auto& [bin, count] : hist.bins) {
    bins.push_back({{"bin", bin},
                    {"lo", bin * hist.bin_width},
                    {"hi", (bin + 1) * hist.bin_width},
                    {"count", count},
                    {"percent", hist.percent(bin)}});
  }
  return {{"bin_width", hist.bin_width}, {"total", hist.total}, {"bins", std::move(bins)}};
}

json to_json(const IntensityGrid& grid) {
  json cells = json::array();
  for (const auto& [key, count] : grid.cells) {
    cells.push_back({{"a_bin", key.first}, {"b_bin", key.second}, {"count", count}});
  }
  return {{"bin_width", grid.bin_width},
          {"total", grid.total},
          {"fraction_b_lt_a", grid.fraction_b_lt_a},
          {"cells", std::move(cells)}};
}

json to_json(const RunManifest& m) {
  json j = {{"suite_version", m.suite_version},
            {"command_line", m.command_line},
            {"config_source", m.config_source},
            {"config", m.config_values},
            {"outputs", m.outputs},
            {"started_at", m.started_at},
            {"finished_at", m.finished_at},
            {"clock", "steady_clock"}};
  j["topology"] = m.topology ? to_json(*m.topology) : json(nullptr);
  return j;
}

json to_json(const SweepPoint& p) {
  const TrialResult& r = p.best;
  json threads = json::array();
  for (const auto& t : r.per_thread) {
    json tj = {{"start_ns", t.start_ns}, {"end_ns", t.end_ns}, {"pin_honored", t.pin_honored}};
    tj["pinned_to"] = t.pinned_to ? json(*t.pinned_to) : json(nullptr);
    if (!t.pin_note.empty()) tj["pin_note"] = t.pin_note;
    threads.push_back(std::move(tj));
  }
  return {{"n", p.n_threads},
          {"strategy", std::string(to_string(r.metadata.strategy))},
          {"span_ns", r.span_ns},
          {"total_units", r.total_units},
          {"throughput", r.throughput},
          {"repeats_kept", p.repeats},
          {"kept_index", p.kept_index},
          {"timestamp", r.metadata.timestamp},
          {"release_ns", r.metadata.release_ns},
          {"start_order", r.metadata.start_order},
          {"threads", std::move(threads)}};
}

namespace {

json ranges_json(const std::vector<RangePercent>& ranges) {
  json out = json::array();
  for (const auto& r : ranges) out.push_back({{"lo", r.lo}, {"hi", r.hi}, {"percent", r.percent}});
  return out;
}

std::int64_t parse_int(std::string_view field, std::size_t line_no) {
  std::int64_t v = 0;
  const char* end = field.data() + field.size();
  auto [p, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc{} || p != end) {
    throw UsageError("raw csv line " + std::to_string(line_no) + ": bad integer '" +
                     std::string(field) + "'");
  }
  return v;
}

}  // namespace

json summary_json(const SampleSet& set, std::int64_t bin_width) {
  json j = {{"bin_width", bin_width}, {"count", set.samples.size()}};
  if (set.samples.empty()) {
    j["histograms"] = {{"a", nullptr}, {"b", nullptr}};
    j["percent_in_ranges"] = {{"a", json::array()}, {"b", json::array()}};
    j["fraction_b_lt_a"] = nullptr;
    j["flagged"] = 0;
    j["intensity"] = nullptr;
    return j;
  }
  const SampleSummary s = summarize(set, bin_width);
  j["histograms"] = {{"a", to_json(s.a)}, {"b", to_json(s.b)}};
  j["percent_in_ranges"] = {{"a", ranges_json(s.a_ranges)}, {"b", ranges_json(s.b_ranges)}};
  j["fraction_b_lt_a"] = s.fraction_b_lt_a;
  j["flagged"] = s.flagged;
  j["intensity"] = to_json(build_intensity(set.samples, set.clock_ghz, bin_width));
  return j;
}

json to_json(const SampleSet& set, std::int64_t bin_width) {
  json samples = json::array();
  for (const auto& s : set.samples) {
    json sj = {{"a_ns", s.a_ns}, {"b_ns", s.b_ns}};
    if (s.flagged) sj["flagged"] = true;
    samples.push_back(std::move(sj));
  }
  return {{"benchmark", set.benchmark},
          {"mode", set.mode},
          {"clock_ghz", set.clock_ghz},
          {"requested", set.requested},
          {"truncated", set.truncated},
          {"error", set.error},
          {"notes", set.notes},
          {"counters", set.counters},
          {"samples", std::move(samples)},
          {"summary", summary_json(set, bin_width)}};
}

SampleSet sample_set_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("samples") || !doc["samples"].is_array()) {
    throw UsageError("samples document: missing 'samples' array");
  }
  SampleSet set;
  set.benchmark = doc.value("benchmark", "");
  set.mode = doc.value("mode", "");
  set.clock_ghz = doc.value("clock_ghz", 1.0);
  for (const auto& s : doc["samples"]) {
    if (!s.contains("a_ns") || !s.contains("b_ns")) {
      throw UsageError("samples document: sample without a_ns/b_ns");
    }
    IntervalSample x;
    x.a_ns = s["a_ns"].get<std::int64_t>();
    x.b_ns = s["b_ns"].get<std::int64_t>();
    x.flagged = s.value("flagged", false);
    set.samples.push_back(x);
  }
  set.requested = doc.value("requested", set.samples.size());
  return set;
}

void write_raw_csv(std::ostream& out, const SampleSet& set) {
  out << "a_ns,b_ns\n";
  for (const auto& s : set.samples) out << s.a_ns << ',' << s.b_ns << '\n';
}

std::vector<IntervalSample> read_raw_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw UsageError("raw csv: empty input");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "a_ns,b_ns") throw UsageError("raw csv: expected header 'a_ns,b_ns'");

  std::vector<IntervalSample> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw UsageError("raw csv line " + std::to_string(line_no) + ": expected two fields");
    }
    std::string_view view(line);
    IntervalSample s;
    s.a_ns = parse_int(view.substr(0, comma), line_no);
    s.b_ns = parse_int(view.substr(comma + 1), line_no);
    out.push_back(s);
  }
  return out;
}

}  // namespace corescope
