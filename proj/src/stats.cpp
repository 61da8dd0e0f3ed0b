#include "corescope/stats.hpp"

#include <algorithm>
#include <cmath>

#include "corescope/error.hpp"

namespace corescope {

std::int64_t to_cycles(double ns, double clock_ghz) {
  if (!(clock_ghz > 0.0)) throw UsageError("to_cycles: clock_ghz must be > 0");
  return std::llround(ns * clock_ghz);
}

std::int64_t bin_index(std::int64_t cycles, std::int64_t bin_width) {
  if (bin_width <= 0) throw UsageError("bin width must be > 0");
  std::int64_t q = cycles / bin_width;
  if (cycles % bin_width != 0 && cycles < 0) --q;
  return q;
}

double Histogram::percent(std::int64_t bin) const {
  if (total == 0) return 0.0;
  auto it = bins.find(bin);
  return it == bins.end() ? 0.0 : 100.0 * static_cast<double>(it->second) / static_cast<double>(total);
}

Histogram make_histogram(std::span<const std::int64_t> cycles, std::int64_t bin_width) {
  if (bin_width <= 0) throw UsageError("bin width must be > 0");
  Histogram h;
  h.bin_width = bin_width;
  for (auto c : cycles) ++h.bins[bin_index(c, bin_width)];
  h.total = cycles.size();
  return h;
}

double percent_in_range(std::span<const std::int64_t> cycles, std::int64_t lo, std::int64_t hi) {
  if (cycles.empty()) throw UsageError("percent_in_range: empty sample set");
  if (lo > hi) throw UsageError("percent_in_range: lo > hi");
  auto n = std::count_if(cycles.begin(), cycles.end(), [&](std::int64_t x) { return lo <= x && x < hi; });
  return 100.0 * static_cast<double>(n) / static_cast<double>(cycles.size());
}

double percent_in_range(const Histogram& hist, std::int64_t lo, std::int64_t hi) {
  if (hist.total == 0) throw UsageError("percent_in_range: empty histogram");
  if (lo > hi) throw UsageError("percent_in_range: lo > hi");
  if (lo % hist.bin_width != 0 || hi % hist.bin_width != 0) {
    throw UsageError("percent_in_range: range must fall on bin edges");
  }
  const std::int64_t first = bin_index(lo, hist.bin_width);
  const std::int64_t last = bin_index(hi, hist.bin_width);  // exclusive
  std::uint64_t n = 0;
  for (auto it = hist.bins.lower_bound(first); it != hist.bins.end() && it->first < last; ++it) {
    n += it->second;
  }
  return 100.0 * static_cast<double>(n) / static_cast<double>(hist.total);
}

Histogram IntensityGrid::marginal_a() const {
  Histogram h;
  h.bin_width = bin_width;
  for (const auto& [cell, count] : cells) h.bins[cell.first] += count;
  h.total = total;
  return h;
}

Histogram IntensityGrid::marginal_b() const {
  Histogram h;
  h.bin_width = bin_width;
  for (const auto& [cell, count] : cells) h.bins[cell.second] += count;
  h.total = total;
  return h;
}

CycleSeries cycle_series(std::span<const IntervalSample> samples, double clock_ghz) {
  CycleSeries s;
  s.a.reserve(samples.size());
  s.b.reserve(samples.size());
  for (const auto& x : samples) {
    s.a.push_back(to_cycles(static_cast<double>(x.a_ns), clock_ghz));
    s.b.push_back(to_cycles(static_cast<double>(x.b_ns), clock_ghz));
  }
  return s;
}

double fraction_b_lt_a(std::span<const IntervalSample> samples) {
  if (samples.empty()) return 0.0;
  auto n = std::count_if(samples.begin(), samples.end(),
                         [](const IntervalSample& s) { return s.b_ns < s.a_ns; });
  return static_cast<double>(n) / static_cast<double>(samples.size());
}

IntensityGrid build_intensity(std::span<const IntervalSample> samples, double clock_ghz,
                              std::int64_t bin_width) {
  if (samples.empty()) throw UsageError("build_intensity: empty sample set");
  if (bin_width <= 0) throw UsageError("bin width must be > 0");
  IntensityGrid g;
  g.bin_width = bin_width;
  for (const auto& s : samples) {
    auto a = to_cycles(static_cast<double>(s.a_ns), clock_ghz);
    auto b = to_cycles(static_cast<double>(s.b_ns), clock_ghz);
    ++g.cells[{bin_index(a, bin_width), bin_index(b, bin_width)}];
  }
  g.total = samples.size();
  g.fraction_b_lt_a = fraction_b_lt_a(samples);
  return g;
}

std::vector<std::pair<std::int64_t, std::int64_t>> default_report_ranges() {
  return {{0, 2000},    {0, 4000},    {0, 10000},   {0, 18000},
          {2000, 4000}, {4000, 6000}, {2000, 6000}, {38000, 44000}};
}

SampleSummary summarize(const SampleSet& set, std::int64_t bin_width) {
  if (set.samples.empty()) throw UsageError("summarize: empty sample set");
  const auto series = cycle_series(set.samples, set.clock_ghz);
  SampleSummary out;
  out.a = make_histogram(series.a, bin_width);
  out.b = make_histogram(series.b, bin_width);
  for (auto [lo, hi] : default_report_ranges()) {
    out.a_ranges.push_back({lo, hi, percent_in_range(series.a, lo, hi)});
    out.b_ranges.push_back({lo, hi, percent_in_range(series.b, lo, hi)});
  }
  out.fraction_b_lt_a = fraction_b_lt_a(set.samples);
  out.flagged = static_cast<std::size_t>(std::count_if(
      set.samples.begin(), set.samples.end(), [](const IntervalSample& s) { return s.flagged; }));
  return out;
}

}  // namespace corescope
