#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "corescope/samples.hpp"

namespace corescope {

inline constexpr std::int64_t kDefaultBinWidthCycles = 2000;

// ns x clock_ghz, rounded to nearest. Throws UsageError when clock_ghz <= 0.
std::int64_t to_cycles(double ns, double clock_ghz);

// floor(cycles / width), correct for negative values too.
std::int64_t bin_index(std::int64_t cycles, std::int64_t bin_width);

struct Histogram {
  std::int64_t bin_width = kDefaultBinWidthCycles;
  std::map<std::int64_t, std::uint64_t> bins;  // bin index -> count
  std::uint64_t total = 0;

  double percent(std::int64_t bin) const;
};

Histogram make_histogram(std::span<const std::int64_t> cycles,
                         std::int64_t bin_width = kDefaultBinWidthCycles);

// 100 * |{x : lo <= x < hi}| / total. Throws UsageError for an empty set or lo > hi.
double percent_in_range(std::span<const std::int64_t> cycles, std::int64_t lo, std::int64_t hi);
// Histogram form; lo and hi must fall on bin edges.
double percent_in_range(const Histogram& hist, std::int64_t lo, std::int64_t hi);

struct IntensityGrid {
  std::int64_t bin_width = kDefaultBinWidthCycles;
  std::map<std::pair<std::int64_t, std::int64_t>, std::uint64_t> cells;  // (a bin, b bin)
  std::uint64_t total = 0;
  double fraction_b_lt_a = 0.0;

  Histogram marginal_a() const;
  Histogram marginal_b() const;
};

IntensityGrid build_intensity(std::span<const IntervalSample> samples, double clock_ghz,
                              std::int64_t bin_width = kDefaultBinWidthCycles);

struct CycleSeries {
  std::vector<std::int64_t> a;
  std::vector<std::int64_t> b;
};

CycleSeries cycle_series(std::span<const IntervalSample> samples, double clock_ghz);

// Fraction of samples with b < a, on raw nanoseconds.
double fraction_b_lt_a(std::span<const IntervalSample> samples);

struct RangePercent {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  double percent = 0.0;
};

struct SampleSummary {
  Histogram a;
  Histogram b;
  std::vector<RangePercent> a_ranges;
  std::vector<RangePercent> b_ranges;
  double fraction_b_lt_a = 0.0;
  std::size_t flagged = 0;
};

// Cycle ranges reported alongside each summary.
std::vector<std::pair<std::int64_t, std::int64_t>> default_report_ranges();

SampleSummary summarize(const SampleSet& set, std::int64_t bin_width = kDefaultBinWidthCycles);

}  // namespace corescope
