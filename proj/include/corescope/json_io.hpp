#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "corescope/harness.hpp"
#include "corescope/samples.hpp"
#include "corescope/stats.hpp"
#include "corescope/taskpool.hpp"
#include "corescope/topology.hpp"

namespace corescope {

using nlohmann::json;

// Embedded in every JSON document the CLI writes; enough to re-run the command.
struct RunManifest {
  std::string suite_version;
  std::vector<std::string> command_line;
  std::optional<Topology> topology;
  std::string config_source;
  std::map<std::string, std::string> config_values;
  std::map<std::string, std::string> outputs;
  std::string started_at;
  std::string finished_at;
};

json to_json(const Topology& topo);
json to_json(const PinPlan& plan);
json to_json(const SpinStats& stats);
json to_json(const Histogram& hist);
json to_json(const IntensityGrid& grid);
json to_json(const RunManifest& manifest);
json to_json(const SweepPoint& point);

// {bin_width, histograms:{a,b}, percent_in_ranges:{a,b}, fraction_b_lt_a, flagged, intensity}
json summary_json(const SampleSet& set, std::int64_t bin_width);

// {benchmark, mode, clock_ghz, requested, truncated, error, notes, counters, samples:[{a_ns,b_ns}], summary}
json to_json(const SampleSet& set, std::int64_t bin_width);

// Reads a document written by to_json(SampleSet) back into samples.
SampleSet sample_set_from_json(const json& doc);

// Raw interval CSV: header `a_ns,b_ns`, then one row per sample.
void write_raw_csv(std::ostream& out, const SampleSet& set);
// Parses the raw CSV format. Throws UsageError on malformed rows.
std::vector<IntervalSample> read_raw_csv(std::istream& in);

}  // namespace corescope
