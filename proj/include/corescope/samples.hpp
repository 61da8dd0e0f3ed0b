#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace corescope {

// One measurement: a = call duration, b = effect latency, both measured from
// the same t0. b may be smaller than a when the effect lands before the call
// returns.
struct IntervalSample {
  std::int64_t a_ns = 0;
  std::int64_t b_ns = 0;
  // Set when the sample did not exercise the intended blocking path (for the
  // mutex handoff: the waiter found the mutex already free).
  bool flagged = false;

  bool operator==(const IntervalSample&) const = default;
};

struct SampleSet {
  std::string benchmark;
  std::string mode;
  double clock_ghz = 1.0;
  std::size_t requested = 0;
  std::vector<IntervalSample> samples;
  bool truncated = false;
  std::string error;  // why the set is short of `requested`
  std::vector<std::string> notes;
  std::map<std::string, double> counters;
};

}  // namespace corescope
