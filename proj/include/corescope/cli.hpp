#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace corescope {

std::string_view suite_version();

// Runs one `corescope` invocation. `args` excludes the program name.
// Returns 0 on success, 1 on a usage or config error, 2 on a runtime or
// resource error. JSON goes to `out` unless --out names a file.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Parses --threads: "ladder" (up to ladder_max), "ladder:N", or a
// comma-separated ascending list. Throws UsageError otherwise.
std::vector<std::size_t> parse_thread_counts(std::string_view text, std::size_t ladder_max);

}  // namespace corescope
