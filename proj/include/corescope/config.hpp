#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace corescope {

inline constexpr const char* kConfigEnvVar = "CORESCOPE_CONFIG";

struct TopologyOverrides {
  std::optional<std::uint32_t> packages;
  std::optional<std::uint32_t> cores_per_package;
  std::optional<std::uint32_t> threads_per_core;
  std::optional<double> clock_ghz;

  bool reshapes() const { return packages || cores_per_package || threads_per_core; }
};

struct Config {
  TopologyOverrides topology;
  // Raw key=value pairs as read, kept for the run manifest.
  std::map<std::string, std::string> entries;
  std::string source;  // file path, or empty when parsed from a string
};

// Parses line-based `key=value` text. Blank lines and lines starting with '#'
// are ignored. Throws ConfigError on unknown keys and invalid values.
Config parse_config(std::string_view text);

Config load_config_file(const std::filesystem::path& path);

// Reads the file named by CORESCOPE_CONFIG, if the variable is set.
std::optional<Config> load_config_from_env();

}  // namespace corescope
