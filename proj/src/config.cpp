#include "corescope/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "corescope/error.hpp"

namespace corescope {
namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::uint32_t parse_positive_count(std::string_view key, std::string_view value) {
  std::uint32_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError("config: " + std::string(key) + " expects an integer, got '" +
                      std::string(value) + "'");
  }
  if (out == 0) {
    throw ConfigError("config: " + std::string(key) + " must be >= 1");
  }
  return out;
}

double parse_positive_real(std::string_view key, std::string_view value) {
  std::string buf(value);
  char* end = nullptr;
  errno = 0;
  double out = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || errno != 0 || !std::isfinite(out)) {
    throw ConfigError("config: " + std::string(key) + " expects a number, got '" + buf + "'");
  }
  if (out <= 0.0) {
    throw ConfigError("config: " + std::string(key) + " must be > 0");
  }
  return out;
}

}  // namespace

Config parse_config(std::string_view text) {
  Config cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    line = trim(line);
    if (line.empty() || line.front() == '#') continue;

    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));

    if (key == "topology.packages") {
      cfg.topology.packages = parse_positive_count(key, value);
    } else if (key == "topology.cores_per_package") {
      cfg.topology.cores_per_package = parse_positive_count(key, value);
    } else if (key == "topology.threads_per_core") {
      cfg.topology.threads_per_core = parse_positive_count(key, value);
    } else if (key == "topology.clock_ghz") {
      cfg.topology.clock_ghz = parse_positive_real(key, value);
    } else {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" +
                        std::string(key) + "'");
    }
    cfg.entries[std::string(key)] = std::string(value);
  }
  return cfg;
}

Config load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot open '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  Config cfg = parse_config(ss.str());
  cfg.source = path.string();
  return cfg;
}

std::optional<Config> load_config_from_env() {
  const char* path = std::getenv(kConfigEnvVar);
  if (path == nullptr || *path == '\0') return std::nullopt;
  return load_config_file(path);
}

}  // namespace corescope
