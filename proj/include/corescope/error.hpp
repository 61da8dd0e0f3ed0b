#pragma once

#include <stdexcept>
#include <string>

namespace corescope {

/// Bad flags, bad config values, violated preconditions. Maps to exit code 1.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid key=value configuration. A usage error raised at parse time.
class ConfigError : public UsageError {
 public:
  using UsageError::UsageError;
};

/// Runtime failures: allocation, thread spawn, watchdog. Maps to exit code 2.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class WatchdogTimeout : public ResourceError {
 public:
  using ResourceError::ResourceError;
};

}  // namespace corescope
