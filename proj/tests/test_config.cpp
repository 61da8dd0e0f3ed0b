#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "corescope/config.hpp"
#include "corescope/error.hpp"

using namespace corescope;

TEST(Config, ParsesTopologyKeys) {
  const Config cfg = parse_config(
      "# 4 x 16 x 8\n"
      "topology.packages = 4\n"
      "\n"
      "topology.cores_per_package=16\n"
      "  topology.threads_per_core=8  \n"
      "topology.clock_ghz=1.67\n");
  EXPECT_EQ(cfg.topology.packages, 4u);
  EXPECT_EQ(cfg.topology.cores_per_package, 16u);
  EXPECT_EQ(cfg.topology.threads_per_core, 8u);
  EXPECT_DOUBLE_EQ(*cfg.topology.clock_ghz, 1.67);
  EXPECT_TRUE(cfg.topology.reshapes());
  EXPECT_EQ(cfg.entries.size(), 4u);
  EXPECT_EQ(cfg.entries.at("topology.clock_ghz"), "1.67");
}

TEST(Config, EmptyTextLeavesEverythingUnset) {
  const Config cfg = parse_config("\n# nothing\n");
  EXPECT_FALSE(cfg.topology.reshapes());
  EXPECT_FALSE(cfg.topology.clock_ghz.has_value());
  EXPECT_TRUE(cfg.entries.empty());
}

TEST(Config, ClockOnlyDoesNotReshape) {
  const Config cfg = parse_config("topology.clock_ghz=2.5");
  EXPECT_FALSE(cfg.topology.reshapes());
  EXPECT_DOUBLE_EQ(*cfg.topology.clock_ghz, 2.5);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("topology.packages"), ConfigError);
  EXPECT_THROW(parse_config("topology.packages=0"), ConfigError);
  EXPECT_THROW(parse_config("topology.packages=-1"), ConfigError);
  EXPECT_THROW(parse_config("topology.packages=two"), ConfigError);
  EXPECT_THROW(parse_config("topology.packages=2x"), ConfigError);
  EXPECT_THROW(parse_config("topology.clock_ghz=0"), ConfigError);
  EXPECT_THROW(parse_config("topology.clock_ghz=fast"), ConfigError);
  EXPECT_THROW(parse_config("topology.sockets=2"), ConfigError);
  // ConfigError is a usage error, so the CLI maps it to exit code 1.
  EXPECT_THROW(parse_config("bogus=1"), UsageError);
}

TEST(Config, LoadsFileAndRecordsSource) {
  const auto path = std::filesystem::temp_directory_path() / "corescope_test_config.cfg";
  {
    std::ofstream out(path);
    out << "topology.cores_per_package=3\n";
  }
  const Config cfg = load_config_file(path);
  EXPECT_EQ(cfg.topology.cores_per_package, 3u);
  EXPECT_EQ(cfg.source, path.string());
  std::filesystem::remove(path);
  EXPECT_THROW(load_config_file(path), ConfigError);
}

TEST(Config, EnvironmentVariableNamesTheFile) {
  const auto path = std::filesystem::temp_directory_path() / "corescope_env_config.cfg";
  {
    std::ofstream out(path);
    out << "topology.threads_per_core=2\n";
  }
  ::setenv(kConfigEnvVar, path.c_str(), 1);
  auto cfg = load_config_from_env();
  ASSERT_TRUE(cfg.has_value());
  EXPECT_EQ(cfg->topology.threads_per_core, 2u);
  ::unsetenv(kConfigEnvVar);
  EXPECT_FALSE(load_config_from_env().has_value());
  std::filesystem::remove(path);
}
