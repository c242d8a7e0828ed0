#include <gtest/gtest.h>

#include "csbp/io.hpp"

using namespace csbp;

TEST(Config, SectionsAndDefaults) {
  auto c = io::Config::parse("[experiment]\nseed = 7\ntheta=0.5 # comment\n[other]\nx = a\n");
  EXPECT_EQ(c.get_u64("seed", 0), 7u);
  EXPECT_EQ(c.get_double("experiment.theta", 0), 0.5);
  EXPECT_EQ(c.get_string("other.x", ""), "a");
  EXPECT_EQ(c.get_int("missing", 3), 3);
}

TEST(Config, ListsAndRanges) {
  auto c = io::Config::parse("[experiment]\ng = 1:3:1\nh = 0.5, 2\n");
  EXPECT_EQ(c.get_list("g", {}), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(c.get_list("h", {}), (std::vector<double>{0.5, 2}));
}

TEST(Config, ParseErrors) {
  EXPECT_THROW(io::Config::parse("[experiment]\nnot a pair\n"), io::ConfigError);
  EXPECT_THROW(io::Config::parse("[experiment\nx=1\n"), io::ConfigError);
  auto c = io::Config::parse("[experiment]\nseed = abc\n");
  EXPECT_THROW(c.get_u64("seed", 0), io::ConfigError);
  EXPECT_THROW(c.require_known({"experiment.jobs"}), io::ConfigError);
}

TEST(Io, FmtRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 12345.678})
    EXPECT_EQ(std::stod(io::fmt(x)), x);
}
