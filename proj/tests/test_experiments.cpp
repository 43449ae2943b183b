#include "cra/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace cra::experiments;

TEST(SlopeFit, SyntheticRates) {
  std::vector<std::pair<double, double>> one, two;
  for (double n : {64.0, 128.0, 256.0, 512.0, 1024.0}) {
    one.emplace_back(n, 3.0 / n);
    two.emplace_back(n, 0.5 / (n * n));
  }
  EXPECT_NEAR(slope_fit(one), -1.0, 1e-12);
  EXPECT_NEAR(slope_fit(two), -2.0, 1e-12);
}

TEST(SlopeFit, RepeatedNUsesAllPoints) {
  // Two seeds per N with multiplicative noise that cancels in the mean log.
  std::vector<std::pair<double, double>> pts;
  for (double n : {10.0, 20.0, 40.0}) {
    pts.emplace_back(n, 2.0 / n);
    pts.emplace_back(n, 0.5 / n);
  }
  EXPECT_NEAR(slope_fit(pts), -1.0, 1e-12);
}

TEST(SlopeFit, Rejections) {
  EXPECT_THROW(slope_fit({{1, 1}, {2, 0.5}}), std::invalid_argument);
  EXPECT_THROW(slope_fit({{1, 1}, {1, 2}, {2, 0.5}, {2, 0.4}}), std::invalid_argument);
  EXPECT_THROW(slope_fit({{1, 1}, {2, 0.0}, {4, 0.5}}), std::invalid_argument);
  EXPECT_THROW(slope_fit({{1, 1}, {2, -1.0}, {4, 0.5}}), std::invalid_argument);
}

TEST(Seeds, Expansion) {
  EXPECT_EQ(parse_seeds("1..10").size(), 10u);
  EXPECT_EQ(parse_seeds("1..10").back(), 10u);
  EXPECT_EQ(parse_seeds("3"), (std::vector<std::uint64_t>{3}));
  EXPECT_EQ(parse_seeds("1,4..6"), (std::vector<std::uint64_t>{1, 4, 5, 6}));
  EXPECT_THROW(parse_seeds("5..1"), std::invalid_argument);
  EXPECT_THROW(parse_seeds("1,,2"), std::invalid_argument);
  EXPECT_THROW(parse_seeds(""), std::invalid_argument);
  EXPECT_THROW(parse_seeds("a..b"), ConfigError);
}

TEST(Config, FlagsAndErrors) {
  RunConfig c = RunConfig::defaults("approx");
  c.set("N", "64,128,256");
  c.set("theta", "0.25");
  c.set("seed", "7");
  EXPECT_EQ(c.N, (std::vector<std::size_t>{64, 128, 256}));
  EXPECT_DOUBLE_EQ(c.theta, 0.25);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{7}));
  EXPECT_THROW(c.set("N", "64,x"), ConfigError);
  EXPECT_THROW(c.set("theta", "0.5.1"), ConfigError);
  EXPECT_THROW(c.set("bogus", "1"), ConfigError);
  EXPECT_THROW(c.set("seed", "1..3"), ConfigError);
  EXPECT_THROW(c.set("refit", "maybe"), ConfigError);
}

TEST(Config, FileLinesReportLineAndField) {
  RunConfig c = RunConfig::defaults("memorize");
  apply_config_text(c, "# comment\n\nn = 32\nd=4\ntheta=0.4\nseeds=1..3\n");
  EXPECT_EQ(c.n, 32u);
  EXPECT_EQ(c.d, 4u);
  EXPECT_EQ(c.seeds.size(), 3u);
  try {
    apply_config_text(c, "n=3\n\ntheta=abc\n");
    FAIL();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("theta"), std::string::npos) << msg;
  }
  EXPECT_THROW(apply_config_text(c, "just words\n"), ConfigError);
  EXPECT_THROW(apply_config_file(c, "/nonexistent/file.cfg"), ConfigError);
}

TEST(Config, Validation) {
  RunConfig m = RunConfig::defaults("memorize");
  m.eps = 1.5;
  EXPECT_THROW(m.validate(), ConfigError);
  RunConfig a = RunConfig::defaults("approx");
  a.target = "square";
  EXPECT_THROW(a.validate(), ConfigError);
  RunConfig k = RunConfig::defaults("kernel-table");
  k.k = 9;
  EXPECT_THROW(k.validate(), ConfigError);
  RunConfig u = RunConfig::defaults("plot");
  EXPECT_THROW(u.validate(), ConfigError);
}

TEST(Format, RoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5, 123456789.0}) EXPECT_EQ(std::stod(format_number(x)), x);
  EXPECT_EQ(format_number(3.0), "3");
}

TEST(Runs, KernelTableShape) {
  RunConfig c = RunConfig::defaults("kernel-table");
  c.grid = 1001;
  const Table t = run(c);
  EXPECT_EQ(t.rows.size(), 1001u);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"t", "relu", "srelu_k", "filter", "filter_fourier"}));
  EXPECT_EQ(t.rows[500][0], "0");
  // Far from the filter support SReLU coincides with ReLU.
  EXPECT_NEAR(std::stod(t.rows[1000][2]), 3.0, 1e-8);
}

TEST(Runs, ApproxRowsSortedAndCsvHeader) {
  RunConfig c = RunConfig::defaults("approx");
  c.N = {32, 16};
  c.seeds = {2, 1};
  c.a = 1;
  c.train = 200;
  c.test = 200;
  c.steps = 50;
  const Table t = run(c);
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_EQ(t.rows[0][0], "16");
  EXPECT_EQ(t.rows[0][3], "1");
  EXPECT_EQ(t.rows[3][0], "32");
  EXPECT_EQ(t.rows[3][3], "2");
  EXPECT_EQ(t.columns.size(), 8u);
  const std::string csv = to_csv(c, t);
  EXPECT_EQ(csv.rfind("# cra " + std::string(version()) + " command=approx", 0), 0u);
  std::istringstream in(csv);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 6u);
}

TEST(Runs, MemorizeSmall) {
  RunConfig c = RunConfig::defaults("memorize");
  c.n = 4;
  c.d = 3;
  c.eps = 0.1;
  c.delta = 0.5;
  c.max_units = 256;
  const Table t = run(c);
  ASSERT_GE(t.rows.size(), 2u);
  EXPECT_EQ(t.rows.back()[1], "refit");
  EXPECT_EQ(t.rows.front()[2], "0");
  EXPECT_LE(std::stod(t.rows.back()[4]), 0.1);
}

TEST(Runs, PolyRoundsUnits) {
  RunConfig c = RunConfig::defaults("poly");
  c.d = 3;
  c.N = {30};
  c.train = 100;
  c.test = 100;
  c.steps = 20;
  const Table t = run(c);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][1], "40");  // C(5, 2) = 10 monomials, a = 1
}
