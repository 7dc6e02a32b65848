#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "varcharts/commands.hpp"
#include "varcharts/results_store.hpp"
#include "varcharts/run_config.hpp"

namespace varcharts {
namespace {

std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

struct TempDir {
  TempDir() {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() /
           ("varcharts_store_" + std::to_string(rd()) + "_" +
            std::to_string(counter++));
    std::filesystem::remove_all(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  static int counter;
  std::filesystem::path path;
};
int TempDir::counter = 0;

RunConfig fast_config() {
  RunConfig c;
  c.phi = {0.3};
  c.scheme = "sprt";
  c.delta_star = 1.5;
  c.target_arl = 25.0;
  c.reps = 2000;
  c.cap = 2000;
  c.seed = 3;
  c.workers = 2;
  return c;
}

TEST(ResultsStore, HeaderWrittenOnceRowsAppended) {
  TempDir tmp;
  ResultsStore store(tmp.path);
  store.append_row("x.csv", "a,b", "1,2");
  store.append_row("x.csv", "a,b", "3,4");
  const auto lines = read_lines(tmp.path / "x.csv");
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "a,b");
  EXPECT_EQ(lines[1], "1,2");
  EXPECT_EQ(lines[2], "3,4");
}

TEST(RunConfig, KindInference) {
  RunConfig c;
  c.phi = {0.5};
  EXPECT_EQ(c.process().kind, ProcessKind::kAr1);
  c.phi = {0.5, -0.3};
  EXPECT_EQ(c.process().kind, ProcessKind::kAr2);
  c.phi = {0.5};
  c.theta = {0.4};
  EXPECT_EQ(c.process().kind, ProcessKind::kArma);
  c.kind = "ar1";
  EXPECT_THROW(c.process(), ValidationError);
}

TEST(RunConfig, TotalValidation) {
  RunConfig c = fast_config();
  EXPECT_NO_THROW(c.validate());
  c.scheme = "lr";
  c.delta_star.reset();
  EXPECT_THROW(c.validate(), ValidationError);  // missing reference value
  c = fast_config();
  c.scheme = "gsr";
  EXPECT_THROW(c.validate(), ValidationError);  // reference value forbidden
  c = fast_config();
  c.scheme = "nope";
  EXPECT_THROW(c.validate(), ValidationError);
  c = fast_config();
  c.sigma2 = -1;
  EXPECT_THROW(c.validate(), ValidationError);
  c = fast_config();
  c.phi = {1.5};
  EXPECT_THROW(c.validate(), CausalityError);
  c = fast_config();
  c.format = "json";
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(RunConfig, HashIsStableAndSensitive) {
  const RunConfig a = fast_config();
  RunConfig b = fast_config();
  EXPECT_EQ(a.config_hash(), b.config_hash());
  b.seed = 4;
  EXPECT_NE(a.config_hash(), b.config_hash());
}

TEST(RunConfig, AutoRepsPerScheme) {
  RunConfig c = fast_config();
  c.reps = 0;
  EXPECT_EQ(c.effective_reps(), 100000);
  c.scheme = "glr";
  c.delta_star.reset();
  EXPECT_EQ(c.effective_reps(), 10000);
}

TEST(Commands, CalibrateThenArlAndDelay) {
  TempDir tmp;
  ResultsStore store(tmp.path);
  const RunConfig config = fast_config();
  std::ostringstream out;
  EXPECT_EQ(cmd_calibrate(config, store, out), 0);
  EXPECT_NE(out.str().find("limit="), std::string::npos);
  const auto cal_lines = read_lines(tmp.path / "calibrations.csv");
  ASSERT_EQ(cal_lines.size(), 2u);
  EXPECT_EQ(cal_lines[0].substr(0, 17), "scheme,phi,delta_");

  RunConfig arl_config = config;
  arl_config.delta = 1.5;
  EXPECT_EQ(cmd_arl(arl_config, store, out), 0);
  auto arl_lines = read_lines(tmp.path / "arl.csv");
  ASSERT_EQ(arl_lines.size(), 2u);

  // Re-running with the identical config appends an identical-valued row.
  EXPECT_EQ(cmd_arl(arl_config, store, out), 0);
  arl_lines = read_lines(tmp.path / "arl.csv");
  ASSERT_EQ(arl_lines.size(), 3u);
  EXPECT_EQ(arl_lines[1], arl_lines[2]);

  RunConfig delay_config = config;
  delay_config.delta = 2.0;
  delay_config.tau = 10;
  EXPECT_EQ(cmd_delay(delay_config, store, out), 0);
  const auto delay_lines = read_lines(tmp.path / "delay.csv");
  ASSERT_EQ(delay_lines.size(), 2u);
}

TEST(Commands, ArlWithoutLimitInstructsToCalibrate) {
  TempDir tmp;
  ResultsStore store(tmp.path);
  RunConfig config = fast_config();
  config.delta = 1.5;
  std::ostringstream out;
  try {
    cmd_arl(config, store, out);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("calibrate"), std::string::npos);
  }
}

TEST(Commands, ExplicitLimitSkipsCache) {
  TempDir tmp;
  ResultsStore store(tmp.path);
  RunConfig config = fast_config();
  config.delta = 2.0;
  config.limit = 3.0;
  std::ostringstream out;
  EXPECT_EQ(cmd_arl(config, store, out), 0);
}

TEST(Commands, TableSubsetWritesCells) {
  TempDir tmp;
  ResultsStore store(tmp.path);
  RunConfig config;
  config.phis = {0.0, 0.4};
  config.deltas = {1.3, 2.0};
  config.delta_stars = {1.5};
  config.schemes = {"sprt", "gsr_iid"};
  config.target_arl = 25.0;
  config.reps = 1500;
  config.cap = 2000;
  config.seed = 9;
  config.workers = 2;
  std::ostringstream out;
  EXPECT_EQ(cmd_table(config, store, out), 0);
  const auto lines = read_lines(tmp.path / "table.csv");
  ASSERT_EQ(lines.size(), 1u + 2u * 2u * 2u);
  EXPECT_EQ(lines[0],
            "scheme,phi,delta,best_delta_star,arl,se,within_2pct,arl_full,"
            "se_full,config_hash,seed,version");
}

TEST(Commands, SensitivityWritesCurve) {
  TempDir tmp;
  ResultsStore store(tmp.path);
  RunConfig config;
  config.phi = {0.4};
  config.delta = 1.5;
  config.delta_stars = {1.3, 1.5};
  config.schemes = {"sprt"};
  config.target_arl = 25.0;
  config.reps = 1500;
  config.cap = 2000;
  config.seed = 9;
  config.workers = 2;
  std::ostringstream out;
  EXPECT_EQ(cmd_sensitivity(config, store, out), 0);
  const auto lines = read_lines(tmp.path / "sensitivity.csv");
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0],
            "scheme,delta_star,arl,se,phi,delta,arl_full,se_full,config_hash,"
            "seed,version");
}

}  // namespace
}  // namespace varcharts
