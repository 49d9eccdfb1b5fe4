#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mdgan/config.hpp"

using namespace mdgan;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

// Runs the CLI and returns its exit status.
int cli(const std::string& args) {
  const std::string cmd = std::string(MDGAN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mdgan_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    small_ = dir_ / "small.conf";
    std::ofstream(small_) << "embed_dim = 4\nbatch_size = 32\ngenerator.hidden = 16,16\n"
                             "discriminator.hidden = 16,16\neval_every = 20\neval_samples = 300\n";
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
  fs::path small_;
};

}  // namespace

TEST(Config, DefaultsAndOverrides) {
  std::istringstream is("# comment\nseed = 7\nsigma = 0.5  # trailing\n\nadam_g.lr = 1e-3\n"
                        "generator.hidden = 64,32\nloss.generator_mode = nonsaturating\n");
  const TrainConfig cfg = parse_config(is);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.sigma, 0.5);
  EXPECT_EQ(cfg.adam_generator.lr, 1e-3);
  EXPECT_EQ(cfg.adam_discriminator.lr, 1e-4);
  EXPECT_EQ(cfg.generator_hidden, (std::vector<std::size_t>{64, 32}));
  EXPECT_EQ(cfg.loss.generator_mode, GeneratorMode::nonsaturating);
  EXPECT_EQ(cfg.total_g_steps, 30000u);
}

TEST(Config, UnknownKeyIsRejectedByName) {
  std::istringstream is("seed = 1\nbogus.key = 3\n");
  try {
    parse_config(is);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "bogus.key");
  }
  TrainConfig cfg;
  EXPECT_THROW(apply_setting(cfg, "sigma", "abc"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "objective", "wgan"), ConfigError);
}

TEST(Config, EchoRoundTripsExactly) {
  TrainConfig cfg;
  cfg.sigma = 0.1 + 0.2;
  cfg.adam_generator.lr = 1.0 / 3.0;
  cfg.objective = Objective::vanilla;
  cfg.latent.distribution = LatentDistribution::uniform;
  cfg.discriminator_hidden = {7, 9, 11};
  const std::string text = to_config_text(cfg);
  std::istringstream is(text);
  EXPECT_EQ(to_config_text(parse_config(is)), text);
  for (const auto& key : config_keys())
    EXPECT_NE(text.find(key + " = "), std::string::npos) << key;
}

TEST_F(CliTest, TrainIsDeterministicAndWritesRunDirectory) {
  const std::string base = "train --config " + small_.string() + " --seed 7 --steps 40 --out ";
  ASSERT_EQ(cli(base + (dir_ / "a").string()), 0);
  ASSERT_EQ(cli(base + (dir_ / "b").string()), 0);
  for (const char* f : {"config.txt", "log.ndjson", "final.ckpt", "report.ndjson"}) {
    ASSERT_TRUE(fs::exists(dir_ / "a" / f)) << f;
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  }
  EXPECT_NE(slurp(dir_ / "a" / "config.txt").find("embed_dim = 4"), std::string::npos);
  ASSERT_TRUE(fs::exists(dir_ / "a" / "timing.ndjson"));
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(cli("train --config " + (dir_ / "missing.conf").string() + " --out " + (dir_ / "x").string()), 1);
  EXPECT_EQ(cli("train --config " + small_.string() + " --set nope=1 --out " + (dir_ / "x").string()), 1);
  EXPECT_EQ(cli("train --config " + small_.string() + " --set batch_size=0 --out " + (dir_ / "x").string()), 1);
  EXPECT_EQ(cli("frobnicate"), 1);
  EXPECT_EQ(cli("gradcheck --cases 5"), 0);
}

TEST_F(CliTest, PlotIsByteIdenticalAndCsvHasRequestedRows) {
  const auto plot = [&](const std::string& tag) {
    return cli("plot --ideal --samples 400 --seed 3 --out " + (dir_ / (tag + ".svg")).string() +
               " --csv " + (dir_ / (tag + ".csv")).string());
  };
  ASSERT_EQ(plot("p1"), 0);
  ASSERT_EQ(plot("p2"), 0);
  const std::string svg = slurp(dir_ / "p1.svg");
  EXPECT_EQ(svg, slurp(dir_ / "p2.svg"));
  EXPECT_EQ(svg.rfind("<svg", 0) == 0 || svg.find("<svg") != std::string::npos, true);
  std::ifstream csv(dir_ / "p1.csv");
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "x,y,kind");
  std::size_t rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 400u);
}

TEST_F(CliTest, EvalPrintsRecordForCheckpoint) {
  ASSERT_EQ(cli("train --config " + small_.string() + " --seed 1 --steps 20 --out " + (dir_ / "r").string()), 0);
  const fs::path out = dir_ / "eval.json";
  const std::string cmd = std::string(MDGAN_CLI_PATH) + " eval --checkpoint " +
                          (dir_ / "r" / "final.ckpt").string() + " > " + out.string();
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  std::string log_line;
  std::ifstream(dir_ / "r" / "log.ndjson") >> log_line;
  std::string eval_line;
  std::ifstream(out) >> eval_line;
  EXPECT_EQ(eval_line, log_line);
}
