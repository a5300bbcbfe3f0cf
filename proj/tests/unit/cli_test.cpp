#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <unistd.h>

#include "json.hpp"
#include "threadtrace/cli.hpp"
#include "threadtrace/image_io.hpp"
#include "threadtrace/json_io.hpp"

namespace threadtrace {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("threadtrace_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, HelpSucceedsAndBadUsageFails) {
  EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
  EXPECT_EQ(run({}).code, cli::kExitInputError);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitInputError);
  EXPECT_EQ(run({"gen"}).code, cli::kExitInputError);
  EXPECT_EQ(run({"reconstruct", "--gradient", path("missing.png")}).code, cli::kExitInputError);
}

TEST_F(CliTest, InvalidValuesAreInputErrors) {
  EXPECT_EQ(run({"gen", "--out", path("g"), "--count", "1", "--min-crossings", "3", "--max-crossings", "1"}).code,
            cli::kExitInputError);
  write_text_file(dir_ / "junk.png", "not an image");
  const CliRun r = run({"reconstruct", "--gradient", path("junk.png")});
  EXPECT_EQ(r.code, cli::kExitInputError);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, GenWritesManifestAndFiles) {
  ASSERT_EQ(run({"gen", "--out", path("g"), "--count", "2", "--seed", "3"}).code, cli::kExitOk);
  const auto manifest = nlohmann::json::parse(read_text_file(dir_ / "g" / "manifest.json"));
  ASSERT_EQ(manifest["scenes"].size(), 2u);
  for (const char* suffix : {"_gt.json", "_grad.png", "_conj.png", "_overlap.png"}) {
    EXPECT_TRUE(fs::exists(dir_ / "g" / ("scene_0000" + std::string(suffix)))) << suffix;
  }
}

TEST_F(CliTest, GenIsByteDeterministic) {
  ASSERT_EQ(run({"gen", "--out", path("a"), "--count", "2", "--seed", "5", "--noise", "0.01"}).code, cli::kExitOk);
  ASSERT_EQ(run({"gen", "--out", path("b"), "--count", "2", "--seed", "5", "--noise", "0.01"}).code, cli::kExitOk);
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir_ / "a")) {
    EXPECT_EQ(read_file(entry.path()), read_file(dir_ / "b" / entry.path().filename())) << entry.path();
    ++files;
  }
  EXPECT_EQ(files, 9u);
}

TEST_F(CliTest, ReconstructWritesSplineAndOverlay) {
  ASSERT_EQ(run({"gen", "--out", path("g"), "--count", "1", "--seed", "8"}).code, cli::kExitOk);
  const CliRun r = run({"reconstruct", "--gradient", path("g/scene_0000_grad.png"), "--conjugate",
                     path("g/scene_0000_conj.png"), "--out-spline", path("s.json"), "--out-overlay", path("o.png")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_FALSE(spline_from_json(read_text_file(dir_ / "s.json")).empty());
  EXPECT_TRUE(fs::exists(dir_ / "o.png"));
}

TEST_F(CliTest, ConfigFileAndFlagsOverride) {
  ASSERT_EQ(run({"gen", "--out", path("g"), "--count", "1", "--seed", "8"}).code, cli::kExitOk);
  write_text_file(dir_ / "cfg.json", R"({"t_u": 0.1})");
  EXPECT_EQ(run({"reconstruct", "--gradient", path("g/scene_0000_grad.png"), "--config", path("cfg.json")}).code,
            cli::kExitOk);
  write_text_file(dir_ / "bad.json", R"({"t_q": 0.1})");
  EXPECT_EQ(run({"reconstruct", "--gradient", path("g/scene_0000_grad.png"), "--config", path("bad.json")}).code,
            cli::kExitInputError);
  EXPECT_EQ(run({"reconstruct", "--gradient", path("g/scene_0000_grad.png"), "--t-l", "0.5", "--t-u", "0.1"}).code,
            cli::kExitInputError);
}

TEST_F(CliTest, EvalOfGroundTruthAgainstItselfIsPerfect) {
  ASSERT_EQ(run({"gen", "--out", path("g"), "--count", "3", "--seed", "4"}).code, cli::kExitOk);
  const CliRun r = run({"eval", "--manifest", path("g/manifest.json"), "--predictions", path("g"),
                     "--prediction-suffix", "_gt.json", "--out", path("report.json")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto report = nlohmann::json::parse(read_text_file(dir_ / "report.json"));
  EXPECT_EQ(report["scenes"], 3);
  EXPECT_EQ(report["detection_rate"], 1.0);
  EXPECT_EQ(report["ottp"]["overall"], 0.0);
  EXPECT_EQ(report["ottp"]["needle_end"], 0.0);
  EXPECT_EQ(report["fraction_within_3px"], 1.0);
  // Input maps are 16-bit PNGs, so they match the re-rendered truth to quantization.
  EXPECT_GT(report["psnr_db"].get<double>(), 100.0);
}

TEST_F(CliTest, EvalReconstructsInline) {
  ASSERT_EQ(run({"gen", "--out", path("g"), "--count", "2", "--seed", "6"}).code, cli::kExitOk);
  for (const char* mode : {"conjugate", "single"}) {
    const CliRun r = run({"eval", "--manifest", path("g/manifest.json"), "--mode", mode});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    const auto report = nlohmann::json::parse(r.out);
    EXPECT_EQ(report["detected"], 2);
    EXPECT_LT(report["ottp"]["overall"].get<double>(), 2.0);
  }
}

TEST_F(CliTest, BenchReportsStages) {
  const CliRun r = run({"bench", "--count", "2", "--seed", "1"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.out.find("ridge"), std::string::npos);
}

}  // namespace
}  // namespace threadtrace
