#include "examine/cli.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "examine/dataio.hpp"
#include "examine/synth.hpp"
#include "support.hpp"

namespace examine::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "examine");
  std::ostringstream out, err;
  const int status = run(args, out, err);
  return {status, out.str(), err.str()};
}

const char* kSmallConfig = R"({
  "seed": 5,
  "clusters": {"classes": 2, "dim": 6, "intra_std": 0.5},
  "corruption": {"levels": [0.5, 1.0], "per_level_count": 4, "clean_count": 4},
  "splits": {"clean_train": 4, "validation": 30},
  "train": {"iterations": 60},
  "tmc": {"max_permutations": 20, "convergence_window": 5},
  "curve": {"step": 3, "seeds": [0, 1]}
})";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = testing::scratch_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
    config = (dir / "config.json").string();
    dataio::write_text(config, kSmallConfig);
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  fs::path dir;
  std::string config;
};

TEST_F(CliTest, ExamineOnGoldenFixture) {
  Result r = invoke({"score", "examine", "--features", testing::fixture("identity2x2.exmf").string(), "--out",
                     path("s.json")});
  ASSERT_EQ(r.status, kOk) << r.err;
  ScoreReport report = dataio::read_report(path("s.json"));
  EXPECT_EQ(report.scores, (std::vector<double>{1.0, 1.0}));
}

TEST_F(CliTest, ExactShapleySizeGuard) {
  LabeledSet set = synth::gen_clusters(13, 2, 3, 0.5, 1);  // 26 rows
  dataio::write_features(set.select_rows(std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13,
                                                                  14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24}),
                         path("train.csv"), dataio::FileFormat::csv);
  dataio::write_features(set, path("test.csv"), dataio::FileFormat::csv);
  Result r = invoke({"score", "shapley-exact", "--train", path("train.csv"), "--test", path("test.csv"), "--out",
                     path("s.json")});
  EXPECT_EQ(r.status, kUsageError);
  EXPECT_NE(r.err.find("N <= 20"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("N = 25"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(path("s.json")));
}

TEST_F(CliTest, TheoryCheck) {
  Result r = invoke({"--quiet", "theory", "check", "--trials", "100", "--seed", "0"});
  ASSERT_EQ(r.status, kOk) << r.err;
  nlohmann::json doc = nlohmann::json::parse(r.out);
  EXPECT_LT(doc["max_residual"].get<double>(), 1e-10);
  EXPECT_TRUE(doc["pass"].get<bool>());
  EXPECT_TRUE(r.err.empty());
}

TEST_F(CliTest, UnknownFlagIsUsageError) {
  Result r = invoke({"score", "examine", "--bogus"});
  EXPECT_EQ(r.status, kUsageError);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(invoke({}).status, kUsageError);
  EXPECT_EQ(invoke({"--format", "xml", "theory", "check"}).status, kUsageError);
}

TEST_F(CliTest, HelpSucceeds) {
  Result r = invoke({"--help"});
  EXPECT_EQ(r.status, kOk);
  EXPECT_NE(r.out.find("score"), std::string::npos);
}

TEST_F(CliTest, MissingInputIsUsageError) {
  Result r = invoke({"score", "examine", "--features", path("nope.csv"), "--out", path("s.json")});
  EXPECT_EQ(r.status, kUsageError);
  EXPECT_NE(r.err.find("nope.csv"), std::string::npos);
}

TEST_F(CliTest, BadConfigKeyIsUsageError) {
  dataio::write_text(path("bad.json"), R"({"seeed": 1})");
  Result r = invoke({"synth", "gen", "--config", path("bad.json"), "--out", path("d")});
  EXPECT_EQ(r.status, kUsageError);
  EXPECT_NE(r.err.find("seeed"), std::string::npos);
}

// Runs the whole pipeline twice and compares every output file.
TEST_F(CliTest, PipelineIsByteReproducible) {
  for (const std::string run : {"a", "b"}) {
    const std::string d = path(run);
    const std::vector<std::vector<std::string>> steps{
        {"synth", "gen", "--config", config, "--out", d},
        {"score", "examine", "--features", d + "/assessed.csv", "--out", d + "/examine.json"},
        {"score", "examine", "--center", "--features", d + "/assessed.csv", "--out", d + "/examine_c.json"},
        {"score", "loo", "--train", d + "/assessed.csv", "--test", d + "/validation.csv", "--iterations", "40", "--out",
         d + "/loo.json"},
        {"score", "shapley-tmc", "--train", d + "/assessed.csv", "--test", d + "/validation.csv", "--iterations", "20",
         "--tmc-max-permutations", "10", "--tmc-window", "5", "--out", d + "/tmc.json"},
        {"score", "random", "--n", "12", "--out", d + "/random.json"},
        {"curve", "add", "--scores", d + "/examine.json", "--assessed", d + "/assessed.csv", "--clean-train",
         d + "/clean_train.csv", "--validation", d + "/validation.csv", "--config", config, "--out", d + "/add.csv"},
        {"curve", "remove", "--scores", d + "/examine.json", "--assessed", d + "/assessed.csv", "--validation",
         d + "/validation.csv", "--config", config, "--order", "random", "--out", d + "/remove.json"},
        {"report", "dist", "--scores", d + "/examine.json", "--truth", d + "/truth.csv", "--out", d + "/dist.json"},
    };
    for (auto step : steps) {
      step.insert(step.begin(), {"--seed", "3", "--timestamp", "fixed"});
      Result r = invoke(step);
      ASSERT_EQ(r.status, kOk) << step[4] << ": " << r.err;
    }
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(path("a"))) {
    const fs::path other = fs::path(path("b")) / entry.path().filename();
    EXPECT_EQ(dataio::read_text(entry.path()), dataio::read_text(other)) << entry.path().filename();
    ++compared;
  }
  EXPECT_EQ(compared, 12u);
  EXPECT_EQ(dataio::read_report(path("a/random.json")).seed, std::optional<std::uint64_t>(3));
}

TEST_F(CliTest, SynthSeedFlagOverridesConfig) {
  ASSERT_EQ(invoke({"synth", "gen", "--config", config, "--out", path("cfg")}).status, kOk);
  ASSERT_EQ(invoke({"--seed", "5", "synth", "gen", "--config", config, "--out", path("same")}).status, kOk);
  ASSERT_EQ(invoke({"--seed", "6", "synth", "gen", "--config", config, "--out", path("other")}).status, kOk);
  EXPECT_EQ(dataio::read_text(path("cfg/assessed.csv")), dataio::read_text(path("same/assessed.csv")));
  EXPECT_NE(dataio::read_text(path("cfg/assessed.csv")), dataio::read_text(path("other/assessed.csv")));
}

TEST_F(CliTest, ExmfOutputsMatchCsvContent) {
  ASSERT_EQ(invoke({"synth", "gen", "--config", config, "--out", path("c")}).status, kOk);
  ASSERT_EQ(invoke({"--format", "exmf", "synth", "gen", "--config", config, "--out", path("e")}).status, kOk);
  EXPECT_EQ(dataio::read_feature_matrix(path("c/assessed.csv")).data(),
            dataio::read_feature_matrix(path("e/assessed.exmf")).data());
  ASSERT_EQ(invoke({"--timestamp", "t", "score", "examine", "--features", path("c/assessed.csv"), "--out",
                    path("c.json")}).status, kOk);
  ASSERT_EQ(invoke({"--timestamp", "t", "score", "examine", "--features", path("e/assessed.exmf"), "--out",
                    path("e.json")}).status, kOk);
  EXPECT_EQ(dataio::read_text(path("c.json")), dataio::read_text(path("e.json")));
}

TEST_F(CliTest, BenchReportsAccounting) {
  Result r = invoke({"--quiet", "bench", "--config", config, "--out", path("bench.json")});
  ASSERT_EQ(r.status, kOk) << r.err;
  nlohmann::json doc = nlohmann::json::parse(r.out);
  ASSERT_EQ(doc["methods"].size(), 4u);
  EXPECT_EQ(doc["methods"][0]["method"], "examine");
  EXPECT_EQ(doc["methods"][0]["utility_evaluations"], 0);
  EXPECT_EQ(doc["methods"][1]["utility_evaluations"], 13);
  EXPECT_EQ(dataio::read_text(path("bench.json")), r.out);
}

TEST_F(CliTest, QuietKeepsStderrEmpty) {
  Result r = invoke({"--quiet", "score", "random", "--n", "3", "--out", path("r.json")});
  EXPECT_EQ(r.status, kOk);
  EXPECT_TRUE(r.err.empty());
  EXPECT_TRUE(r.out.empty());
  Result loud = invoke({"score", "random", "--n", "3", "--out", path("r.json")});
  EXPECT_FALSE(loud.err.empty());
  EXPECT_TRUE(loud.out.empty());
}

}  // namespace
}  // namespace examine::cli
