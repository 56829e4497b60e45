#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <unistd.h>
#include <sstream>

#include <gtest/gtest.h>

#include <heatseq/manifest.hpp>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  static fs::path dir;

  static Outcome run(const std::string& args) {
    const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
    const std::string cmd = std::string(HEATSEQ_CLI) + " " + args + " > '" + out.string() + "' 2> '" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Outcome r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  static std::string at(const std::string& name) { return "'" + (dir / name).string() + "'"; }

  static void SetUpTestSuite() {
    dir = fs::temp_directory_path() / ("heatseq_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    ASSERT_EQ(run("--seed 5 --out-dir " + at("gen") + " generate --workers 2 --days 1").code, 0);
    ASSERT_EQ(run("--seed 5 --out-dir " + at("pre") + " preprocess --input " + at("gen/raw.csv") + " --seq-len 5").code,
              0);
    ASSERT_EQ(run("--seed 5 --out-dir " + at("am") +
                  " train --instances " + at("pre/instances.csv") + " --variant lstm-am --hidden 8 --epochs 2 --quiet")
                  .code,
              0);
  }

  static void TearDownTestSuite() { fs::remove_all(dir); }
};

fs::path Cli::dir;

TEST_F(Cli, ZeroWorkersIsAUsageError) {
  const Outcome r = run("--out-dir " + at("bad") + " generate --workers 0");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("workers"), std::string::npos);
}

TEST_F(Cli, UnknownFlagAndMissingSubcommandAreUsageErrors) {
  EXPECT_EQ(run("generate --no-such-flag").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("train --instances " + at("pre/instances.csv") + " --variant gru").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, UnwritableOutputIsAUsageError) {
  std::ofstream(dir / "plainfile") << "x";
  EXPECT_EQ(run("--out-dir " + at("plainfile/sub") + " generate --workers 1 --days 1").code, 2);
}

TEST_F(Cli, GenerateWritesFilesAndManifest) {
  const heatseq::RunManifest m = [&] {
    std::ifstream in(dir / "gen" / "manifest_generate.txt");
    return heatseq::read_manifest(in);
  }();
  ASSERT_EQ(m.outputs.size(), 2u);
  EXPECT_EQ(m.outputs[0].sha256, heatseq::sha256_file(dir / "gen" / "raw.csv"));
  EXPECT_EQ(m.outputs[1].sha256, heatseq::sha256_file(dir / "gen" / "events.csv"));
}

TEST_F(Cli, RepeatedGenerateIsIdentical) {
  ASSERT_EQ(run("--seed 5 --out-dir " + at("gen2") + " generate --workers 2 --days 1").code, 0);
  EXPECT_EQ(heatseq::sha256_file(dir / "gen" / "raw.csv"), heatseq::sha256_file(dir / "gen2" / "raw.csv"));
  EXPECT_EQ(heatseq::sha256_file(dir / "gen" / "events.csv"), heatseq::sha256_file(dir / "gen2" / "events.csv"));
}

TEST_F(Cli, CorruptRowReportsItsLine) {
  std::ofstream(dir / "corrupt.csv") << "worker_id,timestamp,channel,value\n"
                                        "W01,2023-06-01T08:00:00Z,HR,80\n"
                                        "W01,2023-06-01T08:00:10Z,HR,abc\n";
  const Outcome r = run("--out-dir " + at("corrupt_out") + " preprocess --input " + at("corrupt.csv"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("line 3: parse error"), std::string::npos) << r.err;
}

TEST_F(Cli, RepeatedTrainingGivesTheSameCheckpoint) {
  ASSERT_EQ(run("--seed 5 --out-dir " + at("am2") + " train --instances " + at("pre/instances.csv") +
                " --variant lstm-am --hidden 8 --epochs 2 --quiet")
                .code,
            0);
  EXPECT_EQ(heatseq::sha256_file(dir / "am" / "model.ckpt"), heatseq::sha256_file(dir / "am2" / "model.ckpt"));
}

TEST_F(Cli, BaselineDefaultsToTwentyEpochs) {
  ASSERT_EQ(run("--seed 5 --out-dir " + at("base") + " train --instances " + at("pre/instances.csv") +
                " --variant lstm --hidden 4 --patience 1 --quiet")
                .code,
            0);
  std::ifstream in(dir / "base" / "manifest_train.txt");
  const heatseq::RunManifest m = heatseq::read_manifest(in);
  const auto it = std::find_if(m.config.begin(), m.config.end(), [](const auto& kv) { return kv.first == "max_epochs"; });
  ASSERT_NE(it, m.config.end());
  EXPECT_EQ(it->second, "20");
}

TEST_F(Cli, EvaluateWritesReport) {
  const Outcome r = run("--out-dir " + at("eval") + " evaluate --checkpoint " + at("am/model.ckpt") + " --test " +
                    at("pre/instances.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("macro"), std::string::npos);
  const std::string report = slurp(dir / "eval" / "report.json");
  EXPECT_NE(report.find(heatseq::sha256_file(dir / "am" / "model.ckpt")), std::string::npos);
  const Outcome again = run("--out-dir " + at("eval2") + " evaluate --checkpoint " + at("am/model.ckpt") + " --test " +
                        at("pre/instances.csv"));
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(report, slurp(dir / "eval2" / "report.json"));
  EXPECT_EQ(slurp(dir / "eval" / "roc_points.csv"), slurp(dir / "eval2" / "roc_points.csv"));
}

TEST_F(Cli, ExplainWeightsSumToOne) {
  const Outcome r = run("predict --checkpoint " + at("am/model.ckpt") + " --input " + at("pre/instances.csv") + " --explain");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    ASSERT_EQ(f.size(), 6u + 5u);
    double p = 0, a = 0;
    for (int i = 3; i < 6; ++i) p += std::stod(f[i]);
    for (std::size_t i = 6; i < f.size(); ++i) a += std::stod(f[i]);
    EXPECT_NEAR(p, 1.0, 1e-12);
    EXPECT_NEAR(a, 1.0, 1e-12);
    ++rows;
  }
  EXPECT_GT(rows, 100u);
}

TEST_F(Cli, ExplainOnBaselineWarns) {
  ASSERT_EQ(run("--seed 5 --out-dir " + at("lstm") + " train --instances " + at("pre/instances.csv") +
                " --variant lstm --hidden 4 --epochs 1 --quiet")
                .code,
            0);
  const Outcome r = run("predict --checkpoint " + at("lstm/model.ckpt") + " --input " + at("pre/instances.csv") + " --explain");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  std::string first = r.out.substr(0, r.out.find('\n'));
  EXPECT_EQ(std::count(first.begin(), first.end(), ','), 5);
}

TEST_F(Cli, EmptyInputGivesEmptyOutput) {
  std::ofstream(dir / "empty.csv").close();
  const Outcome r = run("predict --checkpoint " + at("am/model.ckpt") + " --input " + at("empty.csv"));
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
}

TEST_F(Cli, InputsAreNotModified) {
  const std::string before = heatseq::sha256_file(dir / "pre" / "instances.csv");
  run("--out-dir " + at("eval3") + " evaluate --checkpoint " + at("am/model.ckpt") + " --test " + at("pre/instances.csv"));
  EXPECT_EQ(heatseq::sha256_file(dir / "pre" / "instances.csv"), before);
}

TEST_F(Cli, DimensionMismatchIsNamed) {
  ASSERT_EQ(run("--seed 5 --out-dir " + at("pre_mp") + " preprocess --input " + at("gen/raw.csv") +
                " --seq-len 5 --label-mode multiparam")
                .code,
            0);
  const Outcome r = run("--out-dir " + at("eval_mp") + " evaluate --checkpoint " + at("am/model.ckpt") + " --test " +
                    at("pre_mp/instances.csv"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("expects 8 features"), std::string::npos) << r.err;
}

TEST_F(Cli, ReplayReproducesOutputs) {
  const std::string before = heatseq::sha256_file(dir / "am" / "model.ckpt");
  const Outcome r = run("replay " + at("am/manifest_train.txt"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(heatseq::sha256_file(dir / "am" / "model.ckpt"), before);
}

}  // namespace
