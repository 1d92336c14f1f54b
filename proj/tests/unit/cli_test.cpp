#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/commands.hpp"
#include "mpbjac/matrix_market.hpp"

namespace mpbjac::cli {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("mpbjac_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  int run(std::vector<std::string> args) {
    out.str("");
    err.str("");
    return run_cli(args, out, err);
  }

  fs::path dir;
  std::ostringstream out, err;
};

TEST_F(Cli, GenReportsCounts) {
  EXPECT_EQ(run({"gen", "--problem", "const", "--n", "8", "--out", (dir / "c").string()}), kOk);
  EXPECT_NE(out.str().find("N=512"), std::string::npos);
  EXPECT_NE(out.str().find("nnz=3200"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "c" / "matrix.mtx"));
  EXPECT_TRUE(fs::exists(dir / "c" / "rhs.mtx"));
  EXPECT_TRUE(fs::exists(dir / "c" / "metadata.json"));
}

TEST_F(Cli, AniOfOneMatchesConstFile) {
  ASSERT_EQ(run({"gen", "--problem", "const", "--n", "8", "--out", (dir / "c").string()}), kOk);
  ASSERT_EQ(run({"gen", "--problem", "ani", "--s", "1", "--n", "8", "--out", (dir / "a").string()}), kOk);
  EXPECT_EQ(slurp(dir / "c" / "matrix.mtx"), slurp(dir / "a" / "matrix.mtx"));
}

TEST_F(Cli, RandIsReproducible) {
  for (const char* sub : {"r1", "r2"})
    ASSERT_EQ(run({"gen", "--problem", "rand", "--s", "1000", "--seed", "7", "--n", "6", "--out", (dir / sub).string()}),
              kOk);
  EXPECT_EQ(slurp(dir / "r1" / "matrix.mtx"), slurp(dir / "r2" / "matrix.mtx"));
}

TEST_F(Cli, SolveTrivialSystem) {
  {
    std::ofstream m(dir / "one.mtx");
    m << "%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 3\n";
  }
  EXPECT_EQ(run({"solve", "--matrix", (dir / "one.mtx").string(), "--out", (dir / "o").string()}), kOk) << err.str();
  const auto j = nlohmann::json::parse(slurp(dir / "o" / "uniform.summary.json"));
  EXPECT_EQ(j.at("iterations"), 1);
  EXPECT_TRUE(j.at("converged").get<bool>());
  EXPECT_EQ(j.at("config").at("preconditioner").at("nb"), 32);
  EXPECT_EQ(j.at("preconditioner").at("nb"), 1);
}

TEST_F(Cli, SolveWritesTracesAndBaseline) {
  ASSERT_EQ(run({"solve", "--n", "8", "--policy", "fmp", "--policy", "hl:0.1", "--out", (dir / "s").string()}), kOk)
      << err.str();
  for (const char* f : {"uniform.trace.csv", "fixed-low.trace.csv", "adaptive-hl_0.1.trace.csv",
                        "uniform.summary.json", "comparison.csv"})
    EXPECT_TRUE(fs::exists(dir / "s" / f)) << f;
  const auto table = slurp(dir / "s" / "comparison.csv");
  EXPECT_EQ(table.rfind("policy,status,iterations", 0), 0u);
  EXPECT_NE(table.find("\nuniform,converged,"), std::string::npos);
}

TEST_F(Cli, NoBaselineWhenDisabled) {
  ASSERT_EQ(run({"solve", "--n", "4", "--policy", "fmp", "--no-baseline", "--out", (dir / "s").string()}), kOk);
  EXPECT_FALSE(fs::exists(dir / "s" / "uniform.trace.csv"));
}

TEST_F(Cli, NonConvergenceExitCode) {
  EXPECT_EQ(run({"solve", "--n", "8", "--max-iter", "2", "--out", (dir / "s").string()}), kNotConverged);
  const auto j = nlohmann::json::parse(slurp(dir / "s" / "uniform.summary.json"));
  EXPECT_EQ(j.at("status"), "max_iterations");
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run({}), kUsage);
  EXPECT_EQ(run({"frobnicate"}), kUsage);
  EXPECT_EQ(run({"solve", "--n", "abc"}), kUsage);
  EXPECT_EQ(run({"solve", "--n", "4", "--policy", "bogus", "--out", dir.string()}), kUsage);
  EXPECT_EQ(run({"gen", "--problem", "cube", "--out", dir.string()}), kUsage);
  EXPECT_EQ(run({"solve", "--n", "4", "--k", "0", "--out", dir.string()}), kUsage);
  EXPECT_EQ(run({"--help"}), kOk);
}

TEST_F(Cli, IoErrors) {
  EXPECT_EQ(run({"solve", "--matrix", (dir / "missing.mtx").string(), "--out", dir.string()}), kIo);
  EXPECT_EQ(run({"solve", "--config", (dir / "missing.ini").string()}), kIo);
}

TEST_F(Cli, ConfigFileWithOverrides) {
  {
    std::ofstream c(dir / "exp.ini");
    c << "[problem]\nfamily = dis\nn = 6\ns = 1000\n"
      << "[preconditioner]\nnb = 8\nk = 2\nt = 2\n"
      << "[policies]\nlist = fixed-low, adaptive-lh:1e-3\n"
      << "[solve]\nres_tol = 1e-8\ntiming = false\n"
      << "[output]\ndir = " << (dir / "from_ini").string() << "\n";
  }
  ASSERT_EQ(run({"solve", "--config", (dir / "exp.ini").string(), "--nb", "4"}), kOk) << err.str();
  const auto j = nlohmann::json::parse(slurp(dir / "from_ini" / "adaptive-lh_0.001.summary.json"));
  EXPECT_EQ(j.at("config").at("preconditioner").at("nb"), 4);
  EXPECT_EQ(j.at("config").at("problem").at("family"), "dis");
  EXPECT_EQ(j.at("config").at("solve").at("res_tol"), 1e-8);
  EXPECT_EQ(j.at("problem").at("rows"), 216);

  std::ofstream bad(dir / "bad.ini");
  bad << "[problem]\nsize = 3\n";
  bad.close();
  EXPECT_EQ(run({"solve", "--config", (dir / "bad.ini").string()}), kUsage);
}

TEST_F(Cli, TimingOffGivesIdenticalTraces) {
  for (const char* sub : {"a", "b"})
    ASSERT_EQ(run({"solve", "--n", "8", "--policy", "hl:1e-3", "--no-timing", "--out", (dir / sub).string()}), kOk);
  EXPECT_EQ(slurp(dir / "a" / "adaptive-hl_0.001.trace.csv"), slurp(dir / "b" / "adaptive-hl_0.001.trace.csv"));
  EXPECT_EQ(slurp(dir / "a" / "uniform.trace.csv"), slurp(dir / "b" / "uniform.trace.csv"));
}

TEST_F(Cli, AnalyzeIdentity) {
  mm_write(CsrMatrix<double>::identity(5), dir / "id.mtx");
  ASSERT_EQ(run({"analyze", "--matrix", (dir / "id.mtx").string(), "--out", (dir / "an").string()}), kOk);
  const auto j = nlohmann::json::parse(slurp(dir / "an" / "features.json"));
  EXPECT_EQ(j.at("multiscale").at("undefined_count"), 5);
  EXPECT_TRUE(fs::exists(dir / "an" / "multiscale.csv"));
}

TEST_F(Cli, AnalyzeAnisotropicEdges) {
  ASSERT_EQ(run({"analyze", "--problem", "ani", "--s", "1000", "--n", "16", "--edges", "anisotropy", "--out",
                 (dir / "an").string()}),
            kOk);
  const auto csv = slurp(dir / "an" / "multiscale.csv");
  EXPECT_NE(csv.find("\n1000,inf,4096,100\n"), std::string::npos) << csv;
}

TEST_F(Cli, CompareIdenticalAndMismatched) {
  ASSERT_EQ(run({"solve", "--n", "6", "--policy", "fmp", "--out", (dir / "s").string()}), kOk);
  const auto u = (dir / "s" / "uniform.trace.csv").string();
  ASSERT_EQ(run({"compare", u, u}), kOk);
  EXPECT_NE(out.str().find("ratio=1\n"), std::string::npos) << out.str();
  EXPECT_NE(out.str().find("divergence=none"), std::string::npos);

  ASSERT_EQ(run({"compare", u, (dir / "s" / "fixed-low.trace.csv").string()}), kOk);
  EXPECT_NE(out.str().find("iter_b="), std::string::npos);

  ASSERT_EQ(run({"solve", "--n", "5", "--out", (dir / "t").string()}), kOk);
  EXPECT_EQ(run({"compare", u, (dir / "t" / "uniform.trace.csv").string()}), kUsage);
  EXPECT_EQ(run({"compare", u, (dir / "nope.trace.csv").string()}), kIo);
}

}  // namespace
}  // namespace mpbjac::cli
