#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "hgmm/serialization.hpp"
#include "support.hpp"

namespace hgmm {
namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "hgmm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t line_count(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("hgmm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::filesystem::path dir_;
  const std::string iris_ = testing::data_path("iris.csv");
};

TEST_F(CliTest, FitIsByteIdenticalAcrossRuns) {
  const std::vector<std::string> args{"fit", "--input", iris_, "--label-column", "class", "--max-nodes", "3",
                                      "--em-iters", "10", "--restarts", "2", "--seed", "5"};
  auto a = args, b = args;
  a.insert(a.end(), {"--out", path("a.json")});
  b.insert(b.end(), {"--out", path("b.json")});
  ASSERT_EQ(invoke(a).code, cli::kExitOk);
  ASSERT_EQ(invoke(b).code, cli::kExitOk);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_FALSE(slurp(path("a.json")).empty());
}

TEST_F(CliTest, FitWithZeroBudgetWritesSingleNode) {
  const auto r = invoke({"fit", "--input", iris_, "--label-column", "class", "--max-nodes", "0"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const Dendrogram tree = parse_tree(r.out);
  EXPECT_EQ(tree.nodes.size(), 1u);
  EXPECT_NE(r.err.find("nodes 1, created 0"), std::string::npos);
}

TEST_F(CliTest, MissingInputIsUsageError) {
  const auto r = invoke({"fit", "--input", "/no/such/file.csv"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("/no/such/file.csv"), std::string::npos);
  EXPECT_EQ(invoke({"fit"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"--help"}).code, cli::kExitOk);
}

TEST_F(CliTest, EvalReportsOverallAndPerClass) {
  ASSERT_EQ(invoke({"fit", "--input", iris_, "--label-column", "class", "--max-nodes", "2", "--em-iters", "10",
                    "--restarts", "2", "--out", path("t.json")})
                .code,
            cli::kExitOk);
  const auto r = invoke({"eval", "--tree", path("t.json"), "--input", iris_});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("overall_f,", 0), 0u);
  EXPECT_NE(r.out.find("normalization,all\n"), std::string::npos);
  EXPECT_NE(r.out.find("class,size,best_f,best_node\n"), std::string::npos);
  EXPECT_NE(r.out.find("setosa,50,"), std::string::npos);
  EXPECT_EQ(line_count(r.out), 6u);

  const auto labeled = invoke({"eval", "--tree", path("t.json"), "--input", iris_, "--f-norm", "labeled"});
  EXPECT_NE(labeled.out.find("normalization,labeled\n"), std::string::npos);
}

TEST_F(CliTest, EvalRejectsMismatchedData) {
  ASSERT_EQ(invoke({"fit", "--input", iris_, "--label-column", "class", "--max-nodes", "0", "--out",
                    path("t.json")})
                .code,
            cli::kExitOk);
  const auto r = invoke({"eval", "--tree", path("t.json"), "--input", testing::data_path("wine.csv")});
  EXPECT_EQ(r.code, cli::kExitRuntime);
  EXPECT_NE(r.err.find("tree/data mismatch"), std::string::npos);
}

TEST_F(CliTest, ToyIsDeterministic) {
  const auto a = invoke({"toy", "--kind", "HN", "--seed", "3"});
  const auto b = invoke({"toy", "--kind", "HN", "--seed", "3"});
  ASSERT_EQ(a.code, cli::kExitOk);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(line_count(a.out), 451u);
  EXPECT_EQ(invoke({"toy", "--kind", "XX"}).code, cli::kExitUsage);
}

TEST_F(CliTest, NoiseAppendsRows) {
  const auto r = invoke({"noise", "--input", iris_, "--label-column", "class", "--ratio", "0.5", "--seed", "1"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(line_count(r.out), 226u);

  std::ofstream(path("151.csv")) << slurp(iris_) << "5.1,3.5,1.4,0.2,setosa\n";
  const auto odd = invoke({"noise", "--input", path("151.csv"), "--label-column", "class", "--ratio", "0.5"});
  ASSERT_EQ(odd.code, cli::kExitOk) << odd.err;
  EXPECT_EQ(line_count(odd.out), 227u);
}

TEST_F(CliTest, ExportFormats) {
  ASSERT_EQ(invoke({"fit", "--input", iris_, "--label-column", "class", "--max-nodes", "2", "--em-iters", "10",
                    "--restarts", "2", "--out", path("t.json")})
                .code,
            cli::kExitOk);
  const auto dot = invoke({"export", "--tree", path("t.json"), "--format", "dot"});
  ASSERT_EQ(dot.code, cli::kExitOk);
  EXPECT_EQ(dot.out.rfind("digraph", 0), 0u);
  const auto json = invoke({"export", "--tree", path("t.json"), "--format", "json"});
  ASSERT_EQ(json.code, cli::kExitOk);
  EXPECT_EQ(json.out, slurp(path("t.json")));
  EXPECT_EQ(invoke({"export", "--tree", path("t.json"), "--format", "png"}).code, cli::kExitUsage);

  std::ofstream(path("bad.json")) << "{";
  EXPECT_EQ(invoke({"export", "--tree", path("bad.json")}).code, cli::kExitUsage);
}

TEST_F(CliTest, CompareWritesOneRowPerBudget) {
  const auto r = invoke({"compare", "--input", iris_, "--max-nodes", "2,3", "--trials", "2", "--em-iters", "5",
                         "--restarts", "1", "--name", "iris"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(line_count(r.out), 3u);
  EXPECT_NE(r.out.find("\niris,2,"), std::string::npos);
  EXPECT_NE(r.out.find("\niris,3,"), std::string::npos);
  EXPECT_EQ(invoke({"compare", "--input", iris_, "--max-nodes", "5-2"}).code, cli::kExitUsage);
}

}  // namespace
}  // namespace hgmm
