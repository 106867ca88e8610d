#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ast/cli.hpp"

namespace ast {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "ast");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ast_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(Cli, EvalOnIdenticalFiles) {
  std::ofstream(path("truth.txt")) << "10,10,20,20\n30,12,20,20\n";
  std::ofstream(path("rec.csv")) << "frame,x,y,s,w,h,score\n1,10,10,1,20,20,0\n2,30,12,1,20,20,0\n";
  const Result r = call({"eval", "--records", path("rec.csv"), "--truth", path("truth.txt")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "mean_cle=0.000000 precision=1.000000\n");
}

TEST_F(Cli, MissingInitIsUsageError) {
  const Result r = call({"track", "--frames", path(""), "--out", path("o.csv")});
  EXPECT_EQ(r.code, 1);
}

TEST_F(Cli, UnknownFlagIsUsageError) {
  EXPECT_EQ(call({"eval", "--bogus"}).code, 1);
  EXPECT_EQ(call({}).code, 1);
  EXPECT_EQ(call({"track", "--frames", path(""), "--out", path("o.csv"), "--init", "1,2,3"}).code, 1);
  EXPECT_EQ(call({"track", "--frames", path(""), "--out", path("o.csv"), "--init", "1,2,30,30", "--subdim", "9"}).code, 1);
}

TEST_F(Cli, DataErrorsExitTwo) {
  EXPECT_EQ(call({"eval", "--records", path("none.csv"), "--truth", path("none.txt")}).code, 2);
  std::ofstream(path("bad.pgm")) << "P2\n1 1\n255\n0\n";
  EXPECT_EQ(call({"track", "--frames", dir_.string(), "--out", path("o.csv"), "--init", "0,0,4,4"}).code, 2);
}

TEST_F(Cli, SynthTrackEval) {
  const Result s = call({"synth", "--out", path("seq"), "--length", "12", "--seed", "3", "--width", "120", "--height",
                         "90", "--object-size", "20,20", "--start", "10,10", "--end", "25,20", "--noise-std", "2"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(s.out, "frames=12 init=10,10,20,20\n");
  const Result t = call({"track", "--frames", path("seq"), "--init", "10,10,20,20", "--out", path("r.csv"),
                         "--particles", "100", "--seed", "7", "--dump-bag", path("bag"), "--overlay", path("ov")});
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_TRUE(fs::exists(path("bag/model_00.txt")));
  EXPECT_TRUE(fs::exists(path("ov/frame_0012.pgm")));
  const Result e = call({"eval", "--records", path("r.csv"), "--truth", path("seq/groundtruth.txt")});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("precision=1.000000"), std::string::npos) << e.out;
}

}  // namespace
}  // namespace ast
