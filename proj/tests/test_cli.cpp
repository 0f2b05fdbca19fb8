#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "maxent/config.hpp"
#include "maxent/recursive_net.hpp"
#include "maxent/serialize.hpp"

using namespace maxent;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / "maxent_cli_test" / info->name();
    fs::remove_all(root_);
    fs::create_directories(root_);
  }

  Outcome run(const std::string& args, const std::string& env = "") const {
    const fs::path out = root_ / "stdout.txt", err = root_ / "stderr.txt";
    const std::string cmd = "cd '" + root_.string() + "' && env -u MAXENT_LAB_OUT " + env + " '" MAXENT_LAB_BIN "' " +
                            args + " > '" + out.string() + "' 2> '" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(out), read_file(err)};
  }

  fs::path root_;
};

}  // namespace

TEST_F(Cli, VerifyExamplePasses) {
  const Outcome r = run("verify --seed 7 --n 4 --y 3 --out-dir v");
  ASSERT_EQ(r.code, 0) << r.err;
  const Json report = read_json_file(root_ / "v" / "verify.json");
  EXPECT_TRUE(report.at("equivalence").at("pass").get<bool>());
  EXPECT_TRUE(report.at("equivalence").at("conditions_hold").get<bool>());
  const std::string csv = read_file(root_ / "v" / "equivalence.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kEquivalenceCsvHeader);
  EXPECT_NE(csv.find("\n7,4,3,"), std::string::npos) << csv;
  // One JSON run record on stdout.
  const std::string last = r.out.substr(r.out.rfind('\n', r.out.size() - 2) + 1);
  const Json rec = Json::parse(last);
  EXPECT_EQ(rec.at("command"), "verify");
  EXPECT_EQ(rec.at("seed"), 7);
}

TEST_F(Cli, CoordinateWithNoInnerStepsWritesTheInitialStack) {
  const Outcome r = run("train --model stack --task xor --hidden 2,2 --mode coordinate --sweeps 2 --inner-iters 0 --out-dir c");
  ASSERT_EQ(r.code, 0) << r.err;
  const LayerStack init = init_stack({2, 2, 2}, 2, ExperimentConfig{}.net.train.seed);
  EXPECT_EQ(read_file(root_ / "c" / "model.json"), dump(to_json(init)));
  EXPECT_EQ(stack_from_json(read_json_file(root_ / "c" / "model.json")), init);
}

TEST_F(Cli, BadArgumentsExitOne) {
  Outcome r = run("verify --bogus");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--bogus"), std::string::npos) << r.err;
  r = run("gen --output ../escape.json");
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(fs::exists(root_.parent_path() / "escape.json"));
  r = run("gen --output /tmp/abs.json");
  EXPECT_EQ(r.code, 1);
  r = run("gen --kind nope");
  EXPECT_EQ(r.code, 1);
  r = run("train --hidden 2,x");
  EXPECT_EQ(r.code, 1);
}

TEST_F(Cli, MissingConfigAndBadConfig) {
  EXPECT_EQ(run("--config missing.json gen").code, 1);
  std::ofstream(root_ / "bad.json") << "{\"estimator\": {\"bins\": 1}}";
  const Outcome r = run("--config bad.json gen");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bins"), std::string::npos) << r.err;
}

TEST_F(Cli, OutputDirectoryPrecedence) {
  std::ofstream(root_ / "cfg.json") << "{\"out_dir\": \"from_config\"}";
  ASSERT_EQ(run("--config cfg.json gen").code, 0);
  EXPECT_TRUE(fs::exists(root_ / "from_config" / "instance.json"));
  ASSERT_EQ(run("--config cfg.json gen", "MAXENT_LAB_OUT=from_env").code, 0);
  EXPECT_TRUE(fs::exists(root_ / "from_env" / "instance.json"));
  ASSERT_EQ(run("--config cfg.json --out-dir from_flag gen", "MAXENT_LAB_OUT=from_env2").code, 0);
  EXPECT_TRUE(fs::exists(root_ / "from_flag" / "instance.json"));
  EXPECT_FALSE(fs::exists(root_ / "from_env2"));
}

TEST_F(Cli, GenIsDeterministic) {
  ASSERT_EQ(run("gen --kind violate_c2 --seed 11 --out-dir a").code, 0);
  ASSERT_EQ(run("gen --kind violate_c2 --seed 11 --out-dir b").code, 0);
  ASSERT_EQ(run("gen --kind violate_c2 --seed 12 --out-dir c").code, 0);
  const std::string a = read_file(root_ / "a" / "instance.json");
  EXPECT_EQ(a, read_file(root_ / "b" / "instance.json"));
  EXPECT_NE(a, read_file(root_ / "c" / "instance.json"));
  EXPECT_EQ(read_json_file(root_ / "a" / "instance.json").at("condition2"), "violated");
}

TEST_F(Cli, SolveMeOnAGeneratedInstance) {
  ASSERT_EQ(run("gen --seed 3 --out-dir s --output inst.json").code, 0);
  const Outcome r = run("solve-me --instance s/inst.json --out-dir s");
  ASSERT_EQ(r.code, 0) << r.err;
  const Json sol = read_json_file(root_ / "s" / "me_solution.json");
  const Json cond = sol.at("conditional");
  ASSERT_TRUE(cond.is_array());
  for (const Json& row : cond) {
    double sum = 0.0;
    for (const Json& v : row) sum += v.get<double>();
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}
