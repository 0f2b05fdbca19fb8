#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "maxent/config.hpp"
#include "maxent/equivalence_lab.hpp"
#include "maxent/random.hpp"
#include "maxent/serialize.hpp"
#include "support.hpp"

using namespace maxent;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "maxent_serialize_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

ExperimentConfig random_config(Rng& rng) {
  ExperimentConfig c;
  c.out_dir = "out_" + std::to_string(rng.below(1000));
  const char* kinds[] = {"equiv", "violate_c1", "violate_c2", "xor", "random"};
  c.generator.kind = kinds[rng.below(5)];
  c.generator.seed = rng.below(UINT64_MAX);
  c.generator.n_features = 1 + rng.below(6);
  c.generator.y_size = 2 + rng.below(3);
  c.solver.learning_rate = rng.uniform(1e-3, 5.0);
  c.solver.max_iters = 1 + rng.below(100000);
  c.solver.grad_tol = rng.uniform(1e-12, 1e-3);
  c.solver.l2 = rng.uniform() < 0.5 ? 0.0 : rng.uniform(0.0, 0.1);
  for (NetConfig* n : {&c.net, &c.infoplane}) {
    const char* tasks[] = {"xor", "bits12", "instance"};
    n->task = tasks[rng.below(3)];
    n->hidden.clear();
    const std::size_t depth = rng.below(4);
    for (std::size_t l = 0; l < depth; ++l) n->hidden.push_back(1 + rng.below(9));
    n->train.learning_rate = rng.uniform(0.01, 3.0);
    n->train.seed = rng.below(1u << 20);
    n->train.beta = rng.uniform(0.0, 0.5);
    n->train.layer_beta.clear();
    if (rng.below(2) && depth > 0)
      for (std::size_t l = 0; l < depth; ++l) n->train.layer_beta.push_back(rng.uniform(0.0, 0.3));
    n->train.mode = rng.below(2) ? TrainMode::kCoordinate : TrainMode::kBackprop;
    n->train.order = rng.below(2) ? BlockOrder::kBottomUp : BlockOrder::kTopDown;
    n->train.sweeps = 1 + rng.below(50);
    n->train.inner_iters = rng.below(200);
  }
  c.estimator.bins = 2 + rng.below(60);
  c.estimator.n_samples = 1 + rng.below(20000);
  c.estimator.seed = rng.below(UINT64_MAX);
  c.suite.seed = rng.below(UINT64_MAX);
  c.suite.theorem_tv_tolerance = rng.uniform(0.0, 0.01);
  c.suite.fano_slack = rng.uniform(0.0, 0.5);
  c.suite.xor_seeds = 1 + rng.below(20);
  return c;
}

}  // namespace

TEST(JsonRoundTrip, Instances) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    for (const Instance& inst : {generate_random_instance(seed), generate_equiv_instance(seed, 1 + seed % 5, 2 + seed % 3),
                                 generate_violating_instance(seed, ViolationKind::kCondition2)}) {
      const Json j = to_json(inst);
      EXPECT_EQ(instance_from_json(Json::parse(dump(j))), inst);
    }
  }
  const Json xor_json = to_json(make_xor_instance());
  EXPECT_EQ(xor_json["condition2"], "violated");
  EXPECT_EQ(xor_json["joint"]["dims"], (Json{4, 2}));
}

TEST(JsonRoundTrip, ModelParameters) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const LayerStack net = init_stack({3, 1 + rng.below(5), 2}, 2 + rng.below(3), rng.below(UINT64_MAX));
    EXPECT_EQ(stack_from_json(Json::parse(dump(to_json(net)))), net);
    SoftmaxParams p = SoftmaxParams::zeros(2 + rng.below(3), 1 + rng.below(4));
    for (double& v : p.lambda) v = rng.uniform(-10, 10);
    for (double& v : p.bias) v = rng.uniform(-10, 10);
    EXPECT_EQ(softmax_from_json(Json::parse(dump(to_json(p)))), p);
  }
}

TEST(JsonRoundTrip, MalformedModelsAreParseErrors) {
  EXPECT_EQ(kind_of([] { joint_from_json(Json::parse(R"({"dims": [2]})")); }), ErrorKind::kParseError);
  EXPECT_EQ(kind_of([] { softmax_from_json(Json{{"lambda", {{1.0, 2.0}, {3.0}}}, {"bias", {0.0, 0.0}}}); }),
            ErrorKind::kParseError);
  EXPECT_EQ(kind_of([] { joint_from_json(Json::parse(R"({"dims": [1, 2], "probs": [0.7, 0.7]})")); }), ErrorKind::kNotNormalized);
}

TEST(Config, EmptyObjectIsTheDefault) {
  EXPECT_EQ(config_from_json(Json::object()), ExperimentConfig{});
  const ExperimentConfig c = config_from_json(Json::parse(R"({"net": {"hidden": [3]}, "suite": {"xor_seeds": 4}})"));
  EXPECT_EQ(c.net.hidden, (std::vector<std::size_t>{3}));
  EXPECT_EQ(c.net.task, ExperimentConfig::default_xor_net().task);
  EXPECT_EQ(c.suite.xor_seeds, 4u);
}

TEST(Config, RejectsBadInput) {
  EXPECT_EQ(kind_of([] { config_from_json(Json::parse(R"({"estimator": {"bins": 1}})")); }), ErrorKind::kRangeError);
  EXPECT_EQ(kind_of([] { config_from_json(Json::parse(R"({"estimator": {"bins": -3}})")); }), ErrorKind::kRangeError);
  EXPECT_EQ(kind_of([] { config_from_json(Json::parse(R"({"solver": {"lr": 1}})")); }), ErrorKind::kUnknownKey);
  EXPECT_EQ(kind_of([] { config_from_json(Json::parse(R"({"extra": 1})")); }), ErrorKind::kUnknownKey);
  EXPECT_EQ(kind_of([] { config_from_json(Json::parse(R"({"net": {"hidden": "2,2"}})")); }), ErrorKind::kParseError);
  EXPECT_EQ(kind_of([] { config_from_json(Json::parse(R"({"net": {"mode": "sideways"}})")); }), ErrorKind::kRangeError);
  EXPECT_EQ(kind_of([] { config_from_json(Json::parse(R"({"generator": {"kind": "nope"}})")); }),
            ErrorKind::kRangeError);
  EXPECT_EQ(kind_of([] { config_from_json(Json::array()); }), ErrorKind::kParseError);
  try {
    config_from_json(Json::parse(R"({"solver": {"lr": 1}})"));
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("solver.lr"), std::string::npos) << e.what();
  }
}

TEST(Config, ParseErrorsNameLineAndColumn) {
  const fs::path path = scratch("broken.json");
  std::ofstream(path) << "{\n  \"suite\": {\n    \"seed\": ,\n  }\n}\n";
  try {
    load_config(path);
    FAIL() << "expected ParseError";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParseError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("column"), std::string::npos) << e.what();
  }
  EXPECT_EQ(kind_of([] { load_config(scratch("missing.json")); }), ErrorKind::kIoError);
}

TEST(Config, RandomConfigsRoundTripThroughFiles) {
  Rng rng(77);
  const fs::path path = scratch("cfg.json");
  for (int trial = 0; trial < 100; ++trial) {
    const ExperimentConfig c = random_config(rng);
    ASSERT_EQ(kind_of([&] { c.validate(); }), std::nullopt) << dump(to_json(c));
    save_config(c, path);
    const ExperimentConfig back = load_config(path);
    EXPECT_EQ(back, c) << dump(to_json(c));
    EXPECT_EQ(config_hash(back), config_hash(c));
  }
}

TEST(Config, HashIgnoresKeyOrderAndOutDir) {
  const Json a = Json::parse(R"({"suite": {"seed": 5, "xor_seeds": 3}, "estimator": {"bins": 12}})");
  const Json b = Json::parse(R"({"estimator": {"bins": 12}, "suite": {"xor_seeds": 3, "seed": 5}})");
  EXPECT_EQ(config_hash(config_from_json(a)), config_hash(config_from_json(b)));
  ExperimentConfig moved = config_from_json(a);
  moved.out_dir = "elsewhere";
  EXPECT_EQ(config_hash(moved), config_hash(config_from_json(a)));
  ExperimentConfig reseeded = moved;
  reseeded.suite.seed = 6;
  EXPECT_NE(config_hash(reseeded), config_hash(moved));
  EXPECT_EQ(config_hash(moved).size(), 16u);
}

TEST(Csv, ExactHeaders) {
  TrainTrace trace;
  trace.records.push_back({0, 0.5, 0.25, 0.0});
  const std::string t = trace_csv(trace);
  EXPECT_EQ(first_line(t), "iteration,loss,reg_term,train_error");
  EXPECT_EQ(t.substr(t.find('\n') + 1), "0,0.5,0.25,0\n");

  Trajectory traj;
  traj.estimator = {30, 100, 7};
  traj.points.push_back({2, 1, 0.125, 0.5});
  EXPECT_EQ(trajectory_csv(traj), "epoch,layer,i_xt_nats,i_ty_nats,bins,n_samples,seed\n2,1,0.125,0.5,30,100,7\n");

  EXPECT_EQ(std::string(kEquivalenceCsvHeader), "seed,n,y_size,i_xy_given_t,max_i_titj_given_y,tv,pass");
}

TEST(Numbers, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02e23, -2.5, 0.0}) EXPECT_EQ(std::stod(format_number(v)), v);
  EXPECT_EQ(format_number(0.5), "0.5");
}
