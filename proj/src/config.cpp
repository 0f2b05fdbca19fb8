#include "maxent/config.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "maxent/error.hpp"

namespace maxent {

TrainConfig ExperimentConfig::default_solver() {
  TrainConfig c;
  c.learning_rate = 1.0;
  c.max_iters = 1000000;
  c.grad_tol = 1e-7;
  return c;
}

NetConfig ExperimentConfig::default_xor_net() {
  NetConfig n;
  n.task = "xor";
  n.hidden = {2, 2};
  n.train.learning_rate = 2.0;
  n.train.max_iters = 20000;
  n.train.grad_tol = 1e-12;
  n.train.l2 = 1e-5;
  n.train.sweeps = 400;
  n.train.inner_iters = 50;
  return n;
}

NetConfig ExperimentConfig::default_infoplane_net() {
  NetConfig n;
  n.task = "bits12";
  n.hidden = {8, 4};
  n.train.learning_rate = 2.0;
  n.train.max_iters = 1000;
  n.train.grad_tol = 1e-9;
  n.train.seed = 1;
  return n;
}

std::string to_string(TrainMode mode) { return mode == TrainMode::kBackprop ? "backprop" : "coordinate"; }
std::string to_string(BlockOrder order) { return order == BlockOrder::kTopDown ? "top_down" : "bottom_up"; }

namespace {

const std::set<std::string> kGeneratorKinds{"equiv", "violate_c1", "violate_c2", "xor", "random"};
const std::set<std::string> kTasks{"xor", "bits12", "instance"};

void range_check(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorKind::kRangeError, msg);
}

void validate_net(const NetConfig& n, const char* section) {
  const std::string s = section;
  range_check(kTasks.count(n.task) > 0, s + ".task must be xor, bits12 or instance");
  for (std::size_t w : n.hidden) range_check(w >= 1, s + ".hidden widths must be >= 1");
  n.train.validate(n.hidden.size());
}

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be reported.
class Section {
 public:
  Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw Error(ErrorKind::kParseError, where() + " must be an object");
  }

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const Json& raw(const char* key) { return j_.at(key); }

  void get(const char* key, double& out) {
    if (!has(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_number()) throw type_error(key, "a number");
    out = v.get<double>();
  }
  void get(const char* key, std::uint64_t& out) {
    if (!has(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_number_unsigned()) {
      if (v.is_number_integer()) throw Error(ErrorKind::kRangeError, where(key) + " must be >= 0");
      throw type_error(key, "a non-negative integer");
    }
    out = v.get<std::uint64_t>();
  }
  void get(const char* key, std::string& out) {
    if (!has(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_string()) throw type_error(key, "a string");
    out = v.get<std::string>();
  }
  void get(const char* key, std::vector<std::size_t>& out) {
    if (!has(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_array()) throw type_error(key, "an array of non-negative integers");
    out.clear();
    for (const Json& e : v) {
      if (!e.is_number_unsigned()) throw type_error(key, "an array of non-negative integers");
      out.push_back(e.get<std::size_t>());
    }
  }
  void get(const char* key, std::vector<double>& out) {
    if (!has(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_array()) throw type_error(key, "an array of numbers");
    out.clear();
    for (const Json& e : v) {
      if (!e.is_number()) throw type_error(key, "an array of numbers");
      out.push_back(e.get<double>());
    }
  }

  std::string child(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw Error(ErrorKind::kUnknownKey, "unknown key " + where(it.key().c_str()));
    }
  }

 private:
  std::string where(const char* key = nullptr) const {
    if (key == nullptr) return path_.empty() ? std::string("config") : path_;
    return "'" + child(key) + "'";
  }
  Error type_error(const char* key, const char* want) const {
    return Error(ErrorKind::kParseError, where(key) + " must be " + want);
  }

  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Json train_json(const TrainConfig& t) {
  return Json{{"learning_rate", t.learning_rate},
              {"max_iters", t.max_iters},
              {"grad_tol", t.grad_tol},
              {"seed", t.seed},
              {"l2", t.l2}};
}

void read_train(Section& s, TrainConfig& t) {
  s.get("learning_rate", t.learning_rate);
  s.get("max_iters", t.max_iters);
  s.get("grad_tol", t.grad_tol);
  s.get("seed", t.seed);
  s.get("l2", t.l2);
}

Json net_json(const NetConfig& n) {
  Json j = train_json(n.train);
  j["task"] = n.task;
  j["hidden"] = n.hidden;
  j["beta"] = n.train.beta;
  j["layer_beta"] = n.train.layer_beta;
  j["mode"] = to_string(n.train.mode);
  j["sweeps"] = n.train.sweeps;
  j["inner_iters"] = n.train.inner_iters;
  j["order"] = to_string(n.train.order);
  return j;
}

NetConfig read_net(const Json& j, const char* name, NetConfig n) {
  Section s(j, name);
  read_train(s, n.train);
  s.get("task", n.task);
  s.get("hidden", n.hidden);
  s.get("beta", n.train.beta);
  s.get("layer_beta", n.train.layer_beta);
  std::string mode = to_string(n.train.mode);
  s.get("mode", mode);
  if (mode == "backprop") {
    n.train.mode = TrainMode::kBackprop;
  } else if (mode == "coordinate") {
    n.train.mode = TrainMode::kCoordinate;
  } else {
    throw Error(ErrorKind::kRangeError, s.child("mode") + " must be backprop or coordinate");
  }
  s.get("sweeps", n.train.sweeps);
  s.get("inner_iters", n.train.inner_iters);
  std::string order = to_string(n.train.order);
  s.get("order", order);
  if (order == "top_down") {
    n.train.order = BlockOrder::kTopDown;
  } else if (order == "bottom_up") {
    n.train.order = BlockOrder::kBottomUp;
  } else {
    throw Error(ErrorKind::kRangeError, s.child("order") + " must be top_down or bottom_up");
  }
  s.finish();
  return n;
}

}  // namespace

void ExperimentConfig::validate() const {
  range_check(!out_dir.empty(), "out_dir must not be empty");
  range_check(kGeneratorKinds.count(generator.kind) > 0,
              "generator.kind must be equiv, violate_c1, violate_c2, xor or random");
  range_check(generator.n_features >= 1 && generator.n_features <= kMaxFeatures,
              "generator.n_features must be in [1, 16]");
  range_check(generator.y_size >= 2, "generator.y_size must be >= 2");
  if (generator.kind == "equiv") {
    range_check(generator.n_features <= 6, "equiv instances take n_features in [1, 6]");
    range_check(generator.y_size <= 4, "equiv instances take y_size in [2, 4]");
  }
  solver.validate();
  validate_net(net, "net");
  validate_net(infoplane, "infoplane");
  range_check(estimator.bins >= 2, "estimator.bins must be >= 2");
  range_check(estimator.n_samples >= 1, "estimator.n_samples must be >= 1");

  const SuiteConfig& s = suite;
  for (double t : {s.me_tv_tolerance, s.condition_tolerance, s.theorem_tv_tolerance, s.violation_median_floor,
                   s.gradient_tolerance, s.reduction_tv_tolerance, s.fano_slack}) {
    range_check(t >= 0.0 && std::isfinite(t), "suite tolerances must be finite and >= 0");
  }
  for (std::size_t c : {s.me_joints, s.equiv_instances, s.violating_instances, s.gradient_points, s.dpi_triples,
                        s.xor_seeds, s.ib_instances}) {
    range_check(c >= 1, "suite counts must be >= 1");
  }
}

Json to_json(const ExperimentConfig& cfg) {
  const SuiteConfig& s = cfg.suite;
  return Json{{"out_dir", cfg.out_dir},
              {"generator",
               {{"kind", cfg.generator.kind},
                {"seed", cfg.generator.seed},
                {"n_features", cfg.generator.n_features},
                {"y_size", cfg.generator.y_size}}},
              {"solver", train_json(cfg.solver)},
              {"net", net_json(cfg.net)},
              {"infoplane", net_json(cfg.infoplane)},
              {"estimator",
               {{"bins", cfg.estimator.bins}, {"n_samples", cfg.estimator.n_samples}, {"seed", cfg.estimator.seed}}},
              {"suite",
               {{"seed", s.seed},
                {"me_tv_tolerance", s.me_tv_tolerance},
                {"condition_tolerance", s.condition_tolerance},
                {"theorem_tv_tolerance", s.theorem_tv_tolerance},
                {"violation_median_floor", s.violation_median_floor},
                {"gradient_tolerance", s.gradient_tolerance},
                {"reduction_tv_tolerance", s.reduction_tv_tolerance},
                {"fano_slack", s.fano_slack},
                {"me_joints", s.me_joints},
                {"equiv_instances", s.equiv_instances},
                {"violating_instances", s.violating_instances},
                {"gradient_points", s.gradient_points},
                {"dpi_triples", s.dpi_triples},
                {"xor_seeds", s.xor_seeds},
                {"ib_instances", s.ib_instances}}}};
}

ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig cfg;
  Section top(j, "");
  top.get("out_dir", cfg.out_dir);
  if (top.has("generator")) {
    Section g(top.raw("generator"), "generator");
    g.get("kind", cfg.generator.kind);
    g.get("seed", cfg.generator.seed);
    g.get("n_features", cfg.generator.n_features);
    g.get("y_size", cfg.generator.y_size);
    g.finish();
  }
  if (top.has("solver")) {
    Section s(top.raw("solver"), "solver");
    read_train(s, cfg.solver);
    s.finish();
  }
  if (top.has("net")) cfg.net = read_net(top.raw("net"), "net", cfg.net);
  if (top.has("infoplane")) cfg.infoplane = read_net(top.raw("infoplane"), "infoplane", cfg.infoplane);
  if (top.has("estimator")) {
    Section e(top.raw("estimator"), "estimator");
    e.get("bins", cfg.estimator.bins);
    e.get("n_samples", cfg.estimator.n_samples);
    e.get("seed", cfg.estimator.seed);
    e.finish();
  }
  if (top.has("suite")) {
    SuiteConfig& s = cfg.suite;
    Section r(top.raw("suite"), "suite");
    r.get("seed", s.seed);
    r.get("me_tv_tolerance", s.me_tv_tolerance);
    r.get("condition_tolerance", s.condition_tolerance);
    r.get("theorem_tv_tolerance", s.theorem_tv_tolerance);
    r.get("violation_median_floor", s.violation_median_floor);
    r.get("gradient_tolerance", s.gradient_tolerance);
    r.get("reduction_tv_tolerance", s.reduction_tv_tolerance);
    r.get("fano_slack", s.fano_slack);
    r.get("me_joints", s.me_joints);
    r.get("equiv_instances", s.equiv_instances);
    r.get("violating_instances", s.violating_instances);
    r.get("gradient_points", s.gradient_points);
    r.get("dpi_triples", s.dpi_triples);
    r.get("xor_seeds", s.xor_seeds);
    r.get("ib_instances", s.ib_instances);
    r.finish();
  }
  top.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) { return config_from_json(read_json_file(path)); }

void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path) {
  write_file(path, dump(to_json(cfg)));
}

std::string config_hash(const ExperimentConfig& cfg) {
  Json j = to_json(cfg);
  j.erase("out_dir");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace maxent
