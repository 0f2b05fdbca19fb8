// maxent_lab: generate instances, solve, train, verify, track and run the
// acceptance battery. Exit codes: 0 ok, 1 validation, 2 non-convergence,
// 3 I/O, 4 a hard check failed.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "maxent/config.hpp"
#include "maxent/error.hpp"
#include "maxent/info_plane.hpp"
#include "maxent/suite.hpp"
#include "maxent/tasks.hpp"

namespace fs = std::filesystem;
using namespace maxent;

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kNonConvergence = 2, kIo = 3, kCheckFailed = 4 };

struct Options {
  std::string config_path;
  std::optional<std::string> out_dir;

  std::optional<std::string> kind;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_features;
  std::optional<std::size_t> y_size;
  std::string instance_path;
  std::string output;

  std::string model = "stack";
  std::optional<std::string> task;
  std::optional<std::string> mode;
  std::optional<std::string> order;
  std::optional<std::vector<std::size_t>> hidden;
  std::optional<double> lr;
  std::optional<std::size_t> iters;
  std::optional<std::size_t> sweeps;
  std::optional<std::size_t> inner_iters;
  std::optional<double> beta;
  std::optional<double> l2;
  std::optional<std::size_t> bins;
  std::optional<std::size_t> n_samples;
};

// Output names are relative and stay below the output directory.
fs::path confined(const fs::path& dir, const std::string& name) {
  const fs::path p(name);
  if (name.empty() || p.is_absolute() || p.has_root_name()) {
    throw Error(ErrorKind::kInvalidArgument, "output name must be a relative path: " + name);
  }
  for (const auto& part : p) {
    if (part == "..") throw Error(ErrorKind::kInvalidArgument, "output name may not contain '..': " + name);
  }
  return dir / p;
}

class Lab {
 public:
  explicit Lab(Options o) : o_(std::move(o)) {}

  void prepare() {
    if (!o_.config_path.empty()) cfg_ = load_config(o_.config_path);
    if (const char* env = std::getenv("MAXENT_LAB_OUT"); env != nullptr && *env != '\0') cfg_.out_dir = env;
    if (o_.out_dir) cfg_.out_dir = *o_.out_dir;

    GeneratorConfig& g = cfg_.generator;
    if (o_.kind) g.kind = *o_.kind;
    if (o_.seed) g.seed = *o_.seed;
    if (o_.n_features) g.n_features = *o_.n_features;
    if (o_.y_size) g.y_size = *o_.y_size;
    if (o_.bins) cfg_.estimator.bins = *o_.bins;
    if (o_.n_samples) cfg_.estimator.n_samples = *o_.n_samples;
  }

  void apply_net_flags(NetConfig& n) {
    if (o_.task) n.task = *o_.task;
    if (o_.hidden) n.hidden = *o_.hidden;
    if (o_.lr) n.train.learning_rate = *o_.lr;
    if (o_.iters) n.train.max_iters = *o_.iters;
    if (o_.sweeps) n.train.sweeps = *o_.sweeps;
    if (o_.inner_iters) n.train.inner_iters = *o_.inner_iters;
    if (o_.beta) n.train.beta = *o_.beta;
    if (o_.l2) n.train.l2 = *o_.l2;
    if (o_.seed) n.train.seed = *o_.seed;
    if (o_.mode) {
      if (*o_.mode == "backprop") {
        n.train.mode = TrainMode::kBackprop;
      } else if (*o_.mode == "coordinate") {
        n.train.mode = TrainMode::kCoordinate;
      } else {
        throw Error(ErrorKind::kRangeError, "--mode must be backprop or coordinate");
      }
    }
    if (o_.order) {
      if (*o_.order == "top_down") {
        n.train.order = BlockOrder::kTopDown;
      } else if (*o_.order == "bottom_up") {
        n.train.order = BlockOrder::kBottomUp;
      } else {
        throw Error(ErrorKind::kRangeError, "--order must be top_down or bottom_up");
      }
    }
  }

  int gen() {
    cfg_.validate();
    const Instance inst = instance();
    write(o_.output.empty() ? "instance.json" : o_.output, dump(to_json(inst)));
    summary_ = Json{{"generator", inst.meta.generator}, {"x_size", inst.x_size()}, {"y_size", inst.y_size()},
                    {"n_features", inst.n_features()}};
    return finish("gen", inst.meta.seed);
  }

  int solve_me() {
    cfg_.validate();
    const Instance inst = instance();
    const OriginalMESolution sol = solve_original_me(inst.joint, cfg_.solver);
    Json j = to_json(sol.dual);
    j["conditional"] = to_json(sol.conditional);
    j["iterations"] = sol.iterations;
    j["residual"] = sol.residual;
    write(o_.output.empty() ? "me_solution.json" : o_.output, dump(j));
    summary_ = Json{{"iterations", sol.iterations}, {"residual", sol.residual}};
    return finish("solve-me", inst.meta.seed);
  }

  int train() {
    apply_net_flags(cfg_.net);
    cfg_.validate();
    const SampleSet data = dataset(cfg_.net.task);
    const NetTrainConfig& tc = cfg_.net.train;
    if (o_.model == "softmax") {
      const SoftmaxFit fit = train_feature_softmax(data, tc);
      if (!fit.converged) warn_soft("softmax", fit.iterations, fit.grad_norm);
      write(o_.output.empty() ? "model.json" : o_.output, dump(to_json(fit.params)));
      summary_ = Json{{"loss", fit.loss}, {"iterations", fit.iterations}, {"converged", fit.converged}};
      return finish("train", tc.seed);
    }
    if (o_.model != "stack") throw Error(ErrorKind::kRangeError, "--model must be stack or softmax");
    std::vector<std::size_t> widths{data.dim()};
    widths.insert(widths.end(), cfg_.net.hidden.begin(), cfg_.net.hidden.end());
    LayerStack init = init_stack(widths, data.y_size(), tc.seed);
    const NetFit fit = tc.mode == TrainMode::kBackprop ? train_backprop(std::move(init), data, tc)
                                                       : train_coordinate(std::move(init), data, tc);
    if (!fit.converged) warn_soft(to_string(tc.mode), fit.iterations, fit.grad_norm);
    write(o_.output.empty() ? "model.json" : o_.output, dump(to_json(fit.net)));
    write("trace.csv", trace_csv(fit.trace));
    summary_ = Json{{"objective", fit.final_terms.objective},
                    {"train_error", fit.final_terms.train_error},
                    {"iterations", fit.iterations},
                    {"converged", fit.converged}};
    return finish("train", tc.seed);
  }

  int verify() {
    cfg_.validate();
    const Instance inst = instance();
    const EquivalenceReport rep = verify_equivalence_theorem(inst, cfg_.solver);
    const std::string row = equivalence_csv_row(inst, rep);
    write(o_.output.empty() ? "equivalence.csv" : o_.output, std::string(kEquivalenceCsvHeader) + "\n" + row + "\n");
    Json j{{"equivalence", to_json(rep)}};
    if (inst.n_features() >= 2) j["inequality_chain"] = to_json(verify_inequality_chain(inst));
    j["ib_corollary"] = to_json(verify_ib_corollary(inst, rep.me_conditional));
    write("verify.json", dump(j));
    std::cout << kEquivalenceCsvHeader << '\n' << row << '\n';
    summary_ = Json{{"tv", rep.tv_distance}, {"pass", rep.pass}};
    return finish("verify", inst.meta.seed, rep.pass ? kOk : kCheckFailed);
  }

  int infoplane() {
    apply_net_flags(cfg_.infoplane);
    cfg_.validate();
    const SampleSet data = dataset(cfg_.infoplane.task);
    std::vector<std::size_t> widths{data.dim()};
    widths.insert(widths.end(), cfg_.infoplane.hidden.begin(), cfg_.infoplane.hidden.end());
    const NetTrainConfig& tc = cfg_.infoplane.train;
    const std::vector<std::size_t> schedule = default_schedule(tc.max_iters);
    std::vector<Snapshot> snaps;
    std::size_t next = 0;
    const SnapshotHook hook = [&](std::size_t it, const LayerStack& net) {
      while (next < schedule.size() && schedule[next] < it) ++next;
      if (next < schedule.size() && schedule[next] == it) snaps.emplace_back(it, net);
    };
    LayerStack init = init_stack(widths, data.y_size(), tc.seed);
    const NetFit fit = tc.mode == TrainMode::kBackprop ? train_backprop(std::move(init), data, tc, hook)
                                                       : train_coordinate(std::move(init), data, tc, hook);
    if (!fit.converged) warn_soft(to_string(tc.mode), fit.iterations, fit.grad_norm);
    if (snaps.empty() || snaps.back().first != fit.iterations) snaps.emplace_back(fit.iterations, fit.net);
    const Trajectory traj = track(snaps, data, cfg_.estimator.bins, cfg_.estimator.seed);
    write("trajectory.csv", trajectory_csv(traj));
    write("trajectory.json", dump(to_json(traj)));
    write("infoplane.svg", render_plane_svg(traj));
    summary_ = Json{{"points", traj.points.size()}, {"train_error", fit.final_terms.train_error}};
    return finish("infoplane", tc.seed);
  }

  int suite() {
    cfg_.validate();
    const SuiteResult res = run_suite(cfg_, cfg_.out_dir);
    std::cout << suite_csv(res.checks);
    for (const auto& id : res.failing_ids()) std::cerr << "maxent_lab: check failed: " << id << '\n';
    std::cout << to_json(res.record).dump() << '\n';
    return res.all_pass() ? kOk : kCheckFailed;
  }

 private:
  Instance instance() {
    if (!o_.instance_path.empty()) return instance_from_json(read_json_file(o_.instance_path));
    const GeneratorConfig& g = cfg_.generator;
    if (g.kind == "equiv") return generate_equiv_instance(g.seed, g.n_features, g.y_size);
    if (g.kind == "violate_c1") return generate_violating_instance(g.seed, ViolationKind::kCondition1);
    if (g.kind == "violate_c2") return generate_violating_instance(g.seed, ViolationKind::kCondition2);
    if (g.kind == "xor") return make_xor_instance();
    return generate_random_instance(g.seed);
  }

  SampleSet dataset(const std::string& task) {
    if (task == "xor") return xor_dataset();
    if (task == "bits12") return bits12_dataset(cfg_.estimator.n_samples, cfg_.estimator.seed);
    return instance_samples(instance());
  }

  void write(const std::string& name, const std::string& body) {
    const fs::path p = confined(cfg_.out_dir, name);
    write_file(p, body);
    outputs_.push_back(p.string());
  }

  void warn_soft(const std::string& what, std::size_t iters, double grad) {
    std::cerr << "maxent_lab: warning: " << what << " trainer stopped after " << iters
              << " iterations with gradient norm " << format_number(grad) << '\n';
  }

  int finish(const char* command, std::uint64_t seed, int code = kOk) {
    RunRecord rec;
    rec.command = command;
    rec.config_hash = config_hash(cfg_);
    rec.seed = seed;
    rec.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_).count();
    rec.outputs = outputs_;
    rec.summary = summary_;
    std::cout << to_json(rec).dump() << '\n';
    return code;
  }

  Options o_;
  ExperimentConfig cfg_;
  std::vector<std::string> outputs_;
  Json summary_ = Json::object();
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNonConvergence:
      return kNonConvergence;
    case ErrorKind::kIoError:
      return kIo;
    case ErrorKind::kInvariantViolation:
      return kCheckFailed;
    default:
      return kValidation;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maxent_lab: maximum-entropy and feature-softmax experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--out-dir", o.out_dir, "output directory (overrides MAXENT_LAB_OUT and the config)");

  auto instance_flags = [&](CLI::App* sub) {
    sub->add_option("--kind", o.kind, "equiv | violate_c1 | violate_c2 | xor | random");
    sub->add_option("--seed", o.seed, "instance seed");
    sub->add_option("--n", o.n_features, "number of features");
    sub->add_option("--y", o.y_size, "label alphabet size");
    sub->add_option("--instance", o.instance_path, "read the instance from this JSON file")->check(CLI::ExistingFile);
  };
  auto net_flags = [&](CLI::App* sub) {
    sub->add_option("--task", o.task, "xor | bits12 | instance");
    sub->add_option("--mode", o.mode, "backprop | coordinate");
    sub->add_option("--order", o.order, "top_down | bottom_up");
    sub->add_option("--hidden", o.hidden, "hidden layer widths")->delimiter(',');
    sub->add_option("--lr", o.lr, "learning rate");
    sub->add_option("--iters", o.iters, "iteration budget");
    sub->add_option("--sweeps", o.sweeps, "coordinate sweeps");
    sub->add_option("--inner-iters", o.inner_iters, "steps per block visit");
    sub->add_option("--beta", o.beta, "hidden-entropy weight");
    sub->add_option("--l2", o.l2, "weight decay");
  };

  CLI::App* gen = app.add_subcommand("gen", "emit an instance as JSON");
  instance_flags(gen);
  gen->add_option("--output", o.output, "file name inside the output directory");

  CLI::App* solve = app.add_subcommand("solve-me", "solve the original ME problem on an instance's joint");
  instance_flags(solve);
  solve->add_option("--output", o.output, "file name inside the output directory");

  CLI::App* train = app.add_subcommand("train", "train a feature softmax or a layer stack");
  instance_flags(train);
  net_flags(train);
  train->add_option("--model", o.model, "stack | softmax");
  train->add_option("--output", o.output, "file name inside the output directory");

  CLI::App* verify = app.add_subcommand("verify", "equivalence report, inequality chain and IB check");
  instance_flags(verify);
  verify->add_option("--output", o.output, "CSV file name inside the output directory");

  CLI::App* plane = app.add_subcommand("infoplane", "train, track and plot the information plane");
  net_flags(plane);
  plane->add_option("--seed", o.seed, "initialization seed");
  plane->add_option("--bins", o.bins, "estimator bins");
  plane->add_option("--samples", o.n_samples, "dataset size");

  CLI::App* suite = app.add_subcommand("suite", "run the acceptance battery");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "maxent_lab: " << e.what() << '\n';
    return kValidation;
  }

  try {
    Lab lab(std::move(o));
    lab.prepare();
    if (gen->parsed()) return lab.gen();
    if (solve->parsed()) return lab.solve_me();
    if (train->parsed()) return lab.train();
    if (verify->parsed()) return lab.verify();
    if (plane->parsed()) return lab.infoplane();
    if (suite->parsed()) return lab.suite();
  } catch (const Error& e) {
    std::cerr << "maxent_lab: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "maxent_lab: " << e.what() << '\n';
    return kValidation;
  }
  return kValidation;
}
