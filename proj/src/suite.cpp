#include "maxent/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "maxent/equivalence_lab.hpp"
#include "maxent/error.hpp"
#include "maxent/info_plane.hpp"
#include "maxent/random.hpp"
#include "maxent/tasks.hpp"

namespace maxent {

std::string to_string(Comparison op) {
  switch (op) {
    case Comparison::kLessEqual:
      return "<=";
    case Comparison::kLess:
      return "<";
    case Comparison::kGreaterEqual:
      return ">=";
  }
  return "?";
}

CheckResult make_check(std::string id, std::string metric, Comparison op, double threshold, double value) {
  bool pass = false;
  switch (op) {
    case Comparison::kLessEqual:
      pass = value <= threshold;
      break;
    case Comparison::kLess:
      pass = value < threshold;
      break;
    case Comparison::kGreaterEqual:
      pass = value >= threshold;
      break;
  }
  return CheckResult{std::move(id), std::move(metric), op, threshold, value, pass};
}

Json to_json(const CheckResult& c) {
  return Json{{"check_id", c.check_id}, {"metric", c.metric}, {"op", to_string(c.op)},
              {"threshold", c.threshold}, {"value", c.value},   {"pass", c.pass}};
}

Json to_json(const RunRecord& r) {
  return Json{{"command", r.command},           {"config_hash", r.config_hash}, {"seed", r.seed},
              {"wall_time_ms", r.wall_time_ms}, {"outputs", r.outputs},         {"summary", r.summary}};
}

bool SuiteResult::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::vector<std::string> SuiteResult::failing_ids() const {
  std::vector<std::string> ids;
  for (const auto& c : checks)
    if (!c.pass && (ids.empty() || ids.back() != c.check_id)) ids.push_back(c.check_id);
  return ids;
}

std::string suite_csv(const std::vector<CheckResult>& checks) {
  std::string out = std::string(kSuiteCsvHeader) + "\n";
  for (const auto& c : checks) {
    out += c.check_id + "," + c.metric + "," + format_number(c.threshold) + "," + format_number(c.value) + "," +
           (c.pass ? "true" : "false") + "\n";
  }
  return out;
}

std::vector<double> central_differences(const std::function<double(std::span<const double>)>& f,
                                        std::span<const double> x, double h) {
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    probe[k] = x[k] + h;
    const double up = f(probe);
    probe[k] = x[k] - h;
    const double down = f(probe);
    probe[k] = x[k];
    g[k] = (up - down) / (2.0 * h);
  }
  return g;
}

double max_relative_error(std::span<const double> a, std::span<const double> b, double floor) {
  if (a.size() != b.size()) throw Error(ErrorKind::kDimensionMismatch, "gradient sizes differ");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double scale = std::max({std::abs(a[k]), std::abs(b[k]), floor});
    worst = std::max(worst, std::abs(a[k] - b[k]) / scale);
  }
  return worst;
}

namespace {

constexpr double kFdStep = 1e-5;

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double max_row_tv(const ConditionalTable& a, const ConditionalTable& b) {
  double worst = 0.0;
  for (std::size_t x = 0; x < a.x_size; ++x) worst = std::max(worst, total_variation(a.row(x), b.row(x)));
  return worst;
}

std::vector<double> flat_softmax(const SoftmaxParams& p) {
  std::vector<double> v = p.lambda;
  v.insert(v.end(), p.bias.begin(), p.bias.end());
  return v;
}

SoftmaxParams softmax_from_flat(std::size_t y_size, std::size_t n, std::span<const double> v) {
  SoftmaxParams p = SoftmaxParams::zeros(y_size, n);
  std::copy(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(y_size * n), p.lambda.begin());
  std::copy(v.begin() + static_cast<std::ptrdiff_t>(y_size * n), v.end(), p.bias.begin());
  return p;
}

class Battery {
 public:
  explicit Battery(const ExperimentConfig& cfg) : cfg_(cfg), s_(cfg.suite) {}

  SuiteResult run() {
    timed("01-me-oracle", [&] { me_oracle(); });
    timed("02-equivalence", [&] { equivalence(); });
    timed("03-violation-control", [&] { violation_control(); });
    timed("04-gradients", [&] { gradients(); });
    timed("05-data-processing", [&] { data_processing(); });
    timed("06-xor-chain", [&] { xor_chain(); });
    timed("07-reduction", [&] { reduction(); });
    timed("08-coordinate-vs-backprop", [&] { coordinate_vs_backprop(); });
    timed("09-ib-corollary", [&] { ib_corollary(); });
    timed("10-info-plane", [&] { info_plane(); });
    std::stable_sort(result_.checks.begin(), result_.checks.end(),
                     [](const CheckResult& a, const CheckResult& b) { return a.check_id < b.check_id; });
    return std::move(result_);
  }

  std::string equivalence_rows;
  Trajectory trajectory;

 private:
  std::uint64_t seed_for(std::size_t k) const { return s_.seed ^ static_cast<std::uint64_t>(k); }

  void timed(const char* id, const std::function<void()>& body) {
    const auto t0 = Clock::now();
    id_ = id;
    body();
    result_.timings.push_back({id, ms_since(t0)});
  }

  void check(const char* metric, Comparison op, double threshold, double value) {
    result_.checks.push_back(make_check(id_, metric, op, threshold, value));
  }

  void me_oracle() {
    double worst = 0.0;
    for (std::size_t k = 0; k < s_.me_joints; ++k) {
      Rng rng(seed_for(k));
      std::vector<double> w(8 * 5);
      for (double& v : w) v = rng.uniform();
      const JointTable joint = JointTable::from_weights({8, 5}, std::move(w));
      const OriginalMESolution sol = solve_original_me(joint, cfg_.solver);
      worst = std::max(worst, max_row_tv(sol.conditional, empirical_conditional(joint)));
    }
    check("max_row_tv", Comparison::kLessEqual, s_.me_tv_tolerance, worst);
  }

  void equivalence() {
    double c1 = 0.0, c2 = 0.0, tv = 0.0;
    const EquivalenceTolerances tol{EquivalenceTolerances{}.condition, s_.theorem_tv_tolerance};
    for (std::size_t k = 0; k < s_.equiv_instances; ++k) {
      const Instance inst = generate_equiv_instance(seed_for(k), 1 + k % 6, 2 + k % 3);
      const EquivalenceReport r = verify_equivalence_theorem(inst, cfg_.solver, tol);
      c1 = std::max(c1, r.i_xy_given_t);
      c2 = std::max(c2, r.max_pairwise_i_titj_given_y);
      tv = std::max(tv, r.tv_distance);
      equivalence_rows += equivalence_csv_row(inst, r) + "\n";
    }
    check("max_i_xy_given_t", Comparison::kLessEqual, s_.condition_tolerance, c1);
    check("max_i_titj_given_y", Comparison::kLessEqual, s_.condition_tolerance, c2);
    check("max_tv", Comparison::kLessEqual, s_.theorem_tv_tolerance, tv);
  }

  void violation_control() {
    std::vector<double> tvs;
    for (std::size_t k = 0; k < s_.violating_instances; ++k) {
      const Instance inst = generate_violating_instance(seed_for(k), ViolationKind::kCondition1);
      tvs.push_back(verify_equivalence_theorem(inst, cfg_.solver).tv_distance);
    }
    std::sort(tvs.begin(), tvs.end());
    const std::size_t m = tvs.size();
    const double median = m % 2 ? tvs[m / 2] : 0.5 * (tvs[m / 2 - 1] + tvs[m / 2]);
    check("median_tv", Comparison::kGreaterEqual, s_.violation_median_floor, median);
  }

  void gradients() {
    double soft = 0.0;
    for (std::size_t k = 0; k < s_.gradient_points; ++k) {
      const Instance inst = generate_random_instance(seed_for(k));
      const SampleSet data = instance_samples(inst);
      Rng rng(seed_for(k) + 1);
      SoftmaxParams p = SoftmaxParams::zeros(inst.y_size(), inst.n_features());
      for (double& v : p.lambda) v = rng.uniform(-1.0, 1.0);
      for (double& v : p.bias) v = rng.uniform(-1.0, 1.0);
      constexpr double kL2 = 0.01;
      const auto f = [&](std::span<const double> v) {
        return softmax_objective(softmax_from_flat(p.y_size, p.n_features, v), data, kL2);
      };
      const std::vector<double> x = flat_softmax(p);
      soft = std::max(soft, max_relative_error(flat_softmax(softmax_gradient(p, data, kL2)),
                                               central_differences(f, x, kFdStep)));
    }
    check("softmax_max_rel_err", Comparison::kLessEqual, s_.gradient_tolerance, soft);

    for (double beta : {0.0, 0.1}) {
      double worst = 0.0;
      for (std::size_t k = 0; k < s_.gradient_points; ++k) {
        Rng rng(seed_for(k) + 2);
        std::vector<Sample> rows;
        for (std::size_t r = 0; r < 16; ++r) {
          rows.push_back({{rng.uniform(), rng.uniform(), rng.uniform()}, rng.below(3), 0.5 + rng.uniform()});
        }
        const SampleSet data(std::move(rows), 3);
        LayerStack net({3, 4, 3}, 3);
        std::vector<double> x = net.flatten();
        for (double& v : x) v = rng.uniform(-1.0, 1.0);
        net.unflatten(x);
        NetTrainConfig nc;
        nc.beta = beta;
        nc.l2 = 0.01;
        LayerStack probe = net;
        const auto f = [&](std::span<const double> v) {
          probe.unflatten(v);
          return evaluate_objective(probe, data, nc).objective;
        };
        worst = std::max(worst, max_relative_error(objective_gradient(net, data, nc), central_differences(f, x, kFdStep)));
      }
      check(beta == 0.0 ? "stack_beta0_max_rel_err" : "stack_beta0.1_max_rel_err", Comparison::kLessEqual,
            s_.gradient_tolerance, worst);
    }
  }

  void data_processing() {
    std::size_t violations = 0;
    constexpr double kSlack = 1e-9;
    for (std::size_t k = 0; k < s_.dpi_triples; ++k) {
      const Instance inst = generate_random_instance(seed_for(k));
      const JointTable triple = induce_triple(inst.joint, inst.features);
      if (mutual_information(triple.marginal_pair(1, 2)) > mutual_information(inst.joint) + kSlack) ++violations;
      const std::vector<double> pt = triple.marginal(1);
      const std::size_t n = inst.n_features();
      for (std::size_t i = 0; i < n; ++i) {
        const double i_tix = mutual_information(feature_input_table(inst, i));
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j) continue;
          std::vector<double> pair(4, 0.0);
          for (std::size_t c = 0; c < pt.size(); ++c) pair[((c >> i) & 1) * 2 + ((c >> j) & 1)] += pt[c];
          if (mutual_information(JointTable::from_weights({2, 2}, std::move(pair))) > i_tix + kSlack) ++violations;
        }
      }
    }
    check("violations", Comparison::kLessEqual, 0.0, static_cast<double>(violations));
  }

  void xor_chain() {
    const InequalityChain c = verify_inequality_chain(make_xor_instance());
    check("paper_claim_holds", Comparison::kLessEqual, 0.0, c.paper_claim_holds ? 1.0 : 0.0);
    check("abs_max_i_titj_given_y_minus_ln2", Comparison::kLessEqual, 1e-9,
          std::abs(c.max_i_titj_given_y - std::numbers::ln2));
    check("max_i_titj", Comparison::kLessEqual, 1e-9, c.max_i_titj);
  }

  void reduction() {
    const Instance inst = generate_equiv_instance(seed_for(0), 3, 3);
    const SampleSet data = instance_samples(inst);
    const SoftmaxFit soft = train_feature_softmax(data, cfg_.solver);
    NetTrainConfig nc;
    static_cast<TrainConfig&>(nc) = cfg_.solver;
    const NetFit stack = train_backprop(LayerStack({inst.n_features()}, inst.y_size()), data, nc);
    double worst = 0.0;
    for (std::size_t x = 0; x < inst.x_size(); ++x) {
      const auto t = inst.features.row(x);
      worst = std::max(worst, total_variation(softmax_predict(soft.params, t), forward(stack.net, t).output));
    }
    check("max_tv", Comparison::kLessEqual, s_.reduction_tv_tolerance, worst);
  }

  void coordinate_vs_backprop() {
    const SampleSet data = xor_dataset();
    std::size_t close = 0, learned = 0;
    std::vector<std::size_t> widths{data.dim()};
    widths.insert(widths.end(), cfg_.net.hidden.begin(), cfg_.net.hidden.end());
    for (std::size_t k = 0; k < s_.xor_seeds; ++k) {
      NetTrainConfig nc = cfg_.net.train;
      nc.mode = TrainMode::kBackprop;
      const NetFit bp = train_backprop(init_stack(widths, 2, seed_for(k)), data, nc);
      nc.mode = TrainMode::kCoordinate;
      const NetFit cd = train_coordinate(init_stack(widths, 2, seed_for(k)), data, nc);
      const double a = bp.final_terms.objective, b = cd.final_terms.objective;
      if (std::abs(b - a) <= 0.1 * a) ++close;
      if (bp.final_terms.train_error < 0.05) ++learned;
    }
    const double need = std::ceil(0.8 * static_cast<double>(s_.xor_seeds));
    check("seeds_loss_within_10pct", Comparison::kGreaterEqual, need, static_cast<double>(close));
    check("seeds_backprop_error_below_5pct", Comparison::kGreaterEqual, need, static_cast<double>(learned));
  }

  void ib_corollary() {
    double worst = 0.0;
    for (std::size_t k = 0; k < s_.ib_instances; ++k) {
      const Instance inst = generate_equiv_instance(seed_for(k), 1 + k % 6, 2 + k % 3);
      const OriginalMESolution sol = solve_original_me(inst.joint, cfg_.solver);
      worst = std::max(worst, verify_ib_corollary(inst, sol.conditional).gap);
    }
    check("max_gap", Comparison::kLessEqual, 1e-9, worst);
  }

  void info_plane() {
    const SampleSet data = bits12_dataset(cfg_.estimator.n_samples, cfg_.estimator.seed);
    std::vector<std::size_t> widths{data.dim()};
    widths.insert(widths.end(), cfg_.infoplane.hidden.begin(), cfg_.infoplane.hidden.end());
    NetTrainConfig nc = cfg_.infoplane.train;
    nc.mode = TrainMode::kBackprop;
    const std::vector<std::size_t> schedule = default_schedule(nc.max_iters);
    std::vector<Snapshot> snaps;
    std::size_t next = 0;
    const NetFit fit = train_backprop(init_stack(widths, data.y_size(), nc.seed), data, nc,
                                      [&](std::size_t it, const LayerStack& net) {
                                        while (next < schedule.size() && schedule[next] < it) ++next;
                                        if (next < schedule.size() && schedule[next] == it) snaps.emplace_back(it, net);
                                      });
    if (snaps.empty() || snaps.back().first != fit.iterations) snaps.emplace_back(fit.iterations, fit.net);

    trajectory = track(snaps, data, cfg_.estimator.bins, cfg_.estimator.seed);
    const Trajectory again = track(snaps, data, cfg_.estimator.bins, cfg_.estimator.seed);

    const double ln_y = std::log(static_cast<double>(data.y_size()));
    double excess = -ln_y;
    double top = 0.0;
    for (const auto& p : trajectory.points) {
      excess = std::max(excess, p.i_ty - ln_y);
      if (p.epoch == fit.iterations && p.layer == fit.net.depth()) top = p.i_ty;
    }
    const auto labels = data.labels();
    check("final_train_error", Comparison::kLess, 0.05, fit.final_terms.train_error);
    check("max_i_ty_minus_ln_y", Comparison::kLessEqual, 1e-9, excess);
    check("label_entropy_minus_top_i_ty", Comparison::kLessEqual, s_.fano_slack, empirical_entropy(labels) - top);
    check("repeat_track_mismatch", Comparison::kLessEqual, 0.0, again == trajectory ? 0.0 : 1.0);
  }

  const ExperimentConfig& cfg_;
  const SuiteConfig& s_;
  SuiteResult result_;
  std::string id_;
};

}  // namespace

SuiteResult run_suite(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  cfg.validate();
  const auto t0 = Clock::now();
  Battery battery(cfg);
  SuiteResult result = battery.run();

  const std::string hash = config_hash(cfg);
  Json checks = Json::array();
  for (const auto& c : result.checks) checks.push_back(to_json(c));
  Json experiment = to_json(cfg);
  experiment.erase("out_dir");
  const Json doc{{"config_hash", hash}, {"config", experiment}, {"all_pass", result.all_pass()},
                 {"failing", result.failing_ids()}, {"checks", checks}};

  const std::vector<std::pair<std::string, std::string>> files{
      {"suite.csv", suite_csv(result.checks)},
      {"suite.json", dump(doc)},
      {"equivalence.csv", std::string(kEquivalenceCsvHeader) + "\n" + battery.equivalence_rows},
      {"trajectory.csv", trajectory_csv(battery.trajectory)},
      {"infoplane.svg", render_plane_svg(battery.trajectory)}};
  RunRecord& rec = result.record;
  for (const auto& [name, body] : files) {
    write_file(out_dir / name, body);
    rec.outputs.push_back((out_dir / name).string());
  }
  rec.command = "suite";
  rec.config_hash = hash;
  rec.seed = cfg.suite.seed;
  rec.summary = Json{{"checks", result.checks.size()},
                     {"failed", std::count_if(result.checks.begin(), result.checks.end(),
                                              [](const CheckResult& c) { return !c.pass; })},
                     {"failing_ids", result.failing_ids()}};
  rec.wall_time_ms = ms_since(t0);
  return result;
}

}  // namespace maxent
