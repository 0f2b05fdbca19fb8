#include "maxent/serialize.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "maxent/error.hpp"

namespace maxent {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string status_name(ConditionStatus s) {
  return s == ConditionStatus::kSatisfied ? "satisfied" : "violated";
}

ConditionStatus status_from(const std::string& s) {
  if (s == "satisfied") return ConditionStatus::kSatisfied;
  if (s == "violated") return ConditionStatus::kViolated;
  throw Error(ErrorKind::kParseError, "condition status must be satisfied|violated, got " + s);
}

Json rows_of(std::span<const double> flat, std::size_t cols) {
  Json out = Json::array();
  if (cols == 0) return out;
  for (std::size_t r = 0; r * cols < flat.size(); ++r) {
    out.push_back(std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(r * cols),
                                      flat.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols)));
  }
  return out;
}

std::vector<double> flatten_rows(const Json& rows, std::size_t expect_rows, std::size_t cols) {
  if (!rows.is_array() || rows.size() != expect_rows) {
    throw Error(ErrorKind::kParseError, "expected " + std::to_string(expect_rows) + " rows");
  }
  std::vector<double> flat;
  for (const Json& r : rows) {
    const auto v = r.get<std::vector<double>>();
    if (v.size() != cols) throw Error(ErrorKind::kParseError, "row has the wrong number of columns");
    flat.insert(flat.end(), v.begin(), v.end());
  }
  return flat;
}

// Converts nlohmann's exceptions into the lab's ParseError.
template <typename F>
auto parsing(const char* what, F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kParseError, std::string(what) + ": " + e.what());
  }
}

}  // namespace

Json to_json(const JointTable& t) {
  return Json{{"dims", t.dims()}, {"probs", std::vector<double>(t.probs().begin(), t.probs().end())}};
}

JointTable joint_from_json(const Json& j) {
  return parsing("joint table", [&] {
    return JointTable(j.at("dims").get<std::vector<std::size_t>>(), j.at("probs").get<std::vector<double>>());
  });
}

Json to_json(const FeatureMap& f) {
  return Json{{"x_size", f.x_size()}, {"n_features", f.n_features()}, {"t", rows_of(f.values(), f.n_features())}};
}

FeatureMap features_from_json(const Json& j) {
  return parsing("feature map", [&] {
    const auto nx = j.at("x_size").get<std::size_t>();
    const auto n = j.at("n_features").get<std::size_t>();
    std::vector<double> t = n == 0 ? std::vector<double>{} : flatten_rows(j.at("t"), nx, n);
    return FeatureMap(nx, n, std::move(t));
  });
}

Json to_json(const Instance& inst) {
  return Json{{"generator", inst.meta.generator},
              {"seed", inst.meta.seed},
              {"condition1", status_name(inst.meta.condition1)},
              {"condition2", status_name(inst.meta.condition2)},
              {"joint", to_json(inst.joint)},
              {"features", to_json(inst.features)}};
}

Instance instance_from_json(const Json& j) {
  return parsing("instance", [&] {
    InstanceMeta meta{j.at("generator").get<std::string>(), j.at("seed").get<std::uint64_t>(),
                      status_from(j.at("condition1").get<std::string>()),
                      status_from(j.at("condition2").get<std::string>())};
    return Instance(joint_from_json(j.at("joint")), features_from_json(j.at("features")), std::move(meta));
  });
}

Json to_json(const SoftmaxParams& p) {
  return Json{{"lambda", rows_of(p.lambda, p.n_features)}, {"bias", p.bias}};
}

SoftmaxParams softmax_from_json(const Json& j) {
  return parsing("softmax params", [&] {
    SoftmaxParams p;
    p.bias = j.at("bias").get<std::vector<double>>();
    p.y_size = p.bias.size();
    const Json& rows = j.at("lambda");
    p.n_features = rows.empty() ? 0 : rows.front().size();
    p.lambda = p.n_features == 0 ? std::vector<double>{} : flatten_rows(rows, p.y_size, p.n_features);
    return p;
  });
}

Json to_json(const MEDualParams& p) { return Json{{"omega", rows_of(p.omega, p.y_size)}}; }

Json to_json(const ConditionalTable& c) { return rows_of(c.probs, c.y_size); }

Json to_json(const LayerStack& net) {
  Json layers = Json::array();
  for (const Layer& l : net.layers()) layers.push_back(Json{{"weights", l.weights}, {"biases", l.biases}});
  return Json{{"widths", net.widths()}, {"y_size", net.y_size()}, {"layers", layers}, {"head", to_json(net.head())}};
}

LayerStack stack_from_json(const Json& j) {
  return parsing("layer stack", [&] {
    LayerStack net(j.at("widths").get<std::vector<std::size_t>>(), j.at("y_size").get<std::size_t>());
    const Json& layers = j.at("layers");
    if (layers.size() != net.depth()) throw Error(ErrorKind::kParseError, "layer count differs from widths");
    for (std::size_t l = 0; l < net.depth(); ++l) {
      Layer& dst = net.layers()[l];
      auto w = layers[l].at("weights").get<std::vector<double>>();
      auto b = layers[l].at("biases").get<std::vector<double>>();
      if (w.size() != dst.weights.size() || b.size() != dst.biases.size()) {
        throw Error(ErrorKind::kParseError, "layer " + std::to_string(l + 1) + " has the wrong shape");
      }
      dst.weights = std::move(w);
      dst.biases = std::move(b);
    }
    SoftmaxParams head = softmax_from_json(j.at("head"));
    if (head.y_size != net.y_size() || (head.n_features != net.widths().back() && !head.lambda.empty())) {
      throw Error(ErrorKind::kParseError, "head shape differs from widths");
    }
    head.n_features = net.widths().back();
    if (head.lambda.empty()) head.lambda.assign(head.y_size * head.n_features, 0.0);
    net.head() = std::move(head);
    return net;
  });
}

Json to_json(const EquivalenceReport& r) {
  return Json{{"i_xy_given_t", r.i_xy_given_t},
              {"max_i_titj_given_y", r.max_pairwise_i_titj_given_y},
              {"tv", r.tv_distance},
              {"conditions_hold", r.conditions_hold},
              {"pass", r.pass},
              {"softmax_converged", r.softmax_converged},
              {"softmax", to_json(r.softmax)},
              {"me_conditional", to_json(r.me_conditional)},
              {"softmax_conditional", to_json(r.softmax_conditional)}};
}

Json to_json(const InequalityChain& c) {
  return Json{{"i_xt", c.i_xt},
              {"max_i_titj", c.max_i_titj},
              {"max_i_titj_given_y", c.max_i_titj_given_y},
              {"paper_claim_holds", c.paper_claim_holds}};
}

Json to_json(const IbCorollary& c) {
  return Json{{"i_ty", c.i_ty}, {"i_xy", c.i_xy}, {"gap", c.gap}, {"i_xt", c.i_xt}};
}

Json to_json(const Trajectory& t) {
  Json pts = Json::array();
  for (const auto& p : t.points) {
    pts.push_back(Json{{"epoch", p.epoch}, {"layer", p.layer}, {"i_xt", p.i_xt}, {"i_ty", p.i_ty}});
  }
  return Json{{"bins", t.estimator.bins},
              {"n_samples", t.estimator.n_samples},
              {"seed", t.estimator.seed},
              {"points", pts}};
}

std::string equivalence_csv_row(const Instance& inst, const EquivalenceReport& r) {
  std::ostringstream os;
  os << inst.meta.seed << ',' << inst.n_features() << ',' << inst.y_size() << ','
     << format_number(r.i_xy_given_t) << ',' << format_number(r.max_pairwise_i_titj_given_y) << ','
     << format_number(r.tv_distance) << ',' << (r.pass ? "true" : "false");
  return os.str();
}

std::string trace_csv(const TrainTrace& trace) {
  std::ostringstream os;
  os << kTraceCsvHeader << '\n';
  for (const auto& r : trace.records) {
    os << r.iteration << ',' << format_number(r.loss) << ',' << format_number(r.reg_term) << ','
       << format_number(r.train_error) << '\n';
  }
  return os.str();
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  os << kTrajectoryCsvHeader << '\n';
  for (const auto& p : traj.points) {
    os << p.epoch << ',' << p.layer << ',' << format_number(p.i_xt) << ',' << format_number(p.i_ty) << ','
       << traj.estimator.bins << ',' << traj.estimator.n_samples << ',' << traj.estimator.seed << '\n';
  }
  return os.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIoError, "cannot write " + path.string());
  out << contents;
  if (!out) throw Error(ErrorKind::kIoError, "failed writing " + path.string());
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorKind::kParseError, path.string() + ": line " + std::to_string(line) + ", column " +
                                            std::to_string(col) + ": " + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace maxent
