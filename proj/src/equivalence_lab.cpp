#include "maxent/equivalence_lab.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "maxent/error.hpp"
#include "maxent/random.hpp"

namespace maxent {

Instance::Instance(JointTable joint_xy, FeatureMap feature_map, InstanceMeta m)
    : joint(std::move(joint_xy)), features(std::move(feature_map)), meta(std::move(m)) {
  if (joint.rank() != 2) throw Error(ErrorKind::kDimensionMismatch, "instance joint must be P(X,Y)");
  if (features.x_size() != joint.dim(0)) {
    throw Error(ErrorKind::kDimensionMismatch, "feature map x_size differs from joint X dimension");
  }
}

namespace {

void require_enumerable(const Instance& inst) {
  if (inst.n_features() > kMaxFeatures) {
    throw Error(ErrorKind::kTooManyFeatures,
                std::to_string(inst.n_features()) + " features exceed the enumeration cap of 16");
  }
}

// P(T = c, Y = y) from the enumerated triple, row-major [2^n x y_size].
JointTable config_label_table(const Instance& inst) {
  const JointTable triple = induce_triple(inst.joint, inst.features);
  return triple.marginal_pair(1, 2);
}

JointTable pair_from_configs(const JointTable& ty, std::size_t i, std::size_t j) {
  const std::size_t ny = ty.dim(1);
  std::vector<double> out(4 * ny, 0.0);
  for (std::size_t c = 0; c < ty.dim(0); ++c) {
    const std::size_t a = (c >> i) & 1U, b = (c >> j) & 1U;
    for (std::size_t y = 0; y < ny; ++y) out[(a * 2 + b) * ny + y] += ty(c, y);
  }
  return JointTable({2, 2, ny}, std::move(out));
}

// P(T_i, T_j) from P(T) over configurations.
JointTable unconditional_pair(const std::vector<double>& pt, std::size_t i, std::size_t j) {
  std::vector<double> out(4, 0.0);
  for (std::size_t c = 0; c < pt.size(); ++c) out[((c >> i) & 1U) * 2 + ((c >> j) & 1U)] += pt[c];
  return JointTable({2, 2}, std::move(out));
}

}  // namespace

double check_condition1(const Instance& inst) {
  require_enumerable(inst);
  const JointTable triple = induce_triple(inst.joint, inst.features);
  return conditional_mutual_information(triple, 1);
}

double check_condition2(const Instance& inst) {
  require_enumerable(inst);
  const std::size_t n = inst.n_features();
  if (n < 2) return 0.0;
  const JointTable ty = config_label_table(inst);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      worst = std::max(worst, conditional_mutual_information(pair_from_configs(ty, i, j), 2));
  return worst;
}

JointTable pair_given_label_table(const Instance& inst, std::size_t i, std::size_t j) {
  const std::size_t n = inst.n_features();
  if (i >= n || j >= n || i == j) throw Error(ErrorKind::kInvalidArgument, "feature pair out of range");
  const std::size_t ny = inst.y_size();
  std::vector<double> out(4 * ny, 0.0);
  for (std::size_t x = 0; x < inst.x_size(); ++x) {
    const double ti = inst.features(x, i), tj = inst.features(x, j);
    const double pi[2] = {1.0 - ti, ti}, pj[2] = {1.0 - tj, tj};
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t y = 0; y < ny; ++y) out[(a * 2 + b) * ny + y] += inst.joint(x, y) * pi[a] * pj[b];
  }
  return JointTable({2, 2, ny}, std::move(out));
}

JointTable feature_input_table(const Instance& inst, std::size_t i) {
  if (i >= inst.n_features()) throw Error(ErrorKind::kInvalidArgument, "feature index out of range");
  const auto px = inst.joint.marginal(0);
  const std::size_t nx = inst.x_size();
  std::vector<double> out(2 * nx, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    const double t = inst.features(x, i);
    out[x] = px[x] * (1.0 - t);
    out[nx + x] = px[x] * t;
  }
  return JointTable({2, nx}, std::move(out));
}

Instance generate_equiv_instance(std::uint64_t seed, std::size_t n_features, std::size_t y_size) {
  if (n_features < 1 || n_features > 6) {
    throw Error(ErrorKind::kRangeError, "equiv instances take 1..6 features");
  }
  if (y_size < 2 || y_size > 4) throw Error(ErrorKind::kRangeError, "equiv instances take 2..4 classes");
  Rng rng(seed);
  std::vector<double> prior(y_size);
  for (double& p : prior) p = 0.5 + rng.uniform();
  std::vector<double> q(y_size * n_features);
  for (double& v : q) v = rng.uniform(0.15, 0.85);

  const std::size_t nx = std::size_t{1} << n_features;
  std::vector<double> w(nx * y_size);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < y_size; ++y) {
      double p = prior[y];
      for (std::size_t i = 0; i < n_features; ++i) {
        const double qi = q[y * n_features + i];
        p *= ((x >> i) & 1U) ? qi : 1.0 - qi;
      }
      w[x * y_size + y] = p;
    }
  return Instance(JointTable::from_weights({nx, y_size}, std::move(w)), FeatureMap::binary_code(n_features),
                  InstanceMeta{"equiv", seed, ConditionStatus::kSatisfied, ConditionStatus::kSatisfied});
}

namespace {

Instance draw_violate_c1(Rng& rng, std::uint64_t seed) {
  const std::size_t nx = 4 + rng.below(5);
  const std::size_t ny = 2 + rng.below(3);
  std::vector<double> w(nx * ny);
  for (std::size_t x = 0; x < nx; ++x) {
    const double px = 0.5 + rng.uniform();
    double row = 0.0;
    std::vector<double> cond(ny);
    for (double& c : cond) {
      const double e = rng.exponential();
      c = 1e-3 + e * e * e;
      row += c;
    }
    for (std::size_t y = 0; y < ny; ++y) w[x * ny + y] = px * cond[y] / row;
  }
  std::vector<double> t(nx);
  for (double& v : t) v = rng.uniform();
  return Instance(JointTable::from_weights({nx, ny}, std::move(w)), FeatureMap(nx, 1, std::move(t)),
                  InstanceMeta{"violate_c1", seed, ConditionStatus::kViolated, ConditionStatus::kSatisfied});
}

Instance draw_violate_c2(Rng& rng, std::uint64_t seed) {
  const std::size_t n = 2 + rng.below(3);
  const std::size_t nx = std::size_t{1} << n;
  std::vector<double> bit_p(n);
  for (double& p : bit_p) p = rng.uniform(0.3, 0.7);
  const double noise = rng.uniform(0.0, 0.05);
  std::vector<double> w(nx * 2);
  for (std::size_t x = 0; x < nx; ++x) {
    double px = 1.0;
    for (std::size_t i = 0; i < n; ++i) px *= ((x >> i) & 1U) ? bit_p[i] : 1.0 - bit_p[i];
    const std::size_t parity = ((x & 1U) ^ ((x >> 1) & 1U));
    w[x * 2 + parity] = px * (1.0 - noise);
    w[x * 2 + (1 - parity)] = px * noise;
  }
  return Instance(JointTable::from_weights({nx, 2}, std::move(w)), FeatureMap::binary_code(n),
                  InstanceMeta{"violate_c2", seed, ConditionStatus::kSatisfied, ConditionStatus::kViolated});
}

}  // namespace

Instance generate_violating_instance(std::uint64_t seed, ViolationKind kind) {
  Rng rng(seed);
  for (std::size_t attempt = 0; attempt < kRejectionBudget; ++attempt) {
    if (kind == ViolationKind::kCondition1) {
      Instance inst = draw_violate_c1(rng, seed);
      if (check_condition1(inst) >= kViolateC1Floor) return inst;
    } else {
      Instance inst = draw_violate_c2(rng, seed);
      if (check_condition2(inst) >= kViolateC2Floor) return inst;
    }
  }
  throw Error(ErrorKind::kRejectionBudgetExceeded,
              "no violating instance within " + std::to_string(kRejectionBudget) + " draws");
}

Instance make_xor_instance() {
  std::vector<double> p(4 * 2, 0.0);
  for (std::size_t x = 0; x < 4; ++x) p[x * 2 + ((x & 1U) ^ (x >> 1))] = 0.25;
  return Instance(JointTable({4, 2}, std::move(p)), FeatureMap::binary_code(2),
                  InstanceMeta{"xor", 0, ConditionStatus::kSatisfied, ConditionStatus::kViolated});
}

Instance generate_random_instance(std::uint64_t seed, std::size_t max_x, std::size_t max_y,
                                  std::size_t max_features) {
  if (max_x < 2 || max_y < 2 || max_features < 2 || max_features > kMaxFeatures) {
    throw Error(ErrorKind::kRangeError, "random instance bounds must be >= 2 (features <= 16)");
  }
  Rng rng(seed);
  const std::size_t nx = 2 + rng.below(max_x - 1);
  const std::size_t ny = 2 + rng.below(max_y - 1);
  const std::size_t n = 2 + rng.below(max_features - 1);
  std::vector<double> w(nx * ny);
  for (double& v : w) v = rng.bernoulli(0.15) ? 0.0 : rng.exponential();
  w[rng.below(w.size())] += 1.0;
  std::vector<double> t(nx * n);
  for (double& v : t) {
    const double u = rng.uniform();
    // Mix hard and soft confidences so deterministic features get exercised.
    v = u < 0.2 ? 0.0 : (u < 0.4 ? 1.0 : rng.uniform());
  }
  return Instance(JointTable::from_weights({nx, ny}, std::move(w)), FeatureMap(nx, n, std::move(t)),
                  InstanceMeta{"random", seed, ConditionStatus::kViolated, ConditionStatus::kViolated});
}

EquivalenceReport verify_equivalence_theorem(const Instance& inst, const TrainConfig& cfg,
                                             const EquivalenceTolerances& tol) {
  EquivalenceReport rep;
  rep.i_xy_given_t = check_condition1(inst);
  rep.max_pairwise_i_titj_given_y = check_condition2(inst);
  rep.conditions_hold = rep.i_xy_given_t <= tol.condition && rep.max_pairwise_i_titj_given_y <= tol.condition;

  rep.me_conditional = solve_original_me(inst.joint, cfg).conditional;

  const std::size_t nx = inst.x_size(), ny = inst.y_size();
  std::vector<Sample> rows;
  for (std::size_t x = 0; x < nx; ++x) {
    const auto t = inst.features.row(x);
    for (std::size_t y = 0; y < ny; ++y) {
      const double p = inst.joint(x, y);
      if (p > 0.0) rows.push_back(Sample{std::vector<double>(t.begin(), t.end()), y, p});
    }
  }
  const SoftmaxFit fit = train_feature_softmax(SampleSet(std::move(rows), ny), cfg);
  rep.softmax = fit.params;
  rep.softmax_converged = fit.converged;

  const auto px = inst.joint.marginal(0);
  rep.softmax_conditional = ConditionalTable{nx, ny, std::vector<double>(nx * ny)};
  for (std::size_t x = 0; x < nx; ++x) {
    std::span<double> out(rep.softmax_conditional.probs.data() + x * ny, ny);
    softmax_predict_into(fit.params, inst.features.row(x), out);
    if (px[x] > 0.0) {
      rep.tv_distance = std::max(rep.tv_distance, total_variation(out, rep.me_conditional.row(x)));
    }
  }
  rep.tv_distance = std::min(rep.tv_distance, 1.0);
  rep.pass = !rep.conditions_hold || rep.tv_distance <= tol.tv;
  return rep;
}

InequalityChain verify_inequality_chain(const Instance& inst) {
  require_enumerable(inst);
  const std::size_t n = inst.n_features();
  if (n < 2) throw Error(ErrorKind::kInvalidArgument, "inequality chain needs at least two features");

  const JointTable triple = induce_triple(inst.joint, inst.features);
  InequalityChain chain;
  chain.i_xt = mutual_information(triple.marginal_pair(0, 1));
  const std::vector<double> pt = triple.marginal(1);
  const JointTable ty = triple.marginal_pair(1, 2);

  std::vector<double> i_tx(n);
  for (std::size_t i = 0; i < n; ++i) i_tx[i] = mutual_information(feature_input_table(inst, i));

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double unconditional = mutual_information(unconditional_pair(pt, i, j));
      const double conditional = conditional_mutual_information(pair_from_configs(ty, i, j), 2);
      if (unconditional > std::min(i_tx[i], i_tx[j]) + 1e-9) {
        throw Error(ErrorKind::kInvariantViolation,
                    "data processing violated: I(T" + std::to_string(i) + ";T" + std::to_string(j) +
                        ") = " + std::to_string(unconditional) + " exceeds min I(T;X)");
      }
      chain.max_i_titj = std::max(chain.max_i_titj, unconditional);
      chain.max_i_titj_given_y = std::max(chain.max_i_titj_given_y, conditional);
    }
  chain.paper_claim_holds = chain.max_i_titj_given_y <= chain.max_i_titj + 1e-9;
  return chain;
}

}  // namespace maxent
