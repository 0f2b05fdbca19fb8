#pragma once

// Empirical checks of when a softmax over features T reproduces the original
// maximum-entropy conditional: the two feature conditions, generators that
// satisfy or break them, and the mutual-information chain behind the
// relaxed feature objective.

#include <cstddef>
#include <cstdint>
#include <string>

#include "maxent/discrete_prob.hpp"
#include "maxent/maxent_core.hpp"

namespace maxent {

enum class ConditionStatus { kSatisfied, kViolated };

struct InstanceMeta {
  std::string generator;
  std::uint64_t seed = 0;
  ConditionStatus condition1 = ConditionStatus::kSatisfied;
  ConditionStatus condition2 = ConditionStatus::kSatisfied;

  bool operator==(const InstanceMeta&) const = default;
};

struct Instance {
  JointTable joint;  // P(X, Y)
  FeatureMap features;
  InstanceMeta meta;

  Instance(JointTable joint, FeatureMap features, InstanceMeta meta);

  std::size_t x_size() const { return joint.dim(0); }
  std::size_t y_size() const { return joint.dim(1); }
  std::size_t n_features() const { return features.n_features(); }

  bool operator==(const Instance&) const = default;
};

enum class ViolationKind { kCondition1, kCondition2 };

inline constexpr std::size_t kRejectionBudget = 10000;
inline constexpr double kViolateC1Floor = 0.05;
inline constexpr double kViolateC2Floor = 0.5;

// I(X;Y|T) over the enumerated (X, T, Y) triple.
double check_condition1(const Instance& inst);

// max_{i != j} I(T_i;T_j|Y); 0 when there are fewer than two features.
double check_condition2(const Instance& inst);

// Naive-Bayes construction: X is the feature configuration itself and the
// bits are drawn independently given Y, so both conditions hold exactly.
Instance generate_equiv_instance(std::uint64_t seed, std::size_t n_features, std::size_t y_size);

// violate_c1: random dependent joint seen through a single soft feature.
// violate_c2: XOR-labelled bit features. Both are rejection-sampled until
// the violated condition clears its floor.
Instance generate_violating_instance(std::uint64_t seed, ViolationKind kind);

// Uniform 2-bit X, Y = bit0 XOR bit1, t_i(x) = bit i.
Instance make_xor_instance();

// Random joint with a random soft feature map; no condition is intended.
// Used for invariant sweeps.
Instance generate_random_instance(std::uint64_t seed, std::size_t max_x = 6,
                                  std::size_t max_y = 4, std::size_t max_features = 4);

struct EquivalenceTolerances {
  double condition = 1e-6;  // "satisfied" threshold for both checks, nats
  double tv = 1e-3;
};

struct EquivalenceReport {
  double i_xy_given_t = 0.0;
  double max_pairwise_i_titj_given_y = 0.0;
  double tv_distance = 0.0;  // max over x with P(x) > 0
  bool conditions_hold = false;
  bool pass = false;  // conditions_hold implies tv_distance <= tolerance
  bool softmax_converged = false;
  ConditionalTable me_conditional;
  ConditionalTable softmax_conditional;
  SoftmaxParams softmax;
};

// Trains the feature softmax on the exact joint (probability-weighted
// likelihood), composes it with t(x) and compares it with the original ME
// conditional.
EquivalenceReport verify_equivalence_theorem(const Instance& inst, const TrainConfig& cfg,
                                             const EquivalenceTolerances& tol = {});

struct InequalityChain {
  double i_xt = 0.0;
  double max_i_titj = 0.0;
  double max_i_titj_given_y = 0.0;
  bool paper_claim_holds = false;
};

// Computes I(X;T), max I(T_i;T_j) and max I(T_i;T_j|Y). Throws
// InvariantViolation if I(T_i;T_j) > min(I(T_i;X), I(T_j;X)) + 1e-9 for
// any pair. The conditional-vs-unconditional ordering is only reported.
InequalityChain verify_inequality_chain(const Instance& inst);

// Joint of (T_i, T_j, Y) for one feature pair, dims 2 x 2 x y_size.
JointTable pair_given_label_table(const Instance& inst, std::size_t i, std::size_t j);

// Joint of (T_i, X), dims 2 x x_size.
JointTable feature_input_table(const Instance& inst, std::size_t i);

}  // namespace maxent
