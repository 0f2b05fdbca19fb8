#pragma once

// Original maximum-entropy model over indicator predicates f_{xy} and the
// feature-based softmax model over feature confidences t_i(x).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "maxent/discrete_prob.hpp"

namespace maxent {

struct TrainConfig {
  double learning_rate = 1.0;
  std::size_t max_iters = 200000;
  double grad_tol = 1e-7;  // stop when the gradient max-norm drops below this
  std::uint64_t seed = 0;
  double l2 = 0.0;  // weight decay on lambda only, never on the bias

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

// Row-major [x_size x y_size] table; row x is a distribution over y.
struct ConditionalTable {
  std::size_t x_size = 0;
  std::size_t y_size = 0;
  std::vector<double> probs;

  std::span<const double> row(std::size_t x) const {
    return std::span<const double>(probs).subspan(x * y_size, y_size);
  }
  double operator()(std::size_t x, std::size_t y) const { return probs[x * y_size + y]; }
};

// One multiplier per indicator predicate f_{xy}; the normalization multiplier
// is folded into Z(x) and has no slot here. Cells with P(x, y) = 0 hold -inf.
struct MEDualParams {
  std::size_t x_size = 0;
  std::size_t y_size = 0;
  std::vector<double> omega;

  double operator()(std::size_t x, std::size_t y) const { return omega[x * y_size + y]; }
};

struct OriginalMESolution {
  MEDualParams dual;
  ConditionalTable conditional;
  std::size_t iterations = 0;  // largest per-row iteration count
  double residual = 0.0;       // final gradient max-norm over all rows
};

// Gradient descent on the dual of max H(Y^|X) s.t. P(X,Y^) = P(X,Y). The
// dual separates over x, so each row with P(x) > 0 is driven to its own
// stationary point; rows with P(x) = 0 are left at the uniform conditional.
// Throws NonConvergenceError when a row exhausts cfg.max_iters.
OriginalMESolution solve_original_me(const JointTable& joint, const TrainConfig& cfg);

// Conditional P(Y | X) read straight off the table (uniform on zero-mass rows).
ConditionalTable empirical_conditional(const JointTable& joint);

// Softmax head: P(y | t) proportional to exp(bias[y] + sum_i lambda(y, i) t_i).
struct SoftmaxParams {
  std::size_t y_size = 0;
  std::size_t n_features = 0;
  std::vector<double> lambda;  // row-major [y_size x n_features]
  std::vector<double> bias;    // [y_size]

  static SoftmaxParams zeros(std::size_t y_size, std::size_t n_features);

  double& w(std::size_t y, std::size_t i) { return lambda[y * n_features + i]; }
  double w(std::size_t y, std::size_t i) const { return lambda[y * n_features + i]; }

  bool operator==(const SoftmaxParams&) const = default;
};

std::vector<double> softmax_predict(const SoftmaxParams& params, std::span<const double> t);

// Writes into `out` (size y_size); avoids allocation inside training loops.
void softmax_predict_into(const SoftmaxParams& params, std::span<const double> t,
                          std::span<double> out);

// Weighted mean negative log-likelihood plus l2 * |lambda|^2 / 2.
double softmax_objective(const SoftmaxParams& params, const SampleSet& data, double l2);

// Gradient of softmax_objective, packed in the same shape as the params.
SoftmaxParams softmax_gradient(const SoftmaxParams& params, const SampleSet& data, double l2);

struct SoftmaxFit {
  SoftmaxParams params;
  bool converged = false;
  std::size_t iterations = 0;
  double loss = 0.0;
  double grad_norm = 0.0;               // max-norm at the returned params
  std::vector<double> accepted_losses;  // objective after each accepted step
};

// Full-batch gradient descent from all-zero parameters. A step that would
// raise the objective is rejected and the learning rate halved, so the
// accepted-loss sequence is non-increasing. Never throws on non-convergence;
// the returned fit is the best iterate with `converged` = false.
SoftmaxFit train_feature_softmax(const SampleSet& data, const TrainConfig& cfg);

// Index of the largest entry, lowest index on ties.
std::size_t argmax(std::span<const double> p);

// Half the L1 distance between two distributions over the same alphabet.
double total_variation(std::span<const double> p, std::span<const double> q);

}  // namespace maxent
