#pragma once

// Stack of sigmoid logistic layers feeding a softmax head. Each hidden unit
// is a feature confidence t_i(x) = P(T_i = 1 | X = x); the head is the
// feature softmax over the top layer.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "maxent/discrete_prob.hpp"
#include "maxent/maxent_core.hpp"

namespace maxent {

struct Layer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;  // row-major [out x in]
  std::vector<double> biases;   // [out]

  double w(std::size_t i, std::size_t k) const { return weights[i * in + k]; }
  bool operator==(const Layer&) const = default;
};

class LayerStack {
 public:
  // widths = {n_0 (input dim), n_1, ..., n_L}; all parameters zero.
  LayerStack(std::vector<std::size_t> widths, std::size_t y_size);

  std::size_t depth() const { return layers_.size(); }  // L
  std::size_t input_dim() const { return widths_.front(); }
  std::size_t y_size() const { return head_.y_size; }
  const std::vector<std::size_t>& widths() const { return widths_; }

  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }
  SoftmaxParams& head() { return head_; }
  const SoftmaxParams& head() const { return head_; }

  // Total hidden units, sum_l n_l.
  std::size_t hidden_units() const;
  std::size_t parameter_count() const;

  // Flat views used by the gradient checker and the optimizers. Order:
  // layer 1 weights, layer 1 biases, ..., head lambda, head bias.
  std::vector<double> flatten() const;
  void unflatten(std::span<const double> flat);

  bool operator==(const LayerStack&) const = default;

 private:
  std::vector<std::size_t> widths_;
  std::vector<Layer> layers_;
  SoftmaxParams head_;
};

// Weights uniform in [-0.5, 0.5] (head lambda included), biases zero.
LayerStack init_stack(std::vector<std::size_t> widths, std::size_t y_size, std::uint64_t seed);

struct ForwardResult {
  std::vector<std::vector<double>> activations;  // one vector per hidden layer
  std::vector<double> output;
};

ForwardResult forward(const LayerStack& net, std::span<const double> x);

// Mean cross-entropy minus beta * sum_{l,i} mean binary entropy of unit
// (l, i). The entropy term is the empirical H(T_{l,i} | X).
double loss(const LayerStack& net, const SampleSet& data, double beta);

enum class TrainMode { kBackprop, kCoordinate };
enum class BlockOrder { kTopDown, kBottomUp };

struct NetTrainConfig : TrainConfig {
  double beta = 0.0;
  std::vector<double> layer_beta;  // optional per-layer override, size L
  TrainMode mode = TrainMode::kBackprop;
  std::size_t sweeps = 1;
  std::size_t inner_iters = 100;
  BlockOrder order = BlockOrder::kTopDown;

  void validate(std::size_t depth) const;
  double beta_for(std::size_t layer) const {
    return layer_beta.empty() ? beta : layer_beta[layer];
  }
  bool operator==(const NetTrainConfig&) const = default;
};

struct LossTerms {
  double objective = 0.0;      // cross_entropy - beta-weighted reg + l2 penalty
  double cross_entropy = 0.0;
  double reg_term = 0.0;       // sum_{l,i} mean binary entropy, nats
  double train_error = 0.0;    // weighted fraction misclassified
};

// Objective of the trainers, with per-layer beta and the l2 penalty on
// weights (hidden weights and head lambda; biases are not decayed).
LossTerms evaluate_objective(const LayerStack& net, const SampleSet& data,
                             const NetTrainConfig& cfg);

// Gradient of evaluate_objective, in the flatten() order.
std::vector<double> objective_gradient(const LayerStack& net, const SampleSet& data,
                                       const NetTrainConfig& cfg, LossTerms* terms = nullptr);

struct TraceRecord {
  std::size_t iteration = 0;
  double loss = 0.0;
  double reg_term = 0.0;
  double train_error = 0.0;
};

struct TrainTrace {
  std::vector<TraceRecord> records;
};

struct NetFit {
  LayerStack net;
  TrainTrace trace;
  bool converged = false;
  std::size_t iterations = 0;
  LossTerms final_terms;
  double grad_norm = 0.0;
};

// Called with (iteration, parameters before that iteration's step).
using SnapshotHook = std::function<void(std::size_t, const LayerStack&)>;

// Full-batch gradient descent on all parameters jointly; returns the
// best-objective iterate seen.
NetFit train_backprop(LayerStack net, const SampleSet& data, const NetTrainConfig& cfg,
                      const SnapshotHook& hook = {});

// Block-coordinate descent: each sweep visits the head and every hidden
// layer in cfg.order, freezing the rest and taking inner_iters gradient
// steps on the active block. Steps that raise the objective are rejected
// and the block's learning rate halved.
NetFit train_coordinate(LayerStack net, const SampleSet& data, const NetTrainConfig& cfg,
                        const SnapshotHook& hook = {});

// Weighted fraction of rows whose argmax prediction differs from the label.
double train_error(const LayerStack& net, const SampleSet& data);

}  // namespace maxent
