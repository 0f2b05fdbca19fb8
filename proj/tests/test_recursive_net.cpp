#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "maxent/random.hpp"
#include "maxent/recursive_net.hpp"
#include "maxent/tasks.hpp"
#include "support.hpp"

using namespace maxent;

namespace {

SampleSet noisy_samples(Rng& rng, std::size_t rows, std::size_t dim, std::size_t m) {
  std::vector<Sample> out;
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<double> x(dim);
    for (double& v : x) v = rng.uniform();
    out.push_back({x, rng.below(m), 0.2 + rng.uniform()});
  }
  return SampleSet(std::move(out), m);
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

TEST(LayerStack, ShapesAndFlatRoundTrip) {
  LayerStack net({3, 4, 2}, 5);
  EXPECT_EQ(net.depth(), 2u);
  EXPECT_EQ(net.hidden_units(), 6u);
  EXPECT_EQ(net.parameter_count(), (3 * 4 + 4) + (4 * 2 + 2) + (5 * 2 + 5));
  Rng rng(1);
  std::vector<double> flat(net.parameter_count());
  for (double& v : flat) v = rng.uniform(-1, 1);
  net.unflatten(flat);
  EXPECT_EQ(net.flatten(), flat);
  EXPECT_EQ(net.layers()[0].w(1, 2), flat[1 * 3 + 2]);
  EXPECT_EQ(net.layers()[1].biases[0], flat[16 + 8]);
  EXPECT_EQ(net.head().bias[4], flat.back());
  EXPECT_EQ(kind_of([&] { net.unflatten(std::vector<double>(3)); }), ErrorKind::kDimensionMismatch);
}

TEST(Forward, HandComputedTwoLayerNet) {
  LayerStack net({2, 1}, 2);
  net.layers()[0].weights = {1.0, -2.0};
  net.layers()[0].biases = {0.5};
  net.head().lambda = {3.0, 0.0};
  net.head().bias = {0.0, 1.0};
  const auto r = forward(net, std::vector<double>{0.3, 0.4});
  const double a = sigmoid(0.5 + 0.3 - 0.8);
  ASSERT_EQ(r.activations.size(), 1u);
  EXPECT_NEAR(r.activations[0][0], a, 1e-15);
  const double z0 = 3.0 * a, z1 = 1.0;
  EXPECT_NEAR(r.output[0], std::exp(z0) / (std::exp(z0) + std::exp(z1)), 1e-15);
  EXPECT_EQ(kind_of([&] { forward(net, std::vector<double>{1.0}); }), ErrorKind::kDimensionMismatch);
}

TEST(Loss, ZeroStackClosedForms) {
  Rng rng(2);
  const SampleSet data = noisy_samples(rng, 10, 3, 4);
  const LayerStack net({3, 5, 2}, 4);
  // Zero weights: uniform output and every unit at 1/2.
  EXPECT_NEAR(loss(net, data, 0.0), std::log(4.0), 1e-14);
  EXPECT_NEAR(loss(net, data, 0.3), std::log(4.0) - 0.3 * 7 * std::numbers::ln2, 1e-14);
  NetTrainConfig cfg;
  cfg.layer_beta = {0.1, 0.2};
  const LossTerms t = evaluate_objective(net, data, cfg);
  EXPECT_NEAR(t.reg_term, 7 * std::numbers::ln2, 1e-14);
  EXPECT_NEAR(t.objective, std::log(4.0) - (0.1 * 5 + 0.2 * 2) * std::numbers::ln2, 1e-14);
}

TEST(Gradient, MatchesCentralDifferences) {
  Rng rng(3);
  for (int trial = 0; trial < 12; ++trial) {
    const SampleSet data = noisy_samples(rng, 9, 3, 3);
    LayerStack net({3, 4, 3}, 3);
    std::vector<double> x(net.parameter_count());
    for (double& v : x) v = rng.uniform(-1.5, 1.5);
    net.unflatten(x);
    NetTrainConfig cfg;
    cfg.beta = trial % 3 == 0 ? 0.0 : 0.1;
    if (trial % 3 == 2) cfg.layer_beta = {0.05, 0.2};
    cfg.l2 = trial % 2 ? 0.02 : 0.0;
    const std::vector<double> g = objective_gradient(net, data, cfg);
    LayerStack probe = net;
    const double h = 1e-6;
    for (std::size_t k = 0; k < x.size(); ++k) {
      std::vector<double> v = x;
      v[k] = x[k] + h;
      probe.unflatten(v);
      const double up = evaluate_objective(probe, data, cfg).objective;
      v[k] = x[k] - h;
      probe.unflatten(v);
      const double down = evaluate_objective(probe, data, cfg).objective;
      EXPECT_NEAR(g[k], (up - down) / (2 * h), 1e-7) << "param " << k << " trial " << trial;
    }
  }
}

TEST(TrainConfigForNets, Validation) {
  NetTrainConfig cfg;
  cfg.layer_beta = {0.1};
  EXPECT_EQ(kind_of([&] { cfg.validate(2); }), ErrorKind::kDimensionMismatch);
  cfg = NetTrainConfig{};
  cfg.beta = -0.1;
  EXPECT_EQ(kind_of([&] { cfg.validate(1); }), ErrorKind::kRangeError);
  cfg = NetTrainConfig{};
  cfg.mode = TrainMode::kCoordinate;
  cfg.sweeps = 0;
  EXPECT_EQ(kind_of([&] { cfg.validate(1); }), ErrorKind::kRangeError);
}

TEST(Backprop, LearnsXor) {
  NetTrainConfig cfg;
  cfg.learning_rate = 2.0;
  cfg.max_iters = 20000;
  cfg.grad_tol = 1e-12;
  cfg.l2 = 1e-5;
  std::size_t hooks = 0;
  const NetFit fit = train_backprop(init_stack({2, 2, 2}, 2, 0), xor_dataset(), cfg,
                                    [&](std::size_t it, const LayerStack&) { EXPECT_EQ(it, hooks++); });
  EXPECT_EQ(fit.final_terms.train_error, 0.0);
  EXPECT_EQ(train_error(fit.net, xor_dataset()), 0.0);
  EXPECT_EQ(hooks, fit.iterations + 1);  // every evaluated state, the last included
  EXPECT_EQ(fit.trace.records.size(), fit.iterations + 1);
  EXPECT_LT(fit.trace.records.back().loss, fit.trace.records.front().loss);
}

TEST(Coordinate, ZeroInnerStepsLeaveStackUnchanged) {
  NetTrainConfig cfg;
  cfg.mode = TrainMode::kCoordinate;
  cfg.inner_iters = 0;
  cfg.sweeps = 3;
  const LayerStack init = init_stack({2, 3, 2}, 2, 4);
  const NetFit fit = train_coordinate(init, xor_dataset(), cfg);
  EXPECT_EQ(fit.net, init);
  EXPECT_EQ(fit.iterations, 0u);
}

TEST(Coordinate, ObjectiveNeverIncreasesAcrossSweeps) {
  Rng rng(5);
  const SampleSet data = noisy_samples(rng, 20, 3, 3);
  NetTrainConfig cfg;
  cfg.mode = TrainMode::kCoordinate;
  cfg.beta = 0.05;
  cfg.sweeps = 30;
  cfg.inner_iters = 10;
  for (BlockOrder order : {BlockOrder::kTopDown, BlockOrder::kBottomUp}) {
    cfg.order = order;
    const NetFit fit = train_coordinate(init_stack({3, 4, 3}, 3, 6), data, cfg);
    ASSERT_EQ(fit.trace.records.size(), cfg.sweeps + 1);
    for (std::size_t k = 1; k < fit.trace.records.size(); ++k) {
      EXPECT_LE(fit.trace.records[k].loss, fit.trace.records[k - 1].loss);
    }
    EXPECT_LT(fit.trace.records.back().loss, fit.trace.records.front().loss);
  }
}

TEST(Coordinate, HeadStaysFrozenWhileLowerBlockTrains) {
  // One top-down sweep visits the head, then layer 1. The final head must be
  // what a zero-depth run produces on the initial hidden activations.
  const SampleSet data = xor_dataset();
  const LayerStack init = init_stack({2, 3}, 2, 8);
  NetTrainConfig cfg;
  cfg.mode = TrainMode::kCoordinate;
  cfg.sweeps = 1;
  cfg.inner_iters = 7;
  const NetFit fit = train_coordinate(init, data, cfg);

  std::vector<Sample> hidden_rows;
  for (const Sample& s : data.rows()) hidden_rows.push_back({forward(init, s.input).activations[0], s.label, s.weight});
  LayerStack head_only({3}, 2);
  head_only.head() = init.head();
  const NetFit ref = train_coordinate(head_only, SampleSet(hidden_rows, 2), cfg);

  for (std::size_t k = 0; k < ref.net.head().lambda.size(); ++k)
    EXPECT_NEAR(fit.net.head().lambda[k], ref.net.head().lambda[k], 1e-12);
  for (std::size_t k = 0; k < ref.net.head().bias.size(); ++k)
    EXPECT_NEAR(fit.net.head().bias[k], ref.net.head().bias[k], 1e-12);
  EXPECT_NE(fit.net.head(), init.head());
  EXPECT_NE(fit.net.layers()[0], init.layers()[0]);
}

TEST(Reduction, ZeroDepthStackIsTheFeatureSoftmax) {
  std::vector<Sample> rows;
  Rng rng(9);
  for (int r = 0; r < 12; ++r) rows.push_back({{rng.uniform(), rng.uniform()}, rng.below(3), rng.uniform()});
  const SampleSet data(rows, 3);
  NetTrainConfig cfg;
  cfg.max_iters = 200000;
  cfg.grad_tol = 1e-10;
  cfg.learning_rate = 0.5;
  cfg.l2 = 0.01;
  const NetFit stack = train_backprop(LayerStack({2}, 3), data, cfg);
  const SoftmaxFit soft = train_feature_softmax(data, cfg);
  for (const Sample& s : data.rows()) {
    EXPECT_LE(total_variation(forward(stack.net, s.input).output, softmax_predict(soft.params, s.input)), 1e-6);
  }
}
