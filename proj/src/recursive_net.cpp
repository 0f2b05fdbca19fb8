#include "maxent/recursive_net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "maxent/error.hpp"
#include "maxent/random.hpp"

namespace maxent {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

// Binary entropy of sigmoid(z) in nats: softplus(z) - z * sigmoid(z).
double binary_entropy_logit(double z, double a) { return softplus(z) - z * a; }

}  // namespace

LayerStack::LayerStack(std::vector<std::size_t> widths, std::size_t y_size) : widths_(std::move(widths)) {
  if (widths_.empty()) throw Error(ErrorKind::kInvalidArgument, "widths must include the input dimension");
  if (y_size == 0) throw Error(ErrorKind::kInvalidArgument, "softmax head needs at least one class");
  for (std::size_t l = 1; l < widths_.size(); ++l) {
    if (widths_[l] == 0) throw Error(ErrorKind::kInvalidArgument, "hidden layers need at least one unit");
    Layer layer;
    layer.in = widths_[l - 1];
    layer.out = widths_[l];
    layer.weights.assign(layer.in * layer.out, 0.0);
    layer.biases.assign(layer.out, 0.0);
    layers_.push_back(std::move(layer));
  }
  head_ = SoftmaxParams::zeros(y_size, widths_.back());
}

std::size_t LayerStack::hidden_units() const {
  std::size_t n = 0;
  for (const Layer& l : layers_) n += l.out;
  return n;
}

std::size_t LayerStack::parameter_count() const {
  std::size_t n = head_.lambda.size() + head_.bias.size();
  for (const Layer& l : layers_) n += l.weights.size() + l.biases.size();
  return n;
}

std::vector<double> LayerStack::flatten() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const Layer& l : layers_) {
    flat.insert(flat.end(), l.weights.begin(), l.weights.end());
    flat.insert(flat.end(), l.biases.begin(), l.biases.end());
  }
  flat.insert(flat.end(), head_.lambda.begin(), head_.lambda.end());
  flat.insert(flat.end(), head_.bias.begin(), head_.bias.end());
  return flat;
}

void LayerStack::unflatten(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw Error(ErrorKind::kDimensionMismatch, "flat parameter vector has the wrong length");
  }
  auto it = flat.begin();
  auto take = [&it](std::vector<double>& dst) {
    std::copy(it, it + static_cast<std::ptrdiff_t>(dst.size()), dst.begin());
    it += static_cast<std::ptrdiff_t>(dst.size());
  };
  for (Layer& l : layers_) {
    take(l.weights);
    take(l.biases);
  }
  take(head_.lambda);
  take(head_.bias);
}

LayerStack init_stack(std::vector<std::size_t> widths, std::size_t y_size, std::uint64_t seed) {
  LayerStack net(std::move(widths), y_size);
  Rng rng(seed);
  for (Layer& l : net.layers())
    for (double& w : l.weights) w = rng.uniform(-0.5, 0.5);
  for (double& w : net.head().lambda) w = rng.uniform(-0.5, 0.5);
  return net;
}

ForwardResult forward(const LayerStack& net, std::span<const double> x) {
  if (x.size() != net.input_dim()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "input has dimension " + std::to_string(x.size()) + ", stack expects " +
                    std::to_string(net.input_dim()));
  }
  ForwardResult res;
  std::span<const double> prev = x;
  for (const Layer& layer : net.layers()) {
    std::vector<double> a(layer.out);
    for (std::size_t i = 0; i < layer.out; ++i) {
      double z = layer.biases[i];
      for (std::size_t k = 0; k < layer.in; ++k) z += layer.w(i, k) * prev[k];
      a[i] = sigmoid(z);
    }
    res.activations.push_back(std::move(a));
    prev = res.activations.back();
  }
  res.output = softmax_predict(net.head(), prev);
  return res;
}

void NetTrainConfig::validate(std::size_t depth) const {
  TrainConfig::validate();
  if (!(beta >= 0.0)) throw Error(ErrorKind::kRangeError, "beta must be >= 0");
  if (!layer_beta.empty()) {
    if (layer_beta.size() != depth) {
      throw Error(ErrorKind::kDimensionMismatch, "layer_beta needs one entry per hidden layer");
    }
    for (double b : layer_beta)
      if (!(b >= 0.0)) throw Error(ErrorKind::kRangeError, "layer_beta entries must be >= 0");
  }
  if (mode == TrainMode::kCoordinate && sweeps < 1) {
    throw Error(ErrorKind::kRangeError, "coordinate mode needs sweeps >= 1");
  }
}

namespace {

// One full pass over the data: objective terms and, if `grad` is non-null,
// the gradient in flatten() order.
LossTerms run_pass(const LayerStack& net, const SampleSet& data, const NetTrainConfig& cfg,
                   std::vector<double>* grad) {
  if (data.dim() != net.input_dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "sample dimension differs from stack input");
  }
  if (data.y_size() != net.y_size()) {
    throw Error(ErrorKind::kDimensionMismatch, "sample label alphabet differs from head classes");
  }
  const auto& layers = net.layers();
  const SoftmaxParams& head = net.head();
  const std::size_t L = layers.size();
  const std::size_t m = head.y_size;
  const std::size_t top = net.widths().back();

  std::vector<std::size_t> offset(L + 1, 0);
  for (std::size_t l = 0; l < L; ++l) offset[l + 1] = offset[l] + layers[l].weights.size() + layers[l].biases.size();
  const std::size_t head_offset = offset[L];
  if (grad) grad->assign(net.parameter_count(), 0.0);

  std::vector<std::vector<double>> z(L), a(L), dz(L);
  for (std::size_t l = 0; l < L; ++l) {
    z[l].resize(layers[l].out);
    a[l].resize(layers[l].out);
    dz[l].resize(layers[l].out);
  }
  std::vector<double> p(m), da_top(top), da_prev;

  LossTerms terms;
  const double inv_w = 1.0 / data.total_weight();
  for (const Sample& s : data.rows()) {
    if (s.weight == 0.0) continue;
    const double w = s.weight * inv_w;
    std::span<const double> prev = s.input;
    for (std::size_t l = 0; l < L; ++l) {
      const Layer& layer = layers[l];
      for (std::size_t i = 0; i < layer.out; ++i) {
        double acc = layer.biases[i];
        const double* row = layer.weights.data() + i * layer.in;
        for (std::size_t k = 0; k < layer.in; ++k) acc += row[k] * prev[k];
        z[l][i] = acc;
        a[l][i] = sigmoid(acc);
        terms.reg_term += w * binary_entropy_logit(acc, a[l][i]);
        if (cfg.beta_for(l) != 0.0) {
          terms.objective -= w * cfg.beta_for(l) * binary_entropy_logit(acc, a[l][i]);
        }
      }
      prev = a[l];
    }
    softmax_predict_into(head, prev, p);
    terms.cross_entropy -= w * std::log(std::max(p[s.label], std::numeric_limits<double>::min()));
    if (argmax(p) != s.label) terms.train_error += w;
    if (!grad) continue;

    double* g = grad->data();
    da_top.assign(top, 0.0);
    for (std::size_t y = 0; y < m; ++y) {
      const double r = w * (p[y] - (y == s.label ? 1.0 : 0.0));
      const double* lam = head.lambda.data() + y * top;
      double* glam = g + head_offset + y * top;
      for (std::size_t i = 0; i < top; ++i) {
        glam[i] += r * prev[i];
        da_top[i] += r * lam[i];
      }
      g[head_offset + head.lambda.size() + y] += r;
    }
    std::vector<double>* da = &da_top;
    for (std::size_t l = L; l-- > 0;) {
      const Layer& layer = layers[l];
      const double beta = cfg.beta_for(l);
      for (std::size_t i = 0; i < layer.out; ++i) {
        const double slope = a[l][i] * (1.0 - a[l][i]);
        dz[l][i] = (*da)[i] * slope + w * beta * z[l][i] * slope;
      }
      std::span<const double> below = l == 0 ? std::span<const double>(s.input) : std::span<const double>(a[l - 1]);
      double* gw = g + offset[l];
      double* gb = gw + layer.weights.size();
      for (std::size_t i = 0; i < layer.out; ++i) {
        for (std::size_t k = 0; k < layer.in; ++k) gw[i * layer.in + k] += dz[l][i] * below[k];
        gb[i] += dz[l][i];
      }
      if (l > 0) {
        da_prev.assign(layer.in, 0.0);
        for (std::size_t i = 0; i < layer.out; ++i) {
          const double* row = layer.weights.data() + i * layer.in;
          for (std::size_t k = 0; k < layer.in; ++k) da_prev[k] += dz[l][i] * row[k];
        }
        std::swap(da_top, da_prev);
        da = &da_top;
      }
    }
  }

  terms.objective += terms.cross_entropy;
  if (cfg.l2 > 0.0) {
    double penalty = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      for (std::size_t k = 0; k < layers[l].weights.size(); ++k) {
        penalty += layers[l].weights[k] * layers[l].weights[k];
        if (grad) (*grad)[offset[l] + k] += cfg.l2 * layers[l].weights[k];
      }
    }
    for (std::size_t k = 0; k < head.lambda.size(); ++k) {
      penalty += head.lambda[k] * head.lambda[k];
      if (grad) (*grad)[head_offset + k] += cfg.l2 * head.lambda[k];
    }
    terms.objective += 0.5 * cfg.l2 * penalty;
  }
  return terms;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Flat index ranges [begin, end) per block: 0..L-1 hidden layers, L the head.
std::vector<std::pair<std::size_t, std::size_t>> block_ranges(const LayerStack& net) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t pos = 0;
  for (const Layer& l : net.layers()) {
    const std::size_t n = l.weights.size() + l.biases.size();
    out.emplace_back(pos, pos + n);
    pos += n;
  }
  out.emplace_back(pos, pos + net.head().lambda.size() + net.head().bias.size());
  return out;
}

TraceRecord record(std::size_t iteration, const LossTerms& t) {
  return TraceRecord{iteration, t.objective, t.reg_term, t.train_error};
}

}  // namespace

double loss(const LayerStack& net, const SampleSet& data, double beta) {
  NetTrainConfig cfg;
  cfg.beta = beta;
  return run_pass(net, data, cfg, nullptr).objective;
}

LossTerms evaluate_objective(const LayerStack& net, const SampleSet& data, const NetTrainConfig& cfg) {
  cfg.validate(net.depth());
  return run_pass(net, data, cfg, nullptr);
}

std::vector<double> objective_gradient(const LayerStack& net, const SampleSet& data,
                                       const NetTrainConfig& cfg, LossTerms* terms) {
  cfg.validate(net.depth());
  std::vector<double> g;
  const LossTerms t = run_pass(net, data, cfg, &g);
  if (terms) *terms = t;
  return g;
}

double train_error(const LayerStack& net, const SampleSet& data) {
  return run_pass(net, data, NetTrainConfig{}, nullptr).train_error;
}

NetFit train_backprop(LayerStack net, const SampleSet& data, const NetTrainConfig& cfg,
                      const SnapshotHook& hook) {
  cfg.validate(net.depth());
  NetFit fit{net, {}, false, 0, {}, 0.0};
  std::vector<double> params = net.flatten();
  std::vector<double> grad;
  double best = std::numeric_limits<double>::infinity();

  for (std::size_t it = 0;; ++it) {
    if (hook) hook(it, net);
    const LossTerms terms = run_pass(net, data, cfg, &grad);
    const double gnorm = max_abs(grad);
    fit.trace.records.push_back(record(it, terms));
    if (terms.objective < best) {
      best = terms.objective;
      fit.net = net;
      fit.final_terms = terms;
      fit.grad_norm = gnorm;
    }
    fit.iterations = it;
    if (gnorm < cfg.grad_tol) {
      fit.converged = true;
      break;
    }
    if (it == cfg.max_iters) break;
    for (std::size_t k = 0; k < params.size(); ++k) params[k] -= cfg.learning_rate * grad[k];
    net.unflatten(params);
  }
  return fit;
}

NetFit train_coordinate(LayerStack net, const SampleSet& data, const NetTrainConfig& cfg,
                        const SnapshotHook& hook) {
  cfg.validate(net.depth());
  const auto blocks = block_ranges(net);
  const std::size_t L = net.depth();
  std::vector<std::size_t> order(L + 1);
  for (std::size_t b = 0; b <= L; ++b) order[b] = cfg.order == BlockOrder::kTopDown ? L - b : b;

  std::vector<double> params = net.flatten(), grad, trial_params, trial_grad;
  LossTerms terms = run_pass(net, data, cfg, &grad);
  NetFit fit{net, {}, false, 0, terms, max_abs(grad)};
  fit.trace.records.push_back(record(0, terms));
  LayerStack trial = net;

  std::size_t steps = 0;
  for (std::size_t sweep = 0; sweep < cfg.sweeps; ++sweep) {
    if (hook) hook(sweep, net);
    for (std::size_t b : order) {
      const auto [begin, end] = blocks[b];
      double lr = cfg.learning_rate;
      for (std::size_t inner = 0; inner < cfg.inner_iters; ++inner) {
        double block_norm = 0.0;
        for (std::size_t k = begin; k < end; ++k) block_norm = std::max(block_norm, std::abs(grad[k]));
        if (block_norm < cfg.grad_tol) break;
        trial_params = params;
        for (std::size_t k = begin; k < end; ++k) trial_params[k] -= lr * grad[k];
        trial.unflatten(trial_params);
        const LossTerms trial_terms = run_pass(trial, data, cfg, &trial_grad);
        ++steps;
        if (trial_terms.objective <= terms.objective) {
          std::swap(params, trial_params);
          std::swap(grad, trial_grad);
          std::swap(net, trial);
          terms = trial_terms;
        } else {
          lr *= 0.5;
        }
      }
    }
    fit.trace.records.push_back(record(sweep + 1, terms));
    if (max_abs(grad) < cfg.grad_tol) {
      fit.converged = true;
      break;
    }
  }
  fit.net = net;
  fit.final_terms = terms;
  fit.grad_norm = max_abs(grad);
  fit.converged = fit.grad_norm < cfg.grad_tol;
  fit.iterations = steps;
  return fit;
}

}  // namespace maxent
