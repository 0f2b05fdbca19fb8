#include "maxent/maxent_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "maxent/error.hpp"

namespace maxent {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorKind::kRangeError, "learning_rate must be > 0");
  }
  if (max_iters < 1) throw Error(ErrorKind::kRangeError, "max_iters must be >= 1");
  if (!(grad_tol > 0.0)) throw Error(ErrorKind::kRangeError, "grad_tol must be > 0");
  if (!(l2 >= 0.0) || !std::isfinite(l2)) throw Error(ErrorKind::kRangeError, "l2 must be >= 0");
}

namespace {

// Stable softmax of `logits` into `out`.
void softmax_inplace(std::span<const double> logits, std::span<double> out) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out[k] = std::exp(logits[k] - mx);
    z += out[k];
  }
  for (double& v : out) v /= z;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

ConditionalTable empirical_conditional(const JointTable& joint) {
  if (joint.rank() != 2) throw Error(ErrorKind::kDimensionMismatch, "conditional needs a rank-2 table");
  const std::size_t nx = joint.dim(0), ny = joint.dim(1);
  ConditionalTable out{nx, ny, std::vector<double>(nx * ny, 1.0 / static_cast<double>(ny))};
  const auto px = joint.marginal(0);
  for (std::size_t x = 0; x < nx; ++x) {
    if (px[x] <= 0.0) continue;
    for (std::size_t y = 0; y < ny; ++y) out.probs[x * ny + y] = joint(x, y) / px[x];
  }
  return out;
}

OriginalMESolution solve_original_me(const JointTable& joint, const TrainConfig& cfg) {
  cfg.validate();
  if (joint.rank() != 2) throw Error(ErrorKind::kDimensionMismatch, "solve_original_me needs P(X,Y)");
  const std::size_t nx = joint.dim(0), ny = joint.dim(1);
  const auto px = joint.marginal(0);

  OriginalMESolution sol;
  sol.dual = MEDualParams{nx, ny, std::vector<double>(nx * ny, 0.0)};
  sol.conditional = ConditionalTable{nx, ny, std::vector<double>(nx * ny, 1.0 / static_cast<double>(ny))};

  std::vector<double> target(ny), p(ny);
  for (std::size_t x = 0; x < nx; ++x) {
    if (px[x] <= 0.0) continue;
    for (std::size_t y = 0; y < ny; ++y) target[y] = joint(x, y) / px[x];
    std::span<double> omega(sol.dual.omega.data() + x * ny, ny);
    // A cell with no mass is pinned by its own constraint; its weight sits at
    // the boundary of the dual, where gradient steps would only crawl.
    for (std::size_t y = 0; y < ny; ++y)
      if (target[y] == 0.0) omega[y] = -std::numeric_limits<double>::infinity();

    // Per-row dual: ln Z(x) - sum_y P(y|x) omega_xy; gradient p - P(y|x).
    std::size_t it = 0;
    double residual = std::numeric_limits<double>::infinity();
    for (;;) {
      softmax_inplace(omega, p);
      residual = 0.0;
      for (std::size_t y = 0; y < ny; ++y) residual = std::max(residual, std::abs(p[y] - target[y]));
      if (residual < cfg.grad_tol) break;
      if (it == cfg.max_iters) {
        throw NonConvergenceError("original ME row " + std::to_string(x) + " stalled at residual " +
                                      std::to_string(residual),
                                  residual);
      }
      for (std::size_t y = 0; y < ny; ++y) omega[y] -= cfg.learning_rate * (p[y] - target[y]);
      ++it;
    }
    std::copy(p.begin(), p.end(), sol.conditional.probs.begin() + static_cast<std::ptrdiff_t>(x * ny));
    sol.iterations = std::max(sol.iterations, it);
    sol.residual = std::max(sol.residual, residual);
  }
  return sol;
}

SoftmaxParams SoftmaxParams::zeros(std::size_t y_size, std::size_t n_features) {
  return SoftmaxParams{y_size, n_features, std::vector<double>(y_size * n_features, 0.0),
                       std::vector<double>(y_size, 0.0)};
}

void softmax_predict_into(const SoftmaxParams& params, std::span<const double> t,
                          std::span<double> out) {
  if (t.size() != params.n_features || out.size() != params.y_size) {
    throw Error(ErrorKind::kDimensionMismatch, "feature vector length differs from softmax width");
  }
  for (std::size_t y = 0; y < params.y_size; ++y) {
    double s = params.bias[y];
    const double* row = params.lambda.data() + y * params.n_features;
    for (std::size_t i = 0; i < params.n_features; ++i) s += row[i] * t[i];
    out[y] = s;
  }
  softmax_inplace(out, out);
}

std::vector<double> softmax_predict(const SoftmaxParams& params, std::span<const double> t) {
  std::vector<double> out(params.y_size);
  softmax_predict_into(params, t, out);
  return out;
}

namespace {

void check_data(const SoftmaxParams& params, const SampleSet& data) {
  if (data.dim() != params.n_features) {
    throw Error(ErrorKind::kDimensionMismatch,
                "data has " + std::to_string(data.dim()) + " features, model has " +
                    std::to_string(params.n_features));
  }
  if (data.y_size() != params.y_size) {
    throw Error(ErrorKind::kDimensionMismatch, "data label alphabet differs from model classes");
  }
}

// Objective and (optionally) gradient in one pass.
double evaluate(const SoftmaxParams& params, const SampleSet& data, double l2,
                SoftmaxParams* grad) {
  const std::size_t m = params.y_size, n = params.n_features;
  std::vector<double> p(m);
  if (grad) *grad = SoftmaxParams::zeros(m, n);
  double nll = 0.0;
  const double inv_w = 1.0 / data.total_weight();
  for (const Sample& s : data.rows()) {
    if (s.weight == 0.0) continue;
    softmax_predict_into(params, s.input, p);
    const double w = s.weight * inv_w;
    nll -= w * std::log(std::max(p[s.label], std::numeric_limits<double>::min()));
    if (!grad) continue;
    for (std::size_t y = 0; y < m; ++y) {
      const double r = w * (p[y] - (y == s.label ? 1.0 : 0.0));
      grad->bias[y] += r;
      double* row = grad->lambda.data() + y * n;
      for (std::size_t i = 0; i < n; ++i) row[i] += r * s.input[i];
    }
  }
  double penalty = 0.0;
  for (std::size_t k = 0; k < params.lambda.size(); ++k) {
    penalty += params.lambda[k] * params.lambda[k];
    if (grad) grad->lambda[k] += l2 * params.lambda[k];
  }
  return nll + 0.5 * l2 * penalty;
}

double grad_max_norm(const SoftmaxParams& g) {
  return std::max(max_abs(g.lambda), max_abs(g.bias));
}

}  // namespace

double softmax_objective(const SoftmaxParams& params, const SampleSet& data, double l2) {
  check_data(params, data);
  return evaluate(params, data, l2, nullptr);
}

SoftmaxParams softmax_gradient(const SoftmaxParams& params, const SampleSet& data, double l2) {
  check_data(params, data);
  SoftmaxParams g;
  evaluate(params, data, l2, &g);
  return g;
}

constexpr double kLossTieSlack = 8 * std::numeric_limits<double>::epsilon();

SoftmaxFit train_feature_softmax(const SampleSet& data, const TrainConfig& cfg) {
  cfg.validate();
  SoftmaxFit fit;
  fit.params = SoftmaxParams::zeros(data.y_size(), data.dim());
  SoftmaxParams grad;
  double loss = evaluate(fit.params, data, cfg.l2, &grad);
  double lr = cfg.learning_rate;

  SoftmaxParams trial, trial_grad;
  std::size_t it = 0;
  while (it < cfg.max_iters) {
    if (grad_max_norm(grad) < cfg.grad_tol) break;
    trial = fit.params;
    for (std::size_t k = 0; k < trial.lambda.size(); ++k) trial.lambda[k] -= lr * grad.lambda[k];
    for (std::size_t k = 0; k < trial.bias.size(); ++k) trial.bias[k] -= lr * grad.bias[k];
    const double trial_loss = evaluate(trial, data, cfg.l2, &trial_grad);
    ++it;
    // Near the optimum a step changes the loss by less than its rounding
    // error; such ties are accepted so noise cannot shrink the step forever.
    if (trial_loss <= loss + kLossTieSlack * std::max(1.0, std::abs(loss))) {
      std::swap(fit.params, trial);
      std::swap(grad, trial_grad);
      loss = trial_loss;
      fit.accepted_losses.push_back(loss);
    } else {
      lr *= 0.5;
      if (lr < 1e-300) break;
    }
  }
  fit.iterations = it;
  fit.loss = loss;
  fit.grad_norm = grad_max_norm(grad);
  fit.converged = fit.grad_norm < cfg.grad_tol;
  return fit;
}

std::size_t argmax(std::span<const double> p) {
  return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorKind::kDimensionMismatch, "TV over different alphabets");
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s += std::abs(p[k] - q[k]);
  return 0.5 * s;
}

}  // namespace maxent
