#pragma once

// Exact probability tables over finite alphabets. All information quantities
// are in nats and use the 0 ln 0 = 0 convention.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace maxent {

inline constexpr double kNormTolerance = 1e-12;
inline constexpr std::size_t kMaxFeatures = 16;
inline constexpr std::size_t kDefaultBins = 30;

struct Alphabet {
  std::size_t size = 1;
  std::vector<std::string> labels;  // empty, or exactly `size` unique names

  static Alphabet make(std::size_t size, std::vector<std::string> labels = {});
};

// Dense joint distribution over two or three finite variables, stored
// row-major with the last dimension varying fastest.
class JointTable {
 public:
  JointTable(std::vector<std::size_t> dims, std::vector<double> probs);

  // Normalizes nonnegative weights; throws if they sum to zero.
  static JointTable from_weights(std::vector<std::size_t> dims,
                                 std::vector<double> weights);

  std::size_t rank() const { return dims_.size(); }
  std::size_t dim(std::size_t d) const { return dims_.at(d); }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::span<const double> probs() const { return probs_; }

  double operator()(std::size_t a, std::size_t b) const {
    return probs_[a * dims_[1] + b];
  }
  double operator()(std::size_t a, std::size_t b, std::size_t c) const {
    return probs_[(a * dims_[1] + b) * dims_[2] + c];
  }

  std::vector<double> marginal(std::size_t d) const;

  // Rank-3 only: the pair (first, second) with the remaining dim summed out.
  JointTable marginal_pair(std::size_t first, std::size_t second) const;

  bool operator==(const JointTable&) const = default;

 private:
  std::vector<std::size_t> dims_;
  std::vector<double> probs_;
};

// t(x, i) = P(T_i = 1 | X = x). Features are conditionally independent
// given X, so P(T | X = x) is a product of Bernoullis.
class FeatureMap {
 public:
  FeatureMap(std::size_t x_size, std::size_t n_features, std::vector<double> t);

  // t_i(x) = 1{x == i}, n = x_size.
  static FeatureMap one_hot(std::size_t x_size);
  // x_size = 2^n, t_i(x) = bit i of x.
  static FeatureMap binary_code(std::size_t n_features);
  // Single feature that is on for every x.
  static FeatureMap constant(std::size_t x_size);

  std::size_t x_size() const { return x_size_; }
  std::size_t n_features() const { return n_features_; }
  double operator()(std::size_t x, std::size_t i) const {
    return t_[x * n_features_ + i];
  }
  std::span<const double> row(std::size_t x) const {
    return std::span<const double>(t_).subspan(x * n_features_, n_features_);
  }
  std::span<const double> values() const { return t_; }

  bool operator==(const FeatureMap&) const = default;

 private:
  std::size_t x_size_;
  std::size_t n_features_;
  std::vector<double> t_;
};

struct Sample {
  std::vector<double> input;
  std::size_t label = 0;
  double weight = 1.0;
};

// Training rows. Weights default to 1; exact-joint training uses the joint
// probabilities as weights instead of drawing samples.
class SampleSet {
 public:
  SampleSet(std::vector<Sample> rows, std::size_t y_size);

  std::size_t size() const { return rows_.size(); }
  std::size_t dim() const { return rows_.front().input.size(); }
  std::size_t y_size() const { return y_size_; }
  double total_weight() const { return total_weight_; }
  const std::vector<Sample>& rows() const { return rows_; }
  const Sample& operator[](std::size_t r) const { return rows_[r]; }

  std::vector<std::vector<double>> inputs() const;
  std::vector<std::size_t> labels() const;

 private:
  std::vector<Sample> rows_;
  std::size_t y_size_;
  double total_weight_ = 0.0;
};

double entropy(std::span<const double> p);

double mutual_information(const JointTable& joint);

// I(A;B|C) where C is `conditioned_dim` and A, B are the other two dims.
double conditional_mutual_information(const JointTable& joint,
                                      std::size_t conditioned_dim);

// P(X, T, Y) = P(X, Y) * prod_i Bernoulli(T_i; t_i(x)); T is indexed by its
// configuration with bit i holding T_i.
JointTable induce_triple(const JointTable& joint_xy, const FeatureMap& features);

// Equal-width bin of v over [0,1]; values on an interior edge go to the
// lower bin.
std::size_t bin_index(double v, std::size_t bins);

// Plug-in MI between two sample columns of (possibly multivariate) values.
// Each coordinate is binned independently; coordinates outside [0,1] are
// min-max rescaled first.
double binned_mi(std::span<const std::vector<double>> xs,
                 std::span<const std::vector<double>> ys,
                 std::size_t bins = kDefaultBins);

// Same estimator with already-discrete labels on the second side.
double binned_mi(std::span<const std::vector<double>> xs,
                 std::span<const std::size_t> labels,
                 std::size_t bins = kDefaultBins);

// Symbol id per row after binning, ids assigned in order of first
// appearance.
std::vector<std::size_t> discretize(std::span<const std::vector<double>> xs,
                                    std::size_t bins);

// Plug-in MI of two paired discrete sequences.
double empirical_mi(std::span<const std::size_t> a, std::span<const std::size_t> b);

double empirical_entropy(std::span<const std::size_t> symbols);

}  // namespace maxent
