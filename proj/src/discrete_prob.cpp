#include "maxent/discrete_prob.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "maxent/error.hpp"

namespace maxent {

namespace {

// Neumaier-compensated sum; the normalization check runs at 1e-12 and naive
// summation of 2^16-configuration tables drifts close to that.
double accurate_sum(std::span<const double> v) {
  double sum = 0.0;
  double comp = 0.0;
  for (double x : v) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

void check_distribution(std::span<const double> p) {
  for (double v : p) {
    if (!(v >= 0.0)) {
      throw Error(ErrorKind::kNegativeEntry,
                  "probability entry " + std::to_string(v) + " is negative or NaN");
    }
  }
  const double s = accurate_sum(p);
  if (std::abs(s - 1.0) > kNormTolerance) {
    throw Error(ErrorKind::kNotNormalized,
                "entries sum to " + std::to_string(s) + ", expected 1");
  }
}

double xlogx_ratio(double p, double ratio) { return p > 0.0 ? p * std::log(ratio) : 0.0; }

}  // namespace

Alphabet Alphabet::make(std::size_t size, std::vector<std::string> labels) {
  if (size == 0) {
    throw Error(ErrorKind::kInvalidArgument, "alphabet size must be >= 1");
  }
  if (!labels.empty()) {
    if (labels.size() != size) {
      throw Error(ErrorKind::kDimensionMismatch, "label count differs from alphabet size");
    }
    std::set<std::string> unique(labels.begin(), labels.end());
    if (unique.size() != labels.size()) {
      throw Error(ErrorKind::kInvalidArgument, "alphabet labels must be unique");
    }
  }
  return Alphabet{size, std::move(labels)};
}

JointTable::JointTable(std::vector<std::size_t> dims, std::vector<double> probs)
    : dims_(std::move(dims)), probs_(std::move(probs)) {
  if (dims_.size() != 2 && dims_.size() != 3) {
    throw Error(ErrorKind::kDimensionMismatch, "joint table rank must be 2 or 3");
  }
  std::size_t cells = 1;
  for (std::size_t d : dims_) {
    if (d == 0) throw Error(ErrorKind::kInvalidArgument, "alphabet size must be >= 1");
    cells *= d;
  }
  if (cells != probs_.size()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "table has " + std::to_string(probs_.size()) + " entries, dims imply " +
                    std::to_string(cells));
  }
  check_distribution(probs_);
}

JointTable JointTable::from_weights(std::vector<std::size_t> dims,
                                    std::vector<double> weights) {
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorKind::kNegativeEntry, "weights must be finite and nonnegative");
    }
  }
  const double total = accurate_sum(weights);
  if (!(total > 0.0)) {
    throw Error(ErrorKind::kNotNormalized, "weights sum to zero");
  }
  for (double& w : weights) w /= total;
  return JointTable(std::move(dims), std::move(weights));
}

std::vector<double> JointTable::marginal(std::size_t d) const {
  if (d >= rank()) throw Error(ErrorKind::kInvalidArgument, "marginal dim out of range");
  std::vector<double> out(dims_[d], 0.0);
  if (rank() == 2) {
    for (std::size_t a = 0; a < dims_[0]; ++a)
      for (std::size_t b = 0; b < dims_[1]; ++b)
        out[d == 0 ? a : b] += (*this)(a, b);
  } else {
    for (std::size_t a = 0; a < dims_[0]; ++a)
      for (std::size_t b = 0; b < dims_[1]; ++b)
        for (std::size_t c = 0; c < dims_[2]; ++c) {
          const std::size_t idx[3] = {a, b, c};
          out[idx[d]] += (*this)(a, b, c);
        }
  }
  return out;
}

JointTable JointTable::marginal_pair(std::size_t first, std::size_t second) const {
  if (rank() != 3 || first >= 3 || second >= 3 || first == second) {
    throw Error(ErrorKind::kInvalidArgument, "marginal_pair needs a rank-3 table and two distinct dims");
  }
  std::vector<double> out(dims_[first] * dims_[second], 0.0);
  for (std::size_t a = 0; a < dims_[0]; ++a)
    for (std::size_t b = 0; b < dims_[1]; ++b)
      for (std::size_t c = 0; c < dims_[2]; ++c) {
        const std::size_t idx[3] = {a, b, c};
        out[idx[first] * dims_[second] + idx[second]] += (*this)(a, b, c);
      }
  return JointTable({dims_[first], dims_[second]}, std::move(out));
}

FeatureMap::FeatureMap(std::size_t x_size, std::size_t n_features, std::vector<double> t)
    : x_size_(x_size), n_features_(n_features), t_(std::move(t)) {
  if (x_size_ == 0) throw Error(ErrorKind::kInvalidArgument, "feature map needs x_size >= 1");
  if (t_.size() != x_size_ * n_features_) {
    throw Error(ErrorKind::kDimensionMismatch, "feature table must be x_size * n_features");
  }
  for (double v : t_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorKind::kRangeError, "feature confidence " + std::to_string(v) + " outside [0,1]");
    }
  }
}

FeatureMap FeatureMap::one_hot(std::size_t x_size) {
  std::vector<double> t(x_size * x_size, 0.0);
  for (std::size_t x = 0; x < x_size; ++x) t[x * x_size + x] = 1.0;
  return FeatureMap(x_size, x_size, std::move(t));
}

FeatureMap FeatureMap::binary_code(std::size_t n_features) {
  if (n_features > kMaxFeatures) {
    throw Error(ErrorKind::kTooManyFeatures, "binary code limited to 16 features");
  }
  const std::size_t x_size = std::size_t{1} << n_features;
  std::vector<double> t(x_size * n_features, 0.0);
  for (std::size_t x = 0; x < x_size; ++x)
    for (std::size_t i = 0; i < n_features; ++i)
      t[x * n_features + i] = ((x >> i) & 1U) ? 1.0 : 0.0;
  return FeatureMap(x_size, n_features, std::move(t));
}

FeatureMap FeatureMap::constant(std::size_t x_size) {
  return FeatureMap(x_size, 1, std::vector<double>(x_size, 1.0));
}

SampleSet::SampleSet(std::vector<Sample> rows, std::size_t y_size)
    : rows_(std::move(rows)), y_size_(y_size) {
  if (rows_.empty()) throw Error(ErrorKind::kEmptySample, "sample set has no rows");
  if (y_size_ == 0) throw Error(ErrorKind::kInvalidArgument, "label alphabet must be nonempty");
  const std::size_t d = rows_.front().input.size();
  for (const Sample& s : rows_) {
    if (s.input.size() != d) {
      throw Error(ErrorKind::kDimensionMismatch, "sample inputs differ in dimension");
    }
    if (s.label >= y_size_) {
      throw Error(ErrorKind::kRangeError, "label " + std::to_string(s.label) + " >= y_size");
    }
    if (!(s.weight >= 0.0) || !std::isfinite(s.weight)) {
      throw Error(ErrorKind::kRangeError, "sample weight must be finite and nonnegative");
    }
    total_weight_ += s.weight;
  }
  if (!(total_weight_ > 0.0)) {
    throw Error(ErrorKind::kEmptySample, "sample weights sum to zero");
  }
}

std::vector<std::vector<double>> SampleSet::inputs() const {
  std::vector<std::vector<double>> out;
  out.reserve(rows_.size());
  for (const Sample& s : rows_) out.push_back(s.input);
  return out;
}

std::vector<std::size_t> SampleSet::labels() const {
  std::vector<std::size_t> out;
  out.reserve(rows_.size());
  for (const Sample& s : rows_) out.push_back(s.label);
  return out;
}

double entropy(std::span<const double> p) {
  check_distribution(p);
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return std::max(h, 0.0);
}

double mutual_information(const JointTable& joint) {
  if (joint.rank() != 2) {
    throw Error(ErrorKind::kDimensionMismatch, "mutual_information needs a rank-2 table");
  }
  const auto pa = joint.marginal(0);
  const auto pb = joint.marginal(1);
  double mi = 0.0;
  for (std::size_t a = 0; a < joint.dim(0); ++a) {
    for (std::size_t b = 0; b < joint.dim(1); ++b) {
      const double p = joint(a, b);
      if (p > 0.0) mi += xlogx_ratio(p, p / (pa[a] * pb[b]));
    }
  }
  return std::max(mi, 0.0);
}

double conditional_mutual_information(const JointTable& joint, std::size_t conditioned_dim) {
  if (joint.rank() != 3) {
    throw Error(ErrorKind::kDimensionMismatch, "conditional MI needs a rank-3 table");
  }
  if (conditioned_dim > 2) {
    throw Error(ErrorKind::kInvalidArgument, "conditioned_dim must be 0, 1 or 2");
  }
  const std::size_t da = conditioned_dim == 0 ? 1 : 0;
  const std::size_t db = conditioned_dim == 2 ? 1 : 2;
  const auto pc = joint.marginal(conditioned_dim);
  const JointTable pac = joint.marginal_pair(da, conditioned_dim);
  const JointTable pbc = joint.marginal_pair(db, conditioned_dim);

  // sum_{abc} p(abc) ln[p(abc) p(c) / (p(ac) p(bc))]; zero-mass slices drop out.
  double cmi = 0.0;
  for (std::size_t a = 0; a < joint.dim(0); ++a)
    for (std::size_t b = 0; b < joint.dim(1); ++b)
      for (std::size_t c = 0; c < joint.dim(2); ++c) {
        const double p = joint(a, b, c);
        if (p <= 0.0) continue;
        const std::size_t idx[3] = {a, b, c};
        const std::size_t ia = idx[da], ib = idx[db], ic = idx[conditioned_dim];
        cmi += p * std::log(p * pc[ic] / (pac(ia, ic) * pbc(ib, ic)));
      }
  return std::max(cmi, 0.0);
}

JointTable induce_triple(const JointTable& joint_xy, const FeatureMap& features) {
  if (joint_xy.rank() != 2) {
    throw Error(ErrorKind::kDimensionMismatch, "induce_triple needs P(X,Y) of rank 2");
  }
  if (features.x_size() != joint_xy.dim(0)) {
    throw Error(ErrorKind::kDimensionMismatch, "feature map x_size differs from joint X dimension");
  }
  const std::size_t n = features.n_features();
  if (n > kMaxFeatures) {
    throw Error(ErrorKind::kTooManyFeatures,
                std::to_string(n) + " features exceed the enumeration cap of 16");
  }
  const std::size_t nx = joint_xy.dim(0);
  const std::size_t ny = joint_xy.dim(1);
  const std::size_t nt = std::size_t{1} << n;

  std::vector<double> probs(nx * nt * ny, 0.0);
  std::vector<double> config(nt);
  for (std::size_t x = 0; x < nx; ++x) {
    // Build P(T = c | X = x) one feature at a time.
    config.assign(nt, 0.0);
    config[0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double on = features(x, i);
      const std::size_t half = std::size_t{1} << i;
      for (std::size_t c = 0; c < half; ++c) {
        config[c | half] = config[c] * on;
        config[c] *= 1.0 - on;
      }
    }
    for (std::size_t c = 0; c < nt; ++c)
      for (std::size_t y = 0; y < ny; ++y)
        probs[(x * nt + c) * ny + y] = joint_xy(x, y) * config[c];
  }
  return JointTable({nx, nt, ny}, std::move(probs));
}

std::size_t bin_index(double v, std::size_t bins) {
  const double scaled = std::ceil(v * static_cast<double>(bins)) - 1.0;
  if (!(scaled > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(scaled), bins - 1);
}

std::vector<std::size_t> discretize(std::span<const std::vector<double>> xs, std::size_t bins) {
  if (xs.empty()) throw Error(ErrorKind::kEmptySample, "no samples to discretize");
  if (bins < 2) throw Error(ErrorKind::kRangeError, "bins must be >= 2");
  const std::size_t d = xs.front().size();

  std::vector<double> lo(d, 0.0), scale(d, 1.0);
  for (std::size_t k = 0; k < d; ++k) {
    double mn = xs.front()[k], mx = xs.front()[k];
    for (const auto& row : xs) {
      if (row.size() != d) {
        throw Error(ErrorKind::kDimensionMismatch, "sample rows differ in dimension");
      }
      mn = std::min(mn, row[k]);
      mx = std::max(mx, row[k]);
    }
    if (mn < 0.0 || mx > 1.0) {
      lo[k] = mn;
      scale[k] = mx > mn ? 1.0 / (mx - mn) : 0.0;
    }
  }

  std::map<std::vector<std::size_t>, std::size_t> ids;
  std::vector<std::size_t> symbols;
  symbols.reserve(xs.size());
  std::vector<std::size_t> key(d);
  for (const auto& row : xs) {
    for (std::size_t k = 0; k < d; ++k) key[k] = bin_index((row[k] - lo[k]) * scale[k], bins);
    auto [it, inserted] = ids.emplace(key, ids.size());
    symbols.push_back(it->second);
  }
  return symbols;
}

double empirical_mi(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.empty()) throw Error(ErrorKind::kEmptySample, "no samples for MI");
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "paired sample columns differ in length");
  }
  std::map<std::size_t, std::size_t> ca, cb;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> cab;
  for (std::size_t r = 0; r < a.size(); ++r) {
    ++ca[a[r]];
    ++cb[b[r]];
    ++cab[{a[r], b[r]}];
  }
  const double n = static_cast<double>(a.size());
  double mi = 0.0;
  for (const auto& [key, count] : cab) {
    const double nab = static_cast<double>(count);
    const double na = static_cast<double>(ca[key.first]);
    const double nb = static_cast<double>(cb[key.second]);
    mi += nab / n * std::log((nab * n) / (na * nb));
  }
  return std::max(mi, 0.0);
}

double empirical_entropy(std::span<const std::size_t> symbols) {
  if (symbols.empty()) throw Error(ErrorKind::kEmptySample, "no samples for entropy");
  std::map<std::size_t, std::size_t> counts;
  for (std::size_t s : symbols) ++counts[s];
  const double n = static_cast<double>(symbols.size());
  double h = 0.0;
  for (const auto& [sym, count] : counts) {
    const double p = static_cast<double>(count) / n;
    h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

double binned_mi(std::span<const std::vector<double>> xs,
                 std::span<const std::vector<double>> ys, std::size_t bins) {
  if (xs.empty() || ys.empty()) throw Error(ErrorKind::kEmptySample, "binned_mi on empty sample");
  const auto a = discretize(xs, bins);
  const auto b = discretize(ys, bins);
  return empirical_mi(a, b);
}

double binned_mi(std::span<const std::vector<double>> xs,
                 std::span<const std::size_t> labels, std::size_t bins) {
  if (xs.empty() || labels.empty()) {
    throw Error(ErrorKind::kEmptySample, "binned_mi on empty sample");
  }
  const auto a = discretize(xs, bins);
  return empirical_mi(a, labels);
}

}  // namespace maxent
