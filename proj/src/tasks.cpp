#include "maxent/tasks.hpp"

#include "maxent/random.hpp"

namespace maxent {

SampleSet xor_dataset() {
  std::vector<Sample> rows;
  for (std::size_t x = 0; x < 4; ++x) {
    const std::size_t a = x & 1, b = x >> 1;
    rows.push_back({{static_cast<double>(a), static_cast<double>(b)}, a ^ b, 1.0});
  }
  return SampleSet(std::move(rows), 2);
}

SampleSet bits12_dataset(std::size_t n_samples, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Sample> rows;
  rows.reserve(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    std::vector<double> bits(12);
    for (double& b : bits) b = rng.bernoulli(0.5) ? 1.0 : 0.0;
    int lo = 0, hi = 0;
    for (std::size_t i = 0; i < 5; ++i) {
      lo += static_cast<int>(bits[i]);
      hi += static_cast<int>(bits[5 + i]);
    }
    const std::size_t y = static_cast<std::size_t>(lo >= 3) + 2 * static_cast<std::size_t>(hi >= 3);
    rows.push_back({std::move(bits), y, 1.0});
  }
  return SampleSet(std::move(rows), 4);
}

SampleSet instance_samples(const Instance& inst) {
  std::vector<Sample> rows;
  for (std::size_t x = 0; x < inst.x_size(); ++x) {
    const auto t = inst.features.row(x);
    for (std::size_t y = 0; y < inst.y_size(); ++y) {
      const double p = inst.joint(x, y);
      if (p > 0.0) rows.push_back({std::vector<double>(t.begin(), t.end()), y, p});
    }
  }
  return SampleSet(std::move(rows), inst.y_size());
}

}  // namespace maxent
