#pragma once

// Datasets used by the trainers and the information-plane runs.

#include <cstddef>
#include <cstdint>

#include "maxent/discrete_prob.hpp"
#include "maxent/equivalence_lab.hpp"

namespace maxent {

// The four XOR points, unit weight, labels in {0, 1}.
SampleSet xor_dataset();

// 12 fair random bits; y = maj(b0..b4) + 2 * maj(b5..b9), so 4 classes and
// bits 10 and 11 are distractors.
SampleSet bits12_dataset(std::size_t n_samples, std::uint64_t seed);

// One row per (x, y) cell with P(x, y) > 0: input t(x), weight P(x, y).
// Training on it optimizes the exact expectation under the joint.
SampleSet instance_samples(const Instance& inst);

}  // namespace maxent
