#pragma once

// Information-plane trajectories (I(X;T_l), I(T_l;Y)) of a layer stack and the
// exact-table check that a lossless feature map keeps I(T;Y) = I(X;Y).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "maxent/discrete_prob.hpp"
#include "maxent/equivalence_lab.hpp"
#include "maxent/recursive_net.hpp"

namespace maxent {

struct InfoPlanePoint {
  std::size_t epoch = 0;
  std::size_t layer = 1;  // 1-based hidden layer index
  double i_xt = 0.0;
  double i_ty = 0.0;

  bool operator==(const InfoPlanePoint&) const = default;
};

struct EstimatorInfo {
  std::size_t bins = kDefaultBins;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;

  bool operator==(const EstimatorInfo&) const = default;
};

struct Trajectory {
  std::vector<InfoPlanePoint> points;  // sorted by (epoch, layer)
  EstimatorInfo estimator;

  bool operator==(const Trajectory&) const = default;
};

using Snapshot = std::pair<std::size_t, LayerStack>;  // (epoch, parameters)

// {0, 1, 2, 5, 10, 20, 50, ...} up to and including max_epoch.
std::vector<std::size_t> default_schedule(std::size_t max_epoch);

// Binned I(X;T_l) and I(T_l;Y) for every snapshot and hidden layer. Labels
// are used as-is; inputs and activations are binned.
Trajectory track(const std::vector<Snapshot>& snapshots, const SampleSet& data,
                 std::size_t bins = kDefaultBins, std::uint64_t seed = 0);

struct IbCorollary {
  double i_ty = 0.0;
  double i_xy = 0.0;
  double gap = 0.0;  // |I(T;Y) - I(X;Y)|
  double i_xt = 0.0;
};

// Exact IB quantities on the induced (X, T, Y) table. When `solved` is
// non-empty the label side is the solved conditional composed with P(X)
// instead of the data labels; with a lossless T the gap vanishes either way.
IbCorollary verify_ib_corollary(const Instance& inst, const ConditionalTable& solved = {});

// Self-contained SVG: x = I(X;T), y = I(T;Y), one polyline per layer and one
// circle marker per point colored by epoch. Output is a pure function of
// the trajectory.
std::string render_plane_svg(const Trajectory& traj);
void emit_plane_svg(const Trajectory& traj, const std::filesystem::path& path);

}  // namespace maxent
