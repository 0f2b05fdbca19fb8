#pragma once

// Experiment configuration for the maxent_lab harness. Every field has a
// default; a config file only names what it changes. The full key list is in
// docs/schemas.md.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "maxent/maxent_core.hpp"
#include "maxent/recursive_net.hpp"
#include "maxent/serialize.hpp"

namespace maxent {

struct GeneratorConfig {
  std::string kind = "equiv";  // equiv | violate_c1 | violate_c2 | xor | random
  std::uint64_t seed = 0;
  std::size_t n_features = 4;
  std::size_t y_size = 3;

  bool operator==(const GeneratorConfig&) const = default;
};

struct NetConfig {
  std::string task = "xor";  // xor | bits12 | instance
  std::vector<std::size_t> hidden;
  NetTrainConfig train;

  bool operator==(const NetConfig&) const = default;
};

struct EstimatorConfig {
  std::size_t bins = kDefaultBins;
  std::size_t n_samples = 10000;
  std::uint64_t seed = 0;

  bool operator==(const EstimatorConfig&) const = default;
};

struct SuiteConfig {
  std::uint64_t seed = 0;
  double me_tv_tolerance = 1e-6;
  double condition_tolerance = 1e-9;
  double theorem_tv_tolerance = 1e-3;
  double violation_median_floor = 0.05;
  double gradient_tolerance = 1e-4;
  double reduction_tv_tolerance = 1e-4;
  double fano_slack = 0.15;
  std::size_t me_joints = 100;
  std::size_t equiv_instances = 100;
  std::size_t violating_instances = 50;
  std::size_t gradient_points = 10;
  std::size_t dpi_triples = 1000;
  std::size_t xor_seeds = 10;
  std::size_t ib_instances = 100;

  bool operator==(const SuiteConfig&) const = default;
};

struct ExperimentConfig {
  std::string out_dir = "maxent_out";
  GeneratorConfig generator;
  TrainConfig solver = default_solver();
  NetConfig net = default_xor_net();
  NetConfig infoplane = default_infoplane_net();
  EstimatorConfig estimator;
  SuiteConfig suite;

  static TrainConfig default_solver();
  static NetConfig default_xor_net();
  static NetConfig default_infoplane_net();

  // RangeError on any out-of-range field.
  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

Json to_json(const ExperimentConfig& cfg);
// Applies defaults for missing keys; UnknownKey on extra keys, ParseError on
// wrong types, RangeError via validate().
ExperimentConfig config_from_json(const Json& j);

ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path);

// FNV-1a over the canonical (key-sorted) dump without out_dir, as 16 hex
// digits. Where a run writes does not change what it computes.
std::string config_hash(const ExperimentConfig& cfg);

std::string to_string(TrainMode mode);
std::string to_string(BlockOrder order);

}  // namespace maxent
