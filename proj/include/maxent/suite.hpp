#pragma once

// The acceptance battery: every check runs on fixed seeds derived from
// suite.seed (instance k uses suite.seed ^ k) and lands as rows of a
// (check_id, metric, threshold, value, pass) table.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "maxent/config.hpp"

namespace maxent {

enum class Comparison { kLessEqual, kLess, kGreaterEqual };

struct CheckResult {
  std::string check_id;
  std::string metric;
  Comparison op = Comparison::kLessEqual;
  double threshold = 0.0;
  double value = 0.0;
  bool pass = false;

  bool operator==(const CheckResult&) const = default;
};

CheckResult make_check(std::string id, std::string metric, Comparison op, double threshold, double value);

struct CheckTiming {
  std::string check_id;
  double elapsed_ms = 0.0;
};

struct RunRecord {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  double wall_time_ms = 0.0;
  std::vector<std::string> outputs;
  Json summary = Json::object();
};

Json to_json(const RunRecord& r);

struct SuiteResult {
  std::vector<CheckResult> checks;  // sorted by check_id, stable within an id
  std::vector<CheckTiming> timings;
  RunRecord record;

  bool all_pass() const;
  std::vector<std::string> failing_ids() const;
};

// Runs every check and writes suite.csv, suite.json, equivalence.csv,
// trajectory.csv and infoplane.svg into out_dir. Artifacts carry no timing,
// so two runs with one config are byte-identical.
SuiteResult run_suite(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

inline constexpr const char* kSuiteCsvHeader = "check_id,metric,threshold,value,pass";
std::string suite_csv(const std::vector<CheckResult>& checks);
Json to_json(const CheckResult& c);
std::string to_string(Comparison op);

// Central differences of f at x with step h.
std::vector<double> central_differences(const std::function<double(std::span<const double>)>& f,
                                        std::span<const double> x, double h);

// max_k |a_k - b_k| / max(|a_k|, |b_k|, floor).
double max_relative_error(std::span<const double> a, std::span<const double> b, double floor = 1e-6);

}  // namespace maxent
