// Acceptance runner: one PASS/FAIL line per criterion, exit 1 if any fails.
// Runs the battery twice into separate directories; the second run is the
// determinism criterion.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "maxent/error.hpp"
#include "maxent/serialize.hpp"
#include "maxent/suite.hpp"

using namespace maxent;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int number;
  const char* check_id;  // nullptr for determinism
  const char* title;
  double runtime_limit_ms;  // 0 for none
};

const std::vector<Criterion> kCriteria{
    {1, "01-me-oracle", "original ME solver matches brute-force conditional", 10e3},
    {2, "02-equivalence", "conditions hold and softmax matches ME on equiv instances", 60e3},
    {3, "03-violation-control", "violating instances show a median TV gap", 0},
    {4, "04-gradients", "analytic gradients match central differences", 0},
    {5, "05-data-processing", "data-processing inequalities on random triples", 0},
    {6, "06-xor-chain", "XOR instance falsifies the conditional-independence claim", 0},
    {7, "07-reduction", "zero-depth stack equals feature softmax", 0},
    {8, "08-coordinate-vs-backprop", "coordinate and backprop training on XOR", 120e3},
    {9, "09-ib-corollary", "lossless features keep I(T;Y) = I(X;Y)", 0},
    {10, "10-info-plane", "information-plane pipeline on the 12-bit task", 300e3},
    {11, nullptr, "two suite runs give byte-identical artifacts", 0},
};

std::vector<std::string> differing_files(const fs::path& a, const fs::path& b) {
  std::vector<std::string> diff;
  for (const auto& entry : fs::directory_iterator(a)) {
    const fs::path other = b / entry.path().filename();
    if (!fs::exists(other) || read_file(entry.path()) != read_file(other)) diff.push_back(entry.path().filename());
  }
  for (const auto& entry : fs::directory_iterator(b))
    if (!fs::exists(a / entry.path().filename())) diff.push_back(entry.path().filename());
  return diff;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "maxent_acceptance";
  fs::remove_all(root);
  const ExperimentConfig cfg;
  SuiteResult first, second;
  try {
    first = run_suite(cfg, root / "run1");
    second = run_suite(cfg, root / "run2");
  } catch (const Error& e) {
    std::printf("FAIL suite aborted: %s\n", e.what());
    return 1;
  }

  std::map<std::string, double> elapsed;
  for (const CheckTiming& t : first.timings) elapsed[t.check_id] += t.elapsed_ms;

  bool all = true;
  for (const Criterion& c : kCriteria) {
    bool pass = true;
    std::string detail;
    if (c.check_id == nullptr) {
      const auto diff = differing_files(root / "run1", root / "run2");
      pass = diff.empty() && !fs::is_empty(root / "run1");
      for (const std::string& f : diff) detail += " differs:" + f;
      if (detail.empty()) detail = " all artifacts identical";
    } else {
      std::size_t rows = 0;
      for (const CheckResult& r : first.checks) {
        if (r.check_id != c.check_id) continue;
        ++rows;
        pass = pass && r.pass;
        detail += " " + r.metric + "=" + format_number(r.value) + (r.pass ? "" : "(!" + to_string(r.op) + " " +
                                                                                      format_number(r.threshold) + ")");
      }
      if (rows == 0) {
        pass = false;
        detail = " no rows";
      }
      const double ms = elapsed[c.check_id];
      detail += " time_ms=" + format_number(std::round(ms));
      if (c.runtime_limit_ms > 0 && ms >= c.runtime_limit_ms) {
        pass = false;
        detail += "(limit " + format_number(c.runtime_limit_ms) + ")";
      }
    }
    all = all && pass;
    std::printf("%s AC%d %s:%s\n", pass ? "PASS" : "FAIL", c.number, c.title, detail.c_str());
  }
  std::printf("%s\n", all ? "ALL PASS" : "SOME CRITERIA FAILED");
  return all ? 0 : 1;
}
