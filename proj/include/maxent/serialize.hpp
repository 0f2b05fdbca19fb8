#pragma once

// JSON and CSV forms of the lab's data types. Field names are part of the
// on-disk schema; see docs/schemas.md.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "maxent/discrete_prob.hpp"
#include "maxent/equivalence_lab.hpp"
#include "maxent/info_plane.hpp"
#include "maxent/maxent_core.hpp"
#include "maxent/recursive_net.hpp"

namespace maxent {

using Json = nlohmann::json;

// Shortest decimal that round-trips to the same double.
std::string format_number(double v);

Json to_json(const JointTable& t);
JointTable joint_from_json(const Json& j);

Json to_json(const FeatureMap& f);
FeatureMap features_from_json(const Json& j);

Json to_json(const Instance& inst);
Instance instance_from_json(const Json& j);

Json to_json(const SoftmaxParams& p);
SoftmaxParams softmax_from_json(const Json& j);

Json to_json(const MEDualParams& p);
Json to_json(const ConditionalTable& c);

Json to_json(const LayerStack& net);
LayerStack stack_from_json(const Json& j);

Json to_json(const EquivalenceReport& r);
Json to_json(const InequalityChain& c);
Json to_json(const IbCorollary& c);
Json to_json(const Trajectory& t);

// CSV schemas.
inline constexpr const char* kEquivalenceCsvHeader = "seed,n,y_size,i_xy_given_t,max_i_titj_given_y,tv,pass";
inline constexpr const char* kTraceCsvHeader = "iteration,loss,reg_term,train_error";
inline constexpr const char* kTrajectoryCsvHeader = "epoch,layer,i_xt_nats,i_ty_nats,bins,n_samples,seed";

std::string equivalence_csv_row(const Instance& inst, const EquivalenceReport& r);
std::string trace_csv(const TrainTrace& trace);
std::string trajectory_csv(const Trajectory& traj);

// Whole-file helpers; throw IoError.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);
Json read_json_file(const std::filesystem::path& path);

// Canonical two-space-indented dump with a trailing newline.
std::string dump(const Json& j);

}  // namespace maxent
