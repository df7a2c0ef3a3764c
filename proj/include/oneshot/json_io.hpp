#pragma once
// Distribution file format and machine-readable reports.

#include <string>

#include "json.hpp"
#include "oneshot/experiments.hpp"
#include "oneshot/info.hpp"
#include "oneshot/protocol.hpp"
#include "oneshot/testset.hpp"

namespace oneshot {

// {"vars":[{"name":"X","size":2},...], "probs":["1/4","1/4",...]} — probs are
// rational strings or integers, row-major in vars order. Non-normalized
// input is rejected unless normalize is set.
JointDist parse_dist_json(const std::string& text, bool normalize = false);
JointDist load_dist_file(const std::string& path, bool normalize = false);
nlohmann::json dist_to_json(const JointDist& d);

nlohmann::json region_report_json(const RegionReport& rep);
nlohmann::json testset_report_json(const TestSetReport& rep);
nlohmann::json estimate_json(const ErrorEstimate& est);
nlohmann::json trial_json(const TrialOutcome& o);

// EmpiricalJoint as CSV: one row per cell with a positive count.
std::string empirical_to_csv(const EmpiricalJoint& joint);

// Reproducibility record for a CLI invocation.
nlohmann::json run_manifest(const std::string& command, const std::vector<std::string>& args,
                            uint64_t seed, const std::vector<std::string>& input_files,
                            double wall_seconds, const std::vector<std::string>& output_paths);

uint64_t file_fnv1a(const std::string& path);

}  // namespace oneshot
