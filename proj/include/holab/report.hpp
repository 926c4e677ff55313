#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "holab/bundle.hpp"
#include "holab/config.hpp"
#include "holab/json_io.hpp"

namespace holab {

inline constexpr const char* kVersion = "0.1.0";

struct VerificationCase {
  std::string id;
  std::string module;
  std::string operation;
  std::map<std::string, std::string> parameters;
  double tolerance = 0.0;
  std::uint64_t seed = 0;  // derived from the suite master seed and the id
};

struct CaseResult {
  std::string id;
  std::string status = "pass";  // pass | fail | skip
  double measured = 0.0;
  double tolerance = 0.0;
  std::vector<std::string> artifacts;  // paths relative to the output dir
  std::string detail;
};

struct RunEnvironment {
  int grid = 0;
  int truncation = 0;
  std::vector<std::string> groups;
  std::string version;
};

struct RunReport {
  std::vector<CaseResult> cases;
  RunEnvironment environment;
};

// One section per case, ordered by id; [suite] carries master_seed and groups.
std::vector<VerificationCase> load_cases(const Config& cfg);

// substring match on id, module or operation; empty matches everything
bool case_matches(const VerificationCase& c, const std::string& filter);

// Executes the matching cases on a worker pool (HOLONOMY_LAB_THREADS caps the
// width), writes artifacts under out_dir, and assembles results by case id.
// Throws when the filter matches nothing or an operation is unknown.
RunReport run_suite(const Config& cfg, const std::string& filter, const std::string& out_dir);

bool all_passed(const RunReport& r);
nlohmann::json report_to_json(const RunReport& r, bool with_timestamp);
RunReport report_from_json(const nlohmann::json& j);

// gnuplot scripts plus companion CSVs for the plot-ready artifacts in the
// report; an empty report writes nothing. Returns the written paths.
std::vector<std::string> emit_plots(const RunReport& report, const std::string& dir);

int worker_cap();

}  // namespace holab
