#pragma once

#include "subriem/config.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace subriem {

inline constexpr const char* kToolVersion = "0.1.0";

struct TaskOutcome {
  nlohmann::json result = nlohmann::json::object();
  /// 0 Holds/verified, 1 Violated, 3 Inconclusive.
  int exit_status = 0;
};

/// Runs the task named in `cfg`. Throws ConfigError / std::invalid_argument on unusable input.
TaskOutcome execute(const RunConfig& cfg);

/// Full report: config echo, tool version, task payload, exit status. Keys come out sorted.
nlohmann::json make_report(const RunConfig& cfg, const TaskOutcome& out);

/// CSV table for a task payload; a null or empty payload gives the header only.
std::string tabulate(const std::string& task, const nlohmann::json& result);

/// Command-line entry; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

} // namespace subriem
