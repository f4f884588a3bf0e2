#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace subriem {

enum class Verdict { Holds, Violated, Inconclusive };

std::string to_string(Verdict v);

/// A sample where the checked inequality failed.
struct Witness {
  std::size_t index = 0; // global sample index
  int rung = -1;
  Eigen::VectorXd point;
  double rho = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  /// Geometry-specific quantity (mu, eta, ...) at the point, when the check records one.
  std::vector<double> quantity;
};

struct RungSummary {
  double r_lo = 0.0;
  double r_hi = 0.0;
  int samples = 0;
  int excluded = 0;
  double min_margin = 0.0;
  int failures = 0;
};

/// Outcome of a sampled verification.
struct CheckReport {
  std::string id;
  std::string geometry;
  std::uint64_t seed = 0;
  int per_rung = 0;
  double r0 = 0.0;
  int rungs = 0;
  double eps_sing = 0.0;

  int samples_evaluated = 0;
  int samples_excluded = 0;
  double excluded_fraction = 0.0;
  /// Minimum margin over evaluated samples (on or past the onset for ladder checks).
  double min_margin = 0.0;
  std::optional<double> onset_radius;
  int pre_onset_failures = 0;
  int violation_count = 0;
  std::vector<RungSummary> ladder;
  /// Up to `kMaxWitnesses` failures in sample order; violation_count has the total.
  std::vector<Witness> witnesses;
  std::string quantity_name;
  std::vector<std::string> notes;
  nlohmann::json extra = nlohmann::json::object();
  Verdict verdict = Verdict::Inconclusive;

  static constexpr std::size_t kMaxWitnesses = 16;
};

nlohmann::json to_json(const CheckReport& r);
nlohmann::json to_json(const Witness& w);

/// Exit status for a verdict: 0 Holds, 1 Violated, 3 Inconclusive.
int exit_code(Verdict v);

} // namespace subriem
