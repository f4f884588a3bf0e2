#pragma once

#include "subriem/kernels.hpp"
#include "subriem/report.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace subriem::detail {

enum class SampleStatus { Ok, Excluded, Invalid };

struct SampleEval {
  SampleStatus status = SampleStatus::Ok;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool failed = false;
  /// Per-sample auxiliary value aggregated per rung by some checks.
  double aux = 0.0;
  std::vector<double> quantity;
  std::string invalid_reason;
};

struct LadderSamples {
  std::vector<std::pair<double, double>> rungs;
  std::vector<Point> points;
  std::vector<double> rho;
  std::vector<int> rung;
  std::vector<SampleEval> evals;
};

using PointCheck = std::function<SampleEval(const Point& p, double rho)>;

/// FNV-1a of a tag; used to give each check its own sample stream.
std::uint64_t stream_of(const std::string& tag);

/// Geometric split of [r0, r1] into `parts` shells.
std::vector<std::pair<double, double>> split_annulus(double r0, double r1, int parts);

/// Draws plan.per_rung points per shell, excludes points near the singular set, evaluates f in parallel.
LadderSamples run_samples(const GeometrySpec& g, const std::vector<std::pair<double, double>>& rungs, const SamplePlan& plan,
                          std::uint64_t stream, const PointCheck& f);

/// Margin pass/fail with the plan's tolerances.
void settle(SampleEval& e, const SamplePlan& plan, double scale);

/// Builds the report. With `onset_rule`, failures before the onset rung are tolerated.
CheckReport aggregate(const std::string& id, const GeometrySpec& g, const SamplePlan& plan, const LadderSamples& s,
                      bool onset_rule);

} // namespace subriem::detail
