#pragma once

#include "subriem/geometry.hpp"
#include "subriem/kernels.hpp"
#include "subriem/liouville.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace subriem {

/// Invalid configuration; `pointer` is the JSON pointer of the offending key.
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& msg, std::string pointer, std::string path = {});
  const std::string& pointer() const { return pointer_; }
  const std::string& path() const { return path_; }

private:
  std::string pointer_;
  std::string path_;
};

const std::vector<std::string>& task_names();

struct CheckTask {
  std::string id;
  ConditionOptions options;
  bool lyapunov_followup = true;
};

struct CertifyTask {
  std::string id;
  CertifyOptions options;
};

struct LyapunovTask {
  LyapunovCandidate candidate;
  std::optional<std::pair<double, double>> annulus;
};

struct ResidualTask {
  std::string u;
};

struct FundamentalTask {
  FundamentalKind kind = FundamentalKind::Phi1;
  Ellipticity ell{1.0, 1.0};
  double C1 = 1.0;
  double C2 = 0.0;
  std::pair<double, double> annulus{1.0, 100.0};
};

struct GrowthTask {
  std::string u;
  double c = 0.0;
  double nu = 0.5;
  GrowthOptions options;
};

struct CompareTask {
  std::string u;
  std::string v;
  LyapunovCandidate candidate;
};

struct RunConfig {
  std::string task;
  GeometrySpec geometry;
  std::optional<OperatorSpec> op;
  SamplePlan plan;
  std::string output_path;
  std::string format = "json";

  CheckTask check;
  CertifyTask certify;
  LyapunovTask verify_lyapunov;
  ResidualTask residual;
  FundamentalTask fundamental;
  GrowthTask growth;
  CompareTask compare;

  /// The configuration with every default resolved, for report echo.
  nlohmann::json echo;
};

GeometrySpec geometry_from_json(const nlohmann::json& j, const std::string& pointer = "/geometry");
nlohmann::json geometry_to_json(const GeometrySpec& g);

/// Validates and resolves a configuration document. `path` is only used in error messages.
RunConfig load_config(const nlohmann::json& j, const std::string& path = {});
nlohmann::json read_json_file(const std::string& path);

/// Built-in configuration for a condition or counterexample id.
nlohmann::json default_config(const std::string& id);

} // namespace subriem
