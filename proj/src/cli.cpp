#include "subriem/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace subriem {

using json = nlohmann::json;

namespace {

int worst(int a, int b) {
  auto rank = [](int s) { return s == 1 ? 2 : (s == 3 ? 1 : 0); };
  return rank(a) >= rank(b) ? a : b;
}

std::vector<double> to_vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

const OperatorSpec& need_op(const RunConfig& cfg) {
  if (!cfg.op) {
    throw ConfigError("task '" + cfg.task + "' needs an operator", "/operator");
  }
  return *cfg.op;
}

std::pair<double, double> default_annulus(const SamplePlan& plan) {
  return {plan.r0, std::ldexp(plan.r0, plan.rungs)};
}

std::string num(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string cell(const json& v) {
  if (v.is_number()) {
    return num(v.get<double>());
  }
  if (v.is_string()) {
    return v.get<std::string>();
  }
  if (v.is_boolean()) {
    return v.get<bool>() ? "true" : "false";
  }
  if (v.is_null()) {
    return "";
  }
  return v.dump();
}

void ladder_rows(std::ostringstream& os, const json& rep) {
  os << "r_lo,r_hi,samples,excluded,min_margin,failures\n";
  if (!rep.is_object() || !rep.contains("ladder")) {
    return;
  }
  for (const auto& r : rep["ladder"]) {
    os << cell(r["r_lo"]) << ',' << cell(r["r_hi"]) << ',' << cell(r["samples"]) << ',' << cell(r["excluded"]) << ','
       << cell(r["min_margin"]) << ',' << cell(r["failures"]) << '\n';
  }
}

} // namespace

TaskOutcome execute(const RunConfig& cfg) {
  const GeometrySpec& g = cfg.geometry;
  const SamplePlan& plan = cfg.plan;
  TaskOutcome out;
  json& res = out.result;

  if (cfg.task == "describe") {
    res = {{"name", g.name()},
           {"ambient_dim", g.ambient_dim()},
           {"m", g.rank()},
           {"Q", g.homogeneous_dim()},
           {"horizontal_dim", g.horizontal_dim()},
           {"step2_group", g.is_step2_group()},
           {"singular_set", g.singular_set()}};
    return out;
  }
  if (cfg.task == "residual") {
    const OperatorSpec& op = need_op(cfg);
    const Expr u = parse(cfg.residual.u, g);
    const auto rows = residual_table(g, op, u, plan);
    json arr = json::array();
    double worst_abs = 0.0;
    for (const auto& r : rows) {
      arr.push_back({{"point", to_vec(r.point)}, {"rho", r.rho}, {"residual", r.residual}});
      worst_abs = std::max(worst_abs, std::abs(r.residual));
    }
    res = {{"u", cfg.residual.u}, {"dim", g.ambient_dim()}, {"rows", arr}, {"max_abs_residual", worst_abs}};
    return out;
  }
  if (cfg.task == "verify-lyapunov") {
    const OperatorSpec& op = need_op(cfg);
    const auto ann = cfg.verify_lyapunov.annulus.value_or(default_annulus(plan));
    const CheckReport r = verify_lyapunov(g, op, cfg.verify_lyapunov.candidate, ann.first, ann.second, plan);
    res = to_json(r);
    out.exit_status = exit_code(r.verdict);
    return out;
  }
  if (cfg.task == "check") {
    const OperatorSpec& op = need_op(cfg);
    const CheckReport r = check_condition(cfg.check.id, g, op, plan, cfg.check.options);
    res["condition"] = to_json(r);
    out.exit_status = exit_code(r.verdict);
    if (cfg.check.id != "liohad_gate" && cfg.check.lyapunov_followup && r.verdict == Verdict::Holds && r.onset_radius) {
      const double R = *r.onset_radius;
      const CheckReport v = verify_lyapunov(g, op, paired_candidate(cfg.check.id, op), R, 4.0 * R, plan);
      res["lyapunov"] = to_json(v);
      out.exit_status = worst(out.exit_status, exit_code(v.verdict));
    }
    return out;
  }
  if (cfg.task == "certify") {
    const CheckReport r = certify_counterexample(cfg.certify.id, g, plan, cfg.certify.options);
    res["certificate"] = to_json(r);
    out.exit_status = exit_code(r.verdict);
    if (cfg.certify.id == "optimality_drift") {
      // Informational: the bound without the |D rho|^2 factor.
      res["literal"] = to_json(optimality_drift_literal(g, plan, cfg.certify.options));
    }
    return out;
  }
  if (cfg.task == "fundamental") {
    const auto& f = cfg.fundamental;
    const CheckReport r = fundamental_residual_check(g, f.kind, f.ell, f.annulus.first, f.annulus.second, plan, f.C1, f.C2);
    res = to_json(r);
    out.exit_status = exit_code(r.verdict);
    return out;
  }
  if (cfg.task == "growth") {
    const Expr u = parse(cfg.growth.u, g);
    res = to_json(growth_probe(g, u, cfg.growth.c, cfg.growth.nu, plan, cfg.growth.options));
    return out;
  }
  if (cfg.task == "compare") {
    const OperatorSpec& op = need_op(cfg);
    const Expr u = parse(cfg.compare.u, g);
    const Expr v = parse(cfg.compare.v, g);
    const CheckReport r = comparison_verdict(g, op, u, v, cfg.compare.candidate, plan);
    res = to_json(r);
    out.exit_status = exit_code(r.verdict);
    return out;
  }
  throw ConfigError("unknown task '" + cfg.task + "'", "/task");
}

json make_report(const RunConfig& cfg, const TaskOutcome& out) {
  return {{"tool", "subriem"},
          {"version", kToolVersion},
          {"config", cfg.echo},
          {"task", cfg.task},
          {"result", out.result},
          {"exit_status", out.exit_status}};
}

std::string tabulate(const std::string& task, const json& result) {
  std::ostringstream os;
  const bool empty = result.is_null() || result.empty();
  if (task == "growth") {
    os << "r,sup,scaled_q2,scaled_nu\n";
    if (!empty) {
      for (const auto& r : result["rungs"]) {
        os << cell(r["r"]) << ',' << cell(r["sup"]) << ',' << cell(r["scaled_q2"]) << ',' << cell(r["scaled_nu"]) << '\n';
      }
    }
    return os.str();
  }
  if (task == "residual") {
    const int n = empty ? 0 : result.value("dim", 0);
    for (int i = 1; i <= n; ++i) {
      os << 'x' << i << ',';
    }
    os << "rho,residual\n";
    if (!empty) {
      for (const auto& r : result["rows"]) {
        for (const auto& x : r["point"]) {
          os << cell(x) << ',';
        }
        os << cell(r["rho"]) << ',' << cell(r["residual"]) << '\n';
      }
    }
    return os.str();
  }
  if (task == "describe") {
    os << "key,value\n";
    if (!empty) {
      for (auto it = result.begin(); it != result.end(); ++it) {
        os << it.key() << ',' << cell(it.value()) << '\n';
      }
    }
    return os.str();
  }
  if (task == "check") {
    ladder_rows(os, empty ? json() : result.value("condition", json()));
    return os.str();
  }
  if (task == "certify") {
    ladder_rows(os, empty ? json() : result.value("certificate", json()));
    return os.str();
  }
  ladder_rows(os, empty ? json() : result);
  return os.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sampled checks of Liouville conditions for fully nonlinear subelliptic operators"};
  app.require_subcommand(1);
  std::string config_path;
  std::string id;
  std::string geometry;
  std::optional<std::uint64_t> seed;
  std::optional<int> rungs;
  std::optional<double> r0;
  std::optional<int> per_rung;
  std::optional<std::string> out_path;
  std::optional<std::string> format;
  int workers = 0;
  bool timing = false;

  for (const auto& name : task_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " task");
    sub->add_option("--config,-c", config_path, "JSON configuration file");
    sub->add_option("--id", id, "condition or counterexample id (built-in defaults when no config)");
    sub->add_option("--geometry,-g", geometry, "inline geometry JSON");
    sub->add_option("--seed", seed, "sampling seed");
    sub->add_option("--rungs", rungs, "number of doubling rungs");
    sub->add_option("--r0", r0, "innermost radius");
    sub->add_option("--per-rung", per_rung, "samples per rung");
    sub->add_option("--out,-o", out_path, "report path (stdout when empty)");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--workers", workers, "worker threads (0: OpenMP default)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--timing", timing, "report wall-clock time");
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << '\n';
    return 2;
  }
  const std::string task = app.get_subcommands().front()->get_name();

  try {
    json j;
    std::string source;
    if (!config_path.empty()) {
      j = read_json_file(config_path);
      source = config_path;
      if (!j.is_object()) {
        throw ConfigError("expected an object", "", source);
      }
    } else if (!id.empty()) {
      j = default_config(id);
    } else if (task == "describe" && !geometry.empty()) {
      j = json::object();
    } else {
      err << "error: " << task << " needs --config or --id\n";
      return 2;
    }
    if (j.contains("task") && j["task"].is_string() && j["task"].get<std::string>() != task) {
      throw ConfigError("config task '" + j["task"].get<std::string>() + "' does not match subcommand '" + task + "'", "/task",
                        source);
    }
    j["task"] = task;
    if (!id.empty() && !config_path.empty()) {
      if (task == "check" || task == "certify") {
        j[task]["id"] = id;
      }
    }
    if (!geometry.empty()) {
      try {
        j["geometry"] = json::parse(geometry);
      } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid --geometry JSON: ") + e.what(), "/geometry");
      }
    }
    if (seed) {
      j["sampling"]["seed"] = *seed;
    }
    if (rungs) {
      j["sampling"]["rungs"] = *rungs;
    }
    if (r0) {
      j["sampling"]["r0"] = *r0;
    }
    if (per_rung) {
      j["sampling"]["per_rung"] = *per_rung;
    }
    if (out_path) {
      j["output"]["path"] = *out_path;
    }
    if (format) {
      j["output"]["format"] = *format;
    }

    RunConfig cfg = load_config(j, source);
    cfg.plan.workers = workers;
    const auto t0 = std::chrono::steady_clock::now();
    const TaskOutcome res = execute(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::string text;
    if (cfg.format == "csv") {
      text = tabulate(task, res.result);
    } else {
      json report = make_report(cfg, res);
      if (timing) {
        report["wall_clock_s"] = secs;
      }
      text = report.dump(2) + "\n";
    }
    if (cfg.output_path.empty()) {
      out << text;
    } else {
      std::ofstream f(cfg.output_path, std::ios::binary);
      if (!f) {
        throw ConfigError("cannot write report to '" + cfg.output_path + "'", "/output/path", source);
      }
      f << text;
    }
    if (timing) {
      err << "wall_clock_s=" << secs << '\n';
    }
    return res.exit_status;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "expression error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) {
    args.emplace_back(argv[i]);
  }
  return run(args, std::cout, std::cerr);
}

} // namespace subriem
