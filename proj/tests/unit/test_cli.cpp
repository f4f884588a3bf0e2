#include "subriem/cli.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace subriem;
using json = nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream o, e;
  Run r;
  r.code = run(args, o, e);
  r.out = o.str();
  r.err = e.str();
  return r;
}

std::string cfg(const std::string& name) { return std::string(SUBRIEM_SOURCE_DIR) + "/configs/" + name + ".json"; }

} // namespace

TEST_SUITE("cli") {

TEST_CASE("exit codes") {
  CHECK(cli({"check", "--config", cfg("condH_c0")}).code == 0);
  CHECK(cli({"check", "--config", cfg("sublaplacian_b0c0")}).code == 1);
  CHECK(cli({"check", "--config", cfg("does_not_exist")}).code == 2);
  CHECK(cli({"check"}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"certify", "--id", "grushin_ubar", "--per-rung", "100"}).code == 0);
  CHECK(cli({"certify", "--id", "nonex_u1", "--per-rung", "100", "--geometry", R"({"kind":"FreeStep2","params":{"r":3}})"}).code == 1);
  CHECK(cli({"check", "--config", cfg("condH_c0"), "--workers", "-1"}).code == 2);
}

TEST_CASE("config errors name the key") {
  const auto r = cli({"certify", "--config", cfg("condH_c0")});
  CHECK(r.code == 2);
  CHECK(r.err.find("/task") != std::string::npos);

  const auto g = cli({"describe", "--geometry", R"({"kind":"Heisenberg","params":{"d":1},"extra":2})"});
  CHECK(g.code == 2);
  CHECK(g.err.find("/geometry/extra") != std::string::npos);

  const auto bad = cli({"describe", "--geometry", "{not json"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("/geometry") != std::string::npos);
}

TEST_CASE("describe") {
  const auto r = cli({"describe", "--geometry", R"({"kind":"Grushin","params":{"n":1,"k":1,"gamma":1.0}})"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["task"] == "describe");
  CHECK(j["tool"] == "subriem");
  CHECK(j["version"] == kToolVersion);
  CHECK(j["result"]["Q"] == 3.0);
  CHECK(j["result"]["ambient_dim"] == 2);
  CHECK(j["result"]["step2_group"] == false);
  CHECK(j["exit_status"] == 0);
}

TEST_CASE("report echoes the configuration without workers") {
  const auto r = cli({"check", "--config", cfg("condgen"), "--workers", "3", "--seed", "42"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["config"]["sampling"]["seed"] == 42);
  CHECK(r.out.find("workers") == std::string::npos);
  CHECK(r.out.find("wall_clock") == std::string::npos);
  CHECK(j["result"]["condition"]["verdict"] == "Holds");
  CHECK(j["result"].contains("lyapunov"));
}

TEST_CASE("timing appears only on request") {
  const auto r = cli({"check", "--config", cfg("condgen"), "--per-rung", "50", "--timing"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out).contains("wall_clock_s"));
  CHECK(r.err.find("wall_clock_s=") != std::string::npos);
}

TEST_CASE("byte-identical output across worker counts") {
  for (const std::string name : {"condH_c0", "condcor1free", "Grucond", "growth_u1", "fundamental_phi1", "certify_grushin_ubar"}) {
    CAPTURE(name);
    const std::string task = json::parse(std::ifstream(cfg(name)))["task"];
    const auto a = cli({task, "--config", cfg(name), "--workers", "1"});
    for (const std::string w : {"4", "16"}) {
      const auto b = cli({task, "--config", cfg(name), "--workers", w});
      CHECK(a.code == b.code);
      CHECK(a.out == b.out);
    }
  }
}

TEST_CASE("csv output") {
  const auto r = cli({"check", "--config", cfg("condH_c0"), "--format", "csv"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string header;
  std::getline(in, header);
  CHECK(header == "r_lo,r_hi,samples,excluded,min_margin,failures");
  int rows = 0;
  for (std::string line; std::getline(in, line);) {
    ++rows;
  }
  CHECK(rows == 6);

  const auto gr = cli({"growth", "--config", cfg("growth_u1"), "--format", "csv"});
  REQUIRE(gr.code == 0);
  CHECK(gr.out.rfind("r,sup,scaled_q2,scaled_nu\n", 0) == 0);
}

TEST_CASE("tabulate with an empty payload gives the header only") {
  CHECK(tabulate("growth", json()) == "r,sup,scaled_q2,scaled_nu\n");
  CHECK(tabulate("residual", json::object()) == "rho,residual\n");
  CHECK(tabulate("describe", json()) == "key,value\n");
  CHECK(tabulate("check", json()) == "r_lo,r_hi,samples,excluded,min_margin,failures\n");
  CHECK(tabulate("certify", json()) == "r_lo,r_hi,samples,excluded,min_margin,failures\n");
  CHECK(tabulate("verify-lyapunov", json()) == "r_lo,r_hi,samples,excluded,min_margin,failures\n");
}

TEST_CASE("report written to a file") {
  const auto path = std::filesystem::temp_directory_path() / "subriem_cli_test_report.json";
  std::filesystem::remove(path);
  const auto r = cli({"fundamental", "--config", cfg("fundamental_phi1"), "--out", path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  REQUIRE(std::filesystem::exists(path));
  const json j = json::parse(std::ifstream(path));
  CHECK(j["task"] == "fundamental");
  std::filesystem::remove(path);
}

TEST_CASE("execute runs every task in process") {
  RunConfig c = load_config(default_config("condcor1grushin"));
  c.plan.per_rung = 100;
  const TaskOutcome o = execute(c);
  CHECK(o.exit_status == 0);
  const json rep = make_report(c, o);
  CHECK(rep["exit_status"] == 0);
  CHECK(rep["config"]["check"]["id"] == "condcor1grushin");

  json lj = default_config("condH");
  lj["task"] = "verify-lyapunov";
  lj.erase("check");
  lj["verify_lyapunov"] = {{"candidate", "log_rho"}, {"annulus", {16, 64}}};
  RunConfig l = load_config(lj);
  CHECK(execute(l).exit_status == 0);

  json rj = default_config("condH");
  rj["task"] = "residual";
  rj.erase("check");
  rj["residual"] = {{"u", "log(rho)"}};
  rj["sampling"]["per_rung"] = 5;
  const TaskOutcome ro = execute(load_config(rj));
  CHECK(ro.result["dim"] == 7);
  CHECK(ro.result["rows"].size() == 30);
}

}
