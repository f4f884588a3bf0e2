#include "subriem/report.hpp"

namespace subriem {

std::string to_string(Verdict v) {
  switch (v) {
  case Verdict::Holds:
    return "Holds";
  case Verdict::Violated:
    return "Violated";
  case Verdict::Inconclusive:
    return "Inconclusive";
  }
  return "";
}

int exit_code(Verdict v) {
  switch (v) {
  case Verdict::Holds:
    return 0;
  case Verdict::Violated:
    return 1;
  case Verdict::Inconclusive:
    return 3;
  }
  return 3;
}

nlohmann::json to_json(const Witness& w) {
  nlohmann::json j;
  j["index"] = w.index;
  j["rung"] = w.rung;
  j["point"] = std::vector<double>(w.point.data(), w.point.data() + w.point.size());
  j["rho"] = w.rho;
  j["lhs"] = w.lhs;
  j["rhs"] = w.rhs;
  j["margin"] = w.margin;
  if (!w.quantity.empty()) {
    j["quantity"] = w.quantity;
  }
  return j;
}

nlohmann::json to_json(const CheckReport& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["geometry"] = r.geometry;
  j["seed"] = r.seed;
  j["per_rung"] = r.per_rung;
  j["r0"] = r.r0;
  j["rungs"] = r.rungs;
  j["eps_sing"] = r.eps_sing;
  j["samples_evaluated"] = r.samples_evaluated;
  j["samples_excluded"] = r.samples_excluded;
  j["excluded_fraction"] = r.excluded_fraction;
  j["min_margin"] = r.min_margin;
  j["onset_radius"] = r.onset_radius ? nlohmann::json(*r.onset_radius) : nlohmann::json(nullptr);
  j["pre_onset_failures"] = r.pre_onset_failures;
  j["violation_count"] = r.violation_count;
  nlohmann::json ladder = nlohmann::json::array();
  for (const auto& rs : r.ladder) {
    ladder.push_back({{"r_lo", rs.r_lo},
                      {"r_hi", rs.r_hi},
                      {"samples", rs.samples},
                      {"excluded", rs.excluded},
                      {"min_margin", rs.min_margin},
                      {"failures", rs.failures}});
  }
  j["ladder"] = ladder;
  nlohmann::json ws = nlohmann::json::array();
  for (const auto& w : r.witnesses) {
    ws.push_back(to_json(w));
  }
  j["witnesses"] = ws;
  j["quantity_name"] = r.quantity_name;
  j["notes"] = r.notes;
  j["extra"] = r.extra;
  j["verdict"] = to_string(r.verdict);
  return j;
}

} // namespace subriem
