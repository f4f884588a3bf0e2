#include "subriem/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace subriem {

using json = nlohmann::json;

ConfigError::ConfigError(const std::string& msg, std::string pointer, std::string path)
    : std::runtime_error((path.empty() ? std::string() : path + ": ") + (pointer.empty() ? std::string("/") : pointer) + ": " + msg),
      pointer_(std::move(pointer)), path_(std::move(path)) {}

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names = {"describe", "residual", "verify-lyapunov", "check",
                                                 "certify",  "fundamental", "growth",     "compare"};
  return names;
}

namespace {

std::string escape_key(const std::string& k) {
  std::string out;
  for (char c : k) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Error context: the source file path plus helpers that know the current JSON pointer.
struct Reader {
  std::string path;

  [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const { throw ConfigError(msg, ptr, path); }

  std::string at(const std::string& ptr, const std::string& key) const { return ptr + "/" + escape_key(key); }

  void object(const json& j, const std::string& ptr) const {
    if (!j.is_object()) {
      fail(ptr, "expected an object");
    }
  }

  void keys(const json& j, const std::string& ptr, const std::set<std::string>& allowed) const {
    object(j, ptr);
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!allowed.count(it.key())) {
        fail(at(ptr, it.key()), "unknown key");
      }
    }
  }

  const json* find(const json& j, const std::string& key) const {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
  }

  double number(const json& j, const std::string& ptr, const std::string& key, std::optional<double> def) const {
    const json* v = find(j, key);
    if (!v) {
      if (!def) {
        fail(at(ptr, key), "missing required number");
      }
      return *def;
    }
    if (!v->is_number()) {
      fail(at(ptr, key), "expected a number");
    }
    const double d = v->get<double>();
    if (!std::isfinite(d)) {
      fail(at(ptr, key), "expected a finite number");
    }
    return d;
  }

  long long integer(const json& j, const std::string& ptr, const std::string& key, std::optional<long long> def) const {
    const json* v = find(j, key);
    if (!v) {
      if (!def) {
        fail(at(ptr, key), "missing required integer");
      }
      return *def;
    }
    if (v->is_number_integer()) {
      return v->get<long long>();
    }
    if (v->is_number_float()) {
      const double d = v->get<double>();
      if (std::floor(d) == d && std::abs(d) < 9e15) {
        return static_cast<long long>(d);
      }
    }
    fail(at(ptr, key), "expected an integer");
  }

  std::string string(const json& j, const std::string& ptr, const std::string& key, std::optional<std::string> def) const {
    const json* v = find(j, key);
    if (!v) {
      if (!def) {
        fail(at(ptr, key), "missing required string");
      }
      return *def;
    }
    if (!v->is_string()) {
      fail(at(ptr, key), "expected a string");
    }
    return v->get<std::string>();
  }

  bool boolean(const json& j, const std::string& ptr, const std::string& key, bool def) const {
    const json* v = find(j, key);
    if (!v) {
      return def;
    }
    if (!v->is_boolean()) {
      fail(at(ptr, key), "expected a boolean");
    }
    return v->get<bool>();
  }

  // Expression source given as a string or a number.
  std::string expr_source(const json& v, const std::string& ptr) const {
    if (v.is_string()) {
      return v.get<std::string>();
    }
    if (v.is_number()) {
      return format_number(v.get<double>());
    }
    fail(ptr, "expected an expression string or a number");
  }

  Expr expr(const std::string& src, const GeometrySpec& g, const std::string& ptr) const {
    try {
      return parse(src, g);
    } catch (const ParseError& e) {
      fail(ptr, std::string("expression error: ") + e.what());
    }
  }
};

template <class F>
auto wrap(const Reader& rd, const std::string& ptr, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    rd.fail(ptr, e.what());
  }
}

GeometrySpec read_geometry(const Reader& rd, const json& j, const std::string& ptr) {
  rd.keys(j, ptr, {"kind", "params"});
  const std::string kind = rd.string(j, ptr, "kind", std::nullopt);
  const json empty = json::object();
  const json* pp = rd.find(j, "params");
  const json& p = pp ? *pp : empty;
  const std::string pptr = rd.at(ptr, "params");
  rd.object(p, pptr);
  return wrap(rd, ptr, [&]() {
    if (kind == "Heisenberg") {
      rd.keys(p, pptr, {"d"});
      return GeometrySpec::heisenberg(static_cast<int>(rd.integer(p, pptr, "d", 1)));
    }
    if (kind == "HType7") {
      rd.keys(p, pptr, {});
      return GeometrySpec::htype7();
    }
    if (kind == "FreeStep2") {
      rd.keys(p, pptr, {"r"});
      return GeometrySpec::free_step2(static_cast<int>(rd.integer(p, pptr, "r", std::nullopt)));
    }
    if (kind == "Grushin") {
      rd.keys(p, pptr, {"n", "k", "gamma"});
      return GeometrySpec::grushin(static_cast<int>(rd.integer(p, pptr, "n", 1)), static_cast<int>(rd.integer(p, pptr, "k", 1)),
                                   rd.number(p, pptr, "gamma", 1.0));
    }
    if (kind == "HeisenbergGreiner") {
      rd.keys(p, pptr, {"d", "delta"});
      return GeometrySpec::heisenberg_greiner(static_cast<int>(rd.integer(p, pptr, "d", 1)),
                                              static_cast<int>(rd.integer(p, pptr, "delta", 1)));
    }
    rd.fail(rd.at(ptr, "kind"), "unknown geometry kind '" + kind + "'");
  });
}

SecondOrderKind read_kind(const Reader& rd, const std::string& s, const std::string& ptr) {
  for (auto k : {SecondOrderKind::MMinus, SecondOrderKind::MPlus, SecondOrderKind::P66Minus, SecondOrderKind::P66Plus,
                 SecondOrderKind::NegTraceA}) {
    if (to_string(k) == s) {
      return k;
    }
  }
  rd.fail(ptr, "unknown second-order kind '" + s + "'");
}

struct OperatorRead {
  OperatorSpec op;
  json echo;
};

OperatorRead read_operator(const Reader& rd, const json& j, const std::string& ptr, const GeometrySpec& g) {
  rd.keys(j, ptr, {"second_order", "coefficients"});
  OperatorRead out;
  OperatorSpec& op = out.op;
  const std::string sptr = rd.at(ptr, "second_order");
  const json* so = rd.find(j, "second_order");
  if (!so) {
    rd.fail(sptr, "missing required object");
  }
  rd.object(*so, sptr);
  op.kind = read_kind(rd, rd.string(*so, sptr, "kind", std::nullopt), rd.at(sptr, "kind"));
  json so_echo;
  so_echo["kind"] = to_string(op.kind);
  switch (op.kind) {
  case SecondOrderKind::MMinus:
  case SecondOrderKind::MPlus:
    rd.keys(*so, sptr, {"kind", "lambda", "Lambda"});
    op.ell.lambda = rd.number(*so, sptr, "lambda", 1.0);
    op.ell.Lambda = rd.number(*so, sptr, "Lambda", op.ell.lambda);
    wrap(rd, sptr, [&]() { op.ell.validate(); });
    so_echo["lambda"] = op.ell.lambda;
    so_echo["Lambda"] = op.ell.Lambda;
    break;
  case SecondOrderKind::P66Minus:
  case SecondOrderKind::P66Plus:
    rd.keys(*so, sptr, {"kind", "lam"});
    op.p66.lam = rd.number(*so, sptr, "lam", 1.0 / g.rank());
    op.p66.m = g.rank();
    wrap(rd, sptr, [&]() { op.p66.validate(); });
    so_echo["lam"] = op.p66.lam;
    break;
  case SecondOrderKind::NegTraceA: {
    rd.keys(*so, sptr, {"kind", "a"});
    const json* a = rd.find(*so, "a");
    const std::string src = a ? rd.expr_source(*a, rd.at(sptr, "a")) : std::string("1");
    op.a = rd.expr(src, g, rd.at(sptr, "a"));
    so_echo["a"] = src;
    break;
  }
  }

  const std::string cptr = rd.at(ptr, "coefficients");
  const json empty = json::object();
  const json* cj = rd.find(j, "coefficients");
  const json& c = cj ? *cj : empty;
  rd.keys(c, cptr, {"mode", "drift_frame", "entries"});
  const std::string mode = rd.string(c, cptr, "mode", "inf");
  if (mode == "inf") {
    op.coeffs.mode = HamiltonianMode::Inf;
  } else if (mode == "sup") {
    op.coeffs.mode = HamiltonianMode::Sup;
  } else {
    rd.fail(rd.at(cptr, "mode"), "expected 'inf' or 'sup'");
  }
  const std::string frame = rd.string(c, cptr, "drift_frame", "horizontal");
  if (frame == "horizontal") {
    op.coeffs.frame = DriftFrame::Horizontal;
  } else if (frame == "euclidean") {
    op.coeffs.frame = DriftFrame::Euclidean;
  } else {
    rd.fail(rd.at(cptr, "drift_frame"), "expected 'horizontal' or 'euclidean'");
  }
  json entries_echo = json::array();
  if (const json* ej = rd.find(c, "entries")) {
    const std::string eptr = rd.at(cptr, "entries");
    if (!ej->is_array()) {
      rd.fail(eptr, "expected an array");
    }
    const int dim = op.coeffs.drift_dim(g);
    for (std::size_t i = 0; i < ej->size(); ++i) {
      const json& e = (*ej)[i];
      const std::string iptr = eptr + "/" + std::to_string(i);
      rd.keys(e, iptr, {"b", "c"});
      Coefficient k;
      k.b.euclidean = op.coeffs.frame == DriftFrame::Euclidean;
      json e_echo;
      json b_echo = json::array();
      if (const json* bj = rd.find(e, "b")) {
        const std::string bptr = rd.at(iptr, "b");
        if (!bj->is_array()) {
          rd.fail(bptr, "expected an array of expressions");
        }
        if (!bj->empty() && static_cast<int>(bj->size()) != dim) {
          rd.fail(bptr, "expected " + std::to_string(dim) + " components for a " + frame + " drift");
        }
        for (std::size_t q = 0; q < bj->size(); ++q) {
          const std::string qptr = bptr + "/" + std::to_string(q);
          const std::string src = rd.expr_source((*bj)[q], qptr);
          k.b.entries.push_back(rd.expr(src, g, qptr));
          b_echo.push_back(src);
        }
      }
      if (const json* cc = rd.find(e, "c")) {
        const std::string src = rd.expr_source(*cc, rd.at(iptr, "c"));
        k.c = rd.expr(src, g, rd.at(iptr, "c"));
        e_echo["c"] = src;
      } else {
        e_echo["c"] = "0";
      }
      e_echo["b"] = b_echo;
      entries_echo.push_back(e_echo);
      op.coeffs.entries.push_back(std::move(k));
    }
  }
  wrap(rd, ptr, [&]() { op.validate(g); });
  out.echo["second_order"] = so_echo;
  out.echo["coefficients"] = {{"mode", mode}, {"drift_frame", frame}, {"entries", entries_echo}};
  return out;
}

SamplePlan read_sampling(const Reader& rd, const json& j, const std::string& ptr, json& echo) {
  rd.keys(j, ptr, {"seed", "per_rung", "rungs", "r0", "eps_sing", "max_excluded_fraction", "tolerances"});
  SamplePlan plan;
  if (const json* s = rd.find(j, "seed")) {
    if (s->is_number_unsigned()) {
      plan.seed = s->get<std::uint64_t>();
    } else if (s->is_number_integer() && s->get<long long>() >= 0) {
      plan.seed = static_cast<std::uint64_t>(s->get<long long>());
    } else {
      rd.fail(rd.at(ptr, "seed"), "expected a nonnegative integer");
    }
  }
  plan.per_rung = static_cast<int>(rd.integer(j, ptr, "per_rung", plan.per_rung));
  plan.rungs = static_cast<int>(rd.integer(j, ptr, "rungs", plan.rungs));
  plan.r0 = rd.number(j, ptr, "r0", plan.r0);
  plan.eps_sing = rd.number(j, ptr, "eps_sing", plan.eps_sing);
  plan.max_excluded_fraction = rd.number(j, ptr, "max_excluded_fraction", plan.max_excluded_fraction);
  if (const json* t = rd.find(j, "tolerances")) {
    const std::string tptr = rd.at(ptr, "tolerances");
    rd.keys(*t, tptr, {"abs", "rel"});
    plan.abs_tol = rd.number(*t, tptr, "abs", plan.abs_tol);
    plan.rel_tol = rd.number(*t, tptr, "rel", plan.rel_tol);
  }
  if (plan.per_rung < 1) {
    rd.fail(rd.at(ptr, "per_rung"), "must be >= 1");
  }
  if (plan.rungs < 1) {
    rd.fail(rd.at(ptr, "rungs"), "must be >= 1");
  }
  if (!(plan.r0 > 0.0)) {
    rd.fail(rd.at(ptr, "r0"), "must be positive");
  }
  if (!(plan.eps_sing > 0.0)) {
    rd.fail(rd.at(ptr, "eps_sing"), "must be positive");
  }
  if (!(plan.max_excluded_fraction >= 0.0 && plan.max_excluded_fraction <= 1.0)) {
    rd.fail(rd.at(ptr, "max_excluded_fraction"), "must lie in [0, 1]");
  }
  if (!(plan.abs_tol >= 0.0) || !(plan.rel_tol >= 0.0)) {
    rd.fail(rd.at(ptr, "tolerances"), "tolerances must be nonnegative");
  }
  echo = {{"seed", plan.seed},
          {"per_rung", plan.per_rung},
          {"rungs", plan.rungs},
          {"r0", plan.r0},
          {"eps_sing", plan.eps_sing},
          {"max_excluded_fraction", plan.max_excluded_fraction},
          {"tolerances", {{"abs", plan.abs_tol}, {"rel", plan.rel_tol}}}};
  return plan;
}

LyapunovCandidate read_candidate(const Reader& rd, const json& v, const std::string& ptr, const GeometrySpec& g, json& echo) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    echo = s;
    if (s == "log_rho") {
      return LyapunovCandidate::log_rho();
    }
    if (s == "neg_log_rho") {
      return LyapunovCandidate::neg_log_rho();
    }
    if (s == "rho_squared") {
      return LyapunovCandidate::rho_squared();
    }
    rd.fail(ptr, "unknown candidate '" + s + "'");
  }
  rd.keys(v, ptr, {"expr", "sign"});
  const std::string src = rd.string(v, ptr, "expr", std::nullopt);
  rd.expr(src, g, rd.at(ptr, "expr"));
  const long long sign = rd.integer(v, ptr, "sign", 1);
  if (sign != 1 && sign != -1) {
    rd.fail(rd.at(ptr, "sign"), "expected 1 or -1");
  }
  echo = {{"expr", src}, {"sign", sign}};
  return LyapunovCandidate::custom_expr(src, static_cast<int>(sign));
}

std::pair<double, double> read_annulus(const Reader& rd, const json& v, const std::string& ptr) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    rd.fail(ptr, "expected [r0, r1]");
  }
  const double a = v[0].get<double>();
  const double b = v[1].get<double>();
  if (!(a > 0.0) || !(b > a)) {
    rd.fail(ptr, "annulus needs 0 < r0 < r1");
  }
  return {a, b};
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  for (const auto& x : v) {
    if (x == s) {
      return true;
    }
  }
  return false;
}

std::string block_key(const std::string& task) { return task == "verify-lyapunov" ? "verify_lyapunov" : task; }

} // namespace

nlohmann::json geometry_to_json(const GeometrySpec& g) {
  json j;
  switch (g.kind) {
  case GeometryKind::Heisenberg:
    j = {{"kind", "Heisenberg"}, {"params", {{"d", g.d}}}};
    break;
  case GeometryKind::HType7:
    j = {{"kind", "HType7"}, {"params", json::object()}};
    break;
  case GeometryKind::FreeStep2:
    j = {{"kind", "FreeStep2"}, {"params", {{"r", g.r}}}};
    break;
  case GeometryKind::Grushin:
    j = {{"kind", "Grushin"}, {"params", {{"n", g.n}, {"k", g.k}, {"gamma", g.gamma}}}};
    break;
  case GeometryKind::HeisenbergGreiner:
    j = {{"kind", "HeisenbergGreiner"}, {"params", {{"d", g.d}, {"delta", g.delta}}}};
    break;
  }
  return j;
}

GeometrySpec geometry_from_json(const nlohmann::json& j, const std::string& pointer) {
  return read_geometry(Reader{}, j, pointer);
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open file", "", path);
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what(), "", path);
  }
}

RunConfig load_config(const nlohmann::json& j, const std::string& path) {
  const Reader rd{path};
  rd.keys(j, "", {"task", "geometry", "operator", "sampling", "output", "check", "certify", "verify_lyapunov", "residual",
                  "fundamental", "growth", "compare"});
  RunConfig cfg;
  cfg.task = rd.string(j, "", "task", std::nullopt);
  if (!contains(task_names(), cfg.task)) {
    rd.fail("/task", "unknown task '" + cfg.task + "'");
  }
  const json* gj = rd.find(j, "geometry");
  if (!gj) {
    rd.fail("/geometry", "missing required object");
  }
  cfg.geometry = read_geometry(rd, *gj, "/geometry");
  const GeometrySpec& g = cfg.geometry;
  json& echo = cfg.echo;
  echo["task"] = cfg.task;
  echo["geometry"] = geometry_to_json(g);

  const json empty = json::object();
  const json* sj = rd.find(j, "sampling");
  json sampling_echo;
  cfg.plan = read_sampling(rd, sj ? *sj : empty, "/sampling", sampling_echo);
  echo["sampling"] = sampling_echo;

  const json* oj = rd.find(j, "output");
  const json& out = oj ? *oj : empty;
  rd.keys(out, "/output", {"path", "format"});
  cfg.output_path = rd.string(out, "/output", "path", "");
  cfg.format = rd.string(out, "/output", "format", "json");
  if (cfg.format != "json" && cfg.format != "csv") {
    rd.fail("/output/format", "expected 'json' or 'csv'");
  }
  echo["output"] = {{"path", cfg.output_path}, {"format", cfg.format}};

  const bool needs_op = cfg.task == "residual" || cfg.task == "verify-lyapunov" || cfg.task == "check" || cfg.task == "compare";
  if (const json* opj = rd.find(j, "operator")) {
    OperatorRead r = read_operator(rd, *opj, "/operator", g);
    cfg.op = std::move(r.op);
    echo["operator"] = r.echo;
  } else if (needs_op) {
    rd.fail("/operator", "task '" + cfg.task + "' needs an operator");
  }

  const std::string bk = block_key(cfg.task);
  const std::string bptr = "/" + bk;
  const json* bj = rd.find(j, bk);
  const json& b = bj ? *bj : empty;
  json be;
  if (cfg.task == "check") {
    rd.keys(b, bptr, {"id", "gamma", "lyapunov_followup"});
    cfg.check.id = rd.string(b, bptr, "id", std::nullopt);
    if (!contains(condition_ids(), cfg.check.id)) {
      rd.fail(bptr + "/id", "unknown condition id '" + cfg.check.id + "'");
    }
    if (const json* gm = rd.find(b, "gamma")) {
      if (!gm->is_array()) {
        rd.fail(bptr + "/gamma", "expected an array of numbers");
      }
      for (std::size_t i = 0; i < gm->size(); ++i) {
        if (!(*gm)[i].is_number() || !((*gm)[i].get<double>() > 0.0)) {
          rd.fail(bptr + "/gamma/" + std::to_string(i), "expected a positive number");
        }
        cfg.check.options.gamma.push_back((*gm)[i].get<double>());
      }
      if (static_cast<int>(cfg.check.options.gamma.size()) != g.ambient_dim()) {
        rd.fail(bptr + "/gamma", "expected one weight per coordinate");
      }
    }
    cfg.check.lyapunov_followup = rd.boolean(b, bptr, "lyapunov_followup", true);
    be = {{"id", cfg.check.id}, {"lyapunov_followup", cfg.check.lyapunov_followup}};
    if (!cfg.check.options.gamma.empty()) {
      be["gamma"] = cfg.check.options.gamma;
    }
  } else if (cfg.task == "certify") {
    rd.keys(b, bptr, {"id", "delta", "lambda", "Lambda"});
    cfg.certify.id = rd.string(b, bptr, "id", std::nullopt);
    if (!contains(counterexample_ids(), cfg.certify.id)) {
      rd.fail(bptr + "/id", "unknown counterexample id '" + cfg.certify.id + "'");
    }
    cfg.certify.options.delta = rd.number(b, bptr, "delta", 0.1);
    cfg.certify.options.ell.lambda = rd.number(b, bptr, "lambda", 1.0);
    cfg.certify.options.ell.Lambda = rd.number(b, bptr, "Lambda", 2.0);
    wrap(rd, bptr, [&]() { cfg.certify.options.ell.validate(); });
    if (!(cfg.certify.options.delta > 0.0)) {
      rd.fail(bptr + "/delta", "must be positive");
    }
    be = {{"id", cfg.certify.id},
          {"delta", cfg.certify.options.delta},
          {"lambda", cfg.certify.options.ell.lambda},
          {"Lambda", cfg.certify.options.ell.Lambda}};
  } else if (cfg.task == "verify-lyapunov") {
    rd.keys(b, bptr, {"candidate", "annulus"});
    json ce = "log_rho";
    if (const json* c = rd.find(b, "candidate")) {
      cfg.verify_lyapunov.candidate = read_candidate(rd, *c, bptr + "/candidate", g, ce);
    }
    be["candidate"] = ce;
    if (const json* a = rd.find(b, "annulus")) {
      cfg.verify_lyapunov.annulus = read_annulus(rd, *a, bptr + "/annulus");
      be["annulus"] = {cfg.verify_lyapunov.annulus->first, cfg.verify_lyapunov.annulus->second};
    }
  } else if (cfg.task == "residual") {
    rd.keys(b, bptr, {"u"});
    cfg.residual.u = rd.string(b, bptr, "u", std::nullopt);
    rd.expr(cfg.residual.u, g, bptr + "/u");
    be = {{"u", cfg.residual.u}};
  } else if (cfg.task == "fundamental") {
    rd.keys(b, bptr, {"kind", "lambda", "Lambda", "C1", "C2", "annulus"});
    const std::string kind = rd.string(b, bptr, "kind", "Phi1");
    wrap(rd, bptr + "/kind", [&]() { cfg.fundamental.kind = fundamental_kind_from_string(kind); });
    cfg.fundamental.ell.lambda = rd.number(b, bptr, "lambda", 1.0);
    cfg.fundamental.ell.Lambda = rd.number(b, bptr, "Lambda", cfg.fundamental.ell.lambda);
    wrap(rd, bptr, [&]() { cfg.fundamental.ell.validate(); });
    cfg.fundamental.C1 = rd.number(b, bptr, "C1", 1.0);
    if (!(cfg.fundamental.C1 > 0.0)) {
      rd.fail(bptr + "/C1", "must be positive");
    }
    cfg.fundamental.C2 = rd.number(b, bptr, "C2", 0.0);
    if (const json* a = rd.find(b, "annulus")) {
      cfg.fundamental.annulus = read_annulus(rd, *a, bptr + "/annulus");
    }
    if (!(g.homogeneous_dim() > 2.0)) {
      rd.fail("/geometry", "fundamental profiles need Q > 2");
    }
    be = {{"kind", kind},
          {"lambda", cfg.fundamental.ell.lambda},
          {"Lambda", cfg.fundamental.ell.Lambda},
          {"C1", cfg.fundamental.C1},
          {"C2", cfg.fundamental.C2},
          {"annulus", {cfg.fundamental.annulus.first, cfg.fundamental.annulus.second}}};
  } else if (cfg.task == "growth") {
    rd.keys(b, bptr, {"u", "c", "nu", "refine_rounds", "shrink"});
    cfg.growth.u = rd.string(b, bptr, "u", std::nullopt);
    rd.expr(cfg.growth.u, g, bptr + "/u");
    cfg.growth.c = rd.number(b, bptr, "c", 0.0);
    cfg.growth.nu = rd.number(b, bptr, "nu", 0.5);
    if (!(cfg.growth.nu > 0.0 && cfg.growth.nu < 1.0)) {
      rd.fail(bptr + "/nu", "must lie in (0, 1)");
    }
    cfg.growth.options.refine_rounds = static_cast<int>(rd.integer(b, bptr, "refine_rounds", 3));
    cfg.growth.options.shrink = rd.number(b, bptr, "shrink", 0.25);
    if (cfg.growth.options.refine_rounds < 0) {
      rd.fail(bptr + "/refine_rounds", "must be >= 0");
    }
    if (!(cfg.growth.options.shrink > 0.0 && cfg.growth.options.shrink < 1.0)) {
      rd.fail(bptr + "/shrink", "must lie in (0, 1)");
    }
    be = {{"u", cfg.growth.u},
          {"c", cfg.growth.c},
          {"nu", cfg.growth.nu},
          {"refine_rounds", cfg.growth.options.refine_rounds},
          {"shrink", cfg.growth.options.shrink}};
  } else if (cfg.task == "compare") {
    rd.keys(b, bptr, {"u", "v", "candidate"});
    cfg.compare.u = rd.string(b, bptr, "u", std::nullopt);
    cfg.compare.v = rd.string(b, bptr, "v", std::nullopt);
    rd.expr(cfg.compare.u, g, bptr + "/u");
    rd.expr(cfg.compare.v, g, bptr + "/v");
    json ce = "log_rho";
    if (const json* c = rd.find(b, "candidate")) {
      cfg.compare.candidate = read_candidate(rd, *c, bptr + "/candidate", g, ce);
    }
    if (cfg.op && !cfg.op->coeffs.c_is_zero()) {
      rd.fail("/operator/coefficients", "compare needs c^alpha = 0");
    }
    be = {{"u", cfg.compare.u}, {"v", cfg.compare.v}, {"candidate", ce}};
  } else {
    rd.keys(b, bptr, {});
  }
  if (cfg.task != "describe") {
    echo[bk] = be;
  }
  return cfg;
}

nlohmann::json default_config(const std::string& id) {
  auto horizontal_zero = [](int m) { return json::array({json::object({{"b", std::vector<std::string>(m, "0")}, {"c", "0.5"}})}); };
  auto op_mm = [&](double l, double L, int m) {
    return json{{"second_order", {{"kind", "MMinus"}, {"lambda", l}, {"Lambda", L}}},
                {"coefficients", {{"mode", "inf"}, {"drift_frame", "horizontal"}, {"entries", horizontal_zero(m)}}}};
  };
  auto op_trace = [&](int m) {
    return json{{"second_order", {{"kind", "NegTraceA"}, {"a", "1"}}},
                {"coefficients", {{"mode", "inf"}, {"drift_frame", "horizontal"}, {"entries", horizontal_zero(m)}}}};
  };
  auto neg_x = [](int n) {
    std::vector<std::string> b;
    for (int i = 1; i <= n; ++i) {
      b.push_back("-x" + std::to_string(i));
    }
    return b;
  };
  const json htype = {{"kind", "HType7"}, {"params", json::object()}};
  json cfg;
  if (contains(condition_ids(), id)) {
    cfg["task"] = "check";
    cfg["check"] = {{"id", id}};
    cfg["sampling"] = {{"seed", 0xC0FFEE}, {"per_rung", 1000}, {"rungs", 6}, {"r0", 1.0}};
    if (id == "condH" || id == "liohad_gate") {
      cfg["geometry"] = htype;
      cfg["operator"] = op_mm(1.0, id == "liohad_gate" ? 9.0 : 1.0, 4);
    } else if (id == "condHimp") {
      cfg["geometry"] = htype;
      cfg["operator"] = op_mm(1.0, 1.0, 4);
      cfg["operator"]["second_order"]["kind"] = "MPlus";
    } else if (id == "OUtype" || id == "c_a_sign_order" || id == "c_a_order_weak") {
      cfg["geometry"] = htype;
      cfg["operator"] = op_mm(1.0, 1.0, 4);
      cfg["operator"]["coefficients"]["drift_frame"] = "euclidean";
      if (id == "OUtype") {
        cfg["operator"]["coefficients"]["entries"] = json::array({{{"b", neg_x(7)}, {"c", "0"}}});
      } else if (id == "c_a_sign_order") {
        cfg["operator"]["coefficients"]["entries"] = json::array({{{"b", neg_x(7)}, {"c", "0.5"}}});
      } else {
        cfg["operator"]["coefficients"]["entries"] =
            json::array({{{"b", std::vector<std::string>{"1", "0", "0", "0", "0", "0", "0"}}, {"c", "1"}}});
      }
    } else if (id == "condcor1free") {
      cfg["geometry"] = {{"kind", "FreeStep2"}, {"params", {{"r", 3}}}};
      cfg["operator"] = op_mm(1.0, 2.0, 3);
    } else if (id == "condcor1freepucci") {
      cfg["geometry"] = {{"kind", "FreeStep2"}, {"params", {{"r", 3}}}};
      cfg["operator"] = op_mm(1.0, 1.0, 3);
      cfg["operator"]["second_order"] = {{"kind", "P66Minus"}, {"lam", 0.2}};
    } else if (id == "Grucond") {
      cfg["geometry"] = {{"kind", "Grushin"}, {"params", {{"n", 2}, {"k", 1}, {"gamma", 2.0}}}};
      cfg["operator"] = op_trace(3);
    } else if (id == "condcor1grushin") {
      cfg["geometry"] = {{"kind", "Grushin"}, {"params", {{"n", 1}, {"k", 1}, {"gamma", 1.0}}}};
      cfg["operator"] = op_mm(1.0, 2.0, 2);
    } else if (id == "condcor1") {
      cfg["geometry"] = {{"kind", "HeisenbergGreiner"}, {"params", {{"d", 1}, {"delta", 2}}}};
      cfg["operator"] = op_trace(2);
    } else if (id == "condgen") {
      cfg["geometry"] = {{"kind", "Heisenberg"}, {"params", {{"d", 1}}}};
      cfg["operator"] = op_trace(2);
      cfg["operator"]["coefficients"]["entries"] = json::array({{{"b", std::vector<std::string>{"1", "0"}}, {"c", "0.5"}}});
    }
    return cfg;
  }
  if (contains(counterexample_ids(), id)) {
    cfg["task"] = "certify";
    cfg["certify"] = {{"id", id}};
    cfg["sampling"] = {{"seed", 0xC0FFEE}, {"per_rung", 1000}, {"rungs", 10}, {"r0", 0.05}};
    if (id == "nonex_u1" || id == "optimality_drift") {
      cfg["geometry"] = htype;
    } else if (id == "grushin_ubar") {
      cfg["geometry"] = {{"kind", "Grushin"}, {"params", {{"n", 1}, {"k", 1}, {"gamma", 1.0}}}};
    } else {
      cfg["geometry"] = {{"kind", "HeisenbergGreiner"}, {"params", {{"d", 1}, {"delta", 2}}}};
    }
    return cfg;
  }
  throw ConfigError("no built-in configuration for id '" + id + "'", "/check/id");
}

} // namespace subriem
