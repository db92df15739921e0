#include "advper/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace advper {

namespace {

using nlohmann::json;

[[noreturn]] void schema(const std::string& what) { fail(ErrorCode::Schema, what); }

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) schema(where + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) schema("unknown key '" + it.key() + "' in " + where);
}

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) schema(where + " is missing '" + key + "'");
  return j.at(key);
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) schema(what + " must be a number");
  return j.get<double>();
}

std::int64_t integer(const json& j, const std::string& what) {
  if (!j.is_number_integer()) schema(what + " must be an integer");
  return j.get<std::int64_t>();
}

std::string text(const json& j, const std::string& what) {
  if (!j.is_string()) schema(what + " must be a string");
  return j.get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) schema(what + " must be a number or an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, what));
  return out;
}

void parse_grid(const json& j, RunConfig& c) {
  only_keys(j, "grid", {"dim", "window", "h", "norm"});
  c.grid.dim = static_cast<int>(integer(need(j, "dim", "grid"), "grid.dim"));
  if (c.grid.dim < 1 || c.grid.dim > kMaxDim) schema("grid.dim must be in [1, 8]");
  const json& w = need(j, "window", "grid");
  if (!w.is_array() || w.size() != static_cast<std::size_t>(c.grid.dim)) schema("grid.window needs one [lo, hi] per axis");
  for (const auto& ax : w) {
    if (!ax.is_array() || ax.size() != 2) schema("grid.window entries must be [lo, hi]");
    c.grid.lo.push_back(number(ax[0], "grid.window"));
    c.grid.hi.push_back(number(ax[1], "grid.window"));
  }
  c.grid.h = number(need(j, "h", "grid"), "grid.h");
  try {
    c.grid.norm = parse_norm(j.contains("norm") ? text(j.at("norm"), "grid.norm") : "L2");
  } catch (const Error& e) {
    schema(e.what());
  }
}

void parse_density(const json& j, RunConfig& c) {
  only_keys(j, "density", {"preset", "params", "csv_path", "w0", "w1"});
  if (j.contains("csv_path")) {
    c.csv_path = text(j.at("csv_path"), "density.csv_path");
    c.preset = "csv";
    if (j.contains("w0")) c.csv_w0 = number(j.at("w0"), "density.w0");
    c.csv_w1 = j.contains("w1") ? number(j.at("w1"), "density.w1") : 1.0 - c.csv_w0;
  } else {
    c.preset = text(need(j, "preset", "density"), "density.preset");
    if (j.contains("w0") || j.contains("w1")) schema("density.w0/w1 apply to csv_path only; use params for presets");
  }
  if (j.contains("params")) {
    const json& p = j.at("params");
    if (!p.is_object()) schema("density.params must be an object");
    for (auto it = p.begin(); it != p.end(); ++it) c.params[it.key()] = number(it.value(), "density.params." + it.key());
  }
}

void parse_attack(const json& j, RunConfig& c) {
  only_keys(j, "attack", {"kind", "eps", "eps_list", "p", "kernel"});
  const std::string kind = text(need(j, "kind", "attack"), "attack.kind");
  if (kind == "EPS")
    c.kind = AttackKind::Eps;
  else if (kind == "PROB")
    c.kind = AttackKind::Prob;
  else
    schema("attack.kind must be EPS or PROB");
  if (j.contains("eps") == j.contains("eps_list")) schema("attack needs exactly one of eps, eps_list");
  if (j.contains("eps")) {
    c.eps_list = {number(j.at("eps"), "attack.eps")};
  } else {
    c.eps_list = numbers(j.at("eps_list"), "attack.eps_list");
    if (c.eps_list.empty()) schema("attack.eps_list is empty");
  }
  for (std::size_t i = 0; i < c.eps_list.size(); ++i) {
    if (!(c.eps_list[i] > 0.0)) schema("attack eps values must be > 0");
    if (i > 0 && !(c.eps_list[i] < c.eps_list[i - 1])) schema("attack.eps_list must be strictly decreasing");
  }
  if (j.contains("p")) {
    if (c.kind != AttackKind::Prob) schema("attack.p only applies to PROB");
    c.p = number(j.at("p"), "attack.p");
    if (c.p < 0.0 || c.p >= 1.0) schema("attack.p must lie in [0, 1)");
  }
  if (j.contains("kernel")) {
    c.kernel = text(j.at("kernel"), "attack.kernel");
    if (c.kernel != "UNIFORM") schema("attack.kernel must be UNIFORM");
  }
}

void parse_solver(const json& j, RunConfig& c) {
  only_keys(j, "solver", {"method", "seed", "max_iters", "restarts", "move_set"});
  if (j.contains("method")) {
    try {
      c.solver.method = parse_solver_method(text(j.at("method"), "solver.method"));
    } catch (const Error& e) {
      schema(e.what());
    }
  }
  if (j.contains("seed")) c.solver.seed = static_cast<std::uint64_t>(integer(j.at("seed"), "solver.seed"));
  if (j.contains("max_iters")) c.solver.max_iters = static_cast<int>(integer(j.at("max_iters"), "solver.max_iters"));
  if (j.contains("restarts")) c.solver.restarts = static_cast<int>(integer(j.at("restarts"), "solver.restarts"));
  if (c.solver.max_iters < 0 || c.solver.restarts < 1) schema("solver.max_iters >= 0 and solver.restarts >= 1 required");
  if (j.contains("move_set")) {
    const json& m = j.at("move_set");
    if (!m.is_array() || m.empty()) schema("solver.move_set must be a non-empty array");
    c.solver.move_set.clear();
    for (const auto& v : m) {
      try {
        c.solver.move_set.push_back(parse_move(text(v, "solver.move_set")));
      } catch (const Error& e) {
        schema(e.what());
      }
    }
  }
}

void parse_experiment(const json& j, RunConfig& c) {
  only_keys(j, "experiment", {"mode", "K", "delta", "trials", "seed", "timing"});
  auto& e = c.experiment;
  if (j.contains("mode")) {
    e.mode = text(j.at("mode"), "experiment.mode");
    static const std::set<std::string> modes = {"RISK", "EXCHANGE", "CONVERGENCE", "VALIDATE", "SOLVE"};
    if (!modes.count(e.mode)) schema("experiment.mode must be one of RISK, EXCHANGE, CONVERGENCE, VALIDATE, SOLVE");
  }
  if (j.contains("K")) {
    const json& k = j.at("K");
    only_keys(k, "experiment.K", {"lo", "hi"});
    RegionBox box{numbers(need(k, "lo", "experiment.K"), "experiment.K.lo"),
                  numbers(need(k, "hi", "experiment.K"), "experiment.K.hi")};
    if (box.lo.size() != static_cast<std::size_t>(c.grid.dim) || box.hi.size() != box.lo.size())
      schema("experiment.K needs lo/hi for every axis");
    e.region = box;
  }
  if (j.contains("delta")) {
    e.delta = number(j.at("delta"), "experiment.delta");
    if (!(e.delta > 0.0)) schema("experiment.delta must be > 0");
  }
  if (j.contains("trials")) {
    const auto t = integer(j.at("trials"), "experiment.trials");
    if (t < 1) schema("experiment.trials must be >= 1");
    e.trials = static_cast<std::size_t>(t);
  }
  if (j.contains("seed")) e.seed = static_cast<std::uint64_t>(integer(j.at("seed"), "experiment.seed"));
  if (j.contains("timing")) {
    if (!j.at("timing").is_boolean()) schema("experiment.timing must be a boolean");
    e.timing = j.at("timing").get<bool>();
  }
}

}  // namespace

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

RunConfig parse_config(const std::string& raw) {
  json j;
  try {
    j = json::parse(raw);
  } catch (const json::parse_error& e) {
    schema(std::string("config is not valid JSON: ") + e.what());
  }
  only_keys(j, "config", {"grid", "density", "attack", "solver", "experiment"});
  RunConfig c;
  parse_grid(need(j, "grid", "config"), c);
  parse_density(need(j, "density", "config"), c);
  parse_attack(need(j, "attack", "config"), c);
  if (j.contains("solver")) parse_solver(j.at("solver"), c);
  if (j.contains("experiment")) parse_experiment(j.at("experiment"), c);
  c.hash = fnv1a(raw);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::Io, "cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace advper
