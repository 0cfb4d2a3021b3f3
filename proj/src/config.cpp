#include "hypac/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "json.hpp"

namespace hypac {

namespace {

[[noreturn]] void fail(const YAML::Node& n, const std::string& msg) {
  const auto m = n.Mark();
  if (m.line >= 0) throw ConfigError("line " + std::to_string(m.line + 1) + ": " + msg);
  throw ConfigError(msg);
}

// The node of `key`, or the enclosing mapping when the key is absent.
YAML::Node at(const YAML::Node& n, const std::string& key) {
  if (n[key]) return n[key];
  return n;
}

template <class T>
T get(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) fail(n, "'" + key + "' must be a scalar");
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    fail(n, "'" + key + "' has the wrong type");
  }
}

template <class T>
std::vector<T> get_list(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence()) fail(n, "'" + key + "' must be a list");
  std::vector<T> out;
  for (const auto& item : n) out.push_back(get<T>(item, key));
  return out;
}

const YAML::Node& as_map(const YAML::Node& n, const std::string& section) {
  if (!n.IsMap()) fail(n, "section '" + section + "' must be a mapping");
  return n;
}

void check_keys(const YAML::Node& n, const std::set<std::string>& allowed, const std::string& section) {
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + section);
  }
}

void read_graph(const YAML::Node& n, RunConfig& c) {
  check_keys(as_map(n, "graph"), {"family", "params", "r_max"}, "graph");
  if (n["family"]) c.graph.family = get<std::string>(n["family"], "family");
  if (n["params"]) c.graph.params = get_list<int>(n["params"], "params");
  if (n["r_max"]) c.graph.r_max = get<int>(n["r_max"], "r_max");
  const auto& f = c.graph.family;
  const std::size_t want = f == "tiling" ? 2 : 1;
  if (f != "tree" && f != "tiling" && f != "line" && f != "grid") fail(at(n, "family"), "unknown graph family '" + f + "'");
  if (c.graph.params.size() != want)
    fail(at(n, "params"), "family '" + f + "' expects " + std::to_string(want) + " parameter(s)");
  if ((f == "tree" || f == "tiling") && c.graph.r_max < 1) fail(at(n, "r_max"), "r_max must be >= 1");
}

void read_geometry(const YAML::Node& n, RunConfig& c) {
  check_keys(as_map(n, "geometry"),
             {"horizon", "epsilon", "four_point_samples", "slim_samples", "lambda_samples", "shadow_samples"},
             "geometry");
  auto& g = c.geometry;
  if (n["horizon"]) g.horizon = get<int>(n["horizon"], "horizon");
  if (n["epsilon"] && !n["epsilon"].IsNull()) {
    g.epsilon = get<double>(n["epsilon"], "epsilon");
    if (!(*g.epsilon > 0)) fail(at(n, "epsilon"), "epsilon must be positive");
  }
  if (n["four_point_samples"]) g.four_point_samples = get<int>(n["four_point_samples"], "four_point_samples");
  if (n["slim_samples"]) g.slim_samples = get<int>(n["slim_samples"], "slim_samples");
  if (n["lambda_samples"]) g.lambda_samples = get<int>(n["lambda_samples"], "lambda_samples");
  if (n["shadow_samples"]) g.shadow_samples = get<int>(n["shadow_samples"], "shadow_samples");
  if (g.horizon < 0) fail(at(n, "horizon"), "horizon must be >= 0");
  if ((c.graph.family == "tree" || c.graph.family == "tiling") && g.horizon >= c.graph.r_max + 1)
    fail(at(n, "horizon"), "horizon must not exceed r_max");
}

void read_potential(const YAML::Node& n, RunConfig& c) {
  check_keys(as_map(n, "potential"), {"name", "c0", "c1", "resolution"}, "potential");
  auto& p = c.potential;
  if (n["name"]) p.name = get<std::string>(n["name"], "name");
  if (n["c0"]) p.c0 = get<double>(n["c0"], "c0");
  if (n["c1"]) p.c1 = get<double>(n["c1"], "c1");
  if (n["resolution"]) p.resolution = get<double>(n["resolution"], "resolution");
  if (p.name != "quartic" && p.name != "cosine") fail(at(n, "name"), "unknown potential '" + p.name + "'");
  if (!(p.c0 < p.c1)) fail(at(n, "c1"), "c0 must be below c1");
}

void read_split(const YAML::Node& n, RunConfig& c) {
  check_keys(as_map(n, "split"), {"kind", "angle", "center", "radius", "members"}, "split");
  auto& s = c.split;
  if (n["kind"]) s.kind = get<std::string>(n["kind"], "kind");
  if (n["angle"]) s.angle = get<double>(n["angle"], "angle");
  if (n["center"]) s.center = get<int>(n["center"], "center");
  if (n["radius"]) s.radius = get<double>(n["radius"], "radius");
  if (n["members"]) s.members = get_list<int>(n["members"], "members");
  if (s.kind != "half" && s.kind != "ball" && s.kind != "subtree" && s.kind != "explicit")
    fail(at(n, "kind"), "unknown split kind '" + s.kind + "'");
}

void read_solver(const YAML::Node& n, RunConfig& c) {
  check_keys(as_map(n, "solver"),
             {"residual_tol", "max_sweeps", "multistart", "tie_break", "clamp", "samples", "jacobi",
              "require_trapped"},
             "solver");
  auto& s = c.solver;
  if (n["residual_tol"]) s.residual_tol = get<double>(n["residual_tol"], "residual_tol");
  if (n["max_sweeps"]) s.max_sweeps = get<int>(n["max_sweeps"], "max_sweeps");
  if (n["multistart"]) {
    s.multistart = get_list<std::string>(n["multistart"], "multistart");
    for (const auto& m : s.multistart)
      if (m != "boundary-extension" && m != "c0-fill" && m != "c1-fill")
        fail(at(n, "multistart"), "unknown start '" + m + "'");
    if (s.multistart.empty()) fail(at(n, "multistart"), "multistart must not be empty");
  }
  if (n["tie_break"]) s.tie_break = get<std::string>(n["tie_break"], "tie_break");
  if (n["clamp"]) s.clamp = get<bool>(n["clamp"], "clamp");
  if (n["samples"]) s.samples = get<int>(n["samples"], "samples");
  if (n["jacobi"]) s.jacobi = get<bool>(n["jacobi"], "jacobi");
  if (n["require_trapped"]) s.require_trapped = get<bool>(n["require_trapped"], "require_trapped");
  if (!(s.residual_tol > 0)) fail(at(n, "residual_tol"), "residual_tol must be positive");
  if (s.max_sweeps < 1) fail(at(n, "max_sweeps"), "max_sweeps must be >= 1");
  if (s.samples < 3) fail(at(n, "samples"), "samples must be >= 3");
}

void read_pipeline(const YAML::Node& n, RunConfig& c) {
  check_keys(as_map(n, "pipeline"),
             {"r", "rho", "target_epsilon", "N_list", "n_bar_override", "n0_effective", "monitor_n1"}, "pipeline");
  auto& p = c.pipeline;
  if (n["r"]) p.r = get<double>(n["r"], "r");
  if (n["rho"]) p.rho = get<double>(n["rho"], "rho");
  if (n["target_epsilon"]) p.target_epsilon = get<double>(n["target_epsilon"], "target_epsilon");
  if (n["N_list"]) {
    p.N_list = get_list<int>(n["N_list"], "N_list");
    if (p.N_list.empty()) fail(at(n, "N_list"), "N_list must not be empty");
    for (std::size_t k = 1; k < p.N_list.size(); ++k)
      if (p.N_list[k] <= p.N_list[k - 1]) fail(at(n, "N_list"), "N_list must be strictly increasing");
    if (p.N_list.front() < 0) fail(at(n, "N_list"), "N_list entries must be >= 0");
  }
  if (n["n_bar_override"]) p.n_bar_override = get<int>(n["n_bar_override"], "n_bar_override");
  if (n["n0_effective"]) p.n0_effective = get<int>(n["n0_effective"], "n0_effective");
  if (n["monitor_n1"]) p.monitor_n1 = get<double>(n["monitor_n1"], "monitor_n1");
  if (p.n_bar_override < 0) fail(at(n, "n_bar_override"), "n_bar_override must be >= 0");
  if (!(p.target_epsilon > 0)) fail(at(n, "target_epsilon"), "target_epsilon must be positive");
  if ((c.graph.family == "tree" || c.graph.family == "tiling") && p.N_list.back() + 1 >= c.graph.r_max)
    fail(at(n, "N_list"), "largest N must be below r_max - 1");
}

void read_isoperimetry(const YAML::Node& n, RunConfig& c) {
  check_keys(as_map(n, "isoperimetry"), {"random_sets", "ball_centers", "doubling_radii"}, "isoperimetry");
  auto& s = c.isoperimetry;
  if (n["random_sets"]) s.random_sets = get<int>(n["random_sets"], "random_sets");
  if (n["ball_centers"]) s.ball_centers = get<int>(n["ball_centers"], "ball_centers");
  if (n["doubling_radii"]) s.doubling_radii = get_list<double>(n["doubling_radii"], "doubling_radii");
}

void read_output(const YAML::Node& n, RunConfig& c) {
  check_keys(as_map(n, "output"), {"directory", "formats"}, "output");
  if (n["directory"]) c.output.directory = get<std::string>(n["directory"], "directory");
  if (n["formats"]) {
    c.output.formats = get_list<std::string>(n["formats"], "formats");
    for (const auto& f : c.output.formats)
      if (f != "json" && f != "csv") fail(at(n, "formats"), "unknown format '" + f + "'");
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  RunConfig c;
  if (root.IsNull()) return c;
  if (!root.IsMap()) fail(root, "config must be a mapping");
  check_keys(root,
             {"graph", "geometry", "potential", "split", "solver", "pipeline", "isoperimetry", "output", "seed",
              "workers"},
             "config");
  // graph first: later sections validate against it
  if (root["graph"]) read_graph(root["graph"], c);
  if (root["geometry"]) read_geometry(root["geometry"], c);
  if (root["potential"]) read_potential(root["potential"], c);
  if (root["split"]) read_split(root["split"], c);
  if (root["solver"]) read_solver(root["solver"], c);
  if (root["pipeline"]) read_pipeline(root["pipeline"], c);
  if (root["isoperimetry"]) read_isoperimetry(root["isoperimetry"], c);
  if (root["output"]) read_output(root["output"], c);
  if (root["seed"]) c.seed = get<std::uint64_t>(root["seed"], "seed");
  if (root["workers"]) c.workers = get<int>(root["workers"], "workers");
  c.solver.seed = c.seed;
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_config(const RunConfig& c) {
  nlohmann::json j;
  j["graph"] = {{"family", c.graph.family}, {"params", c.graph.params}, {"r_max", c.graph.r_max}};
  j["geometry"] = {{"horizon", c.geometry.horizon},
                   {"epsilon", c.geometry.epsilon ? nlohmann::json(*c.geometry.epsilon) : nlohmann::json()},
                   {"four_point_samples", c.geometry.four_point_samples},
                   {"slim_samples", c.geometry.slim_samples},
                   {"lambda_samples", c.geometry.lambda_samples},
                   {"shadow_samples", c.geometry.shadow_samples}};
  j["potential"] = {{"name", c.potential.name},
                    {"c0", c.potential.c0},
                    {"c1", c.potential.c1},
                    {"resolution", c.potential.resolution}};
  j["split"] = {{"kind", c.split.kind},
                {"angle", c.split.angle},
                {"center", c.split.center},
                {"radius", c.split.radius},
                {"members", c.split.members}};
  j["solver"] = {{"residual_tol", c.solver.residual_tol}, {"max_sweeps", c.solver.max_sweeps},
                 {"multistart", c.solver.multistart},     {"tie_break", c.solver.tie_break},
                 {"clamp", c.solver.clamp},               {"samples", c.solver.samples},
                 {"jacobi", c.solver.jacobi},             {"require_trapped", c.solver.require_trapped}};
  j["pipeline"] = {{"r", c.pipeline.r},
                   {"rho", c.pipeline.rho},
                   {"target_epsilon", c.pipeline.target_epsilon},
                   {"N_list", c.pipeline.N_list},
                   {"n_bar_override", c.pipeline.n_bar_override},
                   {"n0_effective", c.pipeline.n0_effective},
                   {"monitor_n1", c.pipeline.monitor_n1}};
  j["isoperimetry"] = {{"random_sets", c.isoperimetry.random_sets},
                       {"ball_centers", c.isoperimetry.ball_centers},
                       {"doubling_radii", c.isoperimetry.doubling_radii}};
  // output directory and worker count do not change results and may come from the environment
  j["output"] = {{"formats", c.output.formats}};
  j["seed"] = c.seed;
  return j.dump(2);
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

Potential make_potential(const PotentialSection& s) {
  if (s.name == "quartic") return quartic(s.c0, s.c1);
  if (s.name == "cosine") return cosine_well(s.c0, s.c1);
  throw ConfigError("unknown potential '" + s.name + "'");
}

}  // namespace hypac
