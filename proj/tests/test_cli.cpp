#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hypac/commands.hpp"

using namespace hypac;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("hypac_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

const char* kSmall = R"(seed: 3
graph:
  family: tree
  params: [3]
  r_max: 6
geometry:
  epsilon: 0.6931471805599453
split:
  kind: half
  angle: 1.5707963267948966
pipeline:
  N_list: [2, 4]
  n0_effective: 1
)";

}  // namespace

TEST_CASE("config parsing") {
  auto c = parse_config(kSmall);
  CHECK(c.graph.family == "tree");
  CHECK(c.graph.r_max == 6);
  CHECK(c.pipeline.N_list == std::vector<int>{2, 4});
  CHECK(c.geometry.epsilon.has_value());
  CHECK(c.seed == 3);
  CHECK(c.solver.seed == 3);

  auto d = parse_config("");
  CHECK(d.graph.family == "tree");
  CHECK(d.potential.name == "quartic");
}

TEST_CASE("config errors carry line numbers") {
  CHECK(error_of("graph:\n  family: tree\n  colour: red\n").find("line 3") != std::string::npos);
  CHECK(error_of("graph:\n  family: tree\n  params: [3]\n  r_max: 8\npipeline:\n  N_list: []\n").find("line 6") !=
        std::string::npos);
  CHECK(error_of("graph:\n  family: blob\n").find("line 2") != std::string::npos);
  CHECK(error_of("potential:\n  c0: 1\n  c1: 0\n").find("line 3") != std::string::npos);
  CHECK(error_of("solver:\n  max_sweeps: many\n").find("line 2") != std::string::npos);
  CHECK(error_of("graph: [1, 2\n").find("line") != std::string::npos);
  CHECK(error_of("pipeline:\n  N_list: [4, 2]\n").find("increasing") != std::string::npos);
  CHECK(error_of("graph:\n  family: tree\n  params: [3]\n  r_max: 6\npipeline:\n  N_list: [5]\n").find("line 6") !=
        std::string::npos);
}

TEST_CASE("canonical config and hash") {
  auto a = parse_config(kSmall);
  auto b = parse_config(kSmall);
  b.workers = 7;
  b.output.directory = "elsewhere";
  CHECK(canonical_config(a) == canonical_config(b));
  b.seed = 4;
  CHECK(canonical_config(a) != canonical_config(b));
  CHECK(fnv1a("") == 14695981039346656037ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("csv and number formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0 / 3) == "0.3333333333333333");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  auto dir = scratch("csv");
  CsvTable t{{"a", "b"}, {}};
  t.add(1, "x,y");
  t.add(2.5, true);
  write_csv((dir / "t.csv").string(), t);
  CHECK(slurp(dir / "t.csv") == "a,b\n1,\"x,y\"\n2.5,true\n");
}

TEST_CASE("generate bundle") {
  auto cfg = parse_config(kSmall);
  auto dir = scratch("generate");
  std::ostringstream log;
  CHECK(run_command("generate", cfg, dir.string(), log) == 0);
  for (const char* f : {"graph.json", "edges.csv", "embedding.csv", "manifest.json"})
    CHECK(std::filesystem::exists(dir / f));
  auto graph = Json::parse(slurp(dir / "graph.json"));
  CHECK(graph["vertex_count"] == 1 + 3 * 63);
  CHECK(graph["edge_count"] == 3 * 63);
  auto manifest = Json::parse(slurp(dir / "manifest.json"));
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(canonical_config(cfg))));
  CHECK(manifest["config_hash"] == std::string(hex));

  // embedding: base at the origin, everything strictly inside the unit disk
  std::istringstream emb(slurp(dir / "embedding.csv"));
  std::string line;
  std::getline(emb, line);
  CHECK(line == "vertex,depth,x,y");
  int rows = 0;
  while (std::getline(emb, line)) {
    double v, d, x, y;
    char c;
    std::istringstream ls(line);
    ls >> v >> c >> d >> c >> x >> c >> y;
    if (rows == 0) CHECK(x * x + y * y == 0.0);
    CHECK(x * x + y * y < 1.0);
    ++rows;
  }
  CHECK(rows == 190);
}

TEST_CASE("solve is deterministic and rejects bad configs") {
  auto cfg = parse_config(kSmall);
  std::ostringstream log;
  auto d1 = scratch("solve1"), d2 = scratch("solve2");
  CHECK(run_command("solve", cfg, d1.string(), log) == 0);
  cfg.workers = 2;
  CHECK(run_command("solve", cfg, d2.string(), log) == 0);
  for (const char* f : {"convergence.csv", "asymptotics.csv", "field_N2.csv", "field_N4.csv"}) {
    CHECK(std::filesystem::exists(d1 / f));
    CHECK(slurp(d1 / f) == slurp(d2 / f));
  }
  auto report = Json::parse(slurp(d1 / "run_report.json"));
  CHECK(report["solves"].size() == 2);
  CHECK(report["constants"]["theoretical_only"] == true);

  auto empty = cfg;
  empty.pipeline.N_list.clear();
  CHECK_THROWS_AS(run_command("solve", empty, scratch("solve3").string(), log), ConfigError);
  CHECK_THROWS_AS(run_command("frobnicate", cfg, scratch("solve4").string(), log), ConfigError);
}

TEST_CASE("verify on a small tree passes") {
  auto cfg = parse_config(kSmall);
  std::ostringstream log;
  auto dir = scratch("verify");
  CHECK(run_command("verify", cfg, dir.string(), log) == 0);
  auto report = Json::parse(slurp(dir / "verify.json"));
  CHECK(report["hard_failures"] == 0);
  CHECK(log.str().find("FAIL") == std::string::npos);
}
