#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypac/graph.hpp"
#include "hypac/pipeline.hpp"
#include "hypac/variational.hpp"

namespace hypac {

/// Schema or parse failure; the message carries "line N" when known.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GeometrySection {
  int horizon = 0;  // 0 = R_max - 1
  std::optional<double> epsilon;
  int four_point_samples = 2000;
  int slim_samples = 500;
  int lambda_samples = 200;
  int shadow_samples = 300;
};

struct PotentialSection {
  std::string name = "quartic";
  double c0 = -1.0;
  double c1 = 1.0;
  double resolution = 0.0;
};

struct IsoperimetrySection {
  int random_sets = 200;
  int ball_centers = 8;
  std::vector<double> doubling_radii;  // empty = automatic
};

struct PipelineSection {
  double r = 0.0;               // 0 = deepest-probe radius
  double rho = 0.0;             // 0 = min(rho0, target_epsilon / 2b)
  double target_epsilon = 0.1;
  std::vector<int> N_list{4, 6};
  int n_bar_override = 2;
  int n0_effective = 4;
  double monitor_n1 = 1.0;
};

struct OutputSection {
  std::string directory = "out";
  std::vector<std::string> formats{"json", "csv"};
};

struct RunConfig {
  GeneratorSpec graph{"tree", {3}, 8};
  GeometrySection geometry;
  PotentialSection potential;
  SplitSpec split;
  SolverConfig solver;
  PipelineSection pipeline;
  IsoperimetrySection isoperimetry;
  OutputSection output;
  std::uint64_t seed = 1;
  int workers = 0;

  /// Configured horizon, or one below the truncation radius of the built graph.
  int horizon_radius(int r_max) const { return geometry.horizon > 0 ? geometry.horizon : r_max - 1; }
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical text of the fully resolved config (defaults filled in, sorted
/// keys, without output directory and worker count); the manifest hash is
/// computed from it.
std::string canonical_config(const RunConfig& cfg);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);

Potential make_potential(const PotentialSection& s);

}  // namespace hypac
