#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hypac/boundary.hpp"

namespace hypac {

struct GrowthFit {
  std::vector<long long> table;  // n -> #B_n(v), n = 0..R_max
  double slope = 0.0;            // least-squares slope of ln #B_n on the window
  double D = 0.0;                // slope / eps
  double C_D = 1.0;              // smallest constant with #B_n <= C_D e^{eps D n} on the window
  int window_lo = 0;
  int window_hi = 0;
  bool subexponential = false;   // upper-half slope below half the lower-half slope
};

/// Fits #B_n <= C_D e^{eps D n} over the window [2, R_max - 2].
GrowthFit growth_fit(const Graph& g, const VisualMetric& vm);

struct IpFamily {
  bool balls = true;               // balls around the base vertex and sampled centers
  bool cones = false;              // truncated cones over visual balls (needs a horizon)
  int random_sets = 0;             // number of random connected sets
  std::vector<int> random_sizes;   // sizes cycled through by the random sets
  bool exhaustive = false;         // every nonempty subset; vertex_count <= 20 only
  bool exclude_rim = true;         // skip sets meeting the rim zone
  int ball_centers = 8;
  std::uint64_t seed = 1;
  std::string describe() const;
};

struct IpReport {
  double exponent = 0.0;           // 4D / (4D + 1)
  double C0 = 1.0;                 // max (#B)^exponent / #d_out B over the family, at least 1
  VertexSet worst_set;
  std::string family_spec;
  int tested = 0;
  int excluded_rim = 0;
  int excluded_no_boundary = 0;
  bool violated_at_scale = false;  // worst ratio on the largest third >= 1.5x the smallest third
  std::vector<std::pair<int, double>> size_ratio;  // (#B, ratio) per tested set
};

/// Worst isoperimetric ratio over a family of vertex sets. The horizon is
/// only consulted for the cone family.
IpReport ip_scan(const Graph& g, double D, const IpFamily& family, const Horizon* horizon = nullptr,
                 const VisualMetric* vm = nullptr, int workers = 0);

/// Random connected set of the requested size grown from `seed_vertex`.
VertexSet random_connected_set(const Graph& g, Vertex seed_vertex, int size, std::uint64_t seed);

struct DoublingReport {
  int M_d = 0;
  std::map<std::pair<double, double>, int> covering_table;  // (R, r) -> greedy N_r(B_R)
  double assouad_fit = 0.0;
  bool under_resolved = false;
  std::vector<std::pair<double, int>> horizon_covers;       // r -> N_r(whole horizon)
};

/// Greedy farthest-point r-net of the proxies listed in `points`. Returns
/// the chosen centers (proxy indices); every point lies within r of one.
std::vector<int> greedy_cover(const Horizon& h, const VisualMetric& vm, const std::vector<int>& points,
                              double r);

/// Covering numbers of B_{2r}(xi0) by r-balls at sampled centers, and the
/// exponent fit of ln N_r(horizon) against ln(diameter / r).
DoublingReport doubling_probe(const Horizon& h, const VisualMetric& vm, const std::vector<double>& radii,
                              int sample_centers, std::uint64_t seed = 1);

}  // namespace hypac
