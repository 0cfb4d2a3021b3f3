#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "hypac/graph.hpp"

namespace hypac {

struct GeometryReport {
  double delta_four_point = 0.0;
  double delta_slim_sampled = 0.0;
  double visuality_constant = 0.0;  // the visuality constant (delta bar)
  double delta_used = 0.0;          // max of the three above
  int sample_size = 0;
  bool exact = false;               // four-point value is exhaustive
  bool horizon_margin_ok = true;    // R <= R_max - delta_used - 1
};

struct VisualMetric {
  double epsilon = 0.0;
  double lambda = 1.0;
  int horizon_radius = 0;
  bool epsilon_overridden = false;
};

/// Dense all-pairs distances, row-major; intended for small graphs.
std::vector<int> all_pairs_distances(const Graph& g);

/// (a|b)_v = (|a| + |b| - d(a,b)) / 2 with |.| the distance to the base vertex.
double gromov_product(const Graph& g, Vertex a, Vertex b);
/// Same, reusing a distance field rooted at `a`.
double gromov_product(const Graph& g, const DistanceField& from_a, Vertex b);

struct DeltaEstimate {
  double delta = 0.0;
  bool exact = false;
  int samples = 0;
};

/// Four-point delta. Exhaustive when vertex_count <= 64 or `samples` < 0,
/// otherwise over a seeded, prefix-stable sample of quadruples.
DeltaEstimate estimate_delta_four_point(const Graph& g, int samples, std::uint64_t seed = 1,
                                        int workers = 0);

/// Slimness defect over sampled triangles with lowest-id-parent geodesics.
double estimate_delta_slim(const Graph& g, int samples, std::uint64_t seed = 1, int workers = 0);

/// Geodesic from `from` to `to`: each step moves to the lowest-id neighbor
/// one step closer to `to`.
std::vector<Vertex> canonical_geodesic(const Graph& g, Vertex from, Vertex to);

/// {u : |u| + d(u, target) = |target|}, the union of all geodesics v -> target.
VertexSet geodesic_membership(const Graph& g, Vertex target);

/// Union of geodesic_membership over every vertex of the sphere of radius R.
VertexSet ray_union(const Graph& g, int horizon_radius);

/// max over |u| <= R - margin of the distance from u to the nearest ray.
double visuality_constant(const Graph& g, int horizon_radius, double margin);

/// ln 2 / (8 (delta_used + 1)) unless overridden.
double choose_epsilon(double delta_used, std::optional<double> override_value = std::nullopt);

double visual_distance(const VisualMetric& vm, const Graph& g, Vertex a, Vertex b);
inline double visual_distance_from_product(const VisualMetric& vm, double product) {
  return std::exp(-vm.epsilon * product);
}

/// Smallest lambda >= 1 with lambda^-1 e^{-eps d(v,gamma)} <= e^{-eps (a|b)} <=
/// lambda e^{-eps d(v,gamma)} over sampled pairs from `proxies`, where gamma
/// ranges over all geodesics a -> b.
double fit_lambda(const VisualMetric& vm, const Graph& g, const std::vector<Vertex>& proxies,
                  int samples, std::uint64_t seed = 1, int workers = 0);

struct GeometrySettings {
  int horizon_radius = 0;
  int four_point_samples = 2000;
  int slim_samples = 500;
  int lambda_samples = 200;
  std::optional<double> epsilon_override;
  std::uint64_t seed = 1;
  int workers = 0;
};

/// Runs the delta estimators and the visuality check for a horizon radius.
GeometryReport analyze_geometry(const Graph& g, const GeometrySettings& settings);

/// Picks epsilon and fits lambda over the horizon sphere.
VisualMetric make_visual_metric(const Graph& g, const GeometryReport& report,
                                const GeometrySettings& settings);

}  // namespace hypac
