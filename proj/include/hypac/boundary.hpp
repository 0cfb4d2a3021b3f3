#pragma once

#include <cstdint>
#include <vector>

#include "hypac/geometry.hpp"
#include "hypac/graph.hpp"

namespace hypac {

/// Membership over proxy indices of one horizon (universe = horizon size).
using ProxySet = VertexSet;

/// Finite stand-in for the boundary at infinity: the vertices of the sphere
/// of radius R around the base vertex, one proxy per vertex.
///
/// Shadows are computed once at construction. For |u| <= R,
/// S(u) = {xi : d(u, ray(xi)) <= delta}. Vertices beyond the horizon inherit
/// the union of the shadows of the depth-R vertices on their geodesics from
/// the base vertex.
class Horizon {
 public:
  Horizon(const Graph& g, int radius, int delta);

  const Graph& graph() const { return *g_; }
  int radius() const { return radius_; }
  int delta() const { return delta_; }
  int size() const { return static_cast<int>(proxies_.size()); }

  Vertex vertex(int proxy) const { return proxies_[static_cast<std::size_t>(proxy)]; }
  const std::vector<Vertex>& vertices() const { return proxies_; }
  /// Proxy index of a horizon vertex, or -1.
  int proxy_of(Vertex u) const { return proxy_index_[static_cast<std::size_t>(u)]; }

  /// Sorted proxy indices of S(u).
  const std::vector<int>& shadow(Vertex u) const { return shadows_[static_cast<std::size_t>(u)]; }
  ProxySet shadow_set(Vertex u) const;
  bool resolved(Vertex u) const { return !shadow(u).empty(); }

  /// Union of all geodesics from the base vertex to the proxy.
  VertexSet ray_set(int proxy) const;
  /// delta-neighborhood of ray_set, restricted to |u| <= R.
  VertexSet u_set(int proxy) const;
  /// {u : proxy in S(u)} over the whole truncation.
  VertexSet shadow_members(int proxy) const;

  ProxySet none() const { return ProxySet(size()); }
  ProxySet all() const { return ProxySet::all(size()); }

  /// Gromov products (proxy | w)_v for every vertex w of the graph.
  std::vector<double> products_to_vertices(int proxy) const;
  /// Gromov products (proxy | eta)_v for every proxy eta.
  std::vector<double> products_from(int proxy) const;

 private:
  const Graph* g_;
  int radius_;
  int delta_;
  std::vector<Vertex> proxies_;
  std::vector<int> proxy_index_;
  std::vector<std::vector<int>> shadows_;
};

/// Horizon with the integer shadow threshold floor(delta_used).
Horizon make_horizon(const Graph& g, int radius, double delta_used);

/// {u : S(u) nonempty and S(u) within U}.
VertexSet cone(const Horizon& h, const ProxySet& u);

/// Closed visual ball {xi : d_eps(xi0, xi) <= r}, compared with relative
/// tolerance 1e-12.
ProxySet ball_at_infinity(const Horizon& h, const VisualMetric& vm, int xi0, double r);
/// {xi : r - t <= d_eps(xi0, xi) <= r + t}.
ProxySet annulus(const Horizon& h, const VisualMetric& vm, int xi0, double r, double t);

/// Visual distances from xi0 to every proxy.
std::vector<double> visual_row(const Horizon& h, const VisualMetric& vm, int xi0);

/// Largest visual distance between two proxies, over a sample of rows.
double horizon_diameter(const Horizon& h, const VisualMetric& vm, int sample_rows = 64);

/// Pairs of distinct proxies closer than e^{-eps (R - 2 delta)}.
int count_unresolved_duplicates(const Horizon& h, const VisualMetric& vm, int sample_rows = 256);

struct ShadowConstants {
  double C1 = 1.0;
  double C2 = 1.0;
  bool vacuous = false;
  bool feasible = true;  // false when no grid value satisfied the sample
  int sample_size = 0;
};

/// Fits C1 and C2 on the lattice lambda * 2^k from the exact constraints of
/// each sampled (proxy, vertex) pair. C1 is the largest admissible value
/// (both of its inclusions weaken as C1 shrinks); C2 is the smallest.
ShadowConstants fit_shadow_constants(const Horizon& h, const VisualMetric& vm, int samples,
                                     std::uint64_t seed = 1, int workers = 0);

struct InclusionReport {
  int checked = 0;
  int violations = 0;
};

/// Direct set check of the three almost-round inclusions on sampled
/// (xi, r, g) triples with r drawn from the thresholds the constants allow.
InclusionReport check_shadow_inclusions(const Horizon& h, const VisualMetric& vm,
                                        const ShadowConstants& sc, int samples,
                                        std::uint64_t seed = 1);

/// t_n = max{4 e^{4 eps} / eps, C2} e^{-eps n}.
double separating_scale(const VisualMetric& vm, const ShadowConstants& sc, int n);

struct SeparatingSet {
  VertexSet set;
  double t_n = 0.0;
  bool annulus_empty = false;
  bool under_resolved = false;  // t_n below the proxy resolution e^{-eps R}
};

/// {u outside B_n : S(u) meets the annulus A_{r+2t_n}^{t_n}(xi0)}.
SeparatingSet separating_set(const Horizon& h, const VisualMetric& vm, const ShadowConstants& sc,
                             int xi0, double r, int n);

struct SeparatingCheck {
  bool full_boundary_contained = true;  // boundary of the 3-fold outer set
  bool outer_boundary_contained = true;
  bool disjoint = true;
  bool separates = true;  // no edge from cone(B_r) to cone(complement of B_{r+4t_n}) outside A u B_n
  bool vacuous = false;   // annulus empty
  double t_n = 0.0;
  int set_size = 0;
  int excluded_rim = 0;
};

/// Evaluates both containments, the disjointness statement and the graph
/// cut, ignoring vertices within distance 1 of the truncation rim.
SeparatingCheck check_separating_lemma(const Horizon& h, const VisualMetric& vm,
                                       const ShadowConstants& sc, int xi0, double r, int n);

/// If u is in U_xi and d(xi, xi0) < r - C1 e^{-eps |u|} then u lies in the cone
/// over B_r(xi0). Returns the number of violations over sampled instances.
InclusionReport check_cone_membership(const Horizon& h, const VisualMetric& vm,
                                      const ShadowConstants& sc, int samples,
                                      std::uint64_t seed = 1);

struct ConeTopologyWitness {
  bool cone_inside_ball = false;  // some (n, r') with cone(B_r') \ B_n inside the vertex ball
  bool ball_inside_cone = false;  // some (n, r') with vertex ball(r') \ B_n inside cone(B_r)
  int n_cone = -1;
  int n_ball = -1;
};

/// Searches n in [0, R] and r' = r 2^{-k} for both directions of the
/// equivalence between cone neighborhoods and visual-metric neighborhoods.
ConeTopologyWitness cone_topology_witness(const Horizon& h, const VisualMetric& vm, int xi,
                                          double r);

}  // namespace hypac
