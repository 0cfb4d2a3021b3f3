#include "hypac/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "hypac/parallel.hpp"

namespace hypac {

namespace {

constexpr double kRelTol = 1e-12;

bool within(double d, double r) { return d <= r * (1.0 + kRelTol); }

void merge_into(std::vector<int>& dst, const std::vector<int>& src) {
  std::vector<int> out;
  out.reserve(dst.size() + src.size());
  std::set_union(dst.begin(), dst.end(), src.begin(), src.end(), std::back_inserter(out));
  dst.swap(out);
}

}  // namespace

Horizon::Horizon(const Graph& g, int radius, int delta)
    : g_(&g), radius_(radius), delta_(std::max(0, delta)) {
  if (radius <= 0) throw GraphError("horizon radius must be positive");
  if (radius > g.r_max()) throw GraphError("horizon radius exceeds the truncation radius");
  const int n = g.vertex_count();
  proxy_index_.assign(static_cast<std::size_t>(n), -1);
  for (Vertex u = 0; u < n; ++u)
    if (g.depth(u) == radius) {
      proxy_index_[static_cast<std::size_t>(u)] = static_cast<int>(proxies_.size());
      proxies_.push_back(u);
    }
  if (proxies_.empty()) throw GraphError("horizon sphere is empty");

  shadows_.assign(static_cast<std::size_t>(n), {});
  std::vector<int> stamp(static_cast<std::size_t>(n), -1);
  std::vector<int> dist(static_cast<std::size_t>(n), 0);
  std::vector<Vertex> queue;
  for (int p = 0; p < size(); ++p) {
    // ray: reverse depth-decreasing search from the proxy
    queue.clear();
    queue.push_back(vertex(p));
    stamp[static_cast<std::size_t>(vertex(p))] = p;
    dist[static_cast<std::size_t>(vertex(p))] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      Vertex u = queue[head];
      for (Vertex w : g.neighbors(u))
        if (g.depth(w) == g.depth(u) - 1 && stamp[static_cast<std::size_t>(w)] != p) {
          stamp[static_cast<std::size_t>(w)] = p;
          dist[static_cast<std::size_t>(w)] = 0;
          queue.push_back(w);
        }
    }
    // delta-neighborhood
    for (std::size_t head = 0; head < queue.size(); ++head) {
      Vertex u = queue[head];
      const int du = dist[static_cast<std::size_t>(u)];
      if (du >= delta_) continue;
      for (Vertex w : g.neighbors(u))
        if (stamp[static_cast<std::size_t>(w)] != p) {
          stamp[static_cast<std::size_t>(w)] = p;
          dist[static_cast<std::size_t>(w)] = du + 1;
          queue.push_back(w);
        }
    }
    for (Vertex u : queue)
      if (g.depth(u) <= radius) shadows_[static_cast<std::size_t>(u)].push_back(p);
  }

  // beyond the horizon: inherit from the depth-R vertices on geodesics from v
  std::vector<std::vector<int>> anchors(static_cast<std::size_t>(n));
  for (Vertex u = 0; u < n; ++u) {
    const int du = g.depth(u);
    if (du <= radius) continue;
    auto& a = anchors[static_cast<std::size_t>(u)];
    for (Vertex w : g.neighbors(u)) {
      if (g.depth(w) != du - 1) continue;
      if (du - 1 == radius)
        merge_into(a, std::vector<int>{proxy_of(w)});
      else
        merge_into(a, anchors[static_cast<std::size_t>(w)]);
    }
    auto& s = shadows_[static_cast<std::size_t>(u)];
    for (int p : a) merge_into(s, shadows_[static_cast<std::size_t>(vertex(p))]);
  }
}

ProxySet Horizon::shadow_set(Vertex u) const {
  return ProxySet::from(size(), shadow(u));
}

VertexSet Horizon::ray_set(int proxy) const {
  return geodesic_membership(*g_, vertex(proxy));
}

VertexSet Horizon::u_set(int proxy) const {
  VertexSet s(g_->vertex_count());
  for (Vertex u = 0; u < g_->vertex_count(); ++u)
    if (g_->depth(u) <= radius_) {
      const auto& sh = shadow(u);
      if (std::binary_search(sh.begin(), sh.end(), proxy)) s.insert(u);
    }
  return s;
}

VertexSet Horizon::shadow_members(int proxy) const {
  VertexSet s(g_->vertex_count());
  for (Vertex u = 0; u < g_->vertex_count(); ++u) {
    const auto& sh = shadow(u);
    if (std::binary_search(sh.begin(), sh.end(), proxy)) s.insert(u);
  }
  return s;
}

std::vector<double> Horizon::products_to_vertices(int proxy) const {
  const auto f = distances_from(*g_, vertex(proxy));
  std::vector<double> out(static_cast<std::size_t>(g_->vertex_count()));
  for (Vertex w = 0; w < g_->vertex_count(); ++w)
    out[static_cast<std::size_t>(w)] = 0.5 * (radius_ + g_->depth(w) - f.dist[static_cast<std::size_t>(w)]);
  return out;
}

std::vector<double> Horizon::products_from(int proxy) const {
  const auto f = distances_from(*g_, vertex(proxy));
  std::vector<double> out(proxies_.size());
  for (std::size_t k = 0; k < proxies_.size(); ++k)
    out[k] = 0.5 * (2 * radius_ - f.dist[static_cast<std::size_t>(proxies_[k])]);
  return out;
}

Horizon make_horizon(const Graph& g, int radius, double delta_used) {
  return Horizon(g, radius, static_cast<int>(std::floor(delta_used + 1e-9)));
}

VertexSet cone(const Horizon& h, const ProxySet& u) {
  if (u.universe() != h.size()) throw GraphError("proxy set does not match the horizon");
  const Graph& g = h.graph();
  VertexSet c(g.vertex_count());
  for (Vertex w = 0; w < g.vertex_count(); ++w) {
    const auto& sh = h.shadow(w);
    if (sh.empty()) continue;
    if (std::all_of(sh.begin(), sh.end(), [&](int p) { return u.contains(p); })) c.insert(w);
  }
  return c;
}

std::vector<double> visual_row(const Horizon& h, const VisualMetric& vm, int xi0) {
  auto row = h.products_from(xi0);
  for (double& x : row) x = visual_distance_from_product(vm, x);
  row[static_cast<std::size_t>(xi0)] = 0.0;
  return row;
}

ProxySet ball_at_infinity(const Horizon& h, const VisualMetric& vm, int xi0, double r) {
  const auto row = visual_row(h, vm, xi0);
  ProxySet s(h.size());
  for (int k = 0; k < h.size(); ++k)
    if (within(row[static_cast<std::size_t>(k)], r)) s.insert(k);
  return s;
}

ProxySet annulus(const Horizon& h, const VisualMetric& vm, int xi0, double r, double t) {
  const auto row = visual_row(h, vm, xi0);
  ProxySet s(h.size());
  for (int k = 0; k < h.size(); ++k) {
    const double d = row[static_cast<std::size_t>(k)];
    if (within(d, r + t) && within(r - t, d)) s.insert(k);
  }
  return s;
}

namespace {

std::vector<int> spread_rows(int total, int wanted) {
  std::vector<int> rows;
  if (wanted <= 0 || wanted >= total) {
    for (int k = 0; k < total; ++k) rows.push_back(k);
    return rows;
  }
  for (int k = 0; k < wanted; ++k)
    rows.push_back(static_cast<int>(static_cast<long long>(k) * total / wanted));
  return rows;
}

}  // namespace

double horizon_diameter(const Horizon& h, const VisualMetric& vm, int sample_rows) {
  double best = 0.0;
  for (int k : spread_rows(h.size(), sample_rows)) {
    const auto row = visual_row(h, vm, k);
    best = std::max(best, *std::max_element(row.begin(), row.end()));
  }
  return best;
}

int count_unresolved_duplicates(const Horizon& h, const VisualMetric& vm, int sample_rows) {
  (void)vm;
  const double limit = h.radius() - 2.0 * h.delta();
  int count = 0;
  for (int k : spread_rows(h.size(), sample_rows)) {
    const auto row = h.products_from(k);
    for (int j = 0; j < h.size(); ++j)
      if (j != k && row[static_cast<std::size_t>(j)] > limit) ++count;
  }
  return count;
}

// ---- shadow constants -----------------------------------------------------

namespace {

/// Exact data of one (xi, g) pair needed by the almost-round inclusions.
struct PairBounds {
  int depth = 0;
  bool on_ray = false;
  double min_outside = std::numeric_limits<double>::infinity();  // min d(xi, eta), eta not in S(g)
  double max_inside = 0.0;                                       // max d(xi, eta), eta in S(g)
};

std::vector<PairBounds> pair_bounds_for(const Horizon& h, const VisualMetric& vm, int xi) {
  const Graph& g = h.graph();
  const auto row = visual_row(h, vm, xi);
  const auto ray = h.ray_set(xi);
  std::vector<PairBounds> out;
  for (Vertex u = 0; u < g.vertex_count(); ++u) {
    if (g.depth(u) > h.radius()) continue;
    const auto& sh = h.shadow(u);
    if (!std::binary_search(sh.begin(), sh.end(), xi)) continue;
    PairBounds b;
    b.depth = g.depth(u);
    b.on_ray = ray.contains(u);
    std::size_t k = 0;
    for (int p = 0; p < h.size(); ++p) {
      const double d = row[static_cast<std::size_t>(p)];
      if (k < sh.size() && sh[k] == p) {
        b.max_inside = std::max(b.max_inside, d);
        ++k;
      } else {
        b.min_outside = std::min(b.min_outside, d);
      }
    }
    out.push_back(b);
  }
  return out;
}

bool c1_ok(const PairBounds& b, double c1, double eps) {
  if (!b.on_ray) return true;
  const double e = std::exp(-eps * b.depth);
  // B_r(xi) inside S(g) for r = C1 e^{-eps|g|}; S(g) inside B_r(xi) for r = e^{-eps|g|} / C1
  return !within(b.min_outside, c1 * e) && within(b.max_inside, e / c1);
}

bool c2_ok(const PairBounds& b, double c2, double eps) {
  return within(b.max_inside, c2 * std::exp(-eps * b.depth));
}

}  // namespace

ShadowConstants fit_shadow_constants(const Horizon& h, const VisualMetric& vm, int samples,
                                     std::uint64_t seed, int workers) {
  ShadowConstants sc;
  sc.sample_size = std::max(0, samples);
  if (samples <= 0) {
    sc.vacuous = true;
    return sc;
  }
  std::vector<std::vector<PairBounds>> data(static_cast<std::size_t>(samples));
  parallel_for(static_cast<std::size_t>(samples), workers, [&](std::size_t i) {
    std::mt19937_64 rng(mix_seed(seed ^ 0xc2b2ae35ULL, i));
    const int xi = std::uniform_int_distribution<int>(0, h.size() - 1)(rng);
    data[i] = pair_bounds_for(h, vm, xi);
  });

  auto all_c1 = [&](double c) {
    for (const auto& d : data)
      for (const auto& b : d)
        if (!c1_ok(b, c, vm.epsilon)) return false;
    return true;
  };
  auto all_c2 = [&](double c) {
    for (const auto& d : data)
      for (const auto& b : d)
        if (!c2_ok(b, c, vm.epsilon)) return false;
    return true;
  };

  constexpr int kLo = -60, kHi = 60;
  bool found1 = false;
  for (int k = kHi; k >= kLo; --k) {
    const double c = vm.lambda * std::ldexp(1.0, k);
    if (all_c1(c)) {
      sc.C1 = c;
      found1 = true;
      break;
    }
  }
  bool found2 = false;
  for (int k = kLo; k <= kHi; ++k) {
    const double c = vm.lambda * std::ldexp(1.0, k);
    if (all_c2(c)) {
      sc.C2 = c;
      found2 = true;
      break;
    }
  }
  sc.feasible = found1 && found2;
  return sc;
}

InclusionReport check_shadow_inclusions(const Horizon& h, const VisualMetric& vm,
                                        const ShadowConstants& sc, int samples,
                                        std::uint64_t seed) {
  InclusionReport rep;
  const Graph& g = h.graph();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto subset = [](const ProxySet& a, const ProxySet& b) { return a.is_subset_of(b); };
  for (int i = 0; i < samples; ++i) {
    const int xi = std::uniform_int_distribution<int>(0, h.size() - 1)(rng);
    const auto ray = h.ray_set(xi).members();
    const Vertex g1 = ray[std::uniform_int_distribution<std::size_t>(0, ray.size() - 1)(rng)];
    const double e1 = std::exp(-vm.epsilon * g.depth(g1));
    const auto s1 = h.shadow_set(g1);

    // first inclusion at the threshold and below it
    for (double r : {sc.C1 * e1, sc.C1 * e1 * unit(rng)}) {
      ++rep.checked;
      if (!subset(ball_at_infinity(h, vm, xi, r), s1)) ++rep.violations;
    }
    // second inclusion at the threshold and above it
    for (double r : {e1 / sc.C1, e1 / sc.C1 * (1.0 + unit(rng))}) {
      ++rep.checked;
      if (!subset(s1, ball_at_infinity(h, vm, xi, r))) ++rep.violations;
    }
    // third inclusion for a vertex whose shadow contains some xi
    const auto members = h.u_set(xi).members();
    const Vertex g3 = members[std::uniform_int_distribution<std::size_t>(0, members.size() - 1)(rng)];
    const double e3 = std::exp(-vm.epsilon * g.depth(g3));
    for (double r : {sc.C2 * e3, sc.C2 * e3 * (1.0 + unit(rng))}) {
      ++rep.checked;
      if (!subset(h.shadow_set(g3), ball_at_infinity(h, vm, xi, r))) ++rep.violations;
    }
  }
  return rep;
}

// ---- separating sets ------------------------------------------------------

double separating_scale(const VisualMetric& vm, const ShadowConstants& sc, int n) {
  const double eps = vm.epsilon;
  return std::max(4.0 / eps * std::exp(4.0 * eps), sc.C2) * std::exp(-eps * n);
}

SeparatingSet separating_set(const Horizon& h, const VisualMetric& vm, const ShadowConstants& sc,
                             int xi0, double r, int n) {
  SeparatingSet out;
  out.t_n = separating_scale(vm, sc, n);
  out.under_resolved = out.t_n < std::exp(-vm.epsilon * h.radius());
  const auto ann = annulus(h, vm, xi0, r + 2.0 * out.t_n, out.t_n);
  out.annulus_empty = ann.empty();
  const Graph& g = h.graph();
  out.set = VertexSet(g.vertex_count());
  for (Vertex u = 0; u < g.vertex_count(); ++u) {
    if (g.depth(u) <= n) continue;
    const auto& sh = h.shadow(u);
    if (std::any_of(sh.begin(), sh.end(), [&](int p) { return ann.contains(p); })) out.set.insert(u);
  }
  return out;
}

SeparatingCheck check_separating_lemma(const Horizon& h, const VisualMetric& vm,
                                       const ShadowConstants& sc, int xi0, double r, int n) {
  const Graph& g = h.graph();
  SeparatingCheck chk;
  const auto a = separating_set(h, vm, sc, xi0, r, n);
  const double t = a.t_n;
  chk.t_n = t;
  chk.vacuous = a.annulus_empty;
  chk.set_size = a.set.size();

  const auto bn = ball(g, g.base_vertex(), n);
  const auto rim = rim_zone(g, 1);
  const auto guard = a.set | bn;

  const auto c = cone(h, ball_at_infinity(h, vm, xi0, r + 2.0 * t));
  const auto full = boundary_full(g, iterate_out(g, c, 3));
  const auto outer = boundary_out(g, c);
  for (Vertex u : full.members()) {
    if (rim.contains(u)) {
      ++chk.excluded_rim;
      continue;
    }
    if (!guard.contains(u)) chk.full_boundary_contained = false;
  }
  for (Vertex u : outer.members()) {
    if (rim.contains(u)) continue;
    if (!guard.contains(u)) chk.outer_boundary_contained = false;
  }

  const auto a2 = separating_set(h, vm, sc, xi0, r + 4.0 * t, n);
  chk.disjoint = ((a.set & a2.set) - bn).empty();

  const auto inner_cone = cone(h, ball_at_infinity(h, vm, xi0, r));
  const auto outer_cone = cone(h, h.all() - ball_at_infinity(h, vm, xi0, r + 4.0 * t));
  const auto free = VertexSet::all(g.vertex_count()) - guard;
  for (const auto& comp : connected_components(g, free)) {
    if (!(comp & inner_cone).empty() && !(comp & outer_cone).empty()) {
      chk.separates = false;
      break;
    }
  }
  return chk;
}

InclusionReport check_cone_membership(const Horizon& h, const VisualMetric& vm,
                                      const ShadowConstants& sc, int samples,
                                      std::uint64_t seed) {
  InclusionReport rep;
  const Graph& g = h.graph();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < samples; ++i) {
    const int xi0 = std::uniform_int_distribution<int>(0, h.size() - 1)(rng);
    const auto row = visual_row(h, vm, xi0);
    const double r = unit(rng);
    const auto c = cone(h, ball_at_infinity(h, vm, xi0, r));
    const int xi = std::uniform_int_distribution<int>(0, h.size() - 1)(rng);
    for (Vertex u : h.u_set(xi).members()) {
      if (!(row[static_cast<std::size_t>(xi)] < r - sc.C1 * std::exp(-vm.epsilon * g.depth(u)))) continue;
      ++rep.checked;
      if (!c.contains(u)) ++rep.violations;
    }
  }
  return rep;
}

ConeTopologyWitness cone_topology_witness(const Horizon& h, const VisualMetric& vm, int xi,
                                          double r) {
  const Graph& g = h.graph();
  ConeTopologyWitness w;
  auto prod = h.products_to_vertices(xi);
  auto vdist = [&](Vertex u) { return visual_distance_from_product(vm, prod[static_cast<std::size_t>(u)]); };
  const auto big_cone = cone(h, ball_at_infinity(h, vm, xi, r));

  for (int k = 1; k <= 30 && !(w.cone_inside_ball && w.ball_inside_cone); ++k) {
    const double rp = r * std::ldexp(1.0, -k);
    const auto small_cone = cone(h, ball_at_infinity(h, vm, xi, rp));
    for (int n = 0; n <= h.radius() && !w.cone_inside_ball; ++n) {
      bool ok = true;
      int seen = 0;
      for (Vertex u : small_cone.members()) {
        if (g.depth(u) <= n) continue;
        ++seen;
        if (!within(vdist(u), r)) {
          ok = false;
          break;
        }
      }
      if (ok && seen > 0) {
        w.cone_inside_ball = true;
        w.n_cone = n;
      }
    }
    for (int n = 0; n <= h.radius() && !w.ball_inside_cone; ++n) {
      bool ok = true;
      int seen = 0;
      for (Vertex u = 0; u < g.vertex_count(); ++u) {
        if (g.depth(u) <= n || !h.resolved(u) || !within(vdist(u), rp)) continue;
        ++seen;
        if (!big_cone.contains(u)) {
          ok = false;
          break;
        }
      }
      if (ok && seen > 0) {
        w.ball_inside_cone = true;
        w.n_ball = n;
      }
    }
  }
  return w;
}

}  // namespace hypac
