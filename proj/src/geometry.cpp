#include "hypac/geometry.hpp"

#include <algorithm>
#include <array>
#include <numbers>
#include <random>
#include <stdexcept>

#include "hypac/parallel.hpp"

namespace hypac {

std::vector<int> all_pairs_distances(const Graph& g) {
  const auto n = static_cast<std::size_t>(g.vertex_count());
  std::vector<int> d(n * n);
  for (std::size_t s = 0; s < n; ++s) {
    auto f = distances_from(g, static_cast<Vertex>(s));
    std::copy(f.dist.begin(), f.dist.end(), d.begin() + static_cast<std::ptrdiff_t>(s * n));
  }
  return d;
}

double gromov_product(const Graph& g, Vertex a, Vertex b) {
  return gromov_product(g, distances_from(g, a), b);
}

double gromov_product(const Graph& g, const DistanceField& from_a, Vertex b) {
  const int dab = from_a.dist[static_cast<std::size_t>(b)];
  return 0.5 * (g.depth(from_a.source) + g.depth(b) - dab);
}

namespace {

/// Four-point defect of one quadruple from its three pair sums.
double quad_defect(int dxy, int dzw, int dxz, int dyw, int dxw, int dyz) {
  std::array<int, 3> s{dxy + dzw, dxz + dyw, dxw + dyz};
  std::sort(s.begin(), s.end());
  return 0.5 * (s[2] - s[1]);
}

}  // namespace

DeltaEstimate estimate_delta_four_point(const Graph& g, int samples, std::uint64_t seed,
                                        int workers) {
  const int n = g.vertex_count();
  DeltaEstimate est;
  if (n <= 64 || samples < 0) {
    const auto d = all_pairs_distances(g);
    auto D = [&](int a, int b) { return d[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) + static_cast<std::size_t>(b)]; };
    std::vector<double> best(static_cast<std::size_t>(n), 0.0);
    parallel_for(static_cast<std::size_t>(n), workers, [&](std::size_t xi) {
      const int x = static_cast<int>(xi);
      double m = 0.0;
      for (int y = x + 1; y < n; ++y)
        for (int z = y + 1; z < n; ++z)
          for (int w = z + 1; w < n; ++w)
            m = std::max(m, quad_defect(D(x, y), D(z, w), D(x, z), D(y, w), D(x, w), D(y, z)));
      best[xi] = m;
    });
    est.delta = *std::max_element(best.begin(), best.end());
    est.exact = true;
    const long long nn = n;
    est.samples = static_cast<int>(std::min<long long>(nn * (nn - 1) * (nn - 2) * (nn - 3) / 24, 1LL << 30));
    return est;
  }

  std::vector<double> val(static_cast<std::size_t>(samples), 0.0);
  parallel_for(static_cast<std::size_t>(samples), workers, [&](std::size_t i) {
    std::mt19937_64 rng(mix_seed(seed, i));
    std::uniform_int_distribution<int> pick(0, n - 1);
    const Vertex x = pick(rng), y = pick(rng), z = pick(rng);
    const Vertex w = (i % 2 == 0) ? g.base_vertex() : pick(rng);
    const auto fx = distances_from(g, x);
    const auto fy = distances_from(g, y);
    const auto fz = distances_from(g, z);
    auto at = [](const DistanceField& f, Vertex u) { return f.dist[static_cast<std::size_t>(u)]; };
    val[i] = quad_defect(at(fx, y), at(fz, w), at(fx, z), at(fy, w), at(fx, w), at(fy, z));
  });
  est.delta = val.empty() ? 0.0 : *std::max_element(val.begin(), val.end());
  est.samples = samples;
  return est;
}

std::vector<Vertex> canonical_geodesic(const Graph& g, Vertex from, Vertex to) {
  const auto f = distances_from(g, to);
  std::vector<Vertex> path{from};
  Vertex u = from;
  while (u != to) {
    const int du = f.dist[static_cast<std::size_t>(u)];
    for (Vertex w : g.neighbors(u)) {  // neighbors are sorted ascending
      if (f.dist[static_cast<std::size_t>(w)] == du - 1) {
        u = w;
        break;
      }
    }
    path.push_back(u);
  }
  return path;
}

double estimate_delta_slim(const Graph& g, int samples, std::uint64_t seed, int workers) {
  const int n = g.vertex_count();
  if (samples <= 0 || n <= 1) return 0.0;
  std::vector<double> val(static_cast<std::size_t>(samples), 0.0);
  parallel_for(static_cast<std::size_t>(samples), workers, [&](std::size_t i) {
    std::mt19937_64 rng(mix_seed(seed ^ 0x5bd1e995ULL, i));
    std::uniform_int_distribution<int> pick(0, n - 1);
    const std::array<Vertex, 3> t{pick(rng), pick(rng), pick(rng)};
    std::array<std::vector<Vertex>, 3> side{canonical_geodesic(g, t[0], t[1]),
                                            canonical_geodesic(g, t[1], t[2]),
                                            canonical_geodesic(g, t[2], t[0])};
    int worst = 0;
    for (int s = 0; s < 3; ++s) {
      VertexSet others(n);
      for (int o = 0; o < 3; ++o)
        if (o != s)
          for (Vertex u : side[static_cast<std::size_t>(o)]) others.insert(u);
      const auto d = distances_to_set(g, others);
      for (Vertex u : side[static_cast<std::size_t>(s)])
        worst = std::max(worst, d[static_cast<std::size_t>(u)]);
    }
    val[i] = worst;
  });
  return *std::max_element(val.begin(), val.end());
}

VertexSet geodesic_membership(const Graph& g, Vertex target) {
  if (!g.valid(target)) throw GraphError("target vertex out of range");
  const auto f = distances_from(g, target);
  VertexSet s(g.vertex_count());
  for (Vertex u = 0; u < g.vertex_count(); ++u)
    if (g.depth(u) + f.dist[static_cast<std::size_t>(u)] == g.depth(target)) s.insert(u);
  return s;
}

VertexSet ray_union(const Graph& g, int horizon_radius) {
  VertexSet on_ray(g.vertex_count());
  // Vertex ids are sorted by depth, so a reverse sweep sees deeper vertices first.
  for (Vertex u = g.vertex_count() - 1; u >= 0; --u) {
    const int du = g.depth(u);
    if (du > horizon_radius) continue;
    if (du == horizon_radius) {
      on_ray.insert(u);
      continue;
    }
    for (Vertex w : g.neighbors(u))
      if (g.depth(w) == du + 1 && on_ray.contains(w)) {
        on_ray.insert(u);
        break;
      }
  }
  return on_ray;
}

double visuality_constant(const Graph& g, int horizon_radius, double margin) {
  if (horizon_radius > g.r_max()) throw GraphError("horizon radius exceeds the truncation radius");
  const auto rays = ray_union(g, horizon_radius);
  if (rays.empty()) return 0.0;
  const auto d = distances_to_set(g, rays);
  const double limit = horizon_radius - margin;
  int worst = 0;
  for (Vertex u = 0; u < g.vertex_count(); ++u)
    if (g.depth(u) <= limit) worst = std::max(worst, d[static_cast<std::size_t>(u)]);
  return worst;
}

double choose_epsilon(double delta_used, std::optional<double> override_value) {
  if (override_value) {
    if (!(*override_value > 0.0)) throw std::invalid_argument("epsilon override must be positive");
    return *override_value;
  }
  if (delta_used < 0.0) throw std::invalid_argument("delta must be non-negative");
  return std::numbers::ln2 / (8.0 * (delta_used + 1.0));
}

double visual_distance(const VisualMetric& vm, const Graph& g, Vertex a, Vertex b) {
  return visual_distance_from_product(vm, gromov_product(g, a, b));
}

double fit_lambda(const VisualMetric& vm, const Graph& g, const std::vector<Vertex>& proxies,
                  int samples, std::uint64_t seed, int workers) {
  if (proxies.empty() || samples <= 0) return 1.0;
  std::vector<double> val(static_cast<std::size_t>(samples), 1.0);
  parallel_for(static_cast<std::size_t>(samples), workers, [&](std::size_t i) {
    std::mt19937_64 rng(mix_seed(seed ^ 0x27d4eb2fULL, i));
    std::uniform_int_distribution<std::size_t> pick(0, proxies.size() - 1);
    const Vertex a = proxies[pick(rng)];
    const Vertex b = proxies[pick(rng)];
    const auto fa = distances_from(g, a);
    const auto fb = distances_from(g, b);
    const int dab = fa.dist[static_cast<std::size_t>(b)];
    int to_geodesic = g.depth(a);
    for (Vertex u = 0; u < g.vertex_count(); ++u)
      if (fa.dist[static_cast<std::size_t>(u)] + fb.dist[static_cast<std::size_t>(u)] == dab)
        to_geodesic = std::min(to_geodesic, g.depth(u));
    const double product = gromov_product(g, fa, b);
    val[i] = std::max(1.0, std::exp(vm.epsilon * std::abs(product - to_geodesic)));
  });
  return *std::max_element(val.begin(), val.end());
}

GeometryReport analyze_geometry(const Graph& g, const GeometrySettings& s) {
  if (s.horizon_radius <= 0 || s.horizon_radius > g.r_max())
    throw GraphError("horizon radius must lie in [1, R_max]");
  GeometryReport r;
  const auto four = estimate_delta_four_point(g, s.four_point_samples, s.seed, s.workers);
  r.delta_four_point = four.delta;
  r.exact = four.exact;
  r.sample_size = four.samples;
  r.delta_slim_sampled = estimate_delta_slim(g, s.slim_samples, s.seed, s.workers);
  r.visuality_constant = visuality_constant(g, s.horizon_radius, r.delta_four_point + 1.0);
  r.delta_used = std::max({r.delta_four_point, r.delta_slim_sampled, r.visuality_constant});
  r.horizon_margin_ok = s.horizon_radius <= g.r_max() - r.delta_used - 1.0;
  return r;
}

VisualMetric make_visual_metric(const Graph& g, const GeometryReport& report,
                                const GeometrySettings& s) {
  VisualMetric vm;
  vm.epsilon = choose_epsilon(report.delta_used, s.epsilon_override);
  vm.epsilon_overridden = s.epsilon_override.has_value();
  vm.horizon_radius = s.horizon_radius;
  vm.lambda = fit_lambda(vm, g, sphere(g, g.base_vertex(), s.horizon_radius).members(),
                         s.lambda_samples, s.seed, s.workers);
  return vm;
}

}  // namespace hypac
