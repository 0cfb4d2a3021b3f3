#include "hypac/isoperimetry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "hypac/parallel.hpp"

namespace hypac {

namespace {

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

double window_slope(const std::vector<long long>& table, int lo, int hi) {
  std::vector<double> x, y;
  for (int n = lo; n <= hi; ++n) {
    x.push_back(n);
    y.push_back(std::log(static_cast<double>(table[static_cast<std::size_t>(n)])));
  }
  return lsq_slope(x, y);
}

}  // namespace

GrowthFit growth_fit(const Graph& g, const VisualMetric& vm) {
  const int rmax = g.r_max();
  GrowthFit fit;
  fit.window_lo = 2;
  fit.window_hi = rmax - 2;
  if (fit.window_hi - fit.window_lo < 1) {
    fit.window_lo = 1;
    fit.window_hi = rmax - 1;
  }
  if (fit.window_hi - fit.window_lo < 1)
    throw std::invalid_argument("growth window too small (R_max must be at least 4)");

  fit.table.assign(static_cast<std::size_t>(rmax) + 1, 0);
  for (Vertex u = 0; u < g.vertex_count(); ++u) ++fit.table[static_cast<std::size_t>(g.depth(u))];
  for (std::size_t n = 1; n < fit.table.size(); ++n) fit.table[n] += fit.table[n - 1];

  fit.slope = window_slope(fit.table, fit.window_lo, fit.window_hi);
  fit.D = fit.slope / vm.epsilon;
  for (int n = fit.window_lo; n <= fit.window_hi; ++n)
    fit.C_D = std::max(fit.C_D, static_cast<double>(fit.table[static_cast<std::size_t>(n)]) /
                                    std::exp(vm.epsilon * fit.D * n));
  // guard the bound against rounding in exp/log
  fit.C_D *= 1.0 + 1e-12;

  const int mid = (fit.window_lo + fit.window_hi) / 2;
  const double lower = window_slope(fit.table, fit.window_lo, std::max(mid, fit.window_lo + 1));
  const double upper = window_slope(fit.table, std::min(mid, fit.window_hi - 1), fit.window_hi);
  fit.subexponential = fit.slope <= 1e-12 || upper < 0.5 * lower;
  return fit;
}

std::string IpFamily::describe() const {
  std::ostringstream os;
  os << "balls=" << (balls ? 1 : 0) << " cones=" << (cones ? 1 : 0) << " random=" << random_sets;
  if (!random_sizes.empty()) {
    os << " sizes=";
    for (std::size_t i = 0; i < random_sizes.size(); ++i) os << (i ? "," : "") << random_sizes[i];
  }
  os << " exhaustive=" << (exhaustive ? 1 : 0) << " exclude_rim=" << (exclude_rim ? 1 : 0)
     << " seed=" << seed;
  return os.str();
}

namespace {

/// Same growth as random_connected_set, confined to `allowed`.
VertexSet grow_inside(const Graph& g, const VertexSet& allowed, Vertex start, int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  VertexSet s(g.vertex_count());
  std::vector<Vertex> frontier{start};
  VertexSet seen(g.vertex_count());
  seen.insert(start);
  while (s.size() < size && !frontier.empty()) {
    const auto k = std::uniform_int_distribution<std::size_t>(0, frontier.size() - 1)(rng);
    const Vertex u = frontier[k];
    frontier[k] = frontier.back();
    frontier.pop_back();
    s.insert(u);
    for (Vertex w : g.neighbors(u))
      if (allowed.contains(w) && !seen.contains(w)) {
        seen.insert(w);
        frontier.push_back(w);
      }
  }
  return s;
}

}  // namespace

VertexSet random_connected_set(const Graph& g, Vertex seed_vertex, int size, std::uint64_t seed) {
  return grow_inside(g, VertexSet::all(g.vertex_count()), seed_vertex, size, seed);
}

namespace {

void finish_scale_flag(IpReport& rep) {
  if (rep.size_ratio.size() < 2) return;
  int smin = rep.size_ratio.front().first, smax = smin;
  for (auto [s, r] : rep.size_ratio) {
    smin = std::min(smin, s);
    smax = std::max(smax, s);
  }
  if (smax == smin) return;
  const double third = (smax - smin) / 3.0;
  double small = 0.0, large = 0.0;
  for (auto [s, r] : rep.size_ratio) {
    if (s <= smin + third) small = std::max(small, r);
    if (s >= smax - third) large = std::max(large, r);
  }
  rep.violated_at_scale = small > 0.0 && large >= 1.5 * small;
}

}  // namespace

IpReport ip_scan(const Graph& g, double D, const IpFamily& family, const Horizon* horizon,
                 const VisualMetric* vm, int workers) {
  if (!(D > 0.0)) throw std::invalid_argument("ip_scan needs D > 0");
  IpReport rep;
  rep.exponent = 4.0 * D / (4.0 * D + 1.0);
  rep.family_spec = family.describe();
  rep.worst_set = VertexSet(g.vertex_count());
  const int n = g.vertex_count();

  if (family.exhaustive) {
    if (n > 20) throw std::invalid_argument("exhaustive isoperimetric scan needs at most 20 vertices");
    std::vector<std::uint32_t> nb(static_cast<std::size_t>(n), 0);
    for (Vertex u = 0; u < n; ++u)
      for (Vertex w : g.neighbors(u)) nb[static_cast<std::size_t>(u)] |= 1u << w;
    const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1u);
    std::vector<double> best_by_size(static_cast<std::size_t>(n) + 1, 0.0);
    double best = 0.0;
    std::uint32_t best_mask = 0;
    for (std::uint32_t m = 1; m <= full && m != 0; ++m) {
      std::uint32_t out = m;
      for (std::uint32_t rest = m; rest; rest &= rest - 1) out |= nb[static_cast<std::size_t>(std::countr_zero(rest))];
      const int boundary = std::popcount(out & ~m);
      if (boundary == 0) {
        ++rep.excluded_no_boundary;
        continue;
      }
      ++rep.tested;
      const int size = std::popcount(m);
      const double ratio = std::pow(size, rep.exponent) / boundary;
      best_by_size[static_cast<std::size_t>(size)] = std::max(best_by_size[static_cast<std::size_t>(size)], ratio);
      if (ratio > best) {
        best = ratio;
        best_mask = m;
      }
      if (m == full) break;
    }
    for (int s = 1; s <= n; ++s)
      if (best_by_size[static_cast<std::size_t>(s)] > 0.0) rep.size_ratio.emplace_back(s, best_by_size[static_cast<std::size_t>(s)]);
    for (Vertex u = 0; u < n; ++u)
      if (best_mask >> u & 1u) rep.worst_set.insert(u);
    rep.C0 = std::max(1.0, best);
    finish_scale_flag(rep);
    return rep;
  }

  const auto rim = rim_zone(g, 1);
  const VertexSet allowed = family.exclude_rim ? VertexSet::all(n) - rim : VertexSet::all(n);
  std::vector<VertexSet> sets;
  std::mt19937_64 rng(family.seed);

  if (family.balls) {
    std::vector<Vertex> centers{g.base_vertex()};
    std::vector<Vertex> pool = allowed.members();
    for (int k = 1; k < family.ball_centers && !pool.empty(); ++k)
      centers.push_back(pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)]);
    for (Vertex c : centers)
      for (int r = 0; r <= g.r_max(); ++r) {
        auto b = ball(g, c, r);
        sets.push_back(b);
        if (b.size() == n || !(b & rim).empty()) break;
      }
  }

  if (family.cones && horizon && vm) {
    const auto cap = ball(g, g.base_vertex(), std::max(0, g.r_max() - 2));
    const double diam = horizon_diameter(*horizon, *vm, 16);
    for (int k = 0; k < family.ball_centers; ++k) {
      const int xi = std::uniform_int_distribution<int>(0, horizon->size() - 1)(rng);
      for (int j = 1; j <= 8; ++j) {
        auto c = cone(*horizon, ball_at_infinity(*horizon, *vm, xi, diam * std::ldexp(1.0, -j))) & cap;
        if (!c.empty()) sets.push_back(c);
      }
    }
  }

  if (family.random_sets > 0) {
    std::vector<Vertex> pool = allowed.members();
    std::vector<int> sizes = family.random_sizes.empty() ? std::vector<int>{8, 32, 128} : family.random_sizes;
    for (int k = 0; k < family.random_sets && !pool.empty(); ++k) {
      const Vertex start = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
      sets.push_back(grow_inside(g, allowed, start, sizes[static_cast<std::size_t>(k) % sizes.size()],
                                 mix_seed(family.seed, static_cast<std::uint64_t>(k))));
    }
  }
  if (sets.empty()) throw std::invalid_argument("isoperimetric family is empty");

  enum Status { kTested, kRim, kNoBoundary };
  std::vector<double> ratio(sets.size(), 0.0);
  std::vector<int> status(sets.size(), kTested);
  parallel_for(sets.size(), workers, [&](std::size_t i) {
    const auto& b = sets[i];
    if (family.exclude_rim && !(b & rim).empty()) {
      status[i] = kRim;
      return;
    }
    const int boundary = boundary_out(g, b).size();
    if (boundary == 0) {
      status[i] = kNoBoundary;
      return;
    }
    ratio[i] = std::pow(b.size(), rep.exponent) / boundary;
  });

  double best = 0.0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (status[i] == kRim) {
      ++rep.excluded_rim;
      continue;
    }
    if (status[i] == kNoBoundary) {
      ++rep.excluded_no_boundary;
      continue;
    }
    ++rep.tested;
    rep.size_ratio.emplace_back(sets[i].size(), ratio[i]);
    if (ratio[i] > best) {
      best = ratio[i];
      rep.worst_set = sets[i];
    }
  }
  if (rep.tested == 0) throw std::invalid_argument("every set of the isoperimetric family was excluded");
  rep.C0 = std::max(1.0, best);
  finish_scale_flag(rep);
  return rep;
}

std::vector<int> greedy_cover(const Horizon& h, const VisualMetric& vm, const std::vector<int>& points,
                              double r) {
  std::vector<int> centers;
  if (points.empty()) return centers;
  std::vector<double> gap(points.size(), std::numeric_limits<double>::infinity());
  int next = points.front();
  while (true) {
    centers.push_back(next);
    const auto row = visual_row(h, vm, next);
    std::size_t far = 0;
    for (std::size_t k = 0; k < points.size(); ++k) {
      gap[k] = std::min(gap[k], row[static_cast<std::size_t>(points[k])]);
      if (gap[k] > gap[far]) far = k;
    }
    if (gap[far] <= r * (1.0 + 1e-12)) break;
    next = points[far];
  }
  return centers;
}

DoublingReport doubling_probe(const Horizon& h, const VisualMetric& vm, const std::vector<double>& radii,
                              int sample_centers, std::uint64_t seed) {
  DoublingReport rep;
  const double resolution = std::exp(-vm.epsilon * h.radius());
  std::mt19937_64 rng(seed);
  std::vector<int> all(static_cast<std::size_t>(h.size()));
  for (int k = 0; k < h.size(); ++k) all[static_cast<std::size_t>(k)] = k;

  for (int c = 0; c < sample_centers; ++c) {
    const int xi0 = std::uniform_int_distribution<int>(0, h.size() - 1)(rng);
    for (double r : radii) {
      if (r < resolution) rep.under_resolved = true;
      const auto members = ball_at_infinity(h, vm, xi0, 2.0 * r).members();
      std::vector<int> pts(members.begin(), members.end());
      // start from the center itself
      std::stable_partition(pts.begin(), pts.end(), [&](int p) { return p == xi0; });
      const int count = static_cast<int>(greedy_cover(h, vm, pts, r).size());
      auto& slot = rep.covering_table[{2.0 * r, r}];
      slot = std::max(slot, count);
      rep.M_d = std::max(rep.M_d, count);
    }
  }

  const double diam = horizon_diameter(h, vm, 0);
  std::vector<double> x, y;
  for (double r : radii) {
    const int count = static_cast<int>(greedy_cover(h, vm, all, r).size());
    rep.horizon_covers.emplace_back(r, count);
    rep.covering_table[{diam, r}] = count;
    if (r < diam && count > 1) {
      x.push_back(std::log(diam / r));
      y.push_back(std::log(static_cast<double>(count)));
    }
  }
  rep.assouad_fit = lsq_slope(x, y);
  return rep;
}

}  // namespace hypac
