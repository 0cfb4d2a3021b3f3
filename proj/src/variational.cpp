#include "hypac/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hypac/parallel.hpp"

namespace hypac {

FieldState constant_field(const Graph& g, double c) {
  return FieldState{std::vector<double>(static_cast<std::size_t>(g.vertex_count()), c), g.id()};
}

namespace {

void check_size(const Graph& g, std::span<const double> x) {
  if (static_cast<int>(x.size()) != g.vertex_count()) throw SolverError("field does not match the graph");
}

double neighbor_sum(const Graph& g, std::span<const double> x, Vertex u) {
  double s = 0.0;
  for (Vertex w : g.neighbors(u)) s += x[static_cast<std::size_t>(w)];
  return s;
}

double gradient_sq(const Graph& g, std::span<const double> x, Vertex u) {
  const double xu = x[static_cast<std::size_t>(u)];
  double s = 0.0;
  for (Vertex w : g.neighbors(u)) {
    const double d = x[static_cast<std::size_t>(w)] - xu;
    s += d * d;
  }
  return s;
}

double safeguarded_newton(const Potential& p, int deg, double s, double a, double b, double t) {
  auto d1 = [&](double y) { return deg * y - s + p.dV(y); };
  auto d2 = [&](double y) { return deg + p.ddV(y); };
  if (!(d1(a) <= 0.0 && d1(b) >= 0.0)) return t;
  for (int it = 0; it < 100; ++it) {
    const double ft = d1(t);
    if (ft == 0.0) return t;
    (ft < 0.0 ? a : b) = t;
    const double h = d2(t);
    double next = h > 0.0 ? t - ft / h : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - t) <= 1e-16 * std::max(1.0, std::abs(t))) return next;
    t = next;
  }
  return t;
}

}  // namespace

double laplacian(const Graph& g, std::span<const double> x, Vertex u) {
  check_size(g, x);
  if (g.is_rim(u)) throw SolverError("clipped: vertex " + std::to_string(u) + " lies on the truncation rim");
  return neighbor_sum(g, x, u) - g.degree(u) * x[static_cast<std::size_t>(u)];
}

double energy(const Graph& g, const Potential& p, std::span<const double> x, const VertexSet& b) {
  check_size(g, x);
  double e = 0.0;
  for (Vertex u : b.members()) {
    if (g.is_rim(u)) throw SolverError("clipped: energy region touches the truncation rim");
    e += 0.25 * gradient_sq(g, x, u) + p.V(x[static_cast<std::size_t>(u)]);
  }
  return e;
}

double el_residual(const Graph& g, const Potential& p, std::span<const double> x, const VertexSet& b) {
  double r = 0.0;
  for (Vertex u : b.members()) r = std::max(r, std::abs(laplacian(g, x, u) - p.dV(x[static_cast<std::size_t>(u)])));
  return r;
}

double minimize_vertex(const Potential& p, int deg, double s, double lo, double hi, double current, int samples) {
  samples = std::max(samples, 3);
  auto phi = [&](double t) { return 0.5 * deg * t * t - s * t + p.V(t); };
  auto d1 = [&](double t) { return deg * t - s + p.dV(t); };
  std::vector<double> ts(static_cast<std::size_t>(samples)), fs(ts.size());
  for (int k = 0; k < samples; ++k) {
    const double t = k == samples - 1 ? hi : lo + (hi - lo) * k / (samples - 1);
    ts[static_cast<std::size_t>(k)] = t;
    fs[static_cast<std::size_t>(k)] = phi(t);
  }
  // candidates are stationary points and endpoints that are constrained minima
  std::vector<double> cand;
  for (int k = 0; k < samples; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const bool left = k == 0 || fs[i] <= fs[i - 1];
    const bool right = k == samples - 1 || fs[i] <= fs[i + 1];
    if (!left || !right) continue;
    if (k == 0 && d1(lo) >= 0.0) {
      cand.push_back(lo);
    } else if (k == samples - 1 && d1(hi) <= 0.0) {
      cand.push_back(hi);
    } else {
      const double a = ts[k == 0 ? i : i - 1];
      const double b = ts[k == samples - 1 ? i : i + 1];
      cand.push_back(safeguarded_newton(p, deg, s, a, b, ts[i]));
    }
  }
  if (cand.empty()) cand.push_back(ts[static_cast<std::size_t>(std::min_element(fs.begin(), fs.end()) - fs.begin())]);

  double pick = cand.front();
  for (double t : cand)
    if (phi(t) < phi(pick)) pick = t;
  // near-equal minima in distinct basins resolve to the smallest value
  const double best = phi(pick);
  for (double t : cand)
    if (phi(t) <= best + 1e-12 && t < pick - 1e-6 * (hi - lo)) pick = t;
  if (current >= lo && current <= hi && phi(current) < phi(pick) - 1e-15 * std::max(1.0, std::abs(best)))
    return current;
  return pick;
}

SolveResult solve_dirichlet(const Graph& g, const Potential& p, const VertexSet& b, const FieldState& f,
                            const SolverConfig& cfg) {
  check_size(g, f.values);
  if (b.universe() != g.vertex_count()) throw SolverError("solve region does not match the graph");
  if (cfg.residual_tol <= 0.0) throw SolverError("residual_tol must be positive");
  if (cfg.multistart.empty()) throw SolverError("multistart list is empty");
  for (const auto& v : f.values)
    if (!std::isfinite(v)) throw SolverError("boundary data must be finite");

  const VertexSet region = outer_set(g, b);
  for (Vertex u : region.members())
    if (g.is_rim(u)) throw SolverError("clipped: the outer set of the solve region touches the truncation rim");
  const VertexSet ring = region - b;

  bool trapped = true;
  double fmin = p.c0, fmax = p.c1;
  for (Vertex u : ring.members()) {
    const double v = f[u];
    trapped = trapped && v >= p.c0 && v <= p.c1;
    fmin = std::min(fmin, v);
    fmax = std::max(fmax, v);
  }
  if (cfg.require_trapped && !trapped) throw SolverError("boundary data leaves [c0, c1] with trapping requested");

  SolveResult best;
  best.clamped = cfg.clamp && trapped;
  const double lo = best.clamped ? p.c0 : fmin - p.width();
  const double hi = best.clamped ? p.c1 : fmax + p.width();
  const auto free = b.members();
  bool have_best = false;

  for (const auto& start : cfg.multistart) {
    FieldState x = f;
    for (Vertex u : free) {
      if (start == "boundary-extension")
        x[u] = std::clamp(x[u], lo, hi);
      else if (start == "c0-fill")
        x[u] = p.c0;
      else if (start == "c1-fill")
        x[u] = p.c1;
      else
        throw SolverError("unknown multistart '" + start + "'");
    }
    SolveResult r;
    r.clamped = best.clamped;
    r.winner = start;
    double e_prev = energy(g, p, x.values, region);
    r.residual = el_residual(g, p, x.values, b);
    r.converged = r.residual <= cfg.residual_tol;
    std::vector<double> next;
    while (!r.converged && r.sweeps < cfg.max_sweeps) {
      if (cfg.jacobi) {
        next.assign(free.size(), 0.0);
        parallel_for(free.size(), cfg.workers, [&](std::size_t i) {
          const Vertex u = free[i];
          next[i] = minimize_vertex(p, g.degree(u), neighbor_sum(g, x.values, u), lo, hi, x[u], cfg.samples);
        });
        for (std::size_t i = 0; i < free.size(); ++i) x[free[i]] = next[i];
      } else {
        for (Vertex u : free)
          x[u] = minimize_vertex(p, g.degree(u), neighbor_sum(g, x.values, u), lo, hi, x[u], cfg.samples);
      }
      ++r.sweeps;
      const double e = energy(g, p, x.values, region);
      if (e > e_prev + 1e-12 * std::max(1.0, std::abs(e_prev))) r.monotone = false;
      r.energy_trace.push_back(e);
      e_prev = e;
      r.residual = el_residual(g, p, x.values, b);
      r.converged = r.residual <= cfg.residual_tol;
    }
    r.energy = e_prev;
    r.x = std::move(x);
    r.x.graph_id = g.id();
    best.start_energies.emplace_back(start, r.energy);
    if (!have_best || r.energy < best.energy - 1e-12 * std::max(1.0, std::abs(best.energy))) {
      auto energies = std::move(best.start_energies);
      best = std::move(r);
      best.start_energies = std::move(energies);
      have_best = true;
    }
  }
  return best;
}

MinimalityReport verify_local_minimality(const Graph& g, const Potential& p, const FieldState& x, const VertexSet& b,
                                         int trials, double scale, std::uint64_t seed, bool nonnegative) {
  MinimalityReport rep;
  const auto members = b.members();
  if (members.empty() || trials <= 0) return rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(nonnegative ? 0.0 : -scale, scale);
  rep.min_gap = std::numeric_limits<double>::infinity();
  FieldState y = x;
  for (int t = 0; t < trials; ++t) {
    const auto k = std::uniform_int_distribution<std::size_t>(1, members.size())(rng);
    std::vector<Vertex> support;
    std::sample(members.begin(), members.end(), std::back_inserter(support), k, rng);
    const auto region = outer_set(g, VertexSet::from(g.vertex_count(), support));
    for (Vertex u : support) y[u] = x[u] + amp(rng);
    const double gap = energy(g, p, y.values, region) - energy(g, p, x.values, region);
    rep.min_gap = std::min(rep.min_gap, gap);
    for (Vertex u : support) y[u] = x[u];
    ++rep.trials;
  }
  return rep;
}

MinMax minmax_check(const Graph& g, const Potential& p, const FieldState& x, const FieldState& y, const VertexSet& b) {
  FieldState hi = x, lo = x;
  for (std::size_t i = 0; i < x.values.size(); ++i) {
    hi.values[i] = std::max(x.values[i], y.values[i]);
    lo.values[i] = std::min(x.values[i], y.values[i]);
  }
  MinMax m;
  m.lhs = energy(g, p, x.values, b) + energy(g, p, y.values, b);
  m.rhs = energy(g, p, hi.values, b) + energy(g, p, lo.values, b);
  return m;
}

ComparisonReport comparison_check(const Graph& g, const Potential& p, const VertexSet& b, const FieldState& f_low,
                                  const FieldState& f_high, const SolverConfig& cfg) {
  ComparisonReport rep;
  rep.low = solve_dirichlet(g, p, b, f_low, cfg);
  rep.high = solve_dirichlet(g, p, b, f_high, cfg);
  const auto free = b.members();
  auto violation = [&] {
    double worst = 0.0;
    for (Vertex u : free) worst = std::max(worst, rep.low.x[u] - rep.high.x[u]);
    return worst;
  };
  // Crossing solutions are not both global minimisers: the pointwise min and
  // max do at least as well in total, so restart from them.
  SolverConfig seeded = cfg;
  seeded.multistart = {"boundary-extension"};
  for (int round = 0; round < 16 && violation() > 1e-9; ++round) {
    FieldState lo_start = f_low, hi_start = f_high;
    for (Vertex u : free) {
      lo_start[u] = std::min(rep.low.x[u], rep.high.x[u]);
      hi_start[u] = std::max(rep.low.x[u], rep.high.x[u]);
    }
    auto lo = solve_dirichlet(g, p, b, lo_start, seeded);
    auto hi = solve_dirichlet(g, p, b, hi_start, seeded);
    bool improved = false;
    if (lo.converged && lo.energy < rep.low.energy - 1e-12 * std::max(1.0, std::abs(rep.low.energy))) {
      lo.winner = "lattice-min";
      rep.low = std::move(lo);
      improved = true;
    }
    if (hi.converged && hi.energy < rep.high.energy - 1e-12 * std::max(1.0, std::abs(rep.high.energy))) {
      hi.winner = "lattice-max";
      rep.high = std::move(hi);
      improved = true;
    }
    ++rep.reseeds;
    if (!improved) break;
  }
  bool strict = true;
  double max_abs = 0.0;
  for (Vertex u : free) {
    const double d = rep.high.x[u] - rep.low.x[u];
    rep.max_violation = std::max(rep.max_violation, -d);
    max_abs = std::max(max_abs, std::abs(d));
    if (!(d > 0.0)) strict = false;
  }
  rep.ordered = rep.max_violation <= 1e-9;
  rep.identical = max_abs <= 1e-9;
  rep.strict = strict && !b.empty();
  rep.mixed = !rep.strict && !rep.identical;
  return rep;
}

bool trapping_check(const Graph& g, const Potential& p, const FieldState& x, const VertexSet& b) {
  for (Vertex u : outer_set(g, outer_set(g, b)).members())
    if (x[u] < p.c0 - 1e-12 || x[u] > p.c1 + 1e-12) return false;
  return true;
}

TransitionSets transition_sets(const Potential& p, const FieldState& x, const VertexSet& b, double rho,
                               const PotentialConstants& pc) {
  TransitionSets ts{VertexSet(b.universe()), VertexSet(b.universe())};
  const double cut = p.c1 - 2 * pc.b * rho, top = p.c1 - rho;
  for (Vertex u : b.members()) {
    const double v = x[u];
    if (v >= p.c0 && v < cut)
      ts.B_l.insert(u);
    else if (v >= cut && v < top)
      ts.B_h.insert(u);
  }
  return ts;
}

double ts_k0(const Graph& g, const Potential& p, double rho, const PotentialConstants& pc) {
  const double S = g.max_degree();
  const double w = p.width();
  const double gap = w - 4 * pc.b * rho;
  const double k1 = std::min({1.0, pc.beta(rho), (gap * gap - rho * rho) / 4});
  const double k2 = std::max(S * w * w, 2 * S / pc.m1);
  return S * std::max(1.0, k2) / k1;
}

TsCheck ts_inequality_check(const Graph& g, const Potential& p, const FieldState& x, const VertexSet& b,
                            const VertexSet& d, double rho, const PotentialConstants& pc) {
  const auto ts = transition_sets(p, x, b, rho, pc);
  const double ref = p.c1 - rho;
  TsCheck c;
  c.lhs = (boundary_out(g, ts.B_l) & iterate_inn(g, d, 2)).size() +
          potential_excess(p, x.values, ts.B_h & inner_set(g, d), ref);
  c.rhs = (ts.B_l & boundary_full(g, d)).size() + potential_excess(p, x.values, ts.B_h & boundary_out(g, d), ref);
  c.k0 = ts_k0(g, p, rho, pc);
  if (c.lhs <= 0.0)
    c.k0_needed = 0.0;
  else
    c.k0_needed = c.rhs > 0.0 ? c.lhs / c.rhs : std::numeric_limits<double>::infinity();
  c.holds = c.lhs <= c.k0 * c.rhs + 1e-12;
  return c;
}

ComponentCheck component_boundary_check(const Graph& g, const Potential& p, const FieldState& x, const VertexSet& b,
                                        double rho, const PotentialConstants& pc) {
  const auto ts = transition_sets(p, x, b, rho, pc);
  ComponentCheck c;
  for (const auto& comp : connected_components(g, ts.B_l)) {
    ++c.components;
    bool touches = false;
    for (Vertex u : comp.members()) {
      for (Vertex w : g.neighbors(u))
        if (!b.contains(w)) touches = true;
      if (touches) break;
    }
    if (!touches) ++c.failing;
  }
  c.holds = c.failing == 0;
  return c;
}

}  // namespace hypac
