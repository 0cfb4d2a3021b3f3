#include <cmath>
#include <random>

#include "doctest.h"
#include "hypac/isoperimetry.hpp"
#include "hypac/variational.hpp"
#include "oracles.hpp"

using namespace hypac;

namespace {

/// Depth-1 ancestor of u (u itself at depth 1, -1 for the base).
Vertex top_ancestor(const Graph& g, Vertex u) {
  if (g.depth(u) == 0) return -1;
  while (g.depth(u) > 1)
    for (Vertex w : g.neighbors(u))
      if (g.depth(w) < g.depth(u)) {
        u = w;
        break;
      }
  return u;
}

/// c0 under the first child of the base, c1 elsewhere.
FieldState split_data(const Graph& g, const Potential& p) {
  auto f = constant_field(g, p.c1);
  for (Vertex u = 0; u < g.vertex_count(); ++u)
    if (top_ancestor(g, u) == 1) f[u] = p.c0;
  return f;
}

FieldState random_field(const Graph& g, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  auto f = constant_field(g, 0.0);
  for (auto& v : f.values) v = u(rng);
  return f;
}

}  // namespace

TEST_CASE("laplacian") {
  auto t = build_tree(3, 3);
  auto x = constant_field(t, 0.7);
  CHECK(laplacian(t, x.values, 0) == 0.0);
  auto star = build_tree(3, 1);
  auto y = constant_field(star, 1.0);
  y[0] = 0.0;
  CHECK(laplacian(star, y.values, 0) == 3.0);
  CHECK_THROWS_AS(laplacian(star, y.values, 1), SolverError);

  auto line = build_control_line(10);
  auto lin = constant_field(line, 0.0);
  for (Vertex u = 0; u < line.vertex_count(); ++u) lin[u] = line.layout()[static_cast<std::size_t>(u)][0] > 0 ? line.depth(u) : -line.depth(u);
  for (Vertex u = 0; u < line.vertex_count(); ++u)
    if (!line.is_rim(u)) CHECK(laplacian(line, lin.values, u) == 0.0);
}

TEST_CASE("energy") {
  auto p = quartic(-1, 1);
  auto t = build_tree(3, 4);
  auto inner = ball(t, 0, 3);
  CHECK(energy(t, p, constant_field(t, -1).values, inner) == 0.0);
  CHECK(energy(t, p, constant_field(t, 0.3).values, VertexSet(t.vertex_count())) == 0.0);
  CHECK_THROWS_AS(energy(t, p, constant_field(t, 0).values, ball(t, 0, 4)), SolverError);

  Graph edge({{1}, {0}}, 0, 1, GeneratorSpec{"edge", {}, 1});
  std::vector<double> x{-1.0, 1.0};
  CHECK(energy(edge, p, x, VertexSet::all(2)) == doctest::Approx(2.0));

  std::mt19937_64 rng(2);
  auto r = random_field(t, -1.5, 1.5, rng);
  CHECK(energy(t, p, r.values, inner) == doctest::Approx(oracle::energy_literal(t, p.V, r.values, inner.members())));
}

TEST_CASE("Euler-Lagrange residual") {
  auto p = quartic(-1, 1);
  auto t = build_tree(3, 4);
  auto inner = ball(t, 0, 3);
  CHECK(el_residual(t, p, constant_field(t, 1).values, inner) == 0.0);
  CHECK(el_residual(t, p, constant_field(t, 0).values, inner) == 0.0);
  CHECK(el_residual(t, p, constant_field(t, 0.5).values, inner) == doctest::Approx(1.5));
  std::mt19937_64 rng(4);
  CHECK(el_residual(t, p, random_field(t, -1, 1, rng).values, inner) > 0.0);
}

TEST_CASE("gradient consistency") {
  // d W_{B^out} / d x_u = -(Laplacian x - V'(x_u)) for u in B
  auto p = quartic(-1, 1);
  auto g = build_tiling(3, 7, 4);
  auto b = ball(g, 0, 2);
  auto region = outer_set(g, b);
  std::mt19937_64 rng(8);
  auto x = random_field(g, -1.2, 1.2, rng);
  for (Vertex u : b.members()) {
    const double e = 1e-6;
    auto hi = x, lo = x;
    hi[u] += e;
    lo[u] -= e;
    const double fd = (energy(g, p, hi.values, region) - energy(g, p, lo.values, region)) / (2 * e);
    const double an = -(laplacian(g, x.values, u) - p.dV(x[u]));
    CHECK(fd == doctest::Approx(an).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("single-vertex minimisation") {
  auto p = quartic(-1, 1);
  // neighbors -1 and +1 on a path: minima at +-1/sqrt(2) with equal energy
  CHECK(minimize_vertex(p, 2, 0.0, -1, 1, 0.0, 257) == doctest::Approx(-1 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(minimize_vertex(p, 2, 0.0, -1, 1, 0.9, 257) == doctest::Approx(-1 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(minimize_vertex(p, 3, 3.0, -1, 1, 0.0, 257) == 1.0);

  // against a dense scan
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> s(-3, 3);
  for (int i = 0; i < 200; ++i) {
    const double sum = s(rng);
    const double t = minimize_vertex(p, 3, sum, -1, 1, 0.0, 257);
    auto phi = [&](double y) { return 1.5 * y * y - sum * y + p.V(y); };
    double best = 1e9;
    for (int k = 0; k <= 200000; ++k) best = std::min(best, phi(-1 + 2.0 * k / 200000));
    CHECK(phi(t) <= best + 1e-12);
  }
}

TEST_CASE("solver basics") {
  auto p = quartic(-1, 1);
  auto t = build_tree(3, 6);
  auto b = ball(t, 0, 4);
  auto all_c1 = solve_dirichlet(t, p, b, constant_field(t, 1));
  for (Vertex u : b.members()) CHECK(all_c1.x[u] == 1.0);
  CHECK(all_c1.converged);

  auto line = build_control_line(4);
  auto f = constant_field(line, 0.0);
  for (Vertex u = 0; u < line.vertex_count(); ++u) f[u] = line.layout()[static_cast<std::size_t>(u)][0] < 0 ? -1.0 : 1.0;
  auto one = solve_dirichlet(line, p, VertexSet::from(line.vertex_count(), std::vector<Vertex>{0}), f);
  CHECK(one.x[0] == doctest::Approx(-1 / std::sqrt(2.0)).epsilon(1e-12));

  auto mixed = solve_dirichlet(t, p, b, split_data(t, p));
  CHECK(mixed.converged);
  CHECK(mixed.residual <= 1e-10);
  CHECK(el_residual(t, p, mixed.x.values, b) <= 1e-10);
  CHECK(mixed.monotone);
  CHECK(mixed.clamped);
  CHECK(mixed.start_energies.size() == 3);
  for (auto [name, e] : mixed.start_energies) CHECK(mixed.energy <= e + 1e-12);
  for (std::size_t i = 1; i < mixed.energy_trace.size(); ++i)
    CHECK(mixed.energy_trace[i] <= mixed.energy_trace[i - 1] + 1e-12);

  auto bad = constant_field(t, 2.0);
  SolverConfig strict;
  strict.require_trapped = true;
  CHECK_THROWS_AS(solve_dirichlet(t, p, b, bad, strict), SolverError);
  CHECK_THROWS_AS(solve_dirichlet(t, p, ball(t, 0, 5), constant_field(t, 1)), SolverError);
  auto free = solve_dirichlet(t, p, b, bad);
  CHECK_FALSE(free.clamped);
  CHECK(free.converged);
}

TEST_CASE("solver against the grid oracle") {
  auto p = quartic(-1, 1);
  auto g = build_tiling(3, 7, 4);
  std::mt19937_64 rng(11);
  auto interior = ball(g, 0, 2);
  auto pool = interior.members();
  for (int inst = 0; inst < 6; ++inst) {
    const Vertex start = pool[rng() % pool.size()];
    auto b = random_connected_set(g, start, 1 + static_cast<int>(rng() % 5), rng()) & interior;
    auto f = random_field(g, -1, 1, rng);
    auto res = solve_dirichlet(g, p, b, f);
    const auto region = outer_set(g, b).members();
    auto grid = oracle::grid_minimiser(g, p.V, f.values, b.members(), -1, 1, 65);
    auto pol = oracle::newton_polish(g, p.V, p.dV, p.ddV, grid, b.members(), region);
    CHECK(std::abs(res.energy - oracle::energy_literal(g, p.V, pol, region)) <= 1e-6);
  }
}

TEST_CASE("local minimality") {
  auto p = quartic(-1, 1);
  auto t = build_tree(3, 6);
  auto b = ball(t, 0, 4);
  for (double c : {-1.0, 1.0}) {
    auto rep = verify_local_minimality(t, p, constant_field(t, c), b, 300, 0.5, 3);
    CHECK(rep.trials == 300);
    CHECK(rep.min_gap >= 0.0);
  }
  CHECK(verify_local_minimality(t, p, constant_field(t, -1), b, 100, 0.2, 4, true).min_gap >= 0.0);
  CHECK(verify_local_minimality(t, p, constant_field(t, 0.3), b, 10, 0.0, 4).min_gap == 0.0);
  auto sol = solve_dirichlet(t, p, b, split_data(t, p));
  CHECK(verify_local_minimality(t, p, sol.x, b, 1000, 0.3, 5).min_gap >= -1e-9);
}

TEST_CASE("min/max inequality") {
  auto p = quartic(-1, 1);
  auto t = build_tree(3, 4);
  auto b = ball(t, 0, 3);
  std::mt19937_64 rng(6);
  auto x = random_field(t, -1, 1, rng);
  auto same = minmax_check(t, p, x, x, b);
  CHECK(same.lhs == doctest::Approx(same.rhs));
  auto y = x;
  for (auto& v : y.values) v += 0.1;
  auto ord = minmax_check(t, p, x, y, b);
  CHECK(ord.lhs == doctest::Approx(ord.rhs));
  for (int i = 0; i < 1000; ++i) {
    auto a = random_field(t, -1.2, 1.2, rng), c = random_field(t, -1.2, 1.2, rng);
    CHECK(minmax_check(t, p, a, c, b).holds());
  }
}

TEST_CASE("comparison and trapping") {
  auto p = quartic(-1, 1);
  auto t = build_tree(3, 5);
  auto b = ball(t, 0, 3);
  auto lowhigh = comparison_check(t, p, b, constant_field(t, -1), constant_field(t, 1));
  CHECK(lowhigh.ordered);
  CHECK(lowhigh.strict);
  auto same = comparison_check(t, p, b, constant_field(t, 0.2), constant_field(t, 0.2));
  CHECK(same.identical);
  auto half = comparison_check(t, p, b, split_data(t, p), constant_field(t, 1));
  CHECK(half.ordered);
  CHECK_FALSE(half.mixed);

  CHECK(trapping_check(t, p, constant_field(t, -1), ball(t, 0, 2)));
  CHECK_FALSE(trapping_check(t, p, constant_field(t, 1.5), ball(t, 0, 2)));

  auto g = build_tiling(3, 7, 7);
  auto bg = ball(g, 0, 4);
  std::mt19937_64 rng(1);
  auto f = random_field(g, -1, 1, rng);
  SolverConfig open;
  open.clamp = false;
  auto sol = solve_dirichlet(g, p, bg, f, open);
  CHECK(sol.converged);
  CHECK_FALSE(sol.clamped);
  CHECK(trapping_check(g, p, sol.x, bg));
}

TEST_CASE("transition sets") {
  auto p = quartic(-1, 1);
  auto pc = derive_constants(p);
  const double rho = pc.rho0;
  auto t = build_tree(3, 5);
  auto b = ball(t, 0, 3);
  auto hi = transition_sets(p, constant_field(t, 1), b, rho, pc);
  CHECK(hi.B_l.empty());
  CHECK(hi.B_h.empty());
  auto lo = transition_sets(p, constant_field(t, -1), b, rho, pc);
  CHECK(lo.B_l == b);
  CHECK(lo.B_h.empty());
  CHECK(transition_sets(p, constant_field(t, 1 - 1.5 * rho), b, rho, pc).B_h == b);
  CHECK(transition_sets(p, constant_field(t, 1 - 2 * rho), b, rho, pc).B_h == b);

  // heteroclinic on a path: B_l is an initial segment from the c0 end
  auto line = build_control_line(40);
  auto f = constant_field(line, 1.0);
  for (Vertex u = 0; u < line.vertex_count(); ++u)
    if (line.layout()[static_cast<std::size_t>(u)][0] < 0) f[u] = -1.0;
  auto bl = ball(line, 0, 18);
  auto sol = solve_dirichlet(line, p, bl, f);
  CHECK(sol.converged);
  auto ts = transition_sets(p, sol.x, bl, rho, pc);
  CHECK_FALSE(ts.B_l.empty());
  CHECK(connected_components(line, ts.B_l).size() == 1);
  for (Vertex u : ts.B_l.members()) CHECK(line.layout()[static_cast<std::size_t>(u)][0] <= 0.5);
}

TEST_CASE("transition-set inequality and components") {
  auto p = quartic(-1, 1);
  auto pc = derive_constants(p);
  const double rho = pc.rho0;
  auto t = build_tree(3, 7);
  auto b = ball(t, 0, 5);
  auto top = ts_inequality_check(t, p, constant_field(t, 1), b, ball(t, 0, 3), rho, pc);
  CHECK(top.lhs == 0.0);
  CHECK(top.rhs == 0.0);
  CHECK(top.holds);
  auto sol = solve_dirichlet(t, p, b, split_data(t, p));
  auto none = ts_inequality_check(t, p, sol.x, b, VertexSet(t.vertex_count()), rho, pc);
  CHECK(none.lhs == 0.0);
  CHECK(none.holds);
  auto half = ts_inequality_check(t, p, sol.x, b, ball(t, 0, 3), rho, pc);
  CHECK(half.holds);
  CHECK(half.k0 > 1.0);
  CHECK(half.k0_needed <= half.k0);

  CHECK(component_boundary_check(t, p, constant_field(t, 1), b, rho, pc).components == 0);
  auto all_low = solve_dirichlet(t, p, b, constant_field(t, -1));
  auto c0 = component_boundary_check(t, p, all_low.x, b, rho, pc);
  CHECK(c0.components == 1);
  CHECK(c0.holds);

  auto g = build_tiling(3, 7, 7);
  auto bg = ball(g, 0, 4);
  std::mt19937_64 rng(3);
  auto f = constant_field(g, 1.0);
  for (Vertex u = 0; u < g.vertex_count(); ++u)
    if (g.layout()[static_cast<std::size_t>(u)][1] < 0) f[u] = -1.0;
  auto mixed = solve_dirichlet(g, p, bg, f);
  auto cm = component_boundary_check(g, p, mixed.x, bg, rho, pc);
  CHECK(cm.components >= 1);
  CHECK(cm.holds);
}
