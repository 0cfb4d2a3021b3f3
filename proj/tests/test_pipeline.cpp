#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hypac/pipeline.hpp"

using namespace hypac;

namespace {

// Vertices whose tree geodesic from the root passes through `top`.
VertexSet subtree_of(const Graph& t, Vertex top) {
  VertexSet s(t.vertex_count());
  std::vector<Vertex> stack{top};
  s.insert(top);
  while (!stack.empty()) {
    Vertex u = stack.back();
    stack.pop_back();
    for (Vertex w : t.neighbors(u))
      if (t.depth(w) == t.depth(u) + 1 && !s.contains(w)) {
        s.insert(w);
        stack.push_back(w);
      }
  }
  return s;
}

SplitSpec subtree_spec(Vertex v) {
  SplitSpec sp;
  sp.kind = "subtree";
  sp.center = v;
  return sp;
}

const ShadowConstants kUnit{1.0, 1.0};

}  // namespace

TEST_CASE("split construction") {
  auto t = build_tree(3, 8);
  Horizon h(t, 8, 0);
  VisualMetric vm{std::log(2.0) / 8, 1.0, 8, false};

  auto s = make_split(h, vm, kUnit, subtree_spec(1));
  CHECK(s.D1.size() == 128);
  CHECK(s.D0.size() == 256);
  CHECK(s.frontier.empty());
  CHECK((s.D0 & s.D1).empty());
  // branch point at the root: product 0, distance 1
  CHECK(deepest_probe(h, vm, s, 1).second == doctest::Approx(1.0));

  SplitSpec all;
  all.kind = "explicit";
  for (int k = 0; k < h.size(); ++k) all.members.push_back(k);
  CHECK_THROWS_AS(make_split(h, vm, kUnit, all), std::invalid_argument);

  SplitSpec one;
  one.kind = "explicit";
  one.members = {5};
  CHECK_THROWS_AS(make_split(h, vm, kUnit, one), std::invalid_argument);

  SplitSpec half;
  auto hs = make_split(h, vm, kUnit, half);
  CHECK(hs.D0.size() + hs.D1.size() == h.size());
  CHECK(hs.D1.size() == doctest::Approx(h.size() / 2.0).epsilon(0.1));

  // frontier on a tiling: shared proxies exactly the frontier
  auto g = build_tiling(3, 7, 6);
  Horizon hg(g, 5, 1);
  VisualMetric vg{std::log(2.0) / 16, 1.0, 5, false};
  auto ts = make_split(hg, vg, kUnit, half);
  CHECK(!ts.frontier.empty());
  CHECK((ts.D0 & ts.D1) == ts.frontier);
  CHECK((ts.D0 | ts.D1) == hg.all());

  auto sw = swap_split(ts);
  CHECK(sw.D0 == ts.D1);
  CHECK(sw.D1 == ts.D0);
}

TEST_CASE("tilde x") {
  auto t = build_tree(3, 8);
  Horizon h(t, 8, 0);
  VisualMetric vm{std::log(2.0) / 8, 1.0, 8, false};
  auto p = quartic(-1, 1);
  auto s = make_split(h, vm, kUnit, subtree_spec(2));
  auto x = tilde_x(h, s, p);
  const auto sub = subtree_of(t, 2);
  for (Vertex u = 0; u < t.vertex_count(); ++u) {
    CHECK(x[u] == (sub.contains(u) ? 1.0 : -1.0));
    CHECK(x[u] >= p.c0);
    CHECK(x[u] <= p.c1);
  }

  BoundarySplit empty_interior = s;
  empty_interior.frontier = s.D1;
  auto y = tilde_x(h, empty_interior, p);
  for (Vertex u = 0; u < t.vertex_count(); ++u) CHECK(y[u] == -1.0);
}

TEST_CASE("exhaustion") {
  auto t = build_tree(3, 9);
  Horizon h(t, 8, 0);
  VisualMetric vm{std::log(2.0), 1.0, 8, true};
  auto p = quartic(-1, 1);

  BoundarySplit full;
  full.D1 = h.all();
  full.D0 = h.none();
  full.frontier = h.none();
  auto rep = exhaustion_solve(t, tilde_x(h, full, p), p, {2, 4}, {});
  for (const auto& r : rep.solves) {
    for (Vertex u : ball(t, 0, 4).members()) CHECK(r.x[u] == 1.0);
  }
  CHECK(rep.window_deltas.size() == 1);
  CHECK(rep.window_deltas[0] == 0.0);

  auto s = make_split(h, vm, kUnit, SplitSpec{});
  auto data = tilde_x(h, s, p);
  auto single = exhaustion_solve(t, data, p, {3}, {});
  CHECK(single.window_deltas.empty());
  CHECK_THROWS_AS(exhaustion_solve(t, data, p, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(exhaustion_solve(t, data, p, {4, 3}, {}), std::invalid_argument);
  CHECK_THROWS_AS(exhaustion_solve(t, data, p, {8}, {}), std::invalid_argument);

  auto run = exhaustion_solve(t, data, p, {3, 5, 7}, {});
  CHECK(run.window == 3);
  CHECK(run.window_deltas.size() == 2);
  CHECK_FALSE(run.hard_fail);
  for (const auto& r : run.solves) {
    CHECK(r.converged);
    CHECK(r.residual <= 1e-10);
  }
}

TEST_CASE("pipeline constants") {
  PipelineInputs in;
  in.epsilon = std::log(2.0) / 8;
  in.D = 1.0;
  in.C_D = 2.0;
  in.C0 = 1.5;
  in.k0 = 3.0;
  in.r = 0.5;
  in.rho = 0.05;
  in.indices = 4000;
  auto pc = derive_pipeline_constants(in);
  CHECK(pc.ratio == doctest::Approx(1.2));
  CHECK(pc.n_i[1] / pc.n_i[0] == doctest::Approx(1.2));
  CHECK(pc.n_i[0] == pc.k3);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(pc.r_i[0] == doctest::Approx(6 * 0.5 / pi2));
  CHECK(pc.r1 == pc.r_i[0]);
  CHECK(pc.r0 == doctest::Approx(3 * 0.5 / pi2));
  for (std::size_t i = 1; i < pc.r_i.size(); ++i) CHECK(pc.r_i[i] > pc.r_i[i - 1]);
  CHECK(pc.r_i.back() < 0.5);
  CHECK(pc.r_i.back() == doctest::Approx(0.5).epsilon(1e-3));
  // spacing: r_i - r_{i-1} = d_{i-1}
  CHECK(pc.r_i[5] - pc.r_i[4] == doctest::Approx(pc.d_i[4]));
  for (int n : {0, 3, 10}) CHECK(4 * pc.t_n(n) == doctest::Approx(std::exp(-in.epsilon * n) / pc.k1));
  const double k2 = std::max(2.0, std::pow(6 * 3.0 * 2.0 * 1.5, 5.0 / 4.0));
  CHECK(pc.k2 == doctest::Approx(k2));
  CHECK(pc.k3 >= 4 * 5 / in.epsilon);
  CHECK(pc.log_n_bar == doctest::Approx(std::log(k2) + in.epsilon * 1.5 * pc.k3));

  // a realistic tree fit: D = 8 at eps = ln2/8
  PipelineInputs tree = in;
  tree.D = 8.0;
  tree.C_D = 3.0;
  tree.C0 = 2.0;
  tree.k0 = 40.0;
  tree.indices = 12;
  tree.truncation_radius = 12;
  auto tc = derive_pipeline_constants(tree);
  CHECK(tc.theoretical_only);
  CHECK(std::isinf(tc.n_bar));
  CHECK(tc.log_n_bar > 700);

  CHECK_THROWS_AS(derive_pipeline_constants(PipelineInputs{}), std::invalid_argument);
}

TEST_CASE("main lemma monitor") {
  auto t = build_tree(3, 9);
  Horizon h(t, 8, 0);
  VisualMetric vm{std::log(2.0), 1.0, 8, true};
  auto p = quartic(-1, 1);
  auto pot = derive_constants(p);
  PipelineInputs in;
  in.epsilon = vm.epsilon;
  in.D = 1.0;
  in.C_D = 3.0;
  in.C0 = 2.0;
  in.k0 = 10.0;
  in.r = 1.0;
  in.rho = 0.05;
  auto pc = derive_pipeline_constants(in);

  auto ones = constant_field(t, 1.0);
  auto rep = main_lemma_monitor(h, vm, ones, 7, p, pot, pc, 0, 1.0);
  CHECK(!rep.rows.empty());
  for (const auto& row : rep.rows) {
    CHECK(row.phi == 0.0);
    CHECK(row.n_i < 7);
    CHECK(row.log_threshold == doctest::Approx(std::log(pc.k2) + vm.epsilon * 1.25 * row.n_i));
  }
  CHECK(rep.vacuous);
  CHECK(rep.implication_holds);

  // paper schedule starts at k3, far beyond the truncation: no rows
  CHECK(main_lemma_monitor(h, vm, ones, 7, p, pot, pc, 0, 0.0).rows.empty());

  // all of B_N in B_l: the count reaches #(cone cap B_N)
  auto lows = constant_field(t, -1.0);
  auto low = main_lemma_monitor(h, vm, lows, 7, p, pot, pc, 0, 1.0);
  for (const auto& row : low.rows) {
    const auto c = cone(h, ball_at_infinity(h, vm, 0, row.r_i)) & ball(t, 0, 7);
    CHECK(row.phi == c.size());
  }
}

TEST_CASE("cone inclusion") {
  auto t = build_tree(3, 8);
  Horizon h(t, 8, 0);
  for (double eps : {std::log(2.0) / 8, std::log(2.0) / 2, std::log(2.0)}) {
    VisualMetric vm{eps, 1.0, 8, true};
    for (int xi : {0, 17, 200}) {
      const double r1 = 6 * 1.0 / (std::numbers::pi * std::numbers::pi);
      auto rep = cone_inclusion_check(h, vm, xi, r1 / 2, r1, 1);
      CHECK(rep.holds);
      // at eps = ln2/8 the r0-ball is a single proxy whose cone lies on the rim
      if (eps > 0.1) CHECK(rep.lhs_size > 0);
    }
  }
  VisualMetric vm{std::log(2.0), 1.0, 8, true};
  CHECK_THROWS_AS(cone_inclusion_check(h, vm, 0, 0.5, 0.2, 1), std::invalid_argument);
  auto empty = cone_inclusion_check(h, vm, 0, 1e-6, 1e-6, 5);
  CHECK(empty.vacuous);
  CHECK(empty.holds);
}

TEST_CASE("values at infinity path count") {
  auto t = build_tree(3, 9);
  Horizon h(t, 8, 0);
  VisualMetric vm{std::log(2.0), 1.0, 8, true};
  auto p = quartic(-1, 1);
  auto pot = derive_constants(p);
  auto lows = constant_field(t, -1.0);
  for (int n : {1, 2}) {
    auto rep = values_at_infinity_check(h, vm, lows, 7, p, pot, 0.05, 0, 0.6, n);
    CHECK(rep.in_cone > 0);
    CHECK(rep.inner_hits > 0);
    CHECK(rep.paths_ok);
  }
  auto ones = constant_field(t, 1.0);
  auto clean = values_at_infinity_check(h, vm, ones, 7, p, pot, 0.05, 0, 0.6, 2);
  CHECK(clean.in_cone == 0);
  CHECK(clean.inner_hits == 0);
}

TEST_CASE("asymptotics probe") {
  auto t = build_tree(3, 8);
  Horizon h(t, 8, 0);
  VisualMetric vm{std::log(2.0), 1.0, 8, true};
  auto p = quartic(-1, 1);
  auto s = make_split(h, vm, kUnit, subtree_spec(1));
  auto ones = constant_field(t, 1.0);
  const auto [xi, depth] = deepest_probe(h, vm, s, 1);
  auto row = asymptotics_probe(h, vm, s, ones, p, xi, 1, depth, 2, 0.1);
  CHECK(row.sup_deviation == 0.0);
  CHECK(row.fraction_within == 1.0);
  CHECK(row.cone_size > 0);
  CHECK_THROWS_AS(asymptotics_probe(h, vm, s, ones, p, xi, 0, depth, 2, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(asymptotics_probe(h, vm, s, ones, p, xi, 1, depth, 9, 0.1), std::invalid_argument);

  auto g = build_tiling(3, 7, 6);
  Horizon hg(g, 5, 1);
  VisualMetric vg{std::log(2.0) / 16, 1.0, 5, false};
  auto ts = make_split(hg, vg, kUnit, SplitSpec{});
  const int f = ts.frontier.members().front();
  auto gx = constant_field(g, 1.0);
  CHECK_THROWS_AS(asymptotics_probe(hg, vg, ts, gx, p, f, 1, 1.0, 1, 0.1), std::invalid_argument);
}

TEST_CASE("swap symmetry") {
  auto t = build_tree(3, 8);
  Horizon h(t, 7, 0);
  VisualMetric vm{std::log(2.0), 1.0, 7, true};
  auto V = [](double s) { return s * s * (1 - s) * (1 - s) * (1 + s); };
  auto dV = [](double s) {
    return 2 * s * (1 - s) * (1 - s) * (1 + s) - 2 * s * s * (1 - s) * (1 + s) + s * s * (1 - s) * (1 - s);
  };
  auto ddV = [](double s) { return 2 - 6 * s - 12 * s * s + 20 * s * s * s; };
  auto p = custom_potential(0, 1, V, dV, ddV, "asym");
  auto m = mirror_potential(p);
  CHECK(m.V(0.2) == doctest::Approx(p.V(0.8)));
  CHECK(m.dV(0.2) == doctest::Approx(-p.dV(0.8)));

  auto s = make_split(h, vm, kUnit, SplitSpec{});
  auto a = exhaustion_solve(t, tilde_x(h, s, p), p, {5}, {});
  auto b = exhaustion_solve(t, tilde_x(h, swap_split(s), m), m, {5}, {});
  double worst = 0.0;
  for (Vertex u = 0; u < t.vertex_count(); ++u)
    worst = std::max(worst, std::abs(a.solves[0].x[u] - (1.0 - b.solves[0].x[u])));
  CHECK(worst <= 1e-6);
}
