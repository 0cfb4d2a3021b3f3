#include <random>

#include "doctest.h"
#include "hypac/graph.hpp"

using namespace hypac;

namespace {

VertexSet random_set(int n, std::mt19937_64& rng, double p) {
  std::bernoulli_distribution coin(p);
  VertexSet s(n);
  for (Vertex u = 0; u < n; ++u)
    if (coin(rng)) s.insert(u);
  return s;
}

std::vector<int> sphere_sizes(const Graph& g) {
  std::vector<int> sizes;
  for (Vertex u = 0; u < g.vertex_count(); ++u) {
    const auto d = static_cast<std::size_t>(g.depth(u));
    if (sizes.size() <= d) sizes.resize(d + 1, 0);
    ++sizes[d];
  }
  return sizes;
}

void check_graph_invariants(const Graph& g) {
  int max_deg = 0;
  for (Vertex u = 0; u < g.vertex_count(); ++u) {
    max_deg = std::max(max_deg, g.degree(u));
    for (Vertex w : g.neighbors(u)) {
      CHECK(w != u);
      auto back = g.neighbors(w);
      CHECK(std::find(back.begin(), back.end(), u) != back.end());
      CHECK(std::abs(g.depth(u) - g.depth(w)) <= 1);
    }
  }
  CHECK(max_deg == g.max_degree());
  CHECK(g.valid(g.base_vertex()));
  CHECK(g.depth(g.base_vertex()) == 0);
  for (Vertex u = 1; u < g.vertex_count(); ++u) CHECK(g.depth(u - 1) <= g.depth(u));
}

}  // namespace

TEST_CASE("tree sizes") {
  CHECK(build_tree(3, 2).vertex_count() == 10);
  CHECK(build_tree(4, 3).vertex_count() == 53);
  auto single = build_tree(3, 0);
  CHECK(single.vertex_count() == 1);
  CHECK(single.edge_count() == 0);
  CHECK_THROWS_AS(build_tree(2, 3), GraphError);

  auto t = build_tree(3, 2);
  auto f = distances_from(t, t.base_vertex());
  std::vector<int> layers(3, 0);
  for (int d : f.dist) ++layers[static_cast<std::size_t>(d)];
  CHECK(layers == std::vector<int>{1, 3, 6});
  check_graph_invariants(t);
  for (int n = 0; n <= 6; ++n)
    CHECK(build_tree(3, n).vertex_count() == 3 * (1 << n) - 2);
}

TEST_CASE("tiling degrees and growth") {
  auto t = build_tiling(3, 7, 1);
  CHECK(t.degree(t.base_vertex()) == 7);
  CHECK_THROWS_AS(build_tiling(4, 4, 3), GraphError);
  CHECK_THROWS_AS(build_tiling(3, 6, 3), GraphError);
  CHECK_THROWS_AS(build_tiling(3, 5, 3), GraphError);

  // Sphere sizes of the {3,7} vertex graph: 7 * F(2n) with Fibonacci F.
  auto big = build_tiling(3, 7, 6);
  check_graph_invariants(big);
  CHECK(sphere_sizes(big) == std::vector<int>{1, 7, 21, 56, 147, 385, 1008});
  for (Vertex u = 0; u < big.vertex_count(); ++u)
    if (big.depth(u) < 6) CHECK(big.degree(u) == 7);

  auto t45 = build_tiling(4, 5, 4);
  check_graph_invariants(t45);
  auto s = sphere_sizes(t45);
  for (std::size_t k = 1; k < s.size(); ++k) CHECK(s[k] > s[k - 1]);
  for (Vertex u = 0; u < t45.vertex_count(); ++u)
    if (t45.depth(u) < 4) CHECK(t45.degree(u) == 5);

  for (const auto& pt : big.layout()) CHECK(pt[0] * pt[0] + pt[1] * pt[1] < 1.0);
}

TEST_CASE("tilings are deterministic") {
  auto a = build_tiling(3, 7, 5);
  auto b = build_tiling(3, 7, 5);
  REQUIRE(a.vertex_count() == b.vertex_count());
  for (Vertex u = 0; u < a.vertex_count(); ++u) {
    auto na = a.neighbors(u);
    auto nb = b.neighbors(u);
    CHECK(std::equal(na.begin(), na.end(), nb.begin(), nb.end()));
  }
}

TEST_CASE("control graphs") {
  auto line = build_control_line(4);
  CHECK(line.vertex_count() == 5);
  CHECK(line.edge_count() == 4);
  CHECK(distances_from(line, line.base_vertex()).max() == 2);
  auto grid = build_control_grid(3);
  CHECK(grid.vertex_count() == 9);
  CHECK(grid.max_degree() == 4);
  CHECK(grid.degree(grid.base_vertex()) == 4);

  auto l2 = build_control_line(2);
  CHECK(ball(l2, l2.base_vertex(), 0).size() == 1);
  CHECK(ball(l2, l2.base_vertex(), 1).size() == 3);
}

TEST_CASE("balls and spheres") {
  auto t = build_tree(3, 5);
  auto b2 = ball(t, t.base_vertex(), 2);
  CHECK(b2.size() == 10);
  CHECK_FALSE(b2.clipped());
  CHECK(ball(t, 7, 0).size() == 1);
  CHECK(ball(t, 7, 0).contains(7));
  auto far = sphere(t, t.base_vertex(), 6);
  CHECK(far.empty());
  CHECK(far.clipped());
  CHECK(boundary_out(t, b2).size() == 12);

  for (Vertex c : {0, 3, 20}) {
    for (int n = 0; n <= 4; ++n) {
      VertexSet layers(t.vertex_count());
      for (int k = 0; k <= n; ++k) {
        auto s = sphere(t, c, k);
        CHECK((s & layers).empty());
        layers |= s;
      }
      CHECK(layers == ball(t, c, n));
    }
  }
}

TEST_CASE("boundary operators on small cases") {
  auto line = build_control_line(4);
  VertexSet middle(line.vertex_count());
  for (Vertex u = 0; u < line.vertex_count(); ++u)
    if (line.depth(u) <= 1) middle.insert(u);
  auto out = boundary_out(line, middle);
  CHECK(out.size() == 2);
  for (Vertex u : out.members()) CHECK(line.depth(u) == 2);
  CHECK(boundary_out(line, VertexSet::all(line.vertex_count())).empty());
  CHECK(boundary_out(line, VertexSet(line.vertex_count())).empty());
  CHECK(inner_set(line, middle).size() == 1);
  CHECK(boundary_inn(line, middle).size() == 2);
  CHECK(boundary_full(line, middle).size() == 4);
  CHECK(iterate_out(line, VertexSet::from(5, std::vector<Vertex>{0}), 2).size() == 5);
  auto eroded = iterate_inn(line, VertexSet::all(5), 1);
  CHECK(eroded.size() == 5);
  CHECK(eroded.clipped());
  CHECK(iterate_inn(line, middle, 1).size() == 1);
}

TEST_CASE("connected components") {
  auto line = build_control_line(4);
  VertexSet ends(line.vertex_count());
  for (Vertex u = 0; u < line.vertex_count(); ++u)
    if (line.depth(u) == 2) ends.insert(u);
  CHECK(connected_components(line, ends).size() == 2);
  CHECK(connected_components(line, VertexSet::all(5)).size() == 1);

  auto t = build_tree(3, 3);
  VertexSet two(t.vertex_count());
  for (Vertex c : {1, 2})
    for (Vertex u = 0; u < t.vertex_count(); ++u)
      if (t.depth(u) + distances_from(t, c).dist[static_cast<std::size_t>(u)] == t.depth(u) + t.depth(u) - 1 &&
          distances_from(t, c).dist[static_cast<std::size_t>(u)] == t.depth(u) - 1)
        two.insert(u);
  auto comps = connected_components(t, two);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].contains(1));
  CHECK(comps[1].contains(2));
  CHECK(comps[0].size() + comps[1].size() == two.size());
}

TEST_CASE("boundary identity and duality on random pairs") {
  std::mt19937_64 rng(11);
  std::vector<Graph> graphs;
  graphs.push_back(build_tree(3, 5));
  graphs.push_back(build_tiling(3, 7, 3));
  graphs.push_back(build_control_grid(6));
  for (const auto& g : graphs) {
    const int n = g.vertex_count();
    for (int trial = 0; trial < 120; ++trial) {
      auto b = random_set(n, rng, 0.3);
      auto d = random_set(n, rng, 0.5);
      auto lhs = boundary_out(g, b & d);
      auto rhs = (boundary_out(g, b) & outer_set(g, d)) | (outer_set(g, b) & boundary_out(g, d));
      CHECK(lhs.is_subset_of(rhs));

      CHECK(outer_set(g, inner_set(g, b)).is_subset_of(b));
      CHECK(b.is_subset_of(inner_set(g, outer_set(g, b))));
      CHECK(boundary_out(g, b).size() <= g.max_degree() * b.size());
    }
  }
}

TEST_CASE("outer boundary of an intersection is only contained in the right-hand side") {
  // B = {a}, D = {c} with a common neighbor b: the intersection is empty but
  // b lies in the outer boundary of B and in the outer set of D.
  auto line = build_control_line(4);
  VertexSet b = VertexSet::from(5, std::vector<Vertex>{1});
  VertexSet d = VertexSet::from(5, std::vector<Vertex>{2});
  REQUIRE(distances_from(line, 1).dist[2] == 2);
  auto lhs = boundary_out(line, b & d);
  auto rhs = (boundary_out(line, b) & outer_set(line, d)) | (outer_set(line, b) & boundary_out(line, d));
  CHECK(lhs.empty());
  CHECK(rhs.contains(0));
}

TEST_CASE("rim flags") {
  auto t = build_tree(3, 4);
  CHECK(t.is_rim(t.vertex_count() - 1));
  CHECK_FALSE(t.is_rim(0));
  auto zone = rim_zone(t);
  for (Vertex u = 0; u < t.vertex_count(); ++u) CHECK(zone.contains(u) == (t.depth(u) >= 3));
  CHECK(ball(t, 0, 4).clipped() == false);
  CHECK(ball(t, 0, 5).clipped());
  CHECK(outer_set(t, ball(t, 0, 4)).clipped());
  CHECK_FALSE(outer_set(t, ball(t, 0, 3)).clipped());
}

TEST_CASE("set algebra") {
  VertexSet a = VertexSet::from(6, std::vector<Vertex>{0, 2, 4});
  VertexSet b = VertexSet::from(6, std::vector<Vertex>{2, 3});
  CHECK((a | b).size() == 4);
  CHECK((a & b).members() == std::vector<Vertex>{2});
  CHECK((a - b).members() == std::vector<Vertex>{0, 4});
  CHECK_THROWS_AS(a | VertexSet(7), GraphError);
  CHECK_THROWS_AS(a.insert(6), GraphError);
}

TEST_CASE("export spec dispatch") {
  CHECK(build_from_spec({"tree", {3}, 2}).vertex_count() == 10);
  CHECK(build_from_spec({"grid", {3}, 0}).vertex_count() == 9);
  CHECK_THROWS_AS(build_from_spec({"torus", {3}, 2}), GraphError);
  CHECK_THROWS_AS(build_from_spec({"tiling", {3}, 2}), GraphError);
}
