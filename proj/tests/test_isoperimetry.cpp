#include <cmath>

#include "doctest.h"
#include "hypac/isoperimetry.hpp"
#include "oracles.hpp"

using namespace hypac;

TEST_CASE("growth fit") {
  const VisualMetric vm{std::log(2.0) / 8, 1.0, 10, false};
  auto t = build_tree(3, 10);
  auto fit = growth_fit(t, vm);
  REQUIRE(fit.table.size() == 11);
  for (int n = 0; n <= 10; ++n) CHECK(fit.table[static_cast<std::size_t>(n)] == 3 * (1LL << n) - 2);
  CHECK(fit.slope == doctest::Approx(std::log(2.0)).epsilon(0.05));
  CHECK(fit.D == doctest::Approx(fit.slope / vm.epsilon));
  CHECK_FALSE(fit.subexponential);
  for (int n = fit.window_lo; n <= fit.window_hi; ++n)
    CHECK(fit.table[static_cast<std::size_t>(n)] <= fit.C_D * std::exp(vm.epsilon * fit.D * n));

  CHECK(growth_fit(build_control_line(40), vm).subexponential);
  CHECK(growth_fit(build_control_grid(21), vm).subexponential);
  CHECK_THROWS_AS(growth_fit(build_control_line(4), vm), std::invalid_argument);
}

TEST_CASE("ball ratios on a tree follow the closed form") {
  auto t = build_tree(3, 8);
  IpFamily fam;
  fam.ball_centers = 1;
  const double D = 8.0;
  auto rep = ip_scan(t, D, fam);
  CHECK(rep.exponent == doctest::Approx(32.0 / 33.0));
  CHECK(rep.excluded_rim > 0);
  REQUIRE(rep.tested == 7);
  for (int n = 0; n < rep.tested; ++n) {
    const auto [size, ratio] = rep.size_ratio[static_cast<std::size_t>(n)];
    CHECK(size == 3 * (1 << n) - 2);
    CHECK(ratio == doctest::Approx(std::pow(size, rep.exponent) / (3.0 * (1 << n))));
  }
  CHECK_FALSE(rep.violated_at_scale);
  CHECK(rep.C0 >= 1.0);
}

TEST_CASE("singletons give C0 = 1") {
  auto t = build_tree(3, 5);
  IpFamily fam;
  fam.balls = false;
  fam.random_sets = 10;
  fam.random_sizes = {1};
  auto rep = ip_scan(t, 2.0, fam);
  CHECK(rep.C0 == 1.0);
  for (auto [s, r] : rep.size_ratio) CHECK(s == 1);
}

TEST_CASE("isoperimetry fails at scale on a line") {
  auto line = build_control_line(40);
  IpFamily fam;
  fam.ball_centers = 1;
  auto rep = ip_scan(line, 2.0, fam);
  CHECK(rep.violated_at_scale);
  CHECK(rep.C0 > 4.0);

  auto t = build_tree(3, 8);
  IpFamily mixed;
  mixed.random_sets = 100;
  CHECK_FALSE(ip_scan(t, 8.0, mixed).violated_at_scale);
}

TEST_CASE("random connected sets") {
  auto g = build_tiling(3, 7, 4);
  for (std::uint64_t s = 1; s <= 10; ++s) {
    auto b = random_connected_set(g, 0, 20, s);
    CHECK(b.size() == 20);
    CHECK(connected_components(g, b).size() == 1);
  }
  CHECK(random_connected_set(g, 3, 20, 7) == random_connected_set(g, 3, 20, 7));
}

TEST_CASE("exhaustive scan matches the subset oracle") {
  for (const auto& g : {build_control_line(8), build_control_grid(3), build_tree(3, 2), build_control_grid(4)}) {
    IpFamily ex;
    ex.exhaustive = true;
    const double D = 1.5;
    auto rep = ip_scan(g, D, ex);
    const double expect = oracle::best_ip_ratio(g, rep.exponent);
    CHECK(rep.C0 == doctest::Approx(std::max(1.0, expect)));
    CHECK(std::pow(rep.worst_set.size(), rep.exponent) / boundary_out(g, rep.worst_set).size() ==
          doctest::Approx(expect));

    IpFamily heuristic;
    heuristic.exclude_rim = false;
    heuristic.random_sets = 20;
    heuristic.random_sizes = {2, 3, 5};
    CHECK(rep.C0 >= ip_scan(g, D, heuristic).C0 - 1e-12);
  }
  CHECK_THROWS_AS(ip_scan(build_control_line(30), 1.0, IpFamily{.exhaustive = true}), std::invalid_argument);
}

TEST_CASE("greedy covers against the exact cover") {
  auto t = build_tree(3, 4);
  Horizon h(t, 4, 0);
  REQUIRE(h.size() == 24);
  VisualMetric vm{0.5, 1.0, 4, true};
  // the first 12 proxies keep the subset search small
  std::vector<std::vector<double>> dist(12, std::vector<double>(12));
  std::vector<int> all;
  for (int p = 0; p < 12; ++p) {
    const auto row = visual_row(h, vm, p);
    for (int q = 0; q < 12; ++q) dist[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] = row[static_cast<std::size_t>(q)];
    all.push_back(p);
  }
  for (double r : {0.1, std::exp(-1.5), std::exp(-1.0), std::exp(-0.5), 1.0, 2.0}) {
    auto centers = greedy_cover(h, vm, all, r);
    CHECK(static_cast<int>(centers.size()) >= oracle::min_cover(dist, r));
    for (int p : all) {
      double best = 1e9;
      for (int c : centers) best = std::min(best, dist[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)]);
      CHECK(best <= r * (1.0 + 1e-12));
    }
  }
  CHECK(greedy_cover(h, vm, all, horizon_diameter(h, vm, 0)).size() == 1);
}

TEST_CASE("doubling probe") {
  auto line = build_control_line(6);
  Horizon hl(line, 3, 0);
  VisualMetric vm{0.5, 1.0, 3, true};
  auto rl = doubling_probe(hl, vm, {0.5, 1.0}, 2);
  CHECK(rl.M_d <= 2);
  CHECK(rl.horizon_covers.back().second == 1);

  auto t = build_tree(3, 9);
  Horizon ht(t, 9, 0);
  VisualMetric vt{std::log(2.0), 1.0, 9, true};
  std::vector<double> radii;
  for (int k = 1; k <= 6; ++k) radii.push_back(std::exp(-vt.epsilon * k));
  auto rt = doubling_probe(ht, vt, radii, 4);
  CHECK_FALSE(rt.under_resolved);
  CHECK(rt.M_d >= 2);
  CHECK(rt.M_d <= 4);
  // N_r(horizon) doubles per halving of r, so the exponent fit is 1
  CHECK(rt.assouad_fit == doctest::Approx(1.0).epsilon(0.05));

  auto coarse = doubling_probe(ht, vt, {std::exp(-vt.epsilon * 12)}, 1);
  CHECK(coarse.under_resolved);
}
