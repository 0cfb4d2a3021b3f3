#include "hypac/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hypac/parallel.hpp"

namespace hypac {

namespace {

constexpr double kPi = std::numbers::pi;

double angle_of(const Point2& p) {
  double a = std::atan2(p[1], p[0]);
  if (a < 0) a += 2 * kPi;
  return a;
}

// Graph distance from every vertex to the nearest horizon vertex of `proxies`.
std::vector<int> distance_to_proxies(const Horizon& h, const ProxySet& proxies, int limit = -1) {
  const Graph& g = h.graph();
  VertexSet src(g.vertex_count());
  for (int k : proxies.members()) src.insert(h.vertex(k));
  return distances_to_set(g, src, limit);
}

}  // namespace

std::string SplitSpec::describe() const {
  std::ostringstream os;
  os << kind;
  if (kind == "half") os << "(angle=" << angle << ")";
  if (kind == "ball") os << "(center=" << center << ",radius=" << radius << ")";
  if (kind == "subtree") os << "(vertex=" << center << ")";
  if (kind == "explicit") os << "(" << members.size() << " proxies)";
  return os.str();
}

BoundarySplit make_split(const Horizon& h, const VisualMetric& vm, const ShadowConstants& sc, const SplitSpec& spec) {
  const Graph& g = h.graph();
  BoundarySplit s;
  s.spec = spec.describe();
  s.D1 = h.none();
  if (spec.kind == "half") {
    if (g.layout().empty()) throw std::invalid_argument("half split needs a layout");
    double lo = std::fmod(spec.angle, 2 * kPi);
    if (lo < 0) lo += 2 * kPi;
    for (int k = 0; k < h.size(); ++k) {
      double a = angle_of(g.layout()[static_cast<std::size_t>(h.vertex(k))]) - lo;
      if (a < 0) a += 2 * kPi;
      if (a < kPi) s.D1.insert(k);
    }
  } else if (spec.kind == "ball") {
    if (spec.center < 0 || spec.center >= h.size()) throw std::invalid_argument("ball split: bad center proxy");
    s.D1 = ball_at_infinity(h, vm, spec.center, spec.radius);
  } else if (spec.kind == "subtree") {
    if (!g.valid(spec.center)) throw std::invalid_argument("subtree split: bad vertex");
    s.D1 = h.shadow_set(spec.center);
  } else if (spec.kind == "explicit") {
    for (int k : spec.members) {
      if (k < 0 || k >= h.size()) throw std::invalid_argument("explicit split: bad proxy index");
      s.D1.insert(k);
    }
  } else {
    throw std::invalid_argument("unknown split kind: " + spec.kind);
  }
  s.D0 = h.all() - s.D1;
  if (s.D1.empty()) throw std::invalid_argument("split: D1 is empty");
  if (s.D0.empty()) throw std::invalid_argument("split: D0 is empty");

  // (xi|eta) >= R - 2 delta  <=>  d(xi, eta) <= 4 delta
  s.frontier = h.none();
  if (h.delta() > 0) {
    const int reach = 4 * h.delta();
    for (int side = 0; side < 2; ++side) {
      const ProxySet& mine = side == 0 ? s.D0 : s.D1;
      const ProxySet& other = side == 0 ? s.D1 : s.D0;
      const auto dist = distance_to_proxies(h, other, reach);
      for (int k : mine.members()) {
        const int d = dist[static_cast<std::size_t>(h.vertex(k))];
        if (d >= 0 && d <= reach) s.frontier.insert(k);
      }
    }
  }
  s.D0 |= s.frontier;
  s.D1 |= s.frontier;

  s.r_min = sc.C1 * std::exp(-vm.epsilon * (h.radius() - 1));
  for (int side = 0; side < 2; ++side) {
    const auto [xi, depth] = deepest_probe(h, vm, s, side);
    if (xi < 0 || !(depth > s.r_min * (1.0 + 1e-12)))
      throw std::invalid_argument("split: D" + std::to_string(side) + " contains no visual ball of radius r_min");
  }
  return s;
}

BoundarySplit swap_split(const BoundarySplit& s) {
  BoundarySplit t = s;
  std::swap(t.D0, t.D1);
  t.spec = "swap(" + s.spec + ")";
  return t;
}

std::vector<std::pair<int, double>> interior_depths(const Horizon& h, const VisualMetric& vm, const BoundarySplit& s,
                                                    int side) {
  const ProxySet outside = h.all() - (side == 0 ? s.D0 : s.D1);
  const auto dist = distance_to_proxies(h, outside);
  std::vector<std::pair<int, double>> out;
  for (int k : s.interior(side).members()) {
    const int d = dist[static_cast<std::size_t>(h.vertex(k))];
    const double depth = d < 0 ? std::numeric_limits<double>::infinity()
                               : visual_distance_from_product(vm, h.radius() - 0.5 * d);
    out.emplace_back(k, depth);
  }
  return out;
}

std::pair<int, double> deepest_probe(const Horizon& h, const VisualMetric& vm, const BoundarySplit& s, int side) {
  std::pair<int, double> best{-1, -1.0};
  for (const auto& [k, depth] : interior_depths(h, vm, s, side))
    if (depth > best.second) best = {k, depth};
  return best;
}

FieldState tilde_x(const Horizon& h, const BoundarySplit& s, const Potential& p) {
  FieldState x = constant_field(h.graph(), p.c0);
  const auto c = cone(h, s.interior(1));
  for (Vertex u : c.members()) x[u] = p.c1;
  return x;
}

Potential mirror_potential(const Potential& p) {
  Potential m = p;
  const double sum = p.c0 + p.c1;
  auto V = p.V, dV = p.dV, ddV = p.ddV;
  m.V = [V, sum](double s) { return V(sum - s); };
  m.dV = [dV, sum](double s) { return -dV(sum - s); };
  m.ddV = [ddV, sum](double s) { return ddV(sum - s); };
  m.description = "mirror(" + p.description + ")";
  return m;
}

ExhaustionReport exhaustion_solve(const Graph& g, const FieldState& data, const Potential& p,
                                  const std::vector<int>& N_list, const SolverConfig& cfg, int workers) {
  if (N_list.empty()) throw std::invalid_argument("exhaustion: empty N list");
  for (std::size_t k = 0; k < N_list.size(); ++k) {
    if (N_list[k] < 0) throw std::invalid_argument("exhaustion: negative N");
    if (k > 0 && N_list[k] <= N_list[k - 1]) throw std::invalid_argument("exhaustion: N list must increase");
  }
  if (N_list.back() + 1 >= g.r_max())
    throw std::invalid_argument("exhaustion: N = " + std::to_string(N_list.back()) +
                                " needs vertices beyond the truncation (R_max = " + std::to_string(g.r_max()) + ")");
  ExhaustionReport rep;
  rep.N = N_list;
  rep.solves.resize(N_list.size());
  parallel_for(N_list.size(), workers, [&](std::size_t k) {
    rep.solves[k] = solve_dirichlet(g, p, ball(g, g.base_vertex(), N_list[k]), data, cfg);
  });
  rep.window = N_list.front();
  const auto win = ball(g, g.base_vertex(), rep.window).members();
  for (std::size_t k = 1; k < N_list.size(); ++k) {
    double d = 0.0;
    for (Vertex u : win) d = std::max(d, std::abs(rep.solves[k].x[u] - rep.solves[k - 1].x[u]));
    rep.window_deltas.push_back(d);
  }
  for (std::size_t k = 1; k < rep.window_deltas.size(); ++k) {
    const double prev = rep.window_deltas[k - 1], cur = rep.window_deltas[k];
    if (cur > prev + 1e-12) rep.non_increasing = false;
    if (cur > 2 * prev + 1e-12) rep.hard_fail = true;
  }
  return rep;
}

double PipelineConstants::t_n(int n) const {
  return std::max(4 * std::exp(4 * in.epsilon) / in.epsilon, in.C2) * std::exp(-in.epsilon * n);
}

PipelineConstants derive_pipeline_constants(const PipelineInputs& in) {
  if (!(in.epsilon > 0) || !(in.r > 0) || !(in.D > 0) || !(in.C_D > 0))
    throw std::invalid_argument("pipeline constants need epsilon, r, D, C_D > 0");
  PipelineConstants pc;
  pc.in = in;
  const double e = in.epsilon, D = in.D;
  pc.ratio = (D + 0.5) / (D + 0.25);
  // 4 t_n = k1^{-1} e^{-eps n} with t_n in the max form
  pc.k1 = 1.0 / (4 * std::max(in.C2, 4 * std::exp(4 * e) / e));
  pc.k2 = std::max(in.C_D, std::pow(6 * in.k0 * in.C_D * in.C0, (4 * D + 1) / (4 * D)));
  const double arg = (pc.k2 + 2 * in.C_D) * 4 * kPi * kPi / (6 * in.r * in.C_D * pc.k1 * std::exp(-e));
  pc.k3 = std::max(4 * (4 * D + 1) / e, (2 / e) * std::log(arg));
  pc.log_n_bar = std::log(pc.k2) + e * (D + 0.5) * pc.k3;
  pc.n_bar = pc.log_n_bar < 700 ? std::ceil(std::exp(pc.log_n_bar)) : std::numeric_limits<double>::infinity();
  pc.n0 = 2 * pc.n_bar;
  pc.r1 = 6 * in.r / (kPi * kPi);
  pc.r0 = pc.r1 / 2;
  double sum = 0.0;
  for (int i = 1; i <= in.indices; ++i) {
    sum += 1.0 / (static_cast<double>(i) * i);
    pc.r_i.push_back(6 * in.r / (kPi * kPi) * sum);
    pc.d_i.push_back(6 * in.r / (kPi * kPi * (i + 1.0) * (i + 1.0)));
  }
  pc.n_i = n_schedule(pc, pc.k3);
  pc.theoretical_only = !std::isfinite(pc.n0) || (in.truncation_radius > 0 && pc.n0 > in.truncation_radius);
  return pc;
}

std::vector<double> n_schedule(const PipelineConstants& pc, double n1) {
  std::vector<double> n;
  double v = n1;
  for (int i = 1; i <= pc.in.indices; ++i) {
    n.push_back(v);
    v *= pc.ratio;
  }
  return n;
}

MonitorReport main_lemma_monitor(const Horizon& h, const VisualMetric& vm, const FieldState& x, int N,
                                 const Potential& p, const PotentialConstants& pot, const PipelineConstants& pc,
                                 int xi0, double n1) {
  const Graph& g = h.graph();
  const auto bN = ball(g, g.base_vertex(), N);
  const auto ts = transition_sets(p, x, bN, pc.in.rho, pot);
  const auto sched = n_schedule(pc, n1 > 0 ? n1 : pc.k3);
  MonitorReport rep;
  for (int i = 1; i <= pc.in.indices; ++i) {
    const double ni = sched[static_cast<std::size_t>(i - 1)];
    if (!(ni < N)) break;
    MonitorRow row;
    row.i = i;
    row.n_i = ni;
    row.r_i = pc.r_i[static_cast<std::size_t>(i - 1)];
    const auto c = cone(h, ball_at_infinity(h, vm, xi0, row.r_i));
    row.phi = (c & ts.B_l).size() + potential_excess(p, x.view(), c & ts.B_h, p.c1 - pc.in.rho);
    row.log_threshold = std::log(pc.k2) + pc.in.epsilon * (pc.in.D + 0.25) * ni;
    row.met = row.phi > 0 && std::log(row.phi) >= row.log_threshold;
    rep.rows.push_back(row);
  }
  for (std::size_t k = 0; k < rep.rows.size(); ++k) {
    if (!rep.rows[k].met) continue;
    rep.vacuous = false;
    for (std::size_t j = k; j < rep.rows.size(); ++j)
      if (!rep.rows[j].met) rep.implication_holds = false;
    break;
  }
  return rep;
}

ConeInclusion cone_inclusion_check(const Horizon& h, const VisualMetric& vm, int xi0, double r0, double r1,
                                   int n_bar) {
  if (r0 > r1) throw std::invalid_argument("cone inclusion: r0 exceeds r1");
  if (n_bar < 0) throw std::invalid_argument("cone inclusion: negative n");
  const Graph& g = h.graph();
  ConeInclusion rep;
  auto lhs = cone(h, ball_at_infinity(h, vm, xi0, r0)) - ball(g, g.base_vertex(), 2 * n_bar);
  // ball(u, n) is complete in the truncation once u is at least n away from the rim
  const auto near_rim = n_bar > 0 ? rim_zone(g, n_bar - 1) : VertexSet(g.vertex_count());
  rep.excluded_rim = (lhs & near_rim).size();
  lhs -= near_rim;
  const auto rhs = iterate_inn(g, cone(h, ball_at_infinity(h, vm, xi0, r1)), n_bar);
  rep.lhs_size = lhs.size();
  rep.rhs_size = rhs.size();
  rep.vacuous = lhs.empty() && rhs.empty();
  rep.holds = lhs.is_subset_of(rhs);
  return rep;
}

ValuesAtInfinity values_at_infinity_check(const Horizon& h, const VisualMetric& vm, const FieldState& x, int N,
                                          const Potential& p, const PotentialConstants& pot, double rho, int xi1,
                                          double r1, int n_bar) {
  const Graph& g = h.graph();
  const auto bN = ball(g, g.base_vertex(), N);
  const auto bl = transition_sets(p, x, bN, rho, pot).B_l;
  const auto c = cone(h, ball_at_infinity(h, vm, xi1, r1));
  const auto inner = iterate_inn(g, c, n_bar);
  ValuesAtInfinity rep;
  rep.in_cone = (bl & c).size();
  const auto hits = (bl & inner).members();
  rep.inner_hits = static_cast<int>(hits.size());
  if (hits.empty()) return rep;

  // Targets: B_l vertices next to boundary data that sits at c0 outside the cone.
  const double low = p.c1 - 2 * pot.b * rho;
  std::vector<int> target(static_cast<std::size_t>(g.vertex_count()), 0);
  for (Vertex u : bl.members())
    for (Vertex w : g.neighbors(u))
      if (!bN.contains(w) && x[w] < low && !c.contains(w)) target[static_cast<std::size_t>(u)] = 1;

  for (Vertex w0 : hits) {
    // 0-1 BFS inside B_l: cost = cone vertices on the path; find the cheapest route to a target.
    std::vector<int> cost(static_cast<std::size_t>(g.vertex_count()), std::numeric_limits<int>::max());
    std::deque<Vertex> q;
    cost[static_cast<std::size_t>(w0)] = 1;
    q.push_back(w0);
    int best = std::numeric_limits<int>::max();
    while (!q.empty()) {
      const Vertex u = q.front();
      q.pop_front();
      const int cu = cost[static_cast<std::size_t>(u)];
      if (target[static_cast<std::size_t>(u)]) best = std::min(best, cu);
      for (Vertex w : g.neighbors(u)) {
        if (!bl.contains(w)) continue;
        const int step = c.contains(w) ? 1 : 0;
        if (cu + step < cost[static_cast<std::size_t>(w)]) {
          cost[static_cast<std::size_t>(w)] = cu + step;
          if (step) q.push_back(w);
          else q.push_front(w);
        }
      }
    }
    if (best == std::numeric_limits<int>::max() || best < n_bar) rep.paths_ok = false;
  }
  return rep;
}

ProbeRow asymptotics_probe(const Horizon& h, const VisualMetric& vm, const BoundarySplit& s, const FieldState& x,
                           const Potential& p, int xi, int side, double r, int n0_eff, double tol) {
  if (side != 0 && side != 1) throw std::invalid_argument("probe side must be 0 or 1");
  if (s.frontier.contains(xi)) throw std::invalid_argument("probe lies on the frontier");
  if (!s.interior(side).contains(xi)) throw std::invalid_argument("probe is not in the interior of its side");
  const Graph& g = h.graph();
  ProbeRow row;
  row.xi = xi;
  row.side = side;
  row.r = r;
  row.r0 = 3 * r / (kPi * kPi);
  const auto region = cone(h, ball_at_infinity(h, vm, xi, row.r0)) - ball(g, g.base_vertex(), n0_eff);
  if (region.empty()) throw std::invalid_argument("probe cone is empty");
  const double c = side == 0 ? p.c0 : p.c1;
  int within = 0;
  for (Vertex u : region.members()) {
    const double dev = std::abs(x[u] - c);
    row.sup_deviation = std::max(row.sup_deviation, dev);
    if (dev <= tol) ++within;
  }
  row.cone_size = region.size();
  row.fraction_within = static_cast<double>(within) / region.size();
  return row;
}

}  // namespace hypac
