#include "hypac/graph.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <deque>
#include <numbers>
#include <set>
#include <unordered_map>

namespace hypac {

// ---- VertexSet ------------------------------------------------------------

VertexSet VertexSet::from(int universe, std::span<const Vertex> members) {
  VertexSet s(universe);
  for (Vertex u : members) s.insert(u);
  return s;
}

VertexSet VertexSet::all(int universe) {
  VertexSet s(universe);
  std::fill(s.mask_.begin(), s.mask_.end(), std::uint8_t{1});
  s.count_ = universe;
  return s;
}

void VertexSet::insert(Vertex u) {
  if (u < 0 || u >= universe()) throw GraphError("vertex id out of range");
  auto& m = mask_[static_cast<std::size_t>(u)];
  if (!m) {
    m = 1;
    ++count_;
  }
}

void VertexSet::erase(Vertex u) {
  if (u < 0 || u >= universe()) return;
  auto& m = mask_[static_cast<std::size_t>(u)];
  if (m) {
    m = 0;
    --count_;
  }
}

std::vector<Vertex> VertexSet::members() const {
  std::vector<Vertex> out;
  out.reserve(static_cast<std::size_t>(count_));
  for (std::size_t i = 0; i < mask_.size(); ++i)
    if (mask_[i]) out.push_back(static_cast<Vertex>(i));
  return out;
}

void VertexSet::check_compatible(const VertexSet& other) const {
  if (other.universe() != universe()) throw GraphError("vertex sets over different graphs");
}

bool VertexSet::is_subset_of(const VertexSet& other) const {
  check_compatible(other);
  for (std::size_t i = 0; i < mask_.size(); ++i)
    if (mask_[i] && !other.mask_[i]) return false;
  return true;
}

VertexSet& VertexSet::operator|=(const VertexSet& other) {
  check_compatible(other);
  count_ = 0;
  for (std::size_t i = 0; i < mask_.size(); ++i) {
    mask_[i] = static_cast<std::uint8_t>(mask_[i] | other.mask_[i]);
    count_ += mask_[i];
  }
  clipped_ = clipped_ || other.clipped_;
  return *this;
}

VertexSet& VertexSet::operator&=(const VertexSet& other) {
  check_compatible(other);
  count_ = 0;
  for (std::size_t i = 0; i < mask_.size(); ++i) {
    mask_[i] = static_cast<std::uint8_t>(mask_[i] & other.mask_[i]);
    count_ += mask_[i];
  }
  clipped_ = clipped_ || other.clipped_;
  return *this;
}

VertexSet& VertexSet::operator-=(const VertexSet& other) {
  check_compatible(other);
  count_ = 0;
  for (std::size_t i = 0; i < mask_.size(); ++i) {
    if (other.mask_[i]) mask_[i] = 0;
    count_ += mask_[i];
  }
  clipped_ = clipped_ || other.clipped_;
  return *this;
}

// ---- Graph ----------------------------------------------------------------

namespace {

std::atomic<std::uint64_t> next_graph_id{1};

std::vector<int> bfs_depths(const std::vector<std::vector<Vertex>>& adj, Vertex source) {
  std::vector<int> dist(adj.size(), -1);
  std::deque<Vertex> queue{source};
  dist[static_cast<std::size_t>(source)] = 0;
  while (!queue.empty()) {
    Vertex u = queue.front();
    queue.pop_front();
    for (Vertex w : adj[static_cast<std::size_t>(u)]) {
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

}  // namespace

Graph::Graph(std::vector<std::vector<Vertex>> adjacency, Vertex base, int nominal_degree,
             GeneratorSpec spec, std::vector<Point2> layout)
    : layout_(std::move(layout)),
      spec_(std::move(spec)),
      base_(base),
      nominal_degree_(nominal_degree),
      id_(next_graph_id.fetch_add(1)) {
  const auto n = adjacency.size();
  if (n == 0) throw GraphError("graph must have at least one vertex");
  if (base < 0 || static_cast<std::size_t>(base) >= n) throw GraphError("base vertex out of range");
  for (std::size_t u = 0; u < n; ++u) {
    auto& nb = adjacency[u];
    std::sort(nb.begin(), nb.end());
    if (std::adjacent_find(nb.begin(), nb.end()) != nb.end())
      throw GraphError("duplicate edge in adjacency");
    for (Vertex w : nb) {
      if (w < 0 || static_cast<std::size_t>(w) >= n) throw GraphError("neighbor id out of range");
      if (static_cast<std::size_t>(w) == u) throw GraphError("self-loop in adjacency");
    }
  }
  for (std::size_t u = 0; u < n; ++u)
    for (Vertex w : adjacency[u]) {
      const auto& back = adjacency[static_cast<std::size_t>(w)];
      if (!std::binary_search(back.begin(), back.end(), static_cast<Vertex>(u)))
        throw GraphError("adjacency is not symmetric");
    }

  depth_ = bfs_depths(adjacency, base);
  if (std::any_of(depth_.begin(), depth_.end(), [](int d) { return d < 0; }))
    throw GraphError("graph is not connected");

  offsets_.assign(n + 1, 0);
  for (std::size_t u = 0; u < n; ++u) {
    offsets_[u + 1] = offsets_[u] + adjacency[u].size();
    max_degree_ = std::max(max_degree_, static_cast<int>(adjacency[u].size()));
  }
  targets_.reserve(offsets_[n]);
  for (const auto& nb : adjacency) targets_.insert(targets_.end(), nb.begin(), nb.end());

  if (layout_.size() != n) layout_.assign(n, Point2{0.0, 0.0});
}

int DistanceField::max() const {
  return dist.empty() ? 0 : *std::max_element(dist.begin(), dist.end());
}

// ---- constructors ---------------------------------------------------------

namespace {

/// Renumbers vertices in breadth-first discovery order from `base`,
/// visiting neighbors by ascending old id.
Graph relabel_bfs(const std::vector<std::vector<Vertex>>& adj, Vertex base, int nominal_degree,
                  GeneratorSpec spec, const std::vector<Point2>& layout) {
  const auto n = adj.size();
  std::vector<Vertex> new_id(n, -1);
  std::vector<Vertex> order;
  order.reserve(n);
  std::deque<Vertex> queue{base};
  new_id[static_cast<std::size_t>(base)] = 0;
  order.push_back(base);
  while (!queue.empty()) {
    Vertex u = queue.front();
    queue.pop_front();
    std::vector<Vertex> nb = adj[static_cast<std::size_t>(u)];
    std::sort(nb.begin(), nb.end());
    for (Vertex w : nb) {
      if (new_id[static_cast<std::size_t>(w)] < 0) {
        new_id[static_cast<std::size_t>(w)] = static_cast<Vertex>(order.size());
        order.push_back(w);
        queue.push_back(w);
      }
    }
  }
  if (order.size() != n) throw GraphError("graph is not connected");
  std::vector<std::vector<Vertex>> out(n);
  std::vector<Point2> pts(n, Point2{0.0, 0.0});
  for (std::size_t old = 0; old < n; ++old) {
    auto nu = static_cast<std::size_t>(new_id[old]);
    for (Vertex w : adj[old]) out[nu].push_back(new_id[static_cast<std::size_t>(w)]);
    if (!layout.empty()) pts[nu] = layout[old];
  }
  int depth = 0;
  for (int d : bfs_depths(out, 0)) depth = std::max(depth, d);
  spec.r_max = depth;
  return Graph(std::move(out), 0, nominal_degree, std::move(spec), std::move(pts));
}

void add_edge(std::vector<std::vector<Vertex>>& adj, Vertex a, Vertex b) {
  auto& na = adj[static_cast<std::size_t>(a)];
  if (std::find(na.begin(), na.end(), b) != na.end()) return;
  na.push_back(b);
  adj[static_cast<std::size_t>(b)].push_back(a);
}

using Complex = std::complex<double>;

/// Isometry of the Poincare disk moving the origin to `a`.
Complex mobius_to(Complex a, Complex z) { return (z + a) / (1.0 + std::conj(a) * z); }
Complex mobius_from(Complex a, Complex z) { return (z - a) / (1.0 - std::conj(a) * z); }

/// Spatial hash over disk points; points closer than `tol` are identified.
class PointIndex {
 public:
  explicit PointIndex(double cell) : cell_(cell) {}

  int find(Complex z, double tol) const {
    auto [kx, ky] = key(z);
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = cells_.find(pack(kx + dx, ky + dy));
        if (it == cells_.end()) continue;
        for (auto [id, p] : it->second)
          if (std::abs(p - z) < tol) return id;
      }
    return -1;
  }

  void add(int id, Complex z) {
    auto [kx, ky] = key(z);
    cells_[pack(kx, ky)].emplace_back(id, z);
  }

 private:
  std::pair<long long, long long> key(Complex z) const {
    return {static_cast<long long>(std::floor(z.real() / cell_)),
            static_cast<long long>(std::floor(z.imag() / cell_))};
  }
  static std::uint64_t pack(long long x, long long y) {
    return (static_cast<std::uint64_t>(x) << 32) ^ (static_cast<std::uint64_t>(y) & 0xffffffffULL);
  }

  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::pair<int, Complex>>> cells_;
};

}  // namespace

Graph build_tree(int degree, int radius) {
  if (degree < 3) throw GraphError("tree degree must be >= 3 (degree 2 is the line; use build_control_line)");
  if (radius < 0) throw GraphError("tree radius must be >= 0");
  std::vector<std::vector<Vertex>> adj(1);
  std::vector<int> depth{0};
  std::vector<std::pair<double, double>> sector{{0.0, 2.0 * std::numbers::pi}};
  std::vector<Point2> layout{{0.0, 0.0}};
  for (std::size_t u = 0; u < adj.size(); ++u) {
    if (depth[u] >= radius) continue;
    const int children = (u == 0) ? degree : degree - 1;
    const double width = (sector[u].second - sector[u].first) / children;
    for (int c = 0; c < children; ++c) {
      auto w = static_cast<Vertex>(adj.size());
      adj.emplace_back();
      add_edge(adj, static_cast<Vertex>(u), w);
      depth.push_back(depth[u] + 1);
      const double lo = sector[u].first + c * width;
      sector.emplace_back(lo, lo + width);
      const double angle = lo + 0.5 * width;
      const double rad = std::tanh(0.5 * (depth[u] + 1));
      layout.push_back({rad * std::cos(angle), rad * std::sin(angle)});
    }
  }
  GeneratorSpec spec{"tree", {degree}, radius};
  return Graph(std::move(adj), 0, degree, std::move(spec), std::move(layout));
}

Graph build_tiling(int p, int q, int radius) {
  if (p < 3 || q < 3) throw GraphError("tiling needs p, q >= 3");
  // 1/p + 1/q < 1/2  <=>  2(p + q) < p q
  if (2 * (p + q) >= p * q)
    throw GraphError("{" + std::to_string(p) + "," + std::to_string(q) +
                     "} is not a hyperbolic tessellation (needs 1/p + 1/q < 1/2)");
  if (radius < 0) throw GraphError("tiling radius must be >= 0");

  const double pi = std::numbers::pi;
  const double half_edge = std::acosh(std::cos(pi / p) / std::sin(pi / q));
  const double first_radius = std::tanh(half_edge);  // Poincare radius of a neighbor of 0

  std::vector<Complex> pos{Complex(0.0, 0.0)};
  std::vector<int> depth{0};
  std::vector<Vertex> anchor{-1};  // some already-known neighbor
  std::vector<std::vector<Vertex>> adj(1);
  PointIndex index(1e-8);
  index.add(0, pos[0]);
  constexpr double tol = 1e-9;

  auto neighbor_positions = [&](Vertex u) {
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(q));
    const auto uu = static_cast<std::size_t>(u);
    if (anchor[uu] < 0) {
      for (int k = 0; k < q; ++k) out.push_back(std::polar(first_radius, 2.0 * pi * k / q));
      return out;
    }
    const Complex a = pos[uu];
    const Complex local = mobius_from(a, pos[static_cast<std::size_t>(anchor[uu])]);
    for (int k = 0; k < q; ++k) out.push_back(mobius_to(a, local * std::polar(1.0, 2.0 * pi * k / q)));
    return out;
  };

  for (std::size_t u = 0; u < pos.size(); ++u) {
    const bool expand = depth[u] < radius;
    for (Complex z : neighbor_positions(static_cast<Vertex>(u))) {
      int w = index.find(z, tol);
      if (w < 0) {
        if (!expand) continue;
        w = static_cast<int>(pos.size());
        pos.push_back(z);
        depth.push_back(depth[u] + 1);
        anchor.push_back(static_cast<Vertex>(u));
        adj.emplace_back();
        index.add(w, z);
      }
      if (w != static_cast<int>(u)) add_edge(adj, static_cast<Vertex>(u), w);
    }
  }

  std::vector<Point2> layout;
  layout.reserve(pos.size());
  for (Complex z : pos) layout.push_back({z.real(), z.imag()});
  return relabel_bfs(adj, 0, q, GeneratorSpec{"tiling", {p, q}, radius}, layout);
}

Graph build_control_line(int extent) {
  if (extent < 1) throw GraphError("line extent must be >= 1");
  const int n = extent + 1;
  const int center = extent / 2;
  std::vector<std::vector<Vertex>> adj(static_cast<std::size_t>(n));
  std::vector<Point2> layout(static_cast<std::size_t>(n));
  for (int i = 0; i + 1 < n; ++i) add_edge(adj, i, i + 1);
  for (int i = 0; i < n; ++i) {
    const int k = i - center;
    layout[static_cast<std::size_t>(i)] = {std::tanh(0.5 * std::abs(k)) * (k < 0 ? -1.0 : 1.0), 0.0};
  }
  return relabel_bfs(adj, center, 2, GeneratorSpec{"line", {extent}, 0}, layout);
}

Graph build_control_grid(int side) {
  if (side < 1) throw GraphError("grid side must be >= 1");
  const int n = side * side;
  const int c = (side - 1) / 2;
  std::vector<std::vector<Vertex>> adj(static_cast<std::size_t>(n));
  std::vector<Point2> layout(static_cast<std::size_t>(n));
  for (int r = 0; r < side; ++r)
    for (int col = 0; col < side; ++col) {
      const int id = r * side + col;
      if (col + 1 < side) add_edge(adj, id, id + 1);
      if (r + 1 < side) add_edge(adj, id, id + side);
      layout[static_cast<std::size_t>(id)] = {0.9 * (col - c) / side, 0.9 * (r - c) / side};
    }
  return relabel_bfs(adj, c * side + c, 4, GeneratorSpec{"grid", {side}, 0}, layout);
}

Graph build_from_spec(const GeneratorSpec& spec) {
  auto need = [&](std::size_t k) {
    if (spec.params.size() != k)
      throw GraphError("family '" + spec.family + "' expects " + std::to_string(k) + " parameter(s)");
  };
  if (spec.family == "tree") {
    need(1);
    return build_tree(spec.params[0], spec.r_max);
  }
  if (spec.family == "tiling") {
    need(2);
    return build_tiling(spec.params[0], spec.params[1], spec.r_max);
  }
  if (spec.family == "line") {
    need(1);
    return build_control_line(spec.params[0]);
  }
  if (spec.family == "grid") {
    need(1);
    return build_control_grid(spec.params[0]);
  }
  throw GraphError("unknown graph family '" + spec.family + "'");
}

// ---- metric primitives ----------------------------------------------------

DistanceField distances_from(const Graph& g, Vertex source) {
  if (!g.valid(source)) throw GraphError("source vertex out of range");
  DistanceField f{source, std::vector<int>(static_cast<std::size_t>(g.vertex_count()), -1)};
  std::vector<Vertex> queue;
  queue.reserve(static_cast<std::size_t>(g.vertex_count()));
  queue.push_back(source);
  f.dist[static_cast<std::size_t>(source)] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Vertex u = queue[head];
    const int du = f.dist[static_cast<std::size_t>(u)];
    for (Vertex w : g.neighbors(u)) {
      auto& dw = f.dist[static_cast<std::size_t>(w)];
      if (dw < 0) {
        dw = du + 1;
        queue.push_back(w);
      }
    }
  }
  return f;
}

std::vector<int> distances_to_set(const Graph& g, const VertexSet& sources, int limit) {
  std::vector<int> dist(static_cast<std::size_t>(g.vertex_count()), -1);
  std::vector<Vertex> queue = sources.members();
  for (Vertex u : queue) dist[static_cast<std::size_t>(u)] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Vertex u = queue[head];
    const int du = dist[static_cast<std::size_t>(u)];
    if (limit >= 0 && du >= limit) continue;
    for (Vertex w : g.neighbors(u)) {
      auto& dw = dist[static_cast<std::size_t>(w)];
      if (dw < 0) {
        dw = du + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

namespace {

VertexSet layer_set(const Graph& g, Vertex center, int n, bool whole_ball) {
  if (n < 0) throw GraphError("radius must be >= 0");
  const auto f = distances_from(g, center);
  VertexSet s(g.vertex_count());
  bool clipped = false;
  for (Vertex u = 0; u < g.vertex_count(); ++u) {
    const int d = f.dist[static_cast<std::size_t>(u)];
    if (d == n || (whole_ball && d < n)) s.insert(u);
    if (d < n && g.is_rim(u)) clipped = true;
  }
  s.set_clipped(clipped);
  return s;
}

}  // namespace

VertexSet ball(const Graph& g, Vertex center, int n) { return layer_set(g, center, n, true); }
VertexSet sphere(const Graph& g, Vertex center, int n) { return layer_set(g, center, n, false); }

// ---- boundary operators ---------------------------------------------------

VertexSet outer_set(const Graph& g, const VertexSet& b) {
  VertexSet out = b;
  bool clipped = b.clipped();
  for (Vertex u : b.members()) {
    if (g.is_rim(u)) clipped = true;
    for (Vertex w : g.neighbors(u)) out.insert(w);
  }
  out.set_clipped(clipped);
  return out;
}

VertexSet inner_set(const Graph& g, const VertexSet& b) {
  VertexSet in(g.vertex_count());
  bool clipped = b.clipped();
  for (Vertex u : b.members()) {
    bool inside = true;
    for (Vertex w : g.neighbors(u))
      if (!b.contains(w)) {
        inside = false;
        break;
      }
    if (inside) {
      in.insert(u);
      if (g.is_rim(u)) clipped = true;
    }
  }
  in.set_clipped(clipped);
  return in;
}

VertexSet boundary_out(const Graph& g, const VertexSet& b) { return outer_set(g, b) - b; }
VertexSet boundary_inn(const Graph& g, const VertexSet& b) { return b - inner_set(g, b); }
VertexSet boundary_full(const Graph& g, const VertexSet& b) {
  return boundary_out(g, b) | boundary_inn(g, b);
}

VertexSet iterate_out(const Graph& g, const VertexSet& b, int n) {
  VertexSet s = b;
  for (int i = 0; i < n; ++i) s = outer_set(g, s);
  return s;
}

VertexSet iterate_inn(const Graph& g, const VertexSet& b, int n) {
  VertexSet s = b;
  for (int i = 0; i < n; ++i) s = inner_set(g, s);
  return s;
}

std::vector<VertexSet> connected_components(const Graph& g, const VertexSet& d) {
  std::vector<VertexSet> comps;
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(g.vertex_count()), 0);
  for (Vertex s : d.members()) {
    if (seen[static_cast<std::size_t>(s)]) continue;
    VertexSet comp(g.vertex_count());
    std::vector<Vertex> stack{s};
    seen[static_cast<std::size_t>(s)] = 1;
    while (!stack.empty()) {
      Vertex u = stack.back();
      stack.pop_back();
      comp.insert(u);
      for (Vertex w : g.neighbors(u)) {
        if (d.contains(w) && !seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          stack.push_back(w);
        }
      }
    }
    comps.push_back(std::move(comp));
  }
  return comps;
}

VertexSet rim_zone(const Graph& g, int width) {
  VertexSet rim(g.vertex_count());
  for (Vertex u = 0; u < g.vertex_count(); ++u)
    if (g.is_rim(u)) rim.insert(u);
  const auto dist = distances_to_set(g, rim, width);
  VertexSet zone(g.vertex_count());
  for (Vertex u = 0; u < g.vertex_count(); ++u)
    if (dist[static_cast<std::size_t>(u)] >= 0) zone.insert(u);
  return zone;
}

}  // namespace hypac
