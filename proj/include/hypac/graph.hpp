#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypac {

using Vertex = int;
using Point2 = std::array<double, 2>;

/// Raised for invalid arguments to graph constructors and primitives.
class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Descriptive record of how a truncated graph was produced.
struct GeneratorSpec {
  std::string family;        // "tree", "tiling", "line", "grid" or "imported"
  std::vector<int> params;   // family parameters, e.g. {degree} or {p, q}
  int r_max = 0;             // truncation radius around the base vertex
};

/// Membership set over the vertex ids of one graph.
///
/// `clipped()` marks results that may be missing vertices which would be
/// present in the untruncated graph.
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(int universe) : mask_(static_cast<std::size_t>(universe), 0) {}

  static VertexSet from(int universe, std::span<const Vertex> members);
  static VertexSet all(int universe);

  int universe() const { return static_cast<int>(mask_.size()); }
  int size() const { return count_; }
  bool empty() const { return count_ == 0; }

  bool contains(Vertex u) const {
    return u >= 0 && u < universe() && mask_[static_cast<std::size_t>(u)] != 0;
  }
  void insert(Vertex u);
  void erase(Vertex u);

  std::vector<Vertex> members() const;

  bool clipped() const { return clipped_; }
  void set_clipped(bool c) { clipped_ = c; }

  bool is_subset_of(const VertexSet& other) const;

  VertexSet& operator|=(const VertexSet& other);
  VertexSet& operator&=(const VertexSet& other);
  VertexSet& operator-=(const VertexSet& other);

  friend VertexSet operator|(VertexSet a, const VertexSet& b) { return a |= b; }
  friend VertexSet operator&(VertexSet a, const VertexSet& b) { return a &= b; }
  friend VertexSet operator-(VertexSet a, const VertexSet& b) { return a -= b; }

  /// Equality compares membership only.
  friend bool operator==(const VertexSet& a, const VertexSet& b) {
    return a.mask_ == b.mask_;
  }

 private:
  void check_compatible(const VertexSet& other) const;

  std::vector<std::uint8_t> mask_;
  int count_ = 0;
  bool clipped_ = false;
};

/// Finite truncation of an infinite, locally finite graph around a base
/// vertex. Immutable after construction; vertex ids follow breadth-first
/// discovery order from the base vertex.
class Graph {
 public:
  /// `nominal_degree` is the vertex degree of the untruncated graph (for
  /// the families built here it is constant); vertices below it sit on the
  /// truncation rim.
  Graph(std::vector<std::vector<Vertex>> adjacency, Vertex base, int nominal_degree,
        GeneratorSpec spec, std::vector<Point2> layout = {});

  int vertex_count() const { return static_cast<int>(depth_.size()); }
  std::size_t edge_count() const { return targets_.size() / 2; }

  std::span<const Vertex> neighbors(Vertex u) const {
    return {targets_.data() + offsets_[static_cast<std::size_t>(u)],
            targets_.data() + offsets_[static_cast<std::size_t>(u) + 1]};
  }
  int degree(Vertex u) const {
    return static_cast<int>(offsets_[static_cast<std::size_t>(u) + 1] -
                            offsets_[static_cast<std::size_t>(u)]);
  }

  Vertex base_vertex() const { return base_; }
  int max_degree() const { return max_degree_; }
  int nominal_degree() const { return nominal_degree_; }
  int r_max() const { return spec_.r_max; }
  const GeneratorSpec& generator() const { return spec_; }

  /// Distance to the base vertex, |u|.
  int depth(Vertex u) const { return depth_[static_cast<std::size_t>(u)]; }
  std::span<const int> depths() const { return depth_; }

  /// True when some neighbor of u in the untruncated graph is missing.
  bool is_rim(Vertex u) const { return degree(u) < nominal_degree_; }

  bool valid(Vertex u) const { return u >= 0 && u < vertex_count(); }

  /// Poincare-disk style layout, one point per vertex.
  const std::vector<Point2>& layout() const { return layout_; }

  /// Process-unique identity used to bind field values to a graph.
  std::uint64_t id() const { return id_; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> targets_;
  std::vector<int> depth_;
  std::vector<Point2> layout_;
  GeneratorSpec spec_;
  Vertex base_ = 0;
  int max_degree_ = 0;
  int nominal_degree_ = 0;
  std::uint64_t id_ = 0;
};

/// Breadth-first distances from a single source.
struct DistanceField {
  Vertex source = 0;
  std::vector<int> dist;

  int max() const;
};

// ---- constructors ---------------------------------------------------------

/// Rooted regular tree (every internal vertex has `degree` neighbors)
/// truncated at `radius`.
Graph build_tree(int degree, int radius);

/// Vertex graph of the hyperbolic {p,q} tessellation truncated at
/// combinatorial `radius` from a base vertex.
Graph build_tiling(int p, int q, int radius);

/// Path segment with `extent` edges, base vertex at the center.
Graph build_control_line(int extent);

/// Square grid of side `side`, base vertex at the center.
Graph build_control_grid(int side);

/// Dispatch on a generator record (family + params + r_max).
Graph build_from_spec(const GeneratorSpec& spec);

// ---- metric primitives ----------------------------------------------------

DistanceField distances_from(const Graph& g, Vertex source);

/// Multi-source distances to a set, explored up to `limit` (negative: no
/// limit). Unreached vertices carry -1.
std::vector<int> distances_to_set(const Graph& g, const VertexSet& sources, int limit = -1);

VertexSet ball(const Graph& g, Vertex center, int n);
VertexSet sphere(const Graph& g, Vertex center, int n);

// ---- boundary operators ---------------------------------------------------

VertexSet outer_set(const Graph& g, const VertexSet& b);
VertexSet inner_set(const Graph& g, const VertexSet& b);
VertexSet boundary_out(const Graph& g, const VertexSet& b);
VertexSet boundary_inn(const Graph& g, const VertexSet& b);
VertexSet boundary_full(const Graph& g, const VertexSet& b);
VertexSet iterate_out(const Graph& g, const VertexSet& b, int n);
VertexSet iterate_inn(const Graph& g, const VertexSet& b, int n);

/// Connected components of the subgraph induced by `d`, ordered by their
/// smallest vertex id.
std::vector<VertexSet> connected_components(const Graph& g, const VertexSet& d);

/// Vertices within distance 1 of the truncation rim.
VertexSet rim_zone(const Graph& g, int width = 1);

}  // namespace hypac
