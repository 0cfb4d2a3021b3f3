#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypac/graph.hpp"
#include "hypac/potential.hpp"

namespace hypac {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FieldState {
  std::vector<double> values;
  std::uint64_t graph_id = 0;

  double& operator[](Vertex u) { return values[static_cast<std::size_t>(u)]; }
  double operator[](Vertex u) const { return values[static_cast<std::size_t>(u)]; }
  std::span<const double> view() const { return values; }
  int size() const { return static_cast<int>(values.size()); }
};

FieldState constant_field(const Graph& g, double c);

/// Sum over neighbors of x_w - x_u. Throws SolverError on rim vertices.
double laplacian(const Graph& g, std::span<const double> x, Vertex u);

/// W_B(x) = sum over g in B of (1/4 sum over neighbors (x_w - x_g)^2 + V(x_g)).
/// Throws SolverError if B contains a rim vertex.
double energy(const Graph& g, const Potential& p, std::span<const double> x, const VertexSet& b);

/// sup over B of |Laplacian x - V'(x_g)| (0 for empty B).
double el_residual(const Graph& g, const Potential& p, std::span<const double> x, const VertexSet& b);

struct SolverConfig {
  double residual_tol = 1e-10;
  int max_sweeps = 100000;
  /// Any of "boundary-extension" (the supplied values inside B), "c0-fill", "c1-fill".
  std::vector<std::string> multistart{"boundary-extension", "c0-fill", "c1-fill"};
  double rho = 0.0;
  std::uint64_t seed = 1;
  std::string tie_break = "smallest";
  /// Fail when boundary data leaves [c0, c1].
  bool require_trapped = false;
  /// Clamp updates to [c0, c1] when the boundary data allows it.
  bool clamp = true;
  int samples = 257;
  /// Opt-in parallel Jacobi sweeps (different fixed-point path; energy may rise).
  bool jacobi = false;
  int workers = 0;
};

struct SolveResult {
  FieldState x;
  bool converged = false;
  int sweeps = 0;
  double residual = 0.0;
  double energy = 0.0;               // W over the outer set of B
  std::vector<double> energy_trace;  // per sweep, winning start
  bool monotone = true;              // energy never rose by more than 1e-12 relative
  bool clamped = false;
  std::string winner;
  std::vector<std::pair<std::string, double>> start_energies;
};

/// Minimiser on B with x = f outside B. f must have a value at every vertex;
/// values inside B seed the boundary-extension start. B^out must avoid the rim.
SolveResult solve_dirichlet(const Graph& g, const Potential& p, const VertexSet& b, const FieldState& f,
                            const SolverConfig& cfg = {});

/// Global minimiser over [lo, hi] of (deg/2) t^2 - s t + V(t). Minima of
/// distinct basins within 1e-12 of each other resolve to the smaller t.
/// `current` is kept when no candidate beats it.
double minimize_vertex(const Potential& p, int deg, double s, double lo, double hi, double current, int samples);

struct MinimalityReport {
  int trials = 0;
  double min_gap = 0.0;
};

/// Random perturbations supported in B with amplitude in [-scale, scale]
/// (or [0, scale] when nonnegative); reports the smallest energy gap.
MinimalityReport verify_local_minimality(const Graph& g, const Potential& p, const FieldState& x, const VertexSet& b,
                                         int trials, double scale, std::uint64_t seed = 1, bool nonnegative = false);

struct MinMax {
  double lhs = 0.0;  // W(x) + W(y)
  double rhs = 0.0;  // W(max) + W(min)
  bool holds() const { return lhs >= rhs - 1e-12 * std::max(1.0, std::abs(lhs)); }
};

MinMax minmax_check(const Graph& g, const Potential& p, const FieldState& x, const FieldState& y, const VertexSet& b);

struct ComparisonReport {
  bool ordered = true;    // x_low <= x_high + 1e-9 on B
  bool strict = false;    // x_low < x_high everywhere on B
  bool identical = false; // equal within 1e-9 on B
  bool mixed = false;     // neither strict nor identical
  double max_violation = 0.0;
  int reseeds = 0;        // min/max restarts needed to untangle crossing solutions
  SolveResult low;
  SolveResult high;
};

ComparisonReport comparison_check(const Graph& g, const Potential& p, const VertexSet& b, const FieldState& f_low,
                                  const FieldState& f_high, const SolverConfig& cfg = {});

/// c0 - 1e-12 <= x <= c1 + 1e-12 on the twice-expanded outer set of B.
bool trapping_check(const Graph& g, const Potential& p, const FieldState& x, const VertexSet& b);

struct TransitionSets {
  VertexSet B_l;  // x in [c0, c1 - 2b rho)
  VertexSet B_h;  // x in [c1 - 2b rho, c1 - rho)
};

TransitionSets transition_sets(const Potential& p, const FieldState& x, const VertexSet& b, double rho,
                               const PotentialConstants& pc);

/// k0 = S max{1, k2~} / k1~ with k1~ = min{1, beta, ((c1 - c0 - 4b rho)^2 - rho^2)/4}
/// and k2~ = max{S (c1 - c0)^2, 2S/m1}; S is the maximum degree.
double ts_k0(const Graph& g, const Potential& p, double rho, const PotentialConstants& pc);

struct TsCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double k0 = 0.0;
  double k0_needed = 0.0;  // smallest k0 making the inequality hold
  bool holds = true;
};

TsCheck ts_inequality_check(const Graph& g, const Potential& p, const FieldState& x, const VertexSet& b,
                            const VertexSet& d, double rho, const PotentialConstants& pc);

struct ComponentCheck {
  bool holds = true;
  int components = 0;
  int failing = 0;
};

/// Every connected component of B_l has a vertex adjacent to the outside of B.
ComponentCheck component_boundary_check(const Graph& g, const Potential& p, const FieldState& x, const VertexSet& b,
                                        double rho, const PotentialConstants& pc);

}  // namespace hypac
