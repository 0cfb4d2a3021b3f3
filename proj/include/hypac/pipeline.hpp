#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hypac/boundary.hpp"
#include "hypac/variational.hpp"

namespace hypac {

struct SplitSpec {
  /// "half": D1 = proxies with layout angle in [angle, angle + pi).
  /// "ball": D1 = closed visual ball of `radius` around proxy `center`.
  /// "subtree": D1 = shadow of vertex `center`.
  /// "explicit": D1 = the listed proxies.
  std::string kind = "half";
  double angle = 0.0;
  int center = -1;
  double radius = 0.0;
  std::vector<int> members;
  std::string describe() const;
};

struct BoundarySplit {
  ProxySet D0;
  ProxySet D1;
  ProxySet frontier;  // proxies of either side indistinguishable from the other at resolution R - 2 delta
  double r_min = 0.0;
  std::string spec;

  ProxySet interior(int side) const { return (side == 0 ? D0 : D1) - frontier; }
};

/// Builds and validates a split. Frontier proxies belong to both sides.
/// Throws std::invalid_argument when a side holds no visual ball of radius
/// r_min = C1 e^{-eps (R - 1)} inside its interior.
BoundarySplit make_split(const Horizon& h, const VisualMetric& vm, const ShadowConstants& sc, const SplitSpec& spec);

/// D0 and D1 exchanged.
BoundarySplit swap_split(const BoundarySplit& s);

/// For each proxy of interior(side), the visual distance to the nearest proxy
/// outside D_side (infinity when the other side is empty).
std::vector<std::pair<int, double>> interior_depths(const Horizon& h, const VisualMetric& vm, const BoundarySplit& s,
                                                    int side);

/// The interior proxy of `side` farthest from the other side (smallest index on ties).
std::pair<int, double> deepest_probe(const Horizon& h, const VisualMetric& vm, const BoundarySplit& s, int side);

/// c1 on the cone over interior(D1), c0 elsewhere.
FieldState tilde_x(const Horizon& h, const BoundarySplit& s, const Potential& p);

/// V mirrored about (c0 + c1) / 2 so that the wells trade places.
Potential mirror_potential(const Potential& p);

struct ExhaustionReport {
  std::vector<int> N;
  std::vector<SolveResult> solves;
  int window = 0;                    // radius of the comparison window
  std::vector<double> window_deltas; // sup over the window of |x^{N_{k+1}} - x^{N_k}|
  bool non_increasing = true;
  bool hard_fail = false;            // some delta ratio above 2
};

/// Solves on B_N for every N with boundary data tilde_x. Needs N + 1 below R_max.
ExhaustionReport exhaustion_solve(const Graph& g, const FieldState& data, const Potential& p,
                                  const std::vector<int>& N_list, const SolverConfig& cfg, int workers = 0);

struct PipelineInputs {
  double epsilon = 0.0;
  double lambda = 1.0;
  double C1 = 1.0;
  double C2 = 1.0;
  double D = 0.0;
  double C_D = 1.0;
  double C0 = 1.0;
  double k0 = 1.0;
  double r = 0.0;
  double rho = 0.0;
  int indices = 12;
  int truncation_radius = 0;
};

struct PipelineConstants {
  PipelineInputs in;
  std::vector<double> r_i;  // i = 1..indices
  std::vector<double> d_i;
  std::vector<double> n_i;  // n_1 = k3
  double ratio = 0.0;       // (D + 1/2) / (D + 1/4)
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double log_n_bar = 0.0;   // natural log of n_bar
  double n_bar = 0.0;       // infinity when it does not fit a double
  double n0 = 0.0;          // 2 n_bar
  double r0 = 0.0;
  double r1 = 0.0;
  bool theoretical_only = false;  // n0 beyond the truncation radius

  double t_n(int n) const;
};

PipelineConstants derive_pipeline_constants(const PipelineInputs& in);

/// n_i for a feasible starting value n_1 (the paper uses n_1 = k3).
std::vector<double> n_schedule(const PipelineConstants& pc, double n1);

struct MonitorRow {
  int i = 0;
  double n_i = 0.0;
  double r_i = 0.0;
  double phi = 0.0;        // #(cone cap B_l) + P_{cone cap B_h}(x, c1 - rho)
  double log_threshold = 0.0;  // ln(k2) + eps (D + 1/4) n_i
  bool met = false;
};

struct MonitorReport {
  std::vector<MonitorRow> rows;
  bool vacuous = true;          // threshold never met
  bool implication_holds = true;
};

/// Evaluates the main-lemma quantity on cones over B_{r_i}(xi0) for every n_i < N.
MonitorReport main_lemma_monitor(const Horizon& h, const VisualMetric& vm, const FieldState& x, int N,
                                 const Potential& p, const PotentialConstants& pot, const PipelineConstants& pc,
                                 int xi0, double n1);

struct ConeInclusion {
  bool holds = true;
  bool vacuous = false;
  int lhs_size = 0;
  int rhs_size = 0;
  int excluded_rim = 0;
};

/// cone(B_{r0}(xi0)) minus B_{2 n} inside the n-fold inner set of cone(B_{r1}(xi0)),
/// ignoring vertices closer than n to the truncation rim.
ConeInclusion cone_inclusion_check(const Horizon& h, const VisualMetric& vm, int xi0, double r0, double r1, int n_bar);

struct ValuesAtInfinity {
  int in_cone = 0;           // #(B_l cap cone(B_{r1}))
  int inner_hits = 0;        // #(B_l cap n-fold inner set of the cone)
  bool paths_ok = true;      // each inner hit reaches c0 data through >= n cone vertices of B_l
};

ValuesAtInfinity values_at_infinity_check(const Horizon& h, const VisualMetric& vm, const FieldState& x, int N,
                                          const Potential& p, const PotentialConstants& pot, double rho, int xi1,
                                          double r1, int n_bar);

struct ProbeRow {
  int xi = -1;
  int side = 0;
  double r = 0.0;
  double r0 = 0.0;
  int cone_size = 0;
  double sup_deviation = 0.0;
  double fraction_within = 0.0;
};

/// sup |x - c_side| over cone(B_{r0}(xi)) minus B(v, n0_eff), r0 = 3r / pi^2.
ProbeRow asymptotics_probe(const Horizon& h, const VisualMetric& vm, const BoundarySplit& s, const FieldState& x,
                           const Potential& p, int xi, int side, double r, int n0_eff, double tol);

}  // namespace hypac
