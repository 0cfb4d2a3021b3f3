#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypac/graph.hpp"

namespace hypac {

struct PotentialError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using RealFn = std::function<double(double)>;

/// Double-well potential with consecutive non-degenerate absolute minima at
/// c0 < c1, V(c0) = V(c1) = 0.
struct Potential {
  double c0 = -1.0;
  double c1 = 1.0;
  RealFn V;
  RealFn dV;
  RealFn ddV;
  std::string description;

  double width() const { return c1 - c0; }
};

/// V(s) = (1 - t^2)^2 with t = (2s - c0 - c1) / (c1 - c0).
Potential quartic(double c0, double c1);
/// V(s) = 1 - cos(2 pi (s - c0) / (c1 - c0)).
Potential cosine_well(double c0, double c1);
/// User-supplied triple, validated on [c0, c1] at resolution h (0 = default).
Potential custom_potential(double c0, double c1, RealFn V, RealFn dV, RealFn ddV, std::string description,
                           double h = 0.0);

/// Throws PotentialError unless V(c0) = V(c1) = 0, V'' > 0 at both minima and
/// V > 0 at every interior scan point.
void validate_potential(const Potential& p, double h = 0.0);

double default_resolution(const Potential& p);

struct PotentialConstants {
  double rho0 = 0.0;
  double b = 1.0;
  double m1 = 0.0;
  double resolution = 0.0;
  /// min over [c0 + 2b rho, c1 - 2b rho] of V - max{V(c0 + b rho), V(c1 - b rho)}.
  RealFn beta;
  /// First s > 0 with V(c0 + s) = V(c1 - 2b rho), by bisection.
  RealFn rho_tilde;
  std::vector<double> tested_rhos;
};

/// Scan search: b runs over powers of 2 from 1, and for each b rho0 starts at
/// (c1 - c0) / (4b) and is halved until parts (a)-(d) hold on the scan for
/// rho0 2^{-k}, k = 0..6. m1 is just below the largest slope certificate.
/// Throws PotentialError when no rho0 above 16h works.
PotentialConstants derive_constants(const Potential& p, double h = 0.0);

struct ConstantsCheck {
  bool part_a = true;
  bool part_b = true;
  bool part_c = true;
  bool part_d = true;
  bool width_ok = true;     // 4 b rho0 <= c1 - c0
  bool k1_positive = true;  // c1 - c0 - 4 b rho > rho for every tested rho
  double m1_slack = 0.0; // min of m1 (y - c1) - V'(y) over the scan (>= 0 when certified)
  bool ok() const { return part_a && part_b && part_c && part_d && width_ok && k1_positive && m1_slack >= -1e-12; }
};

/// Re-checks all four parts at resolution h for rho0 2^{-k}, k = 0..6.
ConstantsCheck verify_constants(const Potential& p, const PotentialConstants& pc, double h);

/// P_D(x, c) = sum over D of V(x_g) - V(c).
double potential_excess(const Potential& p, std::span<const double> x, const VertexSet& d, double c);

}  // namespace hypac
