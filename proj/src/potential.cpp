#include "hypac/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hypac {

namespace {

/// Calls f on n + 1 evenly spaced points of [a, b] with spacing at most h.
template <class F>
void scan(double a, double b, double h, F&& f) {
  if (b < a) return;
  const auto n = static_cast<long long>(std::ceil((b - a) / h));
  if (n <= 0) {
    f(a);
    return;
  }
  for (long long k = 0; k <= n; ++k) f(a + (b - a) * static_cast<double>(k) / static_cast<double>(n));
}

double beta_at(const Potential& p, double b, double rho, double h) {
  const double lo = p.c0 + 2 * b * rho, hi = p.c1 - 2 * b * rho;
  if (hi < lo) return std::numeric_limits<double>::quiet_NaN();
  const double ref = std::max(p.V(p.c0 + b * rho), p.V(p.c1 - b * rho));
  double m = std::numeric_limits<double>::infinity();
  scan(lo, hi, h, [&](double y) { m = std::min(m, p.V(y) - ref); });
  return m;
}

double rho_tilde_at(const Potential& p, double b, double rho, double h) {
  const double target = p.V(p.c1 - 2 * b * rho);
  const double span = p.width() - 2 * b * rho;
  double prev = 0.0;
  double found = std::numeric_limits<double>::quiet_NaN();
  bool first = true;
  scan(0.0, span, h, [&](double s) {
    if (!std::isnan(found)) return;
    if (!first && p.V(p.c0 + s) >= target) found = s;
    if (std::isnan(found)) prev = s;
    first = false;
  });
  if (std::isnan(found)) return found;
  double lo = prev, hi = found;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (p.V(p.c0 + mid) >= target ? hi : lo) = mid;
  }
  return hi;
}

double slope_certificate(const Potential& p, double b, double rho0, double h) {
  double m = std::numeric_limits<double>::infinity();
  scan(p.c1 - 2 * b * rho0, p.c1, h, [&](double y) {
    if (y < p.c1) m = std::min(m, p.dV(y) / (y - p.c1));
  });
  return m;
}

std::vector<double> rho_ladder(double rho0) {
  std::vector<double> r;
  for (int k = 0; k <= 6; ++k) r.push_back(std::ldexp(rho0, -k));
  return r;
}

ConstantsCheck check_parts(const Potential& p, double b, double rho0, double h) {
  ConstantsCheck c;
  const double w = p.width();
  const double tol = 1e-13 * std::max(1.0, p.V(0.5 * (p.c0 + p.c1)));
  c.width_ok = 4 * b * rho0 <= w;

  // (a) on the largest interval; smaller rho only shrink it
  double prev = -std::numeric_limits<double>::infinity();
  scan(p.c1 - 2 * b * rho0, p.c1, h, [&](double y) {
    const double d = p.dV(y);
    if (y < p.c1 && !(d < 0.0)) c.part_a = false;
    if (d < prev - tol) c.part_a = false;
    prev = d;
  });

  // (b) for y in [0, 2 b rho0]
  scan(0.0, 2 * b * rho0, h, [&](double y) {
    if (p.V(p.c0 + y) < p.V(p.c1 - y / b) - tol) c.part_b = false;
  });

  for (double rho : rho_ladder(rho0)) {
    if (!(w - 4 * b * rho > rho)) c.k1_positive = false;
    if (!(beta_at(p, b, rho, h) > 0.0)) c.part_c = false;
    const double rt = rho_tilde_at(p, b, rho, h);
    if (std::isnan(rt) || !(rt > 0.0) || !(rt < w - 2 * b * rho) || !(2 * b * rho <= w - 2 * b * rho - rt)) {
      c.part_d = false;
      continue;
    }
    const double floor_v = p.V(p.c0 + rt);
    scan(p.c0 + rt, p.c1 - 2 * b * rho, h, [&](double y) {
      if (p.V(y) < floor_v - tol) c.part_d = false;
    });
  }
  return c;
}

}  // namespace

double default_resolution(const Potential& p) { return p.width() / 1e5; }

void validate_potential(const Potential& p, double h) {
  if (!(p.c0 < p.c1)) throw PotentialError("potential needs c0 < c1");
  if (!p.V || !p.dV || !p.ddV) throw PotentialError("potential needs V, dV and ddV");
  if (h <= 0.0) h = default_resolution(p);
  const double scale = std::max(1.0, std::abs(p.V(0.5 * (p.c0 + p.c1))));
  if (std::abs(p.V(p.c0)) > 1e-12 * scale || std::abs(p.V(p.c1)) > 1e-12 * scale)
    throw PotentialError("V must vanish at c0 and c1");
  if (!(p.ddV(p.c0) > 0.0) || !(p.ddV(p.c1) > 0.0)) throw PotentialError("minima must be non-degenerate");
  scan(p.c0, p.c1, h, [&](double y) {
    if (y > p.c0 && y < p.c1 && !(p.V(y) > 0.0))
      throw PotentialError("V must be positive strictly between c0 and c1");
  });
}

Potential quartic(double c0, double c1) {
  if (!(c0 < c1)) throw PotentialError("quartic needs c0 < c1");
  const double w = c1 - c0, mid = c0 + c1;
  Potential p;
  p.c0 = c0;
  p.c1 = c1;
  p.V = [=](double s) {
    const double t = (2 * s - mid) / w;
    const double u = 1 - t * t;
    return u * u;
  };
  p.dV = [=](double s) {
    const double t = (2 * s - mid) / w;
    return -4 * t * (1 - t * t) * (2 / w);
  };
  p.ddV = [=](double s) {
    const double t = (2 * s - mid) / w;
    return (12 * t * t - 4) * (4 / (w * w));
  };
  p.description = "quartic(" + std::to_string(c0) + "," + std::to_string(c1) + ")";
  return p;
}

Potential cosine_well(double c0, double c1) {
  if (!(c0 < c1)) throw PotentialError("cosine needs c0 < c1");
  const double k = 2 * std::numbers::pi / (c1 - c0);
  Potential p;
  p.c0 = c0;
  p.c1 = c1;
  p.V = [=](double s) { return 1 - std::cos(k * (s - c0)); };
  p.dV = [=](double s) { return k * std::sin(k * (s - c0)); };
  p.ddV = [=](double s) { return k * k * std::cos(k * (s - c0)); };
  p.description = "cosine(" + std::to_string(c0) + "," + std::to_string(c1) + ")";
  return p;
}

Potential custom_potential(double c0, double c1, RealFn V, RealFn dV, RealFn ddV, std::string description,
                           double h) {
  Potential p{c0, c1, std::move(V), std::move(dV), std::move(ddV), std::move(description)};
  validate_potential(p, h);
  return p;
}

PotentialConstants derive_constants(const Potential& p, double h) {
  if (h <= 0.0) h = default_resolution(p);
  validate_potential(p, h);
  for (double b = 1.0; b <= 1024.0; b *= 2.0) {
    for (double rho = p.width() / (4 * b); rho >= 16 * h; rho *= 0.5) {
      if (!check_parts(p, b, rho, h).ok()) continue;
      const double slope = slope_certificate(p, b, rho, h);
      if (!(slope > 0.0)) continue;
      PotentialConstants pc;
      pc.b = b;
      pc.rho0 = rho;
      pc.m1 = 0.999 * slope;
      pc.resolution = h;
      pc.tested_rhos = rho_ladder(rho);
      pc.beta = [p, b, h](double r) { return beta_at(p, b, r, h); };
      pc.rho_tilde = [p, b, h](double r) { return rho_tilde_at(p, b, r, h); };
      return pc;
    }
  }
  throw PotentialError("no rho0 above 16h satisfies the well conditions (potential too degenerate at this resolution)");
}

ConstantsCheck verify_constants(const Potential& p, const PotentialConstants& pc, double h) {
  auto c = check_parts(p, pc.b, pc.rho0, h);
  c.m1_slack = std::numeric_limits<double>::infinity();
  scan(p.c1 - 2 * pc.b * pc.rho0, p.c1, h,
       [&](double y) { c.m1_slack = std::min(c.m1_slack, pc.m1 * (y - p.c1) - p.dV(y)); });
  return c;
}

double potential_excess(const Potential& p, std::span<const double> x, const VertexSet& d, double c) {
  if (static_cast<std::size_t>(d.universe()) != x.size()) throw PotentialError("field and set sizes differ");
  const double vc = p.V(c);
  double sum = 0.0;
  for (Vertex u : d.members()) sum += p.V(x[static_cast<std::size_t>(u)]) - vc;
  return sum;
}

}  // namespace hypac
