#pragma once

// Polar bodies, the shifted-polar identity for K(η), and vertex/facet
// duality counts for small polytopes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hardbody/bodies.hpp"
#include "hardbody/error.hpp"
#include "hardbody/polytope.hpp"
#include "hardbody/rng.hpp"
#include "hardbody/solver.hpp"

namespace hardbody {

struct PolarShiftResult {
  double kappa = 1.0;
  double scale = 1.0;
};

/// (K(η)° - h e0)° = scale · K(η, κ) with κ = (1-(1-η)h)/(1+ηh) and
/// scale = 1/(1-(1-η)h). Both blow up at the ends of -1/η < h < 1/(1-η),
/// so h is rejected within 1e-9 of either end.
inline PolarShiftResult polar_shift(double eta, double h) {
  if (!(eta >= 0.0 && eta < 1.0)) throw Error(ErrorCode::InvalidConfig, "eta must lie in [0, 1)");
  if (!std::isfinite(h)) throw Error(ErrorCode::HOutOfRange, "h must be finite");
  if (h >= 1.0 / (1.0 - eta) - 1e-9) throw Error(ErrorCode::HOutOfRange, "h too close to 1/(1-eta)");
  if (eta > 0.0 && h <= -1.0 / eta + 1e-9) throw Error(ErrorCode::HOutOfRange, "h too close to -1/eta");
  const double top = 1.0 - (1.0 - eta) * h;
  return {top / (1.0 + eta * h), 1.0 / top};
}

/// 2(1 + 10 log(2e)): the κ bound over η ∈ [0, 10/(n+1)], h ∈ [-10 log(2e), 0].
inline double kappa_bound_constant() { return 2.0 * (1.0 + 10.0 * std::log(2.0 * std::numbers::e)); }

struct KappaGridCheck {
  int n = 0;
  double max_kappa = 0.0;  // +inf when 1 + ηh <= 0 somewhere on the grid
  double bound = 0.0;
  bool holds = false;
  int points = 0;
};

/// Evaluates κ(η, h) on a (grid x grid) lattice of the box above. The bound
/// needs η|h| <= 1/2 on the box, i.e. n + 1 >= 200 log(2e).
inline KappaGridCheck kappa_grid_check(int n, int grid = 101) {
  if (n < 1 || grid < 2) throw Error(ErrorCode::InvalidConfig, "need n >= 1 and grid >= 2");
  KappaGridCheck r;
  r.n = n;
  r.bound = kappa_bound_constant();
  const double eta_max = 10.0 / (n + 1.0);
  const double h_min = -10.0 * std::log(2.0 * std::numbers::e);
  for (int a = 0; a < grid; ++a) {
    for (int b = 0; b < grid; ++b) {
      const double eta = std::min(eta_max * a / (grid - 1.0), std::nextafter(1.0, 0.0));
      const double h = h_min * b / (grid - 1.0);
      const double den = 1.0 + eta * h;
      const double k = den > 0.0 ? (1.0 - (1.0 - eta) * h) / den : std::numeric_limits<double>::infinity();
      r.max_kappa = std::max(r.max_kappa, k);
      ++r.points;
    }
  }
  r.holds = r.max_kappa <= r.bound;
  return r;
}

// --- polar oracle ------------------------------------------------------------------

/// L° = {y : h_L(y) <= 1}. Gauge of L° is h_L and support of L° is the gauge
/// of L. The origin must be interior to L: checked along ±e_k.
inline BodyOracle polar_oracle(const BodyOracle& body) {
  if (!body.gauge || !body.support) throw Error(ErrorCode::InvalidConfig, "polar needs gauge and support");
  const int n = body.dimension;
  for (int k = 0; k < n; ++k) {
    for (double sgn : {1.0, -1.0}) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e[k] = sgn;
      if (!std::isfinite(body.gauge(e)))
        throw Error(ErrorCode::OriginNotInterior, "origin is not interior to the body");
    }
  }
  BodyOracle o;
  o.dimension = n;
  o.descriptor = body.descriptor;
  o.descriptor.kind = BodyKind::Custom;
  o.gauge = [body](const Eigen::VectorXd& y) { return body.support(y).value; };
  o.support = [body](const Eigen::VectorXd& d) { return SupportValue{body.gauge(d), false}; };
  o.membership_fn = [body](const Eigen::VectorXd& y, double tol) {
    return classify_gauge(body.support(y).value, tol);
  };
  return o;
}

// --- shifted-polar identity -----------------------------------------------------------

struct PolarShiftReport {
  double eta = 0.0, h = 0.0, tol = 0.0;
  PolarShiftResult shift;
  std::int64_t n_points = 0;
  std::int64_t disagreements = 0;
  double disagreement_fraction = 0.0;
  std::int64_t gauge_points = 0;
  double max_gauge_gap = 0.0;
};

/// Compares y ∈ (K(η)° - h e0)°, tested as gauge_{K(η)}(y) <= 1 + h y0,
/// with y ∈ scale · K(η, κ). Points are y = r u, u uniform on the sphere and
/// r uniform on [0, 1.5 R], R the radius bound of scale · K(η, κ). A point
/// disagrees when one side says Inside and the other Outside at band tol.
/// The gauge gap |gauge_{K(η)}(y) - h y0 - gauge_{scale K(η,κ)}(y)| (both
/// sides are gauges of the same set) is evaluated on the first
/// min(n_points, gauge_budget) points.
inline PolarShiftReport verify_polar_shift(const QuasiOrthogonalSystem& sys, double eta, double h,
                                           std::int64_t n_points, std::uint64_t seed, double tol,
                                           std::int64_t gauge_budget = 256) {
  PolarShiftReport rep;
  rep.eta = eta;
  rep.h = h;
  rep.tol = tol;
  rep.shift = polar_shift(eta, h);
  rep.n_points = n_points;
  const double kappa = rep.shift.kappa, sc = rep.shift.scale;
  const BodyOracle k_eta = build_K_eta_kappa(HardBodyParams{sys, eta, 1.0, 1.0});
  const BodyOracle k_shift = build_K_eta_kappa(HardBodyParams{sys, eta, kappa, 1.0});
  const double radius = 1.5 * sc * k_shift.bound_radius;
  const int dim = sys.n + 1;

  const auto count = static_cast<std::size_t>(n_points);
  std::vector<char> disagree(count, 0);
  std::vector<double> gap(count, 0.0);
  const auto gauge_count = static_cast<std::size_t>(std::min(n_points, gauge_budget));
  parallel_for(count, [&](std::size_t i) {
    CounterRng rng(seed, "polar_shift", i);
    Eigen::VectorXd y = uniform_on_sphere(rng, dim) * (radius * uniform01(rng));
    const double level = 1.0 + h * y[0];
    Membership a = level > 0.0 ? k_eta.membership(y / level, tol) : Membership::Outside;
    Membership b = k_shift.membership(y / sc, tol);
    disagree[i] = (a == Membership::Inside && b == Membership::Outside) ||
                  (a == Membership::Outside && b == Membership::Inside);
    if (i < gauge_count) {
      double ga = programs::k_gauge(sys, eta, 1.0, y) - h * y[0];
      double gb = programs::k_gauge(sys, eta, kappa, y / sc);
      gap[i] = (std::isinf(ga) && std::isinf(gb)) ? 0.0 : std::abs(ga - gb);
    }
  });
  rep.disagreements = std::count(disagree.begin(), disagree.end(), char{1});
  rep.disagreement_fraction = n_points > 0 ? double(rep.disagreements) / double(n_points) : 0.0;
  rep.gauge_points = static_cast<std::int64_t>(gauge_count);
  for (std::size_t i = 0; i < gauge_count; ++i) rep.max_gauge_gap = std::max(rep.max_gauge_gap, gap[i]);
  return rep;
}

inline nlohmann::json to_json(const PolarShiftReport& r) {
  return {{"eta", r.eta},
          {"h", r.h},
          {"tol", r.tol},
          {"kappa", r.shift.kappa},
          {"scale", r.shift.scale},
          {"n_points", r.n_points},
          {"disagreements", r.disagreements},
          {"disagreement_fraction", r.disagreement_fraction},
          {"gauge_points", r.gauge_points},
          {"max_gauge_gap", r.max_gauge_gap}};
}

// --- vertex / facet duality ------------------------------------------------------------

struct DualCount {
  int facet_count = 0;                // facets of P
  int polar_vertex_count = 0;         // distinct normal/offset points of those facets
  int polar_vertex_count_direct = 0;  // vertex enumeration of {y : <v, y> <= 1}
  bool match = false;
};

inline DualCount dual_count(const CandidatePolytope& p) {
  const int n = p.dimension();
  if (n > kMaxEnumerationDimension)
    throw Error(ErrorCode::DimensionTooLarge, "dual_count is limited to dimension 8");
  auto facets = hull_facets(p.vertices);
  if (facets.empty()) throw Error(ErrorCode::OriginNotInterior, "hull is not full-dimensional");
  const double tol = 1e-9 * std::max(1.0, p.vertices.cwiseAbs().maxCoeff());
  std::vector<Eigen::VectorXd> dual;
  for (const auto& f : facets) {
    if (!(f.offset > tol)) throw Error(ErrorCode::OriginNotInterior, "origin is not interior to the polytope");
    Eigen::VectorXd y = f.normal / f.offset;
    bool dup = std::any_of(dual.begin(), dual.end(), [&](const Eigen::VectorXd& w) {
      return (w - y).lpNorm<Eigen::Infinity>() <= 1e-9 * std::max(1.0, y.lpNorm<Eigen::Infinity>());
    });
    if (!dup) dual.push_back(std::move(y));
  }
  DualCount r;
  r.facet_count = static_cast<int>(facets.size());
  r.polar_vertex_count = static_cast<int>(dual.size());
  r.polar_vertex_count_direct = static_cast<int>(polar_vertices_direct(p.vertices).size());
  r.match = r.facet_count == r.polar_vertex_count && r.polar_vertex_count == r.polar_vertex_count_direct;
  return r;
}

inline nlohmann::json to_json(const DualCount& d) {
  return {{"facet_count", d.facet_count},
          {"polar_vertex_count", d.polar_vertex_count},
          {"polar_vertex_count_direct", d.polar_vertex_count_direct},
          {"match", d.match}};
}

}  // namespace hardbody
