#pragma once

// Gauge and support kernels for generator-form polytopes and their polar caps,
// plus the BodyOracle handle every body in the library is exposed through.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "hardbody/cone_program.hpp"
#include "hardbody/design.hpp"
#include "hardbody/error.hpp"

namespace hardbody {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct ToleranceSpec {
  double feasibility_tol = 1e-9;
  double bisection_tol = 1e-10;
  int max_iterations = 10000;
};

inline void validate(const ToleranceSpec& tol) {
  if (!(tol.feasibility_tol > 0.0) || !(tol.bisection_tol > 0.0) || tol.max_iterations < 1)
    throw Error(ErrorCode::InvalidConfig, "tolerances must be positive");
}

inline cone::Options cone_options(const ToleranceSpec& tol) {
  cone::Options o;
  o.feastol = 0.1 * tol.feasibility_tol;
  o.abstol = tol.bisection_tol;
  o.reltol = tol.bisection_tol;
  o.max_iterations = std::min(tol.max_iterations, 200);
  return o;
}

/// Row k of `generators` is g_k. With `symmetric`, -g_k is a generator too.
struct GeneratorPolytope {
  Eigen::MatrixXd generators;
  bool symmetric = true;

  int dim() const { return static_cast<int>(generators.cols()); }
  int count() const { return static_cast<int>(generators.rows()); }
};

inline GeneratorPolytope as_polytope(const QuasiOrthogonalSystem& s) { return {s.vectors, true}; }

/// max over generators of <g, d>; for symmetric polytopes max_k |<g_k, d>|.
inline double support_polytope(const GeneratorPolytope& p, const Eigen::Ref<const Eigen::VectorXd>& d) {
  if (p.count() == 0) return 0.0;
  Eigen::VectorXd v = p.generators * d;
  return p.symmetric ? v.cwiseAbs().maxCoeff() : v.maxCoeff();
}

/// min{t >= 0 : y in t P}, +inf when no such t exists.
///
/// Solved as the linear program min sum(w) over nonnegative weights with
/// sum_k w_k g_k = y. For symmetric P a least-squares span test decides
/// feasibility; otherwise a phase-one program measures the distance of y
/// from the cone of the generators.
inline double gauge_polytope(const GeneratorPolytope& p, const Eigen::Ref<const Eigen::VectorXd>& y,
                             const ToleranceSpec& tol = {}) {
  const int n = p.dim();
  const int k = p.count();
  if (y.size() != n) throw Error(ErrorCode::DomainError, "dimension mismatch in gauge_polytope");
  const double ynorm = y.norm();
  if (ynorm == 0.0) return 0.0;
  if (k == 0) return kInf;

  Eigen::MatrixXd gt = p.generators.transpose();  // n x k
  if (p.symmetric) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gt);
    Eigen::VectorXd ls = qr.solve(Eigen::VectorXd(y));
    if ((gt * ls - y).norm() > 1e-9 * std::max(1.0, ynorm)) return kInf;
  } else {
    cone::Program phase1;
    phase1.num_vars = k + 2 * n;
    phase1.c = Eigen::VectorXd::Zero(k + 2 * n);
    phase1.c.tail(2 * n).setOnes();
    phase1.a = Eigen::MatrixXd::Zero(n, k + 2 * n);
    phase1.a.leftCols(k) = gt;
    phase1.a.middleCols(k, n) = Eigen::MatrixXd::Identity(n, n);
    phase1.a.rightCols(n) = -Eigen::MatrixXd::Identity(n, n);
    phase1.b = y;
    for (int j = 0; j < k + 2 * n; ++j) phase1.add_lp_row({{j}, {-1.0}}, 0.0);
    auto sol = cone::solve(phase1, cone_options(tol));
    if (sol.primal_objective > 1e-8 * std::max(1.0, ynorm)) return kInf;
  }

  const int nw = p.symmetric ? 2 * k : k;
  cone::Program prog;
  prog.num_vars = nw;
  prog.c = Eigen::VectorXd::Ones(nw);
  prog.a = Eigen::MatrixXd::Zero(n, nw);
  prog.a.leftCols(k) = gt;
  if (p.symmetric) prog.a.rightCols(k) = -gt;
  prog.b = y;
  for (int j = 0; j < nw; ++j) prog.add_lp_row({{j}, {-1.0}}, 0.0);
  auto sol = cone::solve(prog, cone_options(tol));
  return std::max(0.0, sol.primal_objective);
}

/// Support of { v : max_i |<x_i, v>| <= t, |v| <= radius } = tQ° ∩ radius B,
/// the polar of conv(Q/t ∪ B/radius).
struct CapSupport {
  double value = 0.0;        // attained by a feasible point (lower bound)
  double upper_bound = 0.0;  // dual certificate, capped by radius*|d|
  bool exact = false;        // closed form, no program solved
};

inline CapSupport support_polar_cap_detail(const QuasiOrthogonalSystem& sys, double t, double radius,
                                           const Eigen::Ref<const Eigen::VectorXd>& d,
                                           const ToleranceSpec& tol = {}) {
  if (!(radius > 0.0)) throw Error(ErrorCode::DomainError, "radius must be positive");
  if (!(t > 0.0)) throw Error(ErrorCode::NonPositiveT, "t must be positive");
  const double ball = radius * d.norm();
  if (ball == 0.0) return {0.0, 0.0, true};
  // The ball already lies in tQ°.
  if (sys.m == 0 || radius * sys.max_norm() <= t) return {ball, ball, true};

  const int n = sys.n, m = sys.m;
  cone::Program prog;
  prog.num_vars = n;
  prog.c = -d;
  prog.a.resize(0, n);
  prog.b.resize(0);
  std::vector<int> all(n);
  for (int j = 0; j < n; ++j) all[j] = j;
  for (int i = 0; i < m; ++i) {
    std::vector<double> row(n), neg(n);
    for (int j = 0; j < n; ++j) {
      row[j] = sys.vectors(i, j);
      neg[j] = -row[j];
    }
    prog.add_lp_row({all, row}, t);
    prog.add_lp_row({all, neg}, t);
  }
  cone::SocBlock blk;
  blk.cols = all;
  blk.g = Eigen::MatrixXd::Zero(n + 1, n);
  blk.g.bottomRows(n) = -Eigen::MatrixXd::Identity(n, n);
  blk.h = Eigen::VectorXd::Zero(n + 1);
  blk.h[0] = radius;
  prog.socs.push_back(std::move(blk));
  auto sol = cone::solve(prog, cone_options(tol));
  CapSupport out;
  out.upper_bound = std::min(ball, -sol.dual_objective);
  out.value = std::min(-sol.primal_objective, out.upper_bound);
  return out;
}

inline double support_polar_cap(const QuasiOrthogonalSystem& sys, double t, double radius,
                                const Eigen::Ref<const Eigen::VectorXd>& d, const ToleranceSpec& tol = {}) {
  return support_polar_cap_detail(sys, t, radius, d, tol).value;
}

// ---------------------------------------------------------------------------
// Oracles

enum class Membership { Inside, Outside, Boundary };

constexpr std::string_view to_string(Membership m) noexcept {
  switch (m) {
    case Membership::Inside: return "Inside";
    case Membership::Outside: return "Outside";
    case Membership::Boundary: return "Boundary";
  }
  return "Unknown";
}

/// Classifies a gauge value against the unit level with a band of width tol.
inline Membership classify_gauge(double g, double tol) {
  if (g <= 1.0 - tol) return Membership::Inside;
  if (g >= 1.0 + tol) return Membership::Outside;
  return Membership::Boundary;
}

enum class BodyKind {
  Q,
  Qt,
  QtPolar,
  K,
  KEta,
  KEtaKappa,
  ConePlus,
  ConeMinus,
  ConeMinusPrime,
  CrossSection,
  Ball,
  Custom
};

constexpr std::string_view to_string(BodyKind k) noexcept {
  switch (k) {
    case BodyKind::Q: return "Q";
    case BodyKind::Qt: return "Qt";
    case BodyKind::QtPolar: return "QtPolar";
    case BodyKind::K: return "K";
    case BodyKind::KEta: return "KEta";
    case BodyKind::KEtaKappa: return "KEtaKappa";
    case BodyKind::ConePlus: return "ConePlus";
    case BodyKind::ConeMinus: return "ConeMinus";
    case BodyKind::ConeMinusPrime: return "ConeMinusPrime";
    case BodyKind::CrossSection: return "CrossSection";
    case BodyKind::Ball: return "Ball";
    case BodyKind::Custom: return "Custom";
  }
  return "Unknown";
}

struct Descriptor {
  BodyKind kind = BodyKind::Custom;
  double eta = 0.0;
  double kappa = 1.0;
  double t = 1.0;  // Qt/QtPolar/cone parameter, cross-section s, ball radius
};

struct SupportValue {
  double value = 0.0;
  bool upper_bound_only = false;
};

/// A convex body given by evaluators. `gauge` requires 0 in the interior;
/// `membership` defaults to classifying the gauge. `bound_radius`, when
/// finite, is the radius of a centred ball containing the body.
struct BodyOracle {
  int dimension = 0;
  Descriptor descriptor;
  std::function<double(const Eigen::VectorXd&)> gauge;
  std::function<SupportValue(const Eigen::VectorXd&)> support;
  std::function<Membership(const Eigen::VectorXd&, double)> membership_fn;
  // sup{t >= 0 : x + t u in body} for x in the body; optional, callers fall
  // back to bisection on membership.
  std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> ray_exit;
  double bound_radius = kInf;

  Membership membership(const Eigen::VectorXd& y, double tol = 1e-9) const {
    if (membership_fn) return membership_fn(y, tol);
    return classify_gauge(gauge(y), tol);
  }

  double support_value(const Eigen::VectorXd& d) const { return support(d).value; }
};

/// Inside if gauge <= 1 - tol, Outside if >= 1 + tol, Boundary in between.
inline Membership membership_bisect(const BodyOracle& oracle, const Eigen::VectorXd& y, double tol) {
  return classify_gauge(oracle.gauge(y), tol);
}

/// Gauge from a membership predicate by bracketing and bisection along the
/// ray through y. Returns 0 when the ray never leaves the body within 2^60.
inline double gauge_from_membership(const std::function<Membership(const Eigen::VectorXd&, double)>& member,
                                    const Eigen::VectorXd& y, double rel_tol = 1e-10) {
  if (y.norm() == 0.0) return 0.0;
  auto inside = [&](double s) { return member(y / s, 0.0) != Membership::Outside; };
  double lo = 1.0, hi = 1.0;
  if (inside(1.0)) {
    int k = 0;
    while (inside(lo) && k++ < 60) lo *= 0.5;
    if (k > 60) return 0.0;
    hi = 2.0 * lo;
  } else {
    int k = 0;
    while (!inside(hi) && k++ < 60) hi *= 2.0;
    if (k > 60) return kInf;
    lo = 0.5 * hi;
  }
  while (hi - lo > rel_tol * hi) {
    double mid = 0.5 * (lo + hi);
    (inside(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

inline BodyOracle ball_oracle(int n, double r = 1.0) {
  if (!(r > 0.0)) throw Error(ErrorCode::DomainError, "ball radius must be positive");
  BodyOracle o;
  o.dimension = n;
  o.descriptor = {BodyKind::Ball, 0.0, 1.0, r};
  o.gauge = [r](const Eigen::VectorXd& y) { return y.norm() / r; };
  o.support = [r](const Eigen::VectorXd& d) { return SupportValue{r * d.norm(), false}; };
  o.ray_exit = [r](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    double a = u.squaredNorm(), b = x.dot(u), c = x.squaredNorm() - r * r;
    if (a == 0.0) return kInf;
    return std::max(0.0, (-b + std::sqrt(std::max(0.0, b * b - a * c))) / a);
  };
  o.bound_radius = r;
  return o;
}

/// The oracle translated by v: gauge is evaluated through membership of
/// y - v, so the origin must stay interior to the translated body.
inline BodyOracle translate(const BodyOracle& body, const Eigen::VectorXd& v) {
  BodyOracle o = body;
  o.descriptor.kind = BodyKind::Custom;
  o.membership_fn = [body, v](const Eigen::VectorXd& y, double tol) { return body.membership(y - v, tol); };
  o.support = [body, v](const Eigen::VectorXd& d) {
    auto s = body.support(d);
    s.value += v.dot(d);
    return s;
  };
  o.gauge = [m = o.membership_fn](const Eigen::VectorXd& y) { return gauge_from_membership(m, y); };
  if (body.ray_exit)
    o.ray_exit = [body, v](const Eigen::VectorXd& x, const Eigen::VectorXd& u) { return body.ray_exit(x - v, u); };
  o.bound_radius = body.bound_radius + v.norm();
  return o;
}

inline BodyOracle scale(const BodyOracle& body, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::DomainError, "scale must be positive");
  BodyOracle o = body;
  o.descriptor.kind = BodyKind::Custom;
  if (body.gauge) o.gauge = [body, lambda](const Eigen::VectorXd& y) { return body.gauge(y / lambda); };
  o.membership_fn = [body, lambda](const Eigen::VectorXd& y, double tol) { return body.membership(y / lambda, tol); };
  o.support = [body, lambda](const Eigen::VectorXd& d) {
    auto s = body.support(d);
    s.value *= lambda;
    return s;
  };
  if (body.ray_exit)
    o.ray_exit = [body, lambda](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
      return lambda * body.ray_exit(x / lambda, u);
    };
  o.bound_radius = body.bound_radius * lambda;
  return o;
}

/// {y : A y <= b} with b > 0 componentwise, so the origin is interior.
/// Support needs A to define a bounded set.
inline BodyOracle halfspace_oracle(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                   const ToleranceSpec& tol = {}) {
  if (a.rows() != b.size() || a.rows() == 0) throw Error(ErrorCode::InvalidConfig, "need matching nonempty A, b");
  if (!(b.minCoeff() > 0.0)) throw Error(ErrorCode::OriginNotInterior, "halfspace offsets must be positive");
  const int n = static_cast<int>(a.cols());
  Eigen::MatrixXd ab = b.cwiseInverse().asDiagonal() * a;
  BodyOracle o;
  o.dimension = n;
  o.descriptor = {BodyKind::Custom, 0.0, 1.0, 1.0};
  o.gauge = [ab](const Eigen::VectorXd& y) { return std::max(0.0, (ab * y).maxCoeff()); };
  o.ray_exit = [ab](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    Eigen::VectorXd slack = Eigen::VectorXd::Ones(ab.rows()) - ab * x;
    Eigen::VectorXd rate = ab * u;
    double t = kInf;
    for (Eigen::Index i = 0; i < rate.size(); ++i)
      if (rate[i] > 0.0) t = std::min(t, std::max(0.0, slack[i]) / rate[i]);
    return t;
  };
  o.support = [ab, n, tol](const Eigen::VectorXd& d) {
    cone::Program prog;
    prog.num_vars = n;
    prog.c = -d;
    prog.a = Eigen::MatrixXd::Zero(0, n);
    prog.b = Eigen::VectorXd::Zero(0);
    for (Eigen::Index i = 0; i < ab.rows(); ++i) {
      cone::SparseRow row;
      for (int k = 0; k < n; ++k)
        if (ab(i, k) != 0.0) {
          row.idx.push_back(k);
          row.val.push_back(ab(i, k));
        }
      prog.add_lp_row(std::move(row), 1.0);
    }
    auto sol = cone::solve(prog, cone_options(tol));
    return SupportValue{-sol.primal_objective, false};
  };
  return o;
}

}  // namespace hardbody
