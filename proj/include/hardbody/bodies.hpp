#pragma once

// The bodies built from a quasi-orthogonal system x_1..x_m in R^n:
//
//   Q        = conv{±x_i}
//   Q_t      = conv(Q/t ∪ B)             Q_t° = tQ° ∩ B
//   K(η,κ)   = conv((1-η)e0 + Q, -κη e0 + κ Q_1°)   in R^{n+1}, e0 first
//   C+, C-, C-'  the cones whose intersection is the polar of K(η)
//
// Lifted points are Eigen vectors of size n+1 with the height in slot 0.

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hardbody/cone_program.hpp"
#include "hardbody/design.hpp"
#include "hardbody/error.hpp"
#include "hardbody/solver.hpp"

namespace hardbody {

struct LiftedPoint {
  double y0 = 0.0;
  Eigen::VectorXd y_perp;

  Eigen::VectorXd vec() const {
    Eigen::VectorXd v(y_perp.size() + 1);
    v[0] = y0;
    v.tail(y_perp.size()) = y_perp;
    return v;
  }

  static LiftedPoint from(const Eigen::Ref<const Eigen::VectorXd>& v) { return {v[0], v.tail(v.size() - 1)}; }
};

struct HardBodyParams {
  QuasiOrthogonalSystem system;
  double eta = 0.0;
  double kappa = 1.0;
  double t = 1.0;
};

inline void validate(const HardBodyParams& p) {
  if (!(p.eta >= 0.0 && p.eta < 1.0)) throw Error(ErrorCode::InvalidConfig, "eta must lie in [0, 1)");
  if (!(p.kappa > 0.0)) throw Error(ErrorCode::InvalidConfig, "kappa must be positive");
  if (!(p.t > 0.0)) throw Error(ErrorCode::NonPositiveT, "t must be positive");
  if (p.system.m < 1) throw Error(ErrorCode::InvalidConfig, "K needs at least one vector");
}

namespace programs {

inline std::vector<int> iota_vec(int first, int count) {
  std::vector<int> v(count);
  for (int k = 0; k < count; ++k) v[k] = first + k;
  return v;
}

// Adds  ±<x_i, v> - coef * var <= 0  for every i, v stored at v_first.
// Skipped when every |x_i| <= 1: the ball cone on (coef * var, v) implies them.
inline void add_polar_slab_rows(cone::Program& prog, const QuasiOrthogonalSystem& sys, int v_first, int var,
                                double coef) {
  if (sys.max_norm() <= 1.0) return;
  const int n = sys.n;
  std::vector<int> idx = iota_vec(v_first, n);
  idx.push_back(var);
  for (int i = 0; i < sys.m; ++i) {
    std::vector<double> pos(n + 1), neg(n + 1);
    for (int j = 0; j < n; ++j) {
      pos[j] = sys.vectors(i, j);
      neg[j] = -pos[j];
    }
    pos[n] = neg[n] = -coef;
    prog.add_lp_row({idx, pos}, 0.0);
    prog.add_lp_row({idx, neg}, 0.0);
  }
}

// (coef * var, v) in the second-order cone.
inline void add_ball_cone(cone::Program& prog, int n, int v_first, int var, double coef) {
  cone::SocBlock blk;
  blk.cols = iota_vec(v_first, n);
  blk.cols.push_back(var);
  blk.g = Eigen::MatrixXd::Zero(n + 1, n + 1);
  blk.g.block(1, 0, n, n) = -Eigen::MatrixXd::Identity(n, n);
  blk.g(0, n) = -coef;
  blk.h = Eigen::VectorXd::Zero(n + 1);
  prog.socs.push_back(std::move(blk));
}

inline void add_nonneg(cone::Program& prog, int first, int count) {
  for (int j = first; j < first + count; ++j) prog.add_lp_row({{j}, {-1.0}}, 0.0);
}

/// Weights p, q at columns [0, m) and [m, 2m) reproduce X'(p - q) in rows
/// [row, row+n) of the equality block.
inline void put_generator_columns(Eigen::MatrixXd& a, const QuasiOrthogonalSystem& sys, int row, double scale = 1.0) {
  const int m = sys.m, n = sys.n;
  a.block(row, 0, n, m) = scale * sys.vectors.transpose();
  a.block(row, m, n, m) = -scale * sys.vectors.transpose();
}

/// Gauge of a·Q + b·Q_1° at y, with the weights of one optimal split.
struct SliceSolution {
  double gauge = 0.0;
  Eigen::VectorXd p, q;  // sum(p+q) = a * gauge, X'(p-q) = y - v
  Eigen::VectorXd v;     // in b * gauge * Q_1°
};

inline double gauge_q1_polar(const QuasiOrthogonalSystem& sys, const Eigen::Ref<const Eigen::VectorXd>& y) {
  return std::max(sys.max_abs_projection(y), y.norm());
}

inline SliceSolution slice_gauge(const QuasiOrthogonalSystem& sys, double a, double b,
                                 const Eigen::Ref<const Eigen::VectorXd>& y, const ToleranceSpec& tol = {}) {
  const int n = sys.n, m = sys.m;
  SliceSolution out;
  out.p = Eigen::VectorXd::Zero(m);
  out.q = Eigen::VectorXd::Zero(m);
  if (y.norm() == 0.0) {
    out.v = Eigen::VectorXd::Zero(n);
    return out;
  }
  if (a <= 0.0 || m == 0) {
    out.gauge = b > 0.0 ? gauge_q1_polar(sys, y) / b : kInf;
    out.v = y;
    return out;
  }
  if (b <= 0.0) {
    out.gauge = gauge_polytope(as_polytope(sys), y, tol) / a;
    if (std::isfinite(out.gauge)) {
      // recover weights from the LP
      cone::Program prog;
      prog.num_vars = 2 * m;
      prog.c = Eigen::VectorXd::Ones(2 * m);
      prog.a = Eigen::MatrixXd::Zero(n, 2 * m);
      put_generator_columns(prog.a, sys, 0);
      prog.b = y;
      add_nonneg(prog, 0, 2 * m);
      auto sol = cone::solve(prog, cone_options(tol));
      out.p = sol.x.head(m).cwiseMax(0.0);
      out.q = sol.x.segment(m, m).cwiseMax(0.0);
    }
    out.v = Eigen::VectorXd::Zero(n);
    return out;
  }
  // vars: p(m) q(m) t v(n)
  const int it = 2 * m, iv = 2 * m + 1, nv = 2 * m + 1 + n;
  cone::Program prog;
  prog.num_vars = nv;
  prog.c = Eigen::VectorXd::Zero(nv);
  prog.c[it] = 1.0;
  prog.a = Eigen::MatrixXd::Zero(n + 1, nv);
  put_generator_columns(prog.a, sys, 0);
  prog.a.block(0, iv, n, n) = Eigen::MatrixXd::Identity(n, n);
  prog.a.block(n, 0, 1, 2 * m).setOnes();
  prog.a(n, it) = -a;
  prog.b = Eigen::VectorXd::Zero(n + 1);
  prog.b.head(n) = y;
  add_nonneg(prog, 0, 2 * m);
  add_polar_slab_rows(prog, sys, iv, it, b);
  add_ball_cone(prog, n, iv, it, b);
  auto sol = cone::solve(prog, cone_options(tol));
  out.gauge = std::max(0.0, sol.x[it]);
  out.p = sol.x.head(m).cwiseMax(0.0);
  out.q = sol.x.segment(m, m).cwiseMax(0.0);
  out.v = sol.x.segment(iv, n);
  return out;
}

/// Gauge of K(η,κ) at z = (z0, z_perp): min α+β with
/// z = α((1-η)e0 + q) + β(-κη e0 + κ y), q ∈ Q, y ∈ Q_1°.
inline double k_gauge(const QuasiOrthogonalSystem& sys, double eta, double kappa,
                      const Eigen::Ref<const Eigen::VectorXd>& z, const ToleranceSpec& tol = {}) {
  const int n = sys.n, m = sys.m;
  const double z0 = z[0];
  auto zp = z.tail(n);
  if (z.norm() == 0.0) return 0.0;
  if (eta == 0.0) {
    if (z0 < 0.0) return kInf;
    if (z0 == 0.0) return gauge_q1_polar(sys, zp) / kappa;
  }
  // vars: p(m) q(m) alpha beta v(n)
  const int ia = 2 * m, ib = 2 * m + 1, iv = 2 * m + 2, nv = 2 * m + 2 + n;
  cone::Program prog;
  prog.num_vars = nv;
  prog.c = Eigen::VectorXd::Zero(nv);
  prog.c[ia] = prog.c[ib] = 1.0;
  prog.a = Eigen::MatrixXd::Zero(n + 2, nv);
  if (m > 0) put_generator_columns(prog.a, sys, 0);
  prog.a.block(0, iv, n, n) = Eigen::MatrixXd::Identity(n, n);
  prog.a(n, ia) = 1.0 - eta;
  prog.a(n, ib) = -kappa * eta;
  prog.a.block(n + 1, 0, 1, 2 * m).setOnes();
  prog.a(n + 1, ia) = -1.0;
  prog.b = Eigen::VectorXd::Zero(n + 2);
  prog.b.head(n) = zp;
  prog.b[n] = z0;
  add_nonneg(prog, 0, 2 * m + 2);
  add_polar_slab_rows(prog, sys, iv, ib, kappa);
  add_ball_cone(prog, n, iv, ib, kappa);
  auto sol = cone::solve(prog, cone_options(tol));
  return std::max(0.0, sol.x[ia] + sol.x[ib]);
}

/// sup{t : x + t u ∈ K(η,κ)} for x ∈ K: the gauge program with α + β <= 1
/// and the point moving along the ray.
inline double k_ray_exit(const QuasiOrthogonalSystem& sys, double eta, double kappa,
                         const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& u,
                         const ToleranceSpec& tol = {}) {
  const int n = sys.n, m = sys.m;
  // vars: p(m) q(m) alpha beta v(n) t
  const int ia = 2 * m, ib = 2 * m + 1, iv = 2 * m + 2, it = 2 * m + 2 + n, nv = it + 1;
  cone::Program prog;
  prog.num_vars = nv;
  prog.c = Eigen::VectorXd::Zero(nv);
  prog.c[it] = -1.0;
  prog.a = Eigen::MatrixXd::Zero(n + 2, nv);
  if (m > 0) put_generator_columns(prog.a, sys, 0);
  prog.a.block(0, iv, n, n) = Eigen::MatrixXd::Identity(n, n);
  prog.a.block(0, it, n, 1) = -u.tail(n);
  prog.a(n, ia) = 1.0 - eta;
  prog.a(n, ib) = -kappa * eta;
  prog.a(n, it) = -u[0];
  prog.a.block(n + 1, 0, 1, 2 * m).setOnes();
  prog.a(n + 1, ia) = -1.0;
  prog.b = Eigen::VectorXd::Zero(n + 2);
  prog.b.head(n) = x.tail(n);
  prog.b[n] = x[0];
  add_nonneg(prog, 0, 2 * m + 2);
  prog.add_lp_row({{ia, ib}, {1.0, 1.0}}, 1.0);
  add_polar_slab_rows(prog, sys, iv, ib, kappa);
  add_ball_cone(prog, n, iv, ib, kappa);
  auto sol = cone::solve(prog, cone_options(tol));
  return std::max(0.0, sol.x[it]);
}

/// Gauge of Q_t = conv(Q/t ∪ B): min sum(p+q) + τ, X'(p-q)/t + w = y, |w| <= τ.
inline double qt_gauge(const QuasiOrthogonalSystem& sys, double t, const Eigen::Ref<const Eigen::VectorXd>& y,
                       const ToleranceSpec& tol = {}) {
  const int n = sys.n, m = sys.m;
  if (y.norm() == 0.0) return 0.0;
  if (m == 0 || sys.max_norm() <= t) return y.norm();
  const int itau = 2 * m, iw = 2 * m + 1, nv = 2 * m + 1 + n;
  cone::Program prog;
  prog.num_vars = nv;
  prog.c = Eigen::VectorXd::Zero(nv);
  prog.c.head(2 * m).setOnes();
  prog.c[itau] = 1.0;
  prog.a = Eigen::MatrixXd::Zero(n, nv);
  put_generator_columns(prog.a, sys, 0, 1.0 / t);
  prog.a.block(0, iw, n, n) = Eigen::MatrixXd::Identity(n, n);
  prog.b = y;
  add_nonneg(prog, 0, 2 * m);
  add_ball_cone(prog, n, iw, itau, 1.0);
  auto sol = cone::solve(prog, cone_options(tol));
  return std::max(0.0, sol.x.head(2 * m).sum() + sol.x[itau]);
}

}  // namespace programs

inline double support_q(const QuasiOrthogonalSystem& sys, const Eigen::Ref<const Eigen::VectorXd>& d) {
  return sys.max_abs_projection(d);
}

/// h_{Q_1°}(d), exact when Q ⊆ B.
inline double support_q1_polar(const QuasiOrthogonalSystem& sys, const Eigen::Ref<const Eigen::VectorXd>& d,
                               const ToleranceSpec& tol = {}) {
  return support_polar_cap(sys, 1.0, 1.0, d, tol);
}

inline bool q_in_ball(const QuasiOrthogonalSystem& sys) { return sys.max_norm() <= 1.0; }

// ---------------------------------------------------------------------------

inline BodyOracle build_Q(const QuasiOrthogonalSystem& sys, const ToleranceSpec& tol = {}) {
  auto s = std::make_shared<const QuasiOrthogonalSystem>(sys);
  BodyOracle o;
  o.dimension = sys.n;
  o.descriptor = {BodyKind::Q, 0.0, 1.0, 1.0};
  o.gauge = [s, tol](const Eigen::VectorXd& y) { return gauge_polytope(as_polytope(*s), y, tol); };
  o.support = [s](const Eigen::VectorXd& d) { return SupportValue{support_q(*s, d), false}; };
  o.bound_radius = sys.max_norm();
  return o;
}

inline BodyOracle build_Qt(const QuasiOrthogonalSystem& sys, double t, const ToleranceSpec& tol = {}) {
  if (!(t > 0.0)) throw Error(ErrorCode::NonPositiveT, "t must be positive");
  auto s = std::make_shared<const QuasiOrthogonalSystem>(sys);
  BodyOracle o;
  o.dimension = sys.n;
  o.descriptor = {BodyKind::Qt, 0.0, 1.0, t};
  o.gauge = [s, t, tol](const Eigen::VectorXd& y) { return programs::qt_gauge(*s, t, y, tol); };
  o.support = [s, t](const Eigen::VectorXd& d) {
    return SupportValue{std::max(support_q(*s, d) / t, d.norm()), false};
  };
  o.bound_radius = std::max(1.0, sys.max_norm() / t);
  return o;
}

inline BodyOracle build_Qt_polar(const QuasiOrthogonalSystem& sys, double t, const ToleranceSpec& tol = {}) {
  if (!(t > 0.0)) throw Error(ErrorCode::NonPositiveT, "t must be positive");
  auto s = std::make_shared<const QuasiOrthogonalSystem>(sys);
  BodyOracle o;
  o.dimension = sys.n;
  o.descriptor = {BodyKind::QtPolar, 0.0, 1.0, t};
  // gauge of an intersection is the max of the gauges
  o.gauge = [s, t](const Eigen::VectorXd& y) { return std::max(support_q(*s, y) / t, y.norm()); };
  o.support = [s, t, tol](const Eigen::VectorXd& d) {
    auto c = support_polar_cap_detail(*s, t, 1.0, d, tol);
    return SupportValue{c.value, false};
  };
  o.bound_radius = 1.0;
  return o;
}

namespace detail {

/// Sound filters for K(η,κ) membership; nullopt when undecided.
struct KFilter {
  std::shared_ptr<const QuasiOrthogonalSystem> sys;
  double eta = 0.0, kappa = 1.0;
  Eigen::VectorXd row_norm;   // |x_i|
  Eigen::VectorXd gram_max;   // max_j |<x_i, x_j>|, empty when too costly

  void init() {
    row_norm = sys->vectors.rowwise().norm();
    const double cost = double(sys->m) * sys->m * sys->n;
    if (sys->m > 0 && cost <= 2e8) gram_max = (sys->vectors * sys->vectors.transpose()).cwiseAbs().rowwise().maxCoeff();
  }

  // Slice parameter of a point at height y0 (only meaningful in the slab).
  double lambda(double y0) const { return (y0 + kappa * eta) / ((1.0 - eta) + kappa * eta); }

  std::optional<Membership> classify(const Eigen::VectorXd& z, double tol) const {
    const double top = 1.0 - eta, bottom = -kappa * eta;
    if (z[0] > top * (1.0 + tol) || z[0] < bottom * (1.0 + tol)) return Membership::Outside;
    if (eta == 0.0 && z[0] < 0.0) return Membership::Outside;
    const int n = sys->n;
    // Accept: z/(1-tol) is a two-point combination of the top centre and a
    // bottom point.
    {
      Eigen::VectorXd w = z / (1.0 - tol);
      double l = lambda(w[0]);
      if (l >= 0.0 && l <= 1.0) {
        double room = (1.0 - l) * kappa;
        if (room > 0.0 && programs::gauge_q1_polar(*sys, w.tail(n)) <= room) return Membership::Inside;
      }
    }
    // Reject: a supporting direction of the slice through z/(1+tol) fails.
    {
      Eigen::VectorXd w = z / (1.0 + tol);
      double l = std::clamp(lambda(w[0]), 0.0, 1.0);
      auto wp = w.tail(n);
      double r = wp.norm();
      if (r > 0.0) {
        Eigen::VectorXd d = wp / r;
        // h_{Q_1°}(d) <= |d| = 1
        if (r > l * support_q(*sys, d) + (1.0 - l) * kappa) return Membership::Outside;
      }
      if (gram_max.size() > 0) {
        Eigen::VectorXd proj = sys->vectors * Eigen::VectorXd(wp);
        for (int i = 0; i < sys->m; ++i) {
          double ni = row_norm[i];
          if (ni == 0.0) continue;
          // direction x_i/|x_i|: h_Q = gram_max/|x_i|, h_{Q_1°} <= min(1, 1/|x_i|)
          double bound = l * gram_max[i] / ni + (1.0 - l) * kappa * std::min(1.0, 1.0 / ni);
          if (std::abs(proj[i]) / ni > bound) return Membership::Outside;
        }
      }
    }
    return std::nullopt;
  }
};

}  // namespace detail

inline BodyOracle build_K_eta_kappa(const HardBodyParams& params, const ToleranceSpec& tol = {}) {
  validate(params);
  auto s = std::make_shared<const QuasiOrthogonalSystem>(params.system);
  const double eta = params.eta, kappa = params.kappa;
  auto filter = std::make_shared<detail::KFilter>();
  filter->sys = s;
  filter->eta = eta;
  filter->kappa = kappa;
  filter->init();

  BodyOracle o;
  o.dimension = s->n + 1;
  o.descriptor = {BodyKind::KEtaKappa, eta, kappa, params.t};
  o.gauge = [s, eta, kappa, tol](const Eigen::VectorXd& z) { return programs::k_gauge(*s, eta, kappa, z, tol); };
  o.membership_fn = [s, eta, kappa, tol, filter](const Eigen::VectorXd& z, double band) {
    if (auto m = filter->classify(z, band)) return *m;
    return classify_gauge(programs::k_gauge(*s, eta, kappa, z, tol), band);
  };
  o.support = [s, eta, kappa, tol](const Eigen::VectorXd& d) {
    const int n = s->n;
    auto dp = d.tail(n);
    double top = (1.0 - eta) * d[0] + support_q(*s, dp);
    double bottom = -kappa * eta * d[0] + kappa * support_q1_polar(*s, dp, tol);
    return SupportValue{std::max(top, bottom), false};
  };
  o.ray_exit = [s, eta, kappa, tol](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    return programs::k_ray_exit(*s, eta, kappa, x, u, tol);
  };
  const double rq = s->max_norm();
  o.bound_radius = std::max(std::hypot(1.0 - eta, rq), kappa * std::hypot(eta, 1.0));
  return o;
}

/// K(η) = K - η e0 = K(η, 1).
inline BodyOracle build_K_eta(const QuasiOrthogonalSystem& sys, double eta, const ToleranceSpec& tol = {}) {
  auto o = build_K_eta_kappa({sys, eta, 1.0, 1.0}, tol);
  o.descriptor.kind = BodyKind::KEta;
  return o;
}

/// K = conv(e0 + Q, Q_1°); the origin lies on its bottom face.
inline BodyOracle build_K(const QuasiOrthogonalSystem& sys, const ToleranceSpec& tol = {}) {
  auto o = build_K_eta_kappa({sys, 0.0, 1.0, 1.0}, tol);
  o.descriptor.kind = BodyKind::K;
  return o;
}

enum class ConeKind { CPlus, CMinus, CMinusPrime };

/// Closed-form gauges:
///   C+  : max(0, (1-η) y0 + h_Q(y_perp))
///   C-  : max(0, gauge_{Q_1}(y_perp) - η y0)
///   C-' : max(0, gauge_{Q_t°}(y_perp) - η y0, y0 / 0.98)
inline BodyOracle cone_oracle(ConeKind kind, const QuasiOrthogonalSystem& sys, double eta, double t = 0.02,
                              const ToleranceSpec& tol = {}) {
  if (!(eta >= 0.0 && eta < 1.0)) throw Error(ErrorCode::InvalidConfig, "eta must lie in [0, 1)");
  if (!(t > 0.0)) throw Error(ErrorCode::NonPositiveT, "t must be positive");
  auto s = std::make_shared<const QuasiOrthogonalSystem>(sys);
  const int n = sys.n;
  BodyOracle o;
  o.dimension = n + 1;
  switch (kind) {
    case ConeKind::CPlus:
      o.descriptor = {BodyKind::ConePlus, eta, 1.0, 1.0};
      o.gauge = [s, eta, n](const Eigen::VectorXd& y) {
        return std::max(0.0, (1.0 - eta) * y[0] + support_q(*s, y.tail(n)));
      };
      // Finite only when the direction lies in the dual cone at the apex.
      o.support = [s, eta, n, tol](const Eigen::VectorXd& d) {
        double g = gauge_polytope(as_polytope(*s), d.tail(n), tol);
        double apex = d[0] / (1.0 - eta);
        return SupportValue{g <= apex * (1.0 + 1e-12) ? apex : kInf, false};
      };
      break;
    case ConeKind::CMinus:
      o.descriptor = {BodyKind::ConeMinus, eta, 1.0, 1.0};
      o.gauge = [s, eta, n, tol](const Eigen::VectorXd& y) {
        return std::max(0.0, programs::qt_gauge(*s, 1.0, y.tail(n), tol) - eta * y[0]);
      };
      o.support = [s, eta, n](const Eigen::VectorXd& d) {
        if (eta == 0.0) return SupportValue{d.norm() == 0.0 ? 0.0 : kInf, false};
        double hq1 = std::max(support_q(*s, d.tail(n)), d.tail(n).norm());
        double apex = -d[0] / eta;
        return SupportValue{hq1 + d[0] / eta <= 1e-12 * std::max(1.0, hq1) ? apex : kInf, false};
      };
      break;
    case ConeKind::CMinusPrime:
      o.descriptor = {BodyKind::ConeMinusPrime, eta, 1.0, t};
      o.gauge = [s, eta, t, n](const Eigen::VectorXd& y) {
        double g = std::max(support_q(*s, y.tail(n)) / t, y.tail(n).norm());
        return std::max({0.0, g - eta * y[0], y[0] / 0.98});
      };
      // Linear in the height between the apex and the top cap.
      o.support = [s, eta, t, n, tol](const Eigen::VectorXd& d) {
        double cap = 0.98 * d[0] + (1.0 + 0.98 * eta) * support_polar_cap(*s, t, 1.0, d.tail(n), tol);
        if (eta == 0.0) return SupportValue{d[0] < 0.0 ? kInf : cap, false};
        return SupportValue{std::max(-d[0] / eta, cap), false};
      };
      o.bound_radius = eta > 0.0 ? std::max(1.0 / eta, std::hypot(0.98, 1.0 + 0.98 * eta)) : kInf;
      break;
  }
  return o;
}

/// K_s = (1-s) Q_1° + s Q, the slice of K at height s.
inline BodyOracle cross_section(const QuasiOrthogonalSystem& sys, double s_param, const ToleranceSpec& tol = {}) {
  if (!(s_param >= 0.0 && s_param <= 1.0)) throw Error(ErrorCode::DomainError, "s must lie in [0, 1]");
  auto s = std::make_shared<const QuasiOrthogonalSystem>(sys);
  BodyOracle o;
  o.dimension = sys.n;
  o.descriptor = {BodyKind::CrossSection, 0.0, 1.0, s_param};
  o.gauge = [s, s_param, tol](const Eigen::VectorXd& y) {
    return programs::slice_gauge(*s, s_param, 1.0 - s_param, y, tol).gauge;
  };
  o.support = [s, s_param, tol](const Eigen::VectorXd& d) {
    double v = (1.0 - s_param) * support_q1_polar(*s, d, tol) + s_param * support_q(*s, d);
    return SupportValue{v, false};
  };
  o.bound_radius = (1.0 - s_param) + s_param * sys.max_norm();
  return o;
}

}  // namespace hardbody
