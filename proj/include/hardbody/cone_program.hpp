#pragma once

// Primal-dual interior-point solver for small conic linear programs
//
//   minimize    c'x
//   subject to  G x + s = h,   A x = b,   s in R_+^l x Q^{q_1} x ... x Q^{q_k}
//
// with Nesterov-Todd scaling and a Mehrotra predictor-corrector. The Newton
// system is reduced to normal equations; variables whose Hessian column is
// structurally diagonal (nonnegative weights that only appear in their own
// sign constraint) are eliminated analytically, so programs with many
// generator weights and few coupled variables stay cheap.

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hardbody/error.hpp"

namespace hardbody::cone {

struct SparseRow {
  std::vector<int> idx;
  std::vector<double> val;
};

/// Rows of G belonging to one second-order cone block, restricted to the
/// variables in `cols`. s = h - G x must satisfy s_0 >= |s_{1:}|.
struct SocBlock {
  std::vector<int> cols;
  Eigen::MatrixXd g;
  Eigen::VectorXd h;
};

struct Program {
  int num_vars = 0;
  Eigen::VectorXd c;
  Eigen::MatrixXd a;  // equality rows, may have zero rows
  Eigen::VectorXd b;
  std::vector<SparseRow> lp_rows;
  std::vector<double> h_lp;
  std::vector<SocBlock> socs;

  void add_lp_row(SparseRow row, double rhs) {
    lp_rows.push_back(std::move(row));
    h_lp.push_back(rhs);
  }
};

struct Options {
  double feastol = 1e-10;
  double abstol = 1e-10;
  double reltol = 1e-10;
  // Accepted when the iteration budget runs out or the step stalls.
  double loose_tol = 1e-7;
  // Last resort: feasible to loose_tol with relative gap below this.
  double inexact_gap = 5e-5;
  int max_iterations = 80;
  int refinement_steps = 3;
};

enum class Status { Optimal, NearOptimal };

struct Solution {
  Status status = Status::Optimal;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd s;  // LP part first, then each SOC block
  Eigen::VectorXd z;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  int iterations = 0;
};

namespace detail {

class Solver {
 public:
  Solver(const Program& p, const Options& opt) : p_(p), opt_(opt) {
    n_ = p.num_vars;
    neq_ = static_cast<int>(p.a.rows());
    l_ = static_cast<int>(p.lp_rows.size());
    dim_ = l_;
    for (const auto& blk : p.socs) {
      offsets_.push_back(dim_);
      dim_ += static_cast<int>(blk.h.size());
    }
    h_.resize(dim_);
    for (int r = 0; r < l_; ++r) h_[r] = p.h_lp[r];
    for (std::size_t k = 0; k < p.socs.size(); ++k) h_.segment(offsets_[k], p.socs[k].h.size()) = p.socs[k].h;
    classify();
  }

  Solution run();

 private:
  // --- structure -----------------------------------------------------------
  void classify() {
    std::vector<char> coupled(n_, 0);
    std::vector<char> seen(n_, 0);
    for (const auto& row : p_.lp_rows) {
      for (int j : row.idx) seen[j] = 1;
      if (row.idx.size() > 1)
        for (int j : row.idx) coupled[j] = 1;
    }
    for (const auto& blk : p_.socs)
      for (int j : blk.cols) coupled[j] = seen[j] = 1;
    for (int j = 0; j < n_; ++j)
      if (!seen[j]) coupled[j] = 1;
    cidx_.assign(n_, -1);
    didx_.assign(n_, -1);
    for (int j = 0; j < n_; ++j) {
      if (coupled[j]) {
        cidx_[j] = static_cast<int>(cvars_.size());
        cvars_.push_back(j);
      } else {
        didx_[j] = static_cast<int>(dvars_.size());
        dvars_.push_back(j);
      }
    }
    a_d_.resize(neq_, static_cast<Eigen::Index>(dvars_.size()));
    a_c_.resize(neq_, static_cast<Eigen::Index>(cvars_.size()));
    for (std::size_t k = 0; k < dvars_.size(); ++k) a_d_.col(k) = p_.a.col(dvars_[k]);
    for (std::size_t k = 0; k < cvars_.size(); ++k) a_c_.col(k) = p_.a.col(cvars_[k]);

    // LP rows touching only one eliminated variable stay as (row, var, coef);
    // the rest form a dense block over the coupled variables.
    for (int r = 0; r < l_; ++r) {
      const auto& row = p_.lp_rows[r];
      if (row.idx.size() == 1 && didx_[row.idx[0]] >= 0) diag_rows_.push_back({r, didx_[row.idx[0]], row.val[0]});
      else dense_rows_.push_back(r);
    }
    gd_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dense_rows_.size()), static_cast<Eigen::Index>(cvars_.size()));
    for (std::size_t k = 0; k < dense_rows_.size(); ++k) {
      const auto& row = p_.lp_rows[dense_rows_[k]];
      for (std::size_t a = 0; a < row.idx.size(); ++a) gd_(k, cidx_[row.idx[a]]) += row.val[a];
    }
  }

  Eigen::VectorXd gather_c(const Eigen::VectorXd& x) const {
    Eigen::VectorXd xc(cvars_.size());
    for (std::size_t k = 0; k < cvars_.size(); ++k) xc[k] = x[cvars_[k]];
    return xc;
  }

  Eigen::VectorXd g_times(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out(dim_);
    if (!dense_rows_.empty()) {
      Eigen::VectorXd t = gd_ * gather_c(x);
      for (std::size_t k = 0; k < dense_rows_.size(); ++k) out[dense_rows_[k]] = t[k];
    }
    for (const auto& d : diag_rows_) out[d.row] = d.val * x[dvars_[d.var]];
    for (std::size_t b = 0; b < p_.socs.size(); ++b) {
      const auto& blk = p_.socs[b];
      Eigen::VectorXd xs(blk.cols.size());
      for (std::size_t k = 0; k < blk.cols.size(); ++k) xs[k] = x[blk.cols[k]];
      out.segment(offsets_[b], blk.h.size()) = blk.g * xs;
    }
    return out;
  }

  Eigen::VectorXd gt_times(const Eigen::VectorXd& z) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
    if (!dense_rows_.empty()) {
      Eigen::VectorXd zd(dense_rows_.size());
      for (std::size_t k = 0; k < dense_rows_.size(); ++k) zd[k] = z[dense_rows_[k]];
      Eigen::VectorXd t = gd_.transpose() * zd;
      for (std::size_t k = 0; k < cvars_.size(); ++k) out[cvars_[k]] += t[k];
    }
    for (const auto& d : diag_rows_) out[dvars_[d.var]] += d.val * z[d.row];
    for (std::size_t b = 0; b < p_.socs.size(); ++b) {
      const auto& blk = p_.socs[b];
      Eigen::VectorXd t = blk.g.transpose() * z.segment(offsets_[b], blk.h.size());
      for (std::size_t k = 0; k < blk.cols.size(); ++k) out[blk.cols[k]] += t[k];
    }
    return out;
  }

  // --- cone algebra ----------------------------------------------------------
  int degree() const { return l_ + static_cast<int>(p_.socs.size()); }

  Eigen::VectorXd identity() const {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim_);
    e.head(l_).setOnes();
    for (int off : offsets_) e[off] = 1.0;
    return e;
  }

  int soc_size(std::size_t b) const { return static_cast<int>(p_.socs[b].h.size()); }

  /// Largest t with u - t e still in the cone, i.e. the minimal "eigenvalue".
  double min_eig(const Eigen::VectorXd& u) const {
    double v = std::numeric_limits<double>::infinity();
    if (l_ > 0) v = u.head(l_).minCoeff();
    for (std::size_t b = 0; b < offsets_.size(); ++b) {
      auto seg = u.segment(offsets_[b], soc_size(b));
      v = std::min(v, seg[0] - seg.tail(seg.size() - 1).norm());
    }
    return v;
  }

  Eigen::VectorXd jordan(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    Eigen::VectorXd out(dim_);
    out.head(l_) = u.head(l_).cwiseProduct(v.head(l_));
    for (std::size_t b = 0; b < offsets_.size(); ++b) {
      int off = offsets_[b], q = soc_size(b);
      auto us = u.segment(off, q);
      auto vs = v.segment(off, q);
      out[off] = us.dot(vs);
      out.segment(off + 1, q - 1) = us[0] * vs.tail(q - 1) + vs[0] * us.tail(q - 1);
    }
    return out;
  }

  /// Solves lambda o u = w for u.
  Eigen::VectorXd jordan_div(const Eigen::VectorXd& lam, const Eigen::VectorXd& w) const {
    Eigen::VectorXd out(dim_);
    out.head(l_) = w.head(l_).cwiseQuotient(lam.head(l_));
    for (std::size_t b = 0; b < offsets_.size(); ++b) {
      int off = offsets_[b], q = soc_size(b);
      auto ls = lam.segment(off, q);
      auto ws = w.segment(off, q);
      double l0 = ls[0];
      double det = l0 * l0 - ls.tail(q - 1).squaredNorm();
      double u0 = (l0 * ws[0] - ls.tail(q - 1).dot(ws.tail(q - 1))) / det;
      out[off] = u0;
      out.segment(off + 1, q - 1) = (ws.tail(q - 1) - u0 * ls.tail(q - 1)) / l0;
    }
    return out;
  }

  /// Largest alpha with x + alpha d in the cone (x strictly interior).
  double max_step(const Eigen::VectorXd& x, const Eigen::VectorXd& d) const {
    double alpha = std::numeric_limits<double>::infinity();
    for (int i = 0; i < l_; ++i)
      if (d[i] < 0.0) alpha = std::min(alpha, -x[i] / d[i]);
    for (std::size_t b = 0; b < offsets_.size(); ++b) {
      int off = offsets_[b], q = soc_size(b);
      auto xs = x.segment(off, q);
      auto ds = d.segment(off, q);
      double qa = ds[0] * ds[0] - ds.tail(q - 1).squaredNorm();
      double qb = 2.0 * (xs[0] * ds[0] - xs.tail(q - 1).dot(ds.tail(q - 1)));
      double qc = xs[0] * xs[0] - xs.tail(q - 1).squaredNorm();
      double root = std::numeric_limits<double>::infinity();
      double scale = std::max({std::abs(qa), std::abs(qb), std::abs(qc)});
      if (std::abs(qa) <= 1e-14 * scale) {
        if (qb < 0.0) root = -qc / qb;
      } else {
        double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0) {
          double sq = std::sqrt(disc);
          double qq = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
          double r1 = qq / qa;
          double r2 = qq != 0.0 ? qc / qq : std::numeric_limits<double>::infinity();
          for (double r : {r1, r2})
            if (r > 0.0) root = std::min(root, r);
        }
      }
      alpha = std::min(alpha, root);
    }
    return alpha;
  }

  // --- Nesterov-Todd scaling -------------------------------------------------
  struct SocScaling {
    double beta = 1.0;
    Eigen::VectorXd v;
  };

  void set_identity_scaling() {
    wlp_ = Eigen::VectorXd::Ones(l_);
    soc_w_.assign(offsets_.size(), {});
    for (std::size_t b = 0; b < offsets_.size(); ++b) {
      soc_w_[b].beta = 1.0;
      soc_w_[b].v = Eigen::VectorXd::Zero(soc_size(b));
      soc_w_[b].v[0] = 1.0;
    }
  }

  void compute_scaling(const Eigen::VectorXd& s, const Eigen::VectorXd& z) {
    wlp_.resize(l_);
    for (int i = 0; i < l_; ++i) wlp_[i] = std::sqrt(s[i] / z[i]);
    soc_w_.assign(offsets_.size(), {});
    for (std::size_t b = 0; b < offsets_.size(); ++b) {
      int off = offsets_[b], q = soc_size(b);
      Eigen::VectorXd ss = s.segment(off, q), zz = z.segment(off, q);
      double aa = std::sqrt(std::max(ss[0] * ss[0] - ss.tail(q - 1).squaredNorm(), 1e-300));
      double bb = std::sqrt(std::max(zz[0] * zz[0] - zz.tail(q - 1).squaredNorm(), 1e-300));
      ss /= aa;
      zz /= bb;
      double cc = std::sqrt((1.0 + ss.dot(zz)) / 2.0);
      Eigen::VectorXd w(q);
      w[0] = (ss[0] + zz[0]) / (2.0 * cc);
      w.tail(q - 1) = (ss.tail(q - 1) - zz.tail(q - 1)) / (2.0 * cc);
      w[0] += 1.0;
      w /= std::sqrt(2.0 * w[0]);
      soc_w_[b].beta = std::sqrt(aa / bb);
      soc_w_[b].v = std::move(w);
    }
  }

  // W u (W is symmetric)
  Eigen::VectorXd apply_w(const Eigen::VectorXd& u) const {
    Eigen::VectorXd out(dim_);
    out.head(l_) = wlp_.cwiseProduct(u.head(l_));
    for (std::size_t b = 0; b < offsets_.size(); ++b) {
      int off = offsets_[b], q = soc_size(b);
      const auto& sw = soc_w_[b];
      Eigen::VectorXd us = u.segment(off, q);
      Eigen::VectorXd ju = us;
      ju.tail(q - 1) *= -1.0;
      out.segment(off, q) = sw.beta * (2.0 * sw.v * sw.v.dot(us) - ju);
    }
    return out;
  }

  Eigen::VectorXd apply_winv(const Eigen::VectorXd& u) const {
    Eigen::VectorXd out(dim_);
    out.head(l_) = u.head(l_).cwiseQuotient(wlp_);
    for (std::size_t b = 0; b < offsets_.size(); ++b) {
      int off = offsets_[b], q = soc_size(b);
      const auto& sw = soc_w_[b];
      Eigen::VectorXd us = u.segment(off, q);
      Eigen::VectorXd ju = us;
      ju.tail(q - 1) *= -1.0;
      Eigen::VectorXd jv = sw.v;
      jv.tail(q - 1) *= -1.0;
      out.segment(off, q) = (2.0 * jv * sw.v.dot(ju) - ju) / sw.beta;
    }
    return out;
  }

  // --- reduced KKT ------------------------------------------------------------
  void factor() {
    const Eigen::Index nd = static_cast<Eigen::Index>(dvars_.size());
    const Eigen::Index nc = static_cast<Eigen::Index>(cvars_.size());
    hdiag_ = Eigen::VectorXd::Zero(nd);
    Eigen::MatrixXd hc = Eigen::MatrixXd::Zero(nc, nc);
    for (const auto& d : diag_rows_) hdiag_[d.var] += d.val * d.val / (wlp_[d.row] * wlp_[d.row]);
    if (!dense_rows_.empty()) {
      Eigen::MatrixXd wg = gd_;
      for (std::size_t k = 0; k < dense_rows_.size(); ++k) wg.row(k) /= wlp_[dense_rows_[k]];
      hc.noalias() += wg.transpose() * wg;
    }
    for (std::size_t b = 0; b < offsets_.size(); ++b) {
      const auto& blk = p_.socs[b];
      int q = soc_size(b);
      // W_b^{-1} G_b = (2 Jv (v'J G) - J G) / beta
      const auto& sw = soc_w_[b];
      Eigen::MatrixXd jg = blk.g;
      jg.bottomRows(q - 1) *= -1.0;
      Eigen::VectorXd jv = sw.v;
      jv.tail(q - 1) *= -1.0;
      Eigen::MatrixXd wig = (2.0 * jv * (sw.v.transpose() * jg) - jg) / sw.beta;
      Eigen::MatrixXd contrib = wig.transpose() * wig;
      for (std::size_t a = 0; a < blk.cols.size(); ++a)
        for (std::size_t c = 0; c < blk.cols.size(); ++c) hc(cidx_[blk.cols[a]], cidx_[blk.cols[c]]) += contrib(a, c);
    }
    // Guard variables with no cone rows.
    for (Eigen::Index k = 0; k < nd; ++k)
      if (hdiag_[k] <= 0.0) hdiag_[k] = 1e-14;
    Eigen::MatrixXd kkt(nc + neq_, nc + neq_);
    kkt.topLeftCorner(nc, nc) = hc;
    kkt.topRightCorner(nc, neq_) = a_c_.transpose();
    kkt.bottomLeftCorner(neq_, nc) = a_c_;
    kkt.bottomRightCorner(neq_, neq_) = -(a_d_ * hdiag_.cwiseInverse().asDiagonal() * a_d_.transpose());
    // Static regularisation keeps degenerate systems factorable; the
    // refinement steps in solve() correct against the exact system.
    if (kkt.rows() == 0) return;
    const double reg = 1e-15 * std::max(1.0, kkt.diagonal().cwiseAbs().maxCoeff());
    kkt.diagonal().head(nc).array() += reg;
    kkt.diagonal().tail(neq_).array() -= reg;
    lu_.compute(kkt);
  }

  /// Solves [0 A' G'; A 0 0; G 0 -W'W] [dx;dy;dz] = [bx;by;bz].
  void solve_once(const Eigen::VectorXd& bx, const Eigen::VectorXd& by, const Eigen::VectorXd& bz,
                  Eigen::VectorXd& dx, Eigen::VectorXd& dy, Eigen::VectorXd& dz) const {
    Eigen::VectorXd r1 = bx + gt_times(apply_winv(apply_winv(bz)));
    const Eigen::Index nd = static_cast<Eigen::Index>(dvars_.size());
    const Eigen::Index nc = static_cast<Eigen::Index>(cvars_.size());
    Eigen::VectorXd r1d(nd), r1c(nc);
    for (Eigen::Index k = 0; k < nd; ++k) r1d[k] = r1[dvars_[k]];
    for (Eigen::Index k = 0; k < nc; ++k) r1c[k] = r1[cvars_[k]];
    Eigen::VectorXd hinv_r1d = r1d.cwiseQuotient(hdiag_);
    Eigen::VectorXd rhs(nc + neq_);
    rhs.head(nc) = r1c;
    rhs.tail(neq_) = by - a_d_ * hinv_r1d;
    Eigen::VectorXd sol = rhs.size() ? Eigen::VectorXd(lu_.solve(rhs)) : rhs;
    dy = sol.tail(neq_);
    Eigen::VectorXd dxd = (r1d - a_d_.transpose() * dy).cwiseQuotient(hdiag_);
    dx.resize(n_);
    for (Eigen::Index k = 0; k < nd; ++k) dx[dvars_[k]] = dxd[k];
    for (Eigen::Index k = 0; k < nc; ++k) dx[cvars_[k]] = sol[k];
    dz = apply_winv(apply_winv(g_times(dx) - bz));
  }

  void solve(const Eigen::VectorXd& bx, const Eigen::VectorXd& by, const Eigen::VectorXd& bz, Eigen::VectorXd& dx,
             Eigen::VectorXd& dy, Eigen::VectorXd& dz) const {
    solve_once(bx, by, bz, dx, dy, dz);
    for (int it = 0; it < opt_.refinement_steps; ++it) {
      Eigen::VectorXd e1 = bx - p_.a.transpose() * dy - gt_times(dz);
      Eigen::VectorXd e2 = by - p_.a * dx;
      Eigen::VectorXd e3 = bz - (g_times(dx) - apply_w(apply_w(dz)));
      double err = std::max({e1.lpNorm<Eigen::Infinity>(), e2.size() ? e2.lpNorm<Eigen::Infinity>() : 0.0,
                             e3.lpNorm<Eigen::Infinity>()});
      double ref = std::max({bx.lpNorm<Eigen::Infinity>(), by.size() ? by.lpNorm<Eigen::Infinity>() : 0.0,
                             bz.lpNorm<Eigen::Infinity>(), 1e-300});
      if (err <= 1e-14 * ref) break;
      Eigen::VectorXd cx, cy, cz;
      solve_once(e1, e2, e3, cx, cy, cz);
      dx += cx;
      dy += cy;
      dz += cz;
    }
  }

  const Program& p_;
  Options opt_;
  int n_ = 0, neq_ = 0, l_ = 0, dim_ = 0;
  std::vector<int> offsets_;
  Eigen::VectorXd h_;
  std::vector<int> cvars_, dvars_, cidx_, didx_;
  struct DiagRow {
    int row, var;
    double val;
  };
  std::vector<DiagRow> diag_rows_;
  std::vector<int> dense_rows_;
  Eigen::MatrixXd gd_;
  Eigen::MatrixXd a_d_, a_c_;
  Eigen::VectorXd wlp_;
  std::vector<SocScaling> soc_w_;
  Eigen::VectorXd hdiag_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

inline Solution Solver::run() {
  const Eigen::VectorXd& c = p_.c;
  const Eigen::VectorXd& b = p_.b;
  const Eigen::VectorXd e = identity();

  Eigen::VectorXd x, y, z, s;
  set_identity_scaling();
  factor();
  solve(-c, b, h_, x, y, z);
  s = -z;
  {
    double nrm = std::max(1.0, s.norm());
    double ts = -min_eig(s);
    if (ts >= -1e-8 * nrm) s += (1.0 + ts) * e;
    nrm = std::max(1.0, z.norm());
    double tz = -min_eig(z);
    if (tz >= -1e-8 * nrm) z += (1.0 + tz) * e;
  }

  const double resx0 = std::max(1.0, c.norm());
  const double resy0 = std::max(1.0, b.norm());
  const double resz0 = std::max(1.0, h_.norm());

  Solution sol;
  double best_score = std::numeric_limits<double>::infinity();
  Solution best;
  double best_inexact = std::numeric_limits<double>::infinity();
  Solution inexact;
  for (int iter = 0; iter <= opt_.max_iterations; ++iter) {
    Eigen::VectorXd rx = p_.a.transpose() * y + gt_times(z) + c;
    Eigen::VectorXd ry = p_.a * x - b;
    Eigen::VectorXd rz = g_times(x) + s - h_;
    double gap = s.dot(z);
    double pcost = c.dot(x);
    double dcost = -b.dot(y) - h_.dot(z);
    double pres = std::max(ry.size() ? ry.norm() / resy0 : 0.0, rz.norm() / resz0);
    double dres = rx.norm() / resx0;
    double relgap = std::numeric_limits<double>::infinity();
    if (pcost < 0.0) relgap = gap / -pcost;
    else if (dcost > 0.0) relgap = gap / dcost;

    double score = std::max({pres, dres, std::min(gap, relgap)});
#ifdef HARDBODY_IPM_TRACE
    std::fprintf(stderr, "it %d pres %.3e dres %.3e gap %.3e pcost %.15g dcost %.15g\n", iter, pres, dres, gap, pcost,
                 dcost);
#endif
    if (!std::isfinite(score) || !std::isfinite(pcost) || !std::isfinite(dcost)) break;
    // Past convergence the Newton systems lose accuracy; stop once the
    // residuals clearly start growing again.
    if (best_score <= opt_.loose_tol && score > 1e3 * best_score) break;
    const double gap_measure = std::min(gap, relgap);
    if (std::max(pres, dres) <= opt_.loose_tol && gap_measure < best_inexact) {
      best_inexact = gap_measure;
      inexact.x = x;
      inexact.y = y;
      inexact.s = s;
      inexact.z = z;
      inexact.primal_objective = pcost;
      inexact.dual_objective = dcost;
      inexact.iterations = iter;
    }
    if (score < best_score) {
      best_score = score;
      best.x = x;
      best.y = y;
      best.s = s;
      best.z = z;
      best.primal_objective = pcost;
      best.dual_objective = dcost;
      best.iterations = iter;
    }
    if (pres <= opt_.feastol && dres <= opt_.feastol && (gap <= opt_.abstol || relgap <= opt_.reltol)) {
      best.status = Status::Optimal;
      return best;
    }
    if (iter == opt_.max_iterations) break;

    compute_scaling(s, z);
    factor();
    Eigen::VectorXd lam = apply_w(z);
    double mu = gap / degree();

    // predictor
    Eigen::VectorXd u = -lam;
    Eigen::VectorXd dx, dy, dz;
    solve(-rx, -ry, -rz - apply_w(u), dx, dy, dz);
    Eigen::VectorXd dzt = apply_w(dz);
    Eigen::VectorXd dst = u - dzt;
    double a_aff = std::min(1.0, std::min(max_step(lam, dst), max_step(lam, dzt)));
    double mu_aff = (lam + a_aff * dst).dot(lam + a_aff * dzt) / degree();
    double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3.0);

    // corrector
    Eigen::VectorXd rhs = -jordan(lam, lam) - jordan(dst, dzt) + sigma * mu * e;
    u = jordan_div(lam, rhs);
    solve(-rx, -ry, -rz - apply_w(u), dx, dy, dz);
    dzt = apply_w(dz);
    dst = u - dzt;
    double amax = std::min(max_step(lam, dst), max_step(lam, dzt));
    double alpha = std::min(1.0, 0.99 * amax);
    if (!(alpha > 1e-14)) break;
#ifdef HARDBODY_IPM_TRACE
    std::fprintf(stderr, "  alpha %.3e mu %.3e sigma %.3e mins %.3e minz %.3e |dx| %.3e\n", alpha, mu, sigma, s.minCoeff(), z.minCoeff(), dx.norm());
#endif

    x += alpha * dx;
    y += alpha * dy;
    z += alpha * dz;
    s += alpha * apply_w(dst);
  }
  if (best_score <= opt_.loose_tol) {
    best.status = Status::NearOptimal;
    return best;
  }
  if (best_inexact <= opt_.inexact_gap) {
    inexact.status = Status::NearOptimal;
    return inexact;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", best_score);
  throw Error(ErrorCode::IterationLimit, std::string("interior-point solver did not converge (residual ") + buf + ")");
}

}  // namespace detail

inline Solution solve(const Program& program, const Options& options = {}) {
  detail::Solver solver(program, options);
  return solver.run();
}

}  // namespace hardbody::cone
