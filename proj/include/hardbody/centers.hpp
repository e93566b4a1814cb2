#pragma once

// Barycenter and Santaló point of K-type bodies on the e0 axis, Grünbaum
// fractions, and the closed-form volumes of the lower cones.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hardbody/bodies.hpp"
#include "hardbody/error.hpp"
#include "hardbody/estimate.hpp"
#include "hardbody/polarity.hpp"
#include "hardbody/rng.hpp"
#include "hardbody/sampling.hpp"
#include "hardbody/solver.hpp"

namespace hardbody {

enum class CenterMethod { SampleMean, GrunbaumBisection, PolarRootFind };

inline std::string to_string(CenterMethod m) {
  switch (m) {
    case CenterMethod::SampleMean: return "SampleMean";
    case CenterMethod::GrunbaumBisection: return "GrunbaumBisection";
    case CenterMethod::PolarRootFind: return "PolarRootFind";
  }
  return "Unknown";
}

/// Height eta on the e0 axis with interval [lo, hi]. For sample means the
/// full mean vector and the size of its y_perp part come along.
struct CenterEstimate {
  double eta = 0.0;
  double lo = 0.0, hi = 0.0;
  CenterMethod method = CenterMethod::SampleMean;
  std::int64_t n_samples = 0;
  double std_error = 0.0;
  Eigen::VectorXd mean;
  double perp_norm = 0.0;
  double perp_stderr = 0.0;  // sqrt of the summed per-coordinate variances
  double effective_sample_size = 0.0;
  int iterations = 0;
};

inline nlohmann::json to_json(const CenterEstimate& c) {
  nlohmann::json mean = nlohmann::json::array();
  for (Eigen::Index k = 0; k < c.mean.size(); ++k) mean.push_back(c.mean[k]);
  return {{"eta", c.eta},
          {"confidence_interval", {c.lo, c.hi}},
          {"method", to_string(c.method)},
          {"n_samples", c.n_samples},
          {"stderr", c.std_error},
          {"perp_norm", c.perp_norm},
          {"perp_stderr", c.perp_stderr},
          {"effective_sample_size", c.effective_sample_size},
          {"iterations", c.iterations},
          {"mean", std::move(mean)}};
}

struct BarycenterConfig {
  ChainConfig chain;
  int n_chains = 8;
  int points_per_chain = 200;
  int batches_per_chain = 5;
  double z = 3.0;  // interval half-width in standard errors
};

namespace detail {

/// Batch means over contiguous batches of every chain.
struct BatchMeans {
  Eigen::VectorXd mean;
  Eigen::VectorXd std_error;
  std::int64_t count = 0;
  double ess = 0.0;
};

inline BatchMeans batch_means(const std::vector<ChainResult>& chains, int batches_per_chain) {
  if (batches_per_chain < 1) throw Error(ErrorCode::InvalidConfig, "batches_per_chain must be >= 1");
  const int dim = static_cast<int>(chains.front().points.front().size());
  std::vector<Eigen::VectorXd> batch;
  std::vector<std::vector<double>> coords(static_cast<std::size_t>(dim));
  BatchMeans out;
  for (const auto& ch : chains) {
    const int len = static_cast<int>(ch.points.size());
    const int per = len / batches_per_chain;
    if (per < 1) throw Error(ErrorCode::InvalidConfig, "fewer points than batches in a chain");
    for (int b = 0; b < batches_per_chain; ++b) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
      for (int i = b * per; i < (b + 1) * per; ++i) acc += ch.points[static_cast<std::size_t>(i)];
      batch.push_back(acc / per);
    }
    for (const auto& p : ch.points)
      for (int k = 0; k < dim; ++k) coords[static_cast<std::size_t>(k)].push_back(p[k]);
    out.count += len;
    out.ess += ch.effective_sample_size;
  }
  out.mean.resize(dim);
  for (int k = 0; k < dim; ++k)
    out.mean[k] = pairwise_sum(coords[static_cast<std::size_t>(k)]) / static_cast<double>(out.count);
  const double nb = static_cast<double>(batch.size());
  out.std_error = Eigen::VectorXd::Zero(dim);
  if (batch.size() > 1) {
    for (int k = 0; k < dim; ++k) {
      std::vector<double> bm(batch.size()), sq(batch.size());
      for (std::size_t i = 0; i < batch.size(); ++i) bm[i] = batch[i][k];
      const double m = pairwise_sum(bm) / nb;
      for (std::size_t i = 0; i < batch.size(); ++i) sq[i] = (bm[i] - m) * (bm[i] - m);
      out.std_error[k] = std::sqrt(pairwise_sum(sq) / (nb - 1.0) / nb);
    }
  }
  return out;
}

}  // namespace detail

/// Mean of hit-and-run samples; coordinate 0 is the height.
inline CenterEstimate estimate_barycenter(const BodyOracle& body, const BarycenterConfig& cfg, std::uint64_t seed) {
  auto chains = hit_and_run_chains(body, cfg.chain, cfg.n_chains, cfg.points_per_chain, seed);
  auto bm = detail::batch_means(chains, cfg.batches_per_chain);
  CenterEstimate c;
  c.method = CenterMethod::SampleMean;
  c.mean = bm.mean;
  c.eta = bm.mean[0];
  c.std_error = bm.std_error[0];
  c.lo = c.eta - cfg.z * c.std_error;
  c.hi = c.eta + cfg.z * c.std_error;
  c.n_samples = bm.count;
  c.effective_sample_size = bm.ess;
  const auto d = bm.mean.size();
  if (d > 1) {
    c.perp_norm = bm.mean.tail(d - 1).norm();
    c.perp_stderr = bm.std_error.tail(d - 1).norm();
  }
  return c;
}

/// Interior point on the e0 axis halfway between the top and bottom of K(η, κ).
inline Eigen::VectorXd k_axis_midpoint(int n, double eta, double kappa = 1.0) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n + 1);
  x[0] = 0.5 * ((1.0 - eta) - kappa * eta);
  return x;
}

// --- Grünbaum -------------------------------------------------------------------

/// min(|{<axis, y> >= cut}|, |{<axis, y> < cut}|) / |body| from hit-and-run
/// points. The standard error uses the indicator's effective sample size
/// summed over chains.
inline Estimate grunbaum_check(const BodyOracle& body, const Eigen::VectorXd& axis, double cut, int n_samples,
                               std::uint64_t seed, const ChainConfig& chain = {}, int n_chains = 4) {
  if (axis.size() != body.dimension) throw Error(ErrorCode::InvalidConfig, "axis has the wrong dimension");
  if (!(axis.norm() > 0.0)) throw Error(ErrorCode::InvalidConfig, "axis must be nonzero");
  if (n_chains < 1 || n_samples < n_chains) throw Error(ErrorCode::InvalidConfig, "need n_samples >= n_chains >= 1");
  const int per = n_samples / n_chains;
  auto chains = hit_and_run_chains(body, chain, n_chains, per, seed);
  std::int64_t above = 0, total = 0;
  double ess = 0.0;
  for (const auto& ch : chains) {
    std::vector<double> ind(ch.points.size());
    for (std::size_t i = 0; i < ch.points.size(); ++i) {
      ind[i] = axis.dot(ch.points[i]) >= cut ? 1.0 : 0.0;
      above += static_cast<std::int64_t>(ind[i]);
    }
    total += static_cast<std::int64_t>(ind.size());
    ess += effective_sample_size(ind);
  }
  const double f = static_cast<double>(above) / static_cast<double>(total);
  Estimate e;
  e.value = std::min(f, 1.0 - f);
  e.std_error = std::sqrt(f * (1.0 - f) / std::max(1.0, ess));
  e.n_samples = total;
  e.seed = seed;
  e.label = "grunbaum_fraction";
  return e;
}

inline double grunbaum_bound() { return 1.0 / std::numbers::e; }

// --- lower cones ------------------------------------------------------------------

enum class ConeVolumeKind { CMinusBelowZero, CMinusPrime };

/// Cross-sections (1 + ηh)^n |base| integrated over h:
///   CMinusBelowZero: h ∈ [-1/η, 0], base Q_1   -> |Q_1| / (η(n+1))
///   CMinusPrime:     h ∈ [-1/η, 0.98], base Q_t° -> (1 + 0.98η)^(n+1) / (η(n+1)) |Q_t°|
inline Estimate cone_volume_closed_form(ConeVolumeKind kind, double eta, const Estimate& base_volume, int n) {
  if (n < 1) throw Error(ErrorCode::DomainError, "cone volume needs n >= 1");
  if (eta == 0.0) throw Error(ErrorCode::EtaZero, "cone volume is infinite at eta = 0");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw Error(ErrorCode::DomainError, "eta must be positive");
  const double denom = eta * (n + 1.0);
  double factor = 1.0 / denom;
  if (kind == ConeVolumeKind::CMinusPrime) factor = std::pow(1.0 + 0.98 * eta, n + 1.0) / denom;
  Estimate e = base_volume;
  e.value = factor * base_volume.value;
  e.std_error = factor * base_volume.std_error;
  e.label = kind == ConeVolumeKind::CMinusPrime ? "cone_volume_cminus_prime" : "cone_volume_cminus_below_zero";
  return e;
}

// --- Santaló point ------------------------------------------------------------------

struct SantaloConfig {
  BarycenterConfig barycenter;
  double lo = 0.0, hi = 0.0;  // bracket on h
  double width_tol = 0.0;     // <= 0 means 1/n^2
  int max_iterations = 40;
};

namespace detail {

/// e0 coordinate of the barycenter of (family(h))°, sampled from the origin.
inline CenterEstimate polar_height(const std::function<BodyOracle(double)>& family, double h,
                                   const BarycenterConfig& cfg, std::uint64_t seed) {
  BodyOracle pol = polar_oracle(family(h));
  BarycenterConfig c = cfg;
  c.chain.start = Eigen::VectorXd::Zero(pol.dimension);
  return estimate_barycenter(pol, c, seed);
}

inline bool ci_covers_zero(const CenterEstimate& e) { return e.lo <= 0.0 && 0.0 <= e.hi; }

}  // namespace detail

/// Root in h of the polar barycenter height of family(h), where family(h)
/// is the body seen from the point h e0. That height increases with h.
/// Bisection on the sign of the estimate; stops once the estimate's interval
/// covers zero or the bracket is narrower than width_tol. A bracket without
/// a sign change is widened once by its own width on each side (the lower
/// end kept above `floor`), then RootNotBracketed.
inline CenterEstimate estimate_santalo(const std::function<BodyOracle(double)>& family, int n,
                                       const SantaloConfig& cfg, std::uint64_t seed,
                                       double floor = -std::numeric_limits<double>::infinity(),
                                       double ceiling = std::numeric_limits<double>::infinity()) {
  if (!(cfg.lo < cfg.hi)) throw Error(ErrorCode::InvalidConfig, "santalo bracket needs lo < hi");
  const double width_tol = cfg.width_tol > 0.0 ? cfg.width_tol : 1.0 / (static_cast<double>(n) * n);
  double lo = cfg.lo, hi = cfg.hi;
  std::uint64_t calls = 0;
  auto eval = [&](double h) { return detail::polar_height(family, h, cfg.barycenter, seed + 7919 * calls++); };

  CenterEstimate flo = eval(lo), fhi = eval(hi);
  std::int64_t samples = flo.n_samples + fhi.n_samples;
  auto found = [&](double h, const CenterEstimate& f, int it) {
    CenterEstimate r;
    r.method = CenterMethod::PolarRootFind;
    r.eta = h;
    r.lo = lo;
    r.hi = hi;
    r.n_samples = samples;
    r.std_error = f.std_error;
    r.iterations = it;
    return r;
  };
  if (detail::ci_covers_zero(flo) && !detail::ci_covers_zero(fhi)) return found(lo, flo, 0);
  if (detail::ci_covers_zero(fhi) && !detail::ci_covers_zero(flo)) return found(hi, fhi, 0);
  if (!(flo.eta < 0.0 && fhi.eta > 0.0)) {
    const double w = hi - lo;
    const double nlo = std::max(lo - w, floor), nhi = std::min(hi + w, ceiling);
    if (nlo < lo) {
      lo = nlo;
      flo = eval(lo);
      samples += flo.n_samples;
    }
    if (nhi > hi) {
      hi = nhi;
      fhi = eval(hi);
      samples += fhi.n_samples;
    }
    if (!(flo.eta < 0.0 && fhi.eta > 0.0))
      throw Error(ErrorCode::RootNotBracketed, "polar barycenter height does not change sign on the bracket");
  }
  int it = 0;
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo < width_tol || it >= cfg.max_iterations) {
      CenterEstimate fm = eval(mid);
      samples += fm.n_samples;
      return found(mid, fm, it);
    }
    CenterEstimate fm = eval(mid);
    samples += fm.n_samples;
    ++it;
    if (detail::ci_covers_zero(fm)) return found(mid, fm, it);
    (fm.eta < 0.0 ? lo : hi) = mid;
  }
}

/// Default h bracket for K: [1/(100(n+1)), min(10/(n+1), 0.9)].
inline SantaloConfig default_santalo_config(int n) {
  SantaloConfig c;
  c.lo = 1.0 / (100.0 * (n + 1.0));
  c.hi = std::min(10.0 / (n + 1.0), 0.9);
  return c;
}

/// Santaló point height of K = conv(e0 + Q, Q_1°), via K(h) = K - h e0.
inline CenterEstimate estimate_santalo_K(const QuasiOrthogonalSystem& sys, const SantaloConfig& cfg,
                                         std::uint64_t seed) {
  auto family = [&sys](double h) { return build_K_eta(sys, h); };
  return estimate_santalo(family, sys.n, cfg, seed, 1e-6, 1.0 - 1e-6);
}

// --- polar barycenter height ------------------------------------------------------------

struct GammaCheck {
  Estimate gamma;
  double threshold = 0.0;
  bool passes = false;  // gamma >= threshold - 3 stderr
};

inline double gamma_threshold() { return -10.0 * std::log(2.0 * std::numbers::e); }

/// e0 coordinate of the barycenter of K(η_g)°.
inline GammaCheck gamma_g_check(const QuasiOrthogonalSystem& sys, double eta_g, std::uint64_t seed,
                                const BarycenterConfig& cfg = {}) {
  if (!(eta_g > 0.0 && eta_g < 1.0)) throw Error(ErrorCode::DomainError, "eta_g must lie in (0, 1)");
  auto c = detail::polar_height([&sys](double h) { return build_K_eta(sys, h); }, eta_g, cfg, seed);
  GammaCheck g;
  g.gamma.value = c.eta;
  g.gamma.std_error = c.std_error;
  g.gamma.n_samples = c.n_samples;
  g.gamma.seed = seed;
  g.gamma.label = "gamma_g";
  g.threshold = gamma_threshold();
  g.passes = g.gamma.value >= g.threshold - 3.0 * g.gamma.std_error;
  return g;
}

inline nlohmann::json to_json(const GammaCheck& g) {
  nlohmann::json e = g.gamma;
  return {{"gamma", std::move(e)}, {"threshold", g.threshold}, {"passes", g.passes}};
}

}  // namespace hardbody
