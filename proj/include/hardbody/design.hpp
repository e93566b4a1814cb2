#pragma once

// Quasi-orthogonal vector systems: scaled Gaussian vectors x_i = X_i / Delta
// with Delta = c * sqrt(log m). A system is "verified" when
//   sqrt(n)/(2 Delta) <= |x_i| <= 2 sqrt(n)/Delta      for all i
//   |<x_i, x_j>| <= sqrt(n)/Delta                       for all i != j.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hardbody/error.hpp"
#include "hardbody/estimate.hpp"
#include "hardbody/rng.hpp"

namespace hardbody {

enum class DesignMode { PaperFaithful, Desk };

struct DesignConfig {
  int n = 1;
  int m = 2;
  double c_config = 3.0;
  std::uint64_t seed = 0;
  DesignMode mode = DesignMode::Desk;
};

/// Row i of `vectors` is x_i.
struct QuasiOrthogonalSystem {
  Eigen::MatrixXd vectors;
  double delta = 1.0;
  int n = 0;
  int m = 0;
  std::uint64_t seed = 0;

  Eigen::VectorXd x(int i) const { return vectors.row(i).transpose(); }

  /// max_i |<x_i, d>|, the support function of conv{+-x_i}.
  double max_abs_projection(const Eigen::Ref<const Eigen::VectorXd>& d) const {
    if (m == 0) return 0.0;
    return (vectors * d).cwiseAbs().maxCoeff();
  }

  double max_norm() const { return m == 0 ? 0.0 : vectors.rowwise().norm().maxCoeff(); }
};

/// Builds a system from explicit vectors (fixtures, deserialisation).
inline QuasiOrthogonalSystem make_system(Eigen::MatrixXd vectors, double delta, std::uint64_t seed = 0) {
  QuasiOrthogonalSystem s;
  s.n = static_cast<int>(vectors.cols());
  s.m = static_cast<int>(vectors.rows());
  s.vectors = std::move(vectors);
  s.delta = delta;
  s.seed = seed;
  return s;
}

inline double design_delta(int m, double c_config) { return c_config * std::sqrt(std::log(static_cast<double>(m))); }

struct RangeCheck {
  bool lower_ok = false;  // c*n <= m
  bool upper_ok = false;  // m <= exp(n/c)
  bool ok() const { return lower_ok && upper_ok; }
};

inline RangeCheck check_range(const DesignConfig& cfg) {
  RangeCheck r;
  r.lower_ok = cfg.c_config * cfg.n <= cfg.m;
  r.upper_ok = std::log(static_cast<double>(cfg.m)) <= cfg.n / cfg.c_config;
  return r;
}

inline void validate(const DesignConfig& cfg) {
  if (cfg.n < 1) throw Error(ErrorCode::InvalidConfig, "n must be >= 1");
  if (cfg.m <= 1) throw Error(ErrorCode::InvalidConfig, "m must be >= 2");
  if (!(cfg.c_config > 0.0)) throw Error(ErrorCode::InvalidConfig, "c_config must be positive");
  if (cfg.mode == DesignMode::PaperFaithful && !check_range(cfg).ok())
    throw Error(ErrorCode::InvalidConfig, "paper-faithful mode requires c*n <= m <= exp(n/c)");
}

/// Independent standard Gaussian vectors divided by Delta. Vector i is drawn
/// from stream (seed, "design", i), so generation is order independent.
inline QuasiOrthogonalSystem generate_design(const DesignConfig& cfg) {
  validate(cfg);
  QuasiOrthogonalSystem s;
  s.n = cfg.n;
  s.m = cfg.m;
  s.seed = cfg.seed;
  s.delta = design_delta(cfg.m, cfg.c_config);
  s.vectors.resize(cfg.m, cfg.n);
  parallel_for(static_cast<std::size_t>(cfg.m), [&](std::size_t i) {
    CounterRng rng(cfg.seed, "design", i);
    s.vectors.row(static_cast<Eigen::Index>(i)) = gaussian_vector(rng, cfg.n).transpose() / s.delta;
  });
  return s;
}

struct InnerProductViolation {
  int i = 0;
  int j = 0;
  double value = 0.0;
};

struct DesignReport {
  std::vector<int> norm_violations;
  std::vector<InnerProductViolation> inner_product_violations;
  bool passed = false;
  // min |x_i| Delta/sqrt(n), max |x_i| Delta/sqrt(n), max_{i!=j} |<x_i,x_j>| Delta/sqrt(n)
  double min_norm_scaled = 0.0;
  double max_norm_scaled = 0.0;
  double max_inner_scaled = 0.0;
};

/// Checks both defining inequalities with exact comparisons. The Gram matrix
/// is formed in row blocks to keep memory bounded for large m.
inline DesignReport verify_design(const QuasiOrthogonalSystem& sys) {
  DesignReport rep;
  const double sqrt_n = std::sqrt(static_cast<double>(sys.n));
  const double unit = sqrt_n / sys.delta;
  const double lo = 0.5 * unit;
  const double hi = 2.0 * unit;

  Eigen::VectorXd norms = sys.vectors.rowwise().norm();
  if (sys.m > 0) {
    rep.min_norm_scaled = norms.minCoeff() / unit;
    rep.max_norm_scaled = norms.maxCoeff() / unit;
  }
  for (int i = 0; i < sys.m; ++i)
    if (!(lo <= norms[i] && norms[i] <= hi)) rep.norm_violations.push_back(i);

  // Gram tiles are formed in single precision and every entry that could
  // matter (near the threshold or near the running max) is recomputed in
  // double, so the comparisons and the reported max are exact.
  constexpr Eigen::Index kBlock = 512;
  const Eigen::Index m = sys.m;
  const Eigen::Index nblocks = (m + kBlock - 1) / kBlock;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> tiles;
  for (Eigen::Index bi = 0; bi < nblocks; ++bi)
    for (Eigen::Index bj = bi; bj < nblocks; ++bj) tiles.emplace_back(bi, bj);

  const Eigen::MatrixXf xf = sys.vectors.cast<float>();
  const double max_norm = m > 0 ? norms.maxCoeff() : 0.0;
  // rounding of inputs and an n-term float dot product, doubled
  const double err = 2.0 * (sys.n + 2.0) * std::ldexp(1.0, -24) * max_norm * max_norm * (1.0 + 1e-6);
  const double screen = unit - err;

  struct Tile {
    std::vector<InnerProductViolation> violations;
    double max_exact = 0.0;
  };
  std::vector<Tile> out(tiles.size());
  parallel_for(tiles.size(), [&](std::size_t t) {
    auto [bi, bj] = tiles[t];
    Eigen::Index r0 = bi * kBlock, rn = std::min(kBlock, m - r0);
    Eigen::Index c0 = bj * kBlock, cn = std::min(kBlock, m - c0);
    Eigen::MatrixXf gram;
    if (bi == bj) {
      // upper half only; the diagonal holds norms, not pairs
      gram.setZero(rn, rn);
      gram.selfadjointView<Eigen::Upper>().rankUpdate(xf.middleRows(r0, rn));
      gram.triangularView<Eigen::Lower>().setZero();
    } else {
      gram.noalias() = xf.middleRows(r0, rn) * xf.middleRows(c0, cn).transpose();
    }
    const double tmax = gram.cwiseAbs().maxCoeff();
    const float cut = static_cast<float>(std::min(screen, tmax - 2.0 * err));
    for (Eigen::Index c = 0; c < cn; ++c) {
      if (!(gram.col(c).cwiseAbs().maxCoeff() >= cut)) continue;
      for (Eigen::Index r = 0; r < rn; ++r) {
        if (!(std::abs(gram(r, c)) >= cut)) continue;
        Eigen::Index i = r0 + r, j = c0 + c;
        if (j <= i) continue;
        const double v = sys.vectors.row(i).dot(sys.vectors.row(j));
        out[t].max_exact = std::max(out[t].max_exact, std::abs(v));
        if (!(std::abs(v) <= unit)) out[t].violations.push_back({static_cast<int>(i), static_cast<int>(j), v});
      }
    }
  });
  double mx = 0.0;
  for (const auto& tile : out) {
    mx = std::max(mx, tile.max_exact);
    rep.inner_product_violations.insert(rep.inner_product_violations.end(), tile.violations.begin(),
                                        tile.violations.end());
  }
  std::sort(rep.inner_product_violations.begin(), rep.inner_product_violations.end(),
            [](const auto& a, const auto& b) { return std::pair(a.i, a.j) < std::pair(b.i, b.j); });
  rep.max_inner_scaled = mx / unit;
  rep.passed = rep.norm_violations.empty() && rep.inner_product_violations.empty();
  return rep;
}

enum class ProjectionLaw { Gaussian, Sphere, Ball };

/// One sample of max_i |<v_i, X>| per trial, X drawn from the chosen law
/// (sphere and ball of radius sqrt(n)). Trial t uses stream (seed, "tail", t).
inline std::vector<double> max_projection_samples(ProjectionLaw law, const Eigen::MatrixXd& directions,
                                                  std::int64_t trials, std::uint64_t seed) {
  const Eigen::Index n = directions.cols();
  for (Eigen::Index i = 0; i < directions.rows(); ++i)
    if (std::abs(directions.row(i).norm() - 1.0) > 1e-9)
      throw Error(ErrorCode::NonUnitDirection, "direction " + std::to_string(i) + " is not unit norm");
  std::vector<double> out(static_cast<std::size_t>(trials));
  const double radius = std::sqrt(static_cast<double>(n));
  parallel_for(out.size(), [&](std::size_t t) {
    CounterRng rng(seed, "tail", t);
    Eigen::VectorXd x;
    switch (law) {
      case ProjectionLaw::Gaussian: x = gaussian_vector(rng, n); break;
      case ProjectionLaw::Sphere: x = radius * uniform_on_sphere(rng, n); break;
      case ProjectionLaw::Ball: x = uniform_in_ball(rng, n, radius); break;
    }
    out[t] = directions.rows() == 0 ? 0.0 : (directions * x).cwiseAbs().maxCoeff();
  });
  return out;
}

/// Empirical P(max_i |<v_i, X>| >= threshold) with binomial standard error.
inline Estimate tail_probability(ProjectionLaw law, const Eigen::MatrixXd& directions, double threshold,
                                 std::int64_t trials, std::uint64_t seed) {
  auto samples = max_projection_samples(law, directions, trials, seed);
  std::int64_t hits = std::count_if(samples.begin(), samples.end(), [&](double v) { return v >= threshold; });
  return proportion_estimate(hits, trials, seed, "tail_probability");
}

inline nlohmann::json to_json(const QuasiOrthogonalSystem& s) {
  nlohmann::json vecs = nlohmann::json::array();
  for (int i = 0; i < s.m; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < s.n; ++k) row.push_back(s.vectors(i, k));
    vecs.push_back(std::move(row));
  }
  return {{"n", s.n}, {"m", s.m}, {"delta", s.delta}, {"seed", s.seed}, {"vectors", std::move(vecs)}};
}

inline QuasiOrthogonalSystem system_from_json(const nlohmann::json& j) {
  QuasiOrthogonalSystem s;
  j.at("n").get_to(s.n);
  j.at("m").get_to(s.m);
  j.at("delta").get_to(s.delta);
  j.at("seed").get_to(s.seed);
  const auto& vecs = j.at("vectors");
  if (static_cast<int>(vecs.size()) != s.m) throw Error(ErrorCode::InvalidConfig, "vector count does not match m");
  s.vectors.resize(s.m, s.n);
  for (int i = 0; i < s.m; ++i) {
    if (static_cast<int>(vecs[i].size()) != s.n) throw Error(ErrorCode::InvalidConfig, "vector length does not match n");
    for (int k = 0; k < s.n; ++k) s.vectors(i, k) = vecs[i][k].get<double>();
  }
  return s;
}

inline nlohmann::json to_json(const DesignReport& r) {
  nlohmann::json ip = nlohmann::json::array();
  for (const auto& v : r.inner_product_violations) ip.push_back({{"i", v.i}, {"j", v.j}, {"value", v.value}});
  return {{"passed", r.passed},
          {"norm_violations", r.norm_violations},
          {"inner_product_violations", std::move(ip)},
          {"extremal_values",
           {{"min_norm_scaled", r.min_norm_scaled},
            {"max_norm_scaled", r.max_norm_scaled},
            {"max_inner_scaled", r.max_inner_scaled}}}};
}

}  // namespace hardbody
