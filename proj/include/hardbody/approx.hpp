#pragma once

// Approximating polytopes (random vertices, greedy boundary points) and the
// centred sandwich ratio between a body and a polytope.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hardbody/error.hpp"
#include "hardbody/polytope.hpp"
#include "hardbody/rng.hpp"
#include "hardbody/sampling.hpp"
#include "hardbody/solver.hpp"

namespace hardbody {

/// N hit-and-run points of `body`, taken round-robin from `n_chains` chains.
/// No size check: fewer than n + 1 points give a flat hull.
inline CandidatePolytope sampled_points(const BodyOracle& body, int N, const ChainConfig& chain, std::uint64_t seed,
                                        int n_chains = 4) {
  const int n = body.dimension;
  if (N < 1) throw Error(ErrorCode::InvalidConfig, "need at least one point");
  n_chains = std::clamp(n_chains, 1, N);
  const int per = (N + n_chains - 1) / n_chains;
  auto chains = hit_and_run_chains(body, chain, n_chains, per, seed);
  Eigen::MatrixXd v(N, n);
  for (int k = 0; k < N; ++k)
    v.row(k) = chains[static_cast<std::size_t>(k % n_chains)].points[static_cast<std::size_t>(k / n_chains)].transpose();
  return make_polytope(v, "random_vertex");
}

inline CandidatePolytope random_vertex_polytope(const BodyOracle& body, int N, const ChainConfig& chain,
                                                std::uint64_t seed, int n_chains = 4) {
  if (N < body.dimension + 2) throw Error(ErrorCode::InvalidConfig, "random polytope needs N >= n + 2");
  return sampled_points(body, N, chain, seed, n_chains);
}

// --- greedy ------------------------------------------------------------------

struct GreedyConfig {
  int direction_budget = 512;
  int sweeps = 3;  // remove-and-reinsert passes after N vertices are placed
  std::optional<Eigen::VectorXd> center;  // default: origin
};

namespace detail {

inline Eigen::VectorXd boundary_point(const BodyOracle& body, const Eigen::VectorXd& c, const Eigen::VectorXd& d) {
  const double t = ray_exit(body, c, d);
  if (!std::isfinite(t) || !(t > 0.0)) throw Error(ErrorCode::CenterNotInterior, "center is not interior to the body");
  return c + t * d;
}

/// Index of the first direction whose excess is within 1e-12 of the max.
inline int best_direction(const Eigen::VectorXd& excess) {
  const double mx = excess.maxCoeff();
  for (Eigen::Index k = 0; k < excess.size(); ++k)
    if (excess[k] >= mx - 1e-12) return static_cast<int>(k);
  return 0;
}

}  // namespace detail

/// Starts from the boundary points in n+1 random directions summing to zero
/// (the centre is then inside their hull) and repeatedly adds the boundary
/// point along the probe direction where h_body - h_P is largest. Probe
/// directions are a fixed set of `direction_budget` uniform directions.
/// The sweeps remove each vertex in turn and re-add the best point, kept
/// only when the largest excess does not grow.
inline CandidatePolytope greedy_polytope(const BodyOracle& body, int N, const GreedyConfig& cfg, std::uint64_t seed) {
  const int n = body.dimension;
  if (N < n + 2) throw Error(ErrorCode::InvalidConfig, "greedy polytope needs N >= n + 2");
  if (cfg.direction_budget < 1) throw Error(ErrorCode::InvalidConfig, "direction budget must be >= 1");
  const Eigen::VectorXd c = cfg.center.value_or(Eigen::VectorXd::Zero(n));

  const int budget = cfg.direction_budget;
  Eigen::MatrixXd dirs(budget, n);
  for (int k = 0; k < budget; ++k) {
    CounterRng rng(seed, "greedy_probe", static_cast<std::uint64_t>(k));
    dirs.row(k) = uniform_on_sphere(rng, n).transpose();
  }
  Eigen::VectorXd hb(budget);
  parallel_for(static_cast<std::size_t>(budget), [&](std::size_t k) {
    hb[static_cast<Eigen::Index>(k)] = body.support_value(dirs.row(static_cast<Eigen::Index>(k)).transpose());
  });

  std::vector<Eigen::VectorXd> verts;
  {
    std::vector<Eigen::VectorXd> g(static_cast<std::size_t>(n + 1));
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n; ++k) {
      CounterRng rng(seed, "greedy_simplex", static_cast<std::uint64_t>(k));
      g[static_cast<std::size_t>(k)] = gaussian_vector(rng, n);
      sum += g[static_cast<std::size_t>(k)];
    }
    g[static_cast<std::size_t>(n)] = -sum;
    for (auto& d : g) verts.push_back(detail::boundary_point(body, c, d.normalized()));
  }

  auto hull_support = [&](const std::vector<Eigen::VectorXd>& vs, int skip) {
    Eigen::VectorXd hp = Eigen::VectorXd::Constant(budget, -std::numeric_limits<double>::infinity());
    for (std::size_t a = 0; a < vs.size(); ++a) {
      if (static_cast<int>(a) == skip) continue;
      hp = hp.cwiseMax(dirs * vs[a]);
    }
    return hp;
  };
  auto add_best = [&](std::vector<Eigen::VectorXd>& vs, const Eigen::VectorXd& hp) {
    const int k = detail::best_direction(hb - hp);
    vs.push_back(detail::boundary_point(body, c, dirs.row(k).transpose()));
  };

  while (static_cast<int>(verts.size()) < N) add_best(verts, hull_support(verts, -1));

  for (int sweep = 0; sweep < cfg.sweeps; ++sweep) {
    for (int a = 0; a < N; ++a) {
      const double before = (hb - hull_support(verts, -1)).maxCoeff();
      std::vector<Eigen::VectorXd> trial;
      trial.reserve(static_cast<std::size_t>(N));
      for (int b = 0; b < N; ++b)
        if (b != a) trial.push_back(verts[static_cast<std::size_t>(b)]);
      add_best(trial, hull_support(verts, a));
      if ((hb - hull_support(trial, -1)).maxCoeff() <= before) {
        // keep vertex order stable: the replacement takes slot a
        verts[static_cast<std::size_t>(a)] = trial.back();
      }
    }
  }

  Eigen::MatrixXd v(N, n);
  for (int a = 0; a < N; ++a) v.row(a) = verts[static_cast<std::size_t>(a)].transpose();
  return make_polytope(v, "greedy");
}

// --- sandwich ratio ------------------------------------------------------------------

/// lambda_lower: max over the sampled and forced directions of
/// (h_body(d) - <c,d>) / (h_P(d) - <c,d>). lambda_estimate: the same ratio
/// after local hill-climbing from the best directions, so it is still a
/// valid lower bound on the true ratio and never below lambda_lower.
struct RatioEstimate {
  double lambda_lower = 0.0;
  double lambda_estimate = 0.0;
  std::int64_t directions_used = 0;
  std::int64_t forced_directions = 0;
  int argmax = -1;  // index of the best direction; forced ones come first
};

inline nlohmann::json to_json(const RatioEstimate& r) {
  return {{"lambda_lower", r.lambda_lower},
          {"lambda_estimate", r.lambda_estimate},
          {"directions_used", r.directions_used},
          {"forced_directions", r.forced_directions},
          {"argmax", r.argmax}};
}

struct RatioConfig {
  int refine_starts = 4;
  int refine_steps = 60;
};

/// Ratios for each row of `dirs` (not necessarily unit).
inline Eigen::VectorXd support_ratios(const CandidatePolytope& p, const BodyOracle& body, const Eigen::VectorXd& c,
                                      const Eigen::MatrixXd& dirs) {
  Eigen::VectorXd out(dirs.rows());
  parallel_for(static_cast<std::size_t>(dirs.rows()), [&](std::size_t k) {
    Eigen::VectorXd d = dirs.row(static_cast<Eigen::Index>(k)).transpose();
    const double shift = c.dot(d);
    const double hp = p.support(d) - shift;
    if (!(hp > 0.0)) throw Error(ErrorCode::CenterNotInterior, "center is not interior to the polytope");
    out[static_cast<Eigen::Index>(k)] = (body.support_value(d) - shift) / hp;
  });
  return out;
}

inline RatioEstimate sandwich_ratio(const CandidatePolytope& p, const BodyOracle& body, const Eigen::VectorXd& center,
                                    std::int64_t n_directions, std::uint64_t seed,
                                    const Eigen::MatrixXd& forced = Eigen::MatrixXd(), const RatioConfig& cfg = {}) {
  const int n = p.dimension();
  if (body.dimension != n || center.size() != n) throw Error(ErrorCode::InvalidConfig, "dimension mismatch");
  if (n_directions < 0) throw Error(ErrorCode::InvalidConfig, "n_directions must be >= 0");
  if (forced.size() > 0 && forced.cols() != n) throw Error(ErrorCode::InvalidConfig, "forced directions dimension");
  {
    Eigen::MatrixXd centred = p.vertices.rowwise() - center.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centred);
    svd.setThreshold(1e-12);
    if (svd.rank() < n) throw Error(ErrorCode::CenterNotInterior, "polytope is not full-dimensional");
  }
  const Eigen::Index nf = forced.size() > 0 ? forced.rows() : 0;
  Eigen::MatrixXd dirs(nf + n_directions, n);
  if (nf > 0) dirs.topRows(nf) = forced;
  for (std::int64_t k = 0; k < n_directions; ++k) {
    CounterRng rng(seed, "sandwich_ratio", static_cast<std::uint64_t>(k));
    dirs.row(nf + k) = uniform_on_sphere(rng, n).transpose();
  }
  RatioEstimate r;
  r.directions_used = dirs.rows();
  r.forced_directions = nf;
  if (dirs.rows() == 0) return r;
  Eigen::VectorXd ratio = support_ratios(p, body, center, dirs);
  Eigen::Index best;
  r.lambda_lower = ratio.maxCoeff(&best);
  r.argmax = static_cast<int>(best);

  // hill-climb from the top directions with shrinking random perturbations
  std::vector<Eigen::Index> order(static_cast<std::size_t>(ratio.size()));
  for (Eigen::Index k = 0; k < ratio.size(); ++k) order[static_cast<std::size_t>(k)] = k;
  const int starts = std::min<int>(cfg.refine_starts, static_cast<int>(order.size()));
  std::partial_sort(order.begin(), order.begin() + starts, order.end(),
                    [&](Eigen::Index a, Eigen::Index b) { return ratio[a] > ratio[b] || (ratio[a] == ratio[b] && a < b); });
  std::vector<double> climbed(static_cast<std::size_t>(starts), 0.0);
  parallel_for(static_cast<std::size_t>(starts), [&](std::size_t s) {
    Eigen::VectorXd d = dirs.row(order[s]).transpose().normalized();
    double val = ratio[order[s]];
    CounterRng rng(seed, "sandwich_refine", s);
    double step = 0.1;
    for (int it = 0; it < cfg.refine_steps; ++it) {
      Eigen::VectorXd cand = (d + step * gaussian_vector(rng, n) / std::sqrt(static_cast<double>(n))).normalized();
      const double shift = center.dot(cand);
      const double hp = p.support(cand) - shift;
      const double v = hp > 0.0 ? (body.support_value(cand) - shift) / hp : -kInf;
      if (v > val) {
        val = v;
        d = cand;
      } else {
        step *= 0.9;
      }
    }
    climbed[s] = val;
  });
  r.lambda_estimate = r.lambda_lower;
  for (double v : climbed) r.lambda_estimate = std::max(r.lambda_estimate, v);
  return r;
}

}  // namespace hardbody
