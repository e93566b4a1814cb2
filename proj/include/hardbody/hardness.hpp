#pragma once

// Test vectors, the separation identities, vertex decompositions, the
// covering certificate and the sandwich checks for K(η, κ).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hardbody/bodies.hpp"
#include "hardbody/design.hpp"
#include "hardbody/error.hpp"
#include "hardbody/polytope.hpp"
#include "hardbody/rng.hpp"
#include "hardbody/solver.hpp"

namespace hardbody {

// --- test vectors ------------------------------------------------------------------

/// plus  = (1-η) e0 + σ x_i, a top vertex of K(η, κ);
/// minus = -(2 sqrt(n)/Δ) e0 + σ x_i.
struct TestVectorPair {
  int i = 0;
  int sigma = 1;
  Eigen::VectorXd plus;
  Eigen::VectorXd minus;
};

inline double minus_height(const QuasiOrthogonalSystem& sys) {
  return -2.0 * std::sqrt(static_cast<double>(sys.n)) / sys.delta;
}

inline TestVectorPair test_vectors(const QuasiOrthogonalSystem& sys, double eta, int i, int sigma) {
  if (eta > 0.5) throw Error(ErrorCode::EtaTooLarge, "test vectors need eta <= 1/2");
  if (i < 0 || i >= sys.m) throw Error(ErrorCode::InvalidConfig, "index out of range");
  if (sigma != 1 && sigma != -1) throw Error(ErrorCode::InvalidConfig, "sigma must be +1 or -1");
  TestVectorPair t;
  t.i = i;
  t.sigma = sigma;
  t.plus.resize(sys.n + 1);
  t.minus.resize(sys.n + 1);
  t.plus[0] = 1.0 - eta;
  t.minus[0] = minus_height(sys);
  t.plus.tail(sys.n) = sigma * sys.x(i);
  t.minus.tail(sys.n) = sigma * sys.x(i);
  return t;
}

/// Rows 2i and 2i+1 are the minus vectors for σ = +1 and σ = -1.
inline Eigen::MatrixXd minus_matrix(const QuasiOrthogonalSystem& sys) {
  Eigen::MatrixXd mm(2 * sys.m, sys.n + 1);
  const double h = minus_height(sys);
  for (int i = 0; i < sys.m; ++i) {
    mm(2 * i, 0) = h;
    mm(2 * i + 1, 0) = h;
    mm.row(2 * i).tail(sys.n) = sys.vectors.row(i);
    mm.row(2 * i + 1).tail(sys.n) = -sys.vectors.row(i);
  }
  return mm;
}

/// Same layout for the plus vectors.
inline Eigen::MatrixXd plus_matrix(const QuasiOrthogonalSystem& sys, double eta) {
  Eigen::MatrixXd pm(2 * sys.m, sys.n + 1);
  for (int i = 0; i < sys.m; ++i) {
    pm(2 * i, 0) = 1.0 - eta;
    pm(2 * i + 1, 0) = 1.0 - eta;
    pm.row(2 * i).tail(sys.n) = sys.vectors.row(i);
    pm.row(2 * i + 1).tail(sys.n) = -sys.vectors.row(i);
  }
  return pm;
}

// --- separation ------------------------------------------------------------------

struct SeparationPair {
  int i = 0, sigma_i = 1, j = 0, sigma_j = 1;
  double value = 0.0;
};

struct SeparationReport {
  double eta = 0.0;
  std::int64_t pairs = 0;
  double identity_max_rel_error = 0.0;
  std::int64_t identity_failures = 0;
  std::int64_t offdiag_violations = 0;  // <plus_a, minus_b> > 0 for a != b
  double offdiag_max = -kInf;
  std::vector<SeparationPair> offdiag_examples;  // first few, in (i, σ_i, j, σ_j) order
  double diag_min = kInf, diag_max = -kInf;
  double diag_lower = 0.0, diag_upper = 0.0;  // n/(8Δ²), 4n/Δ²
  bool diag_lower_applicable = false;          // 2Δ/sqrt(n) <= 1/8
  std::int64_t diag_lower_failures = 0;
  std::int64_t diag_upper_failures = 0;
  bool identities_hold = false;
};

/// All (2m)^2 products <plus_{i,σ}, minus_{j,τ}> computed directly from the
/// lifted vectors and compared with -2(1-η)sqrt(n)/Δ + στ<x_i, x_j>, where
/// the Gram entry is a separate product. Relative error is measured against
/// 2(1-η)sqrt(n)/Δ + |<x_i, x_j>|.
inline SeparationReport separation_report(const QuasiOrthogonalSystem& sys, double eta, double rel_tol = 1e-9) {
  if (eta > 0.5) throw Error(ErrorCode::EtaTooLarge, "separation needs eta <= 1/2");
  SeparationReport r;
  r.eta = eta;
  const int m = sys.m;
  const double sqrt_n = std::sqrt(static_cast<double>(sys.n));
  const double shift = 2.0 * (1.0 - eta) * sqrt_n / sys.delta;
  r.diag_lower = sys.n / (8.0 * sys.delta * sys.delta);
  r.diag_upper = 4.0 * sys.n / (sys.delta * sys.delta);
  r.diag_lower_applicable = 2.0 * sys.delta / sqrt_n <= 0.125;
  const Eigen::MatrixXd plus = plus_matrix(sys, eta);
  const Eigen::MatrixXd minus = minus_matrix(sys);

  struct RowStats {
    double max_rel = 0.0;
    std::int64_t id_fail = 0, off_viol = 0, low_fail = 0, up_fail = 0;
    double off_max = -kInf, dmin = kInf, dmax = -kInf;
    std::vector<SeparationPair> examples;
  };
  std::vector<RowStats> rows(static_cast<std::size_t>(2 * m));
  parallel_for(rows.size(), [&](std::size_t a) {
    RowStats& st = rows[a];
    const int i = static_cast<int>(a) / 2, si = a % 2 ? -1 : 1;
    const Eigen::VectorXd xi = sys.x(i);
    for (int b = 0; b < 2 * m; ++b) {
      const int j = b / 2, sj = b % 2 ? -1 : 1;
      double direct = 0.0;
      for (int k = 0; k <= sys.n; ++k) direct += plus(static_cast<Eigen::Index>(a), k) * minus(b, k);
      const double gram = i == j ? xi.squaredNorm() : xi.dot(sys.x(j));
      const double formula = -shift + si * sj * gram;
      const double rel = std::abs(direct - formula) / std::max(shift + std::abs(gram), 1e-300);
      st.max_rel = std::max(st.max_rel, rel);
      if (!(rel <= rel_tol)) ++st.id_fail;
      if (static_cast<int>(a) == b) {
        st.dmin = std::min(st.dmin, direct);
        st.dmax = std::max(st.dmax, direct);
        if (direct < r.diag_lower) ++st.low_fail;
        if (direct > r.diag_upper) ++st.up_fail;
      } else {
        st.off_max = std::max(st.off_max, direct);
        if (direct > 0.0) {
          ++st.off_viol;
          if (st.examples.size() < 8) st.examples.push_back({i, si, j, sj, direct});
        }
      }
    }
  });
  for (const auto& st : rows) {
    r.identity_max_rel_error = std::max(r.identity_max_rel_error, st.max_rel);
    r.identity_failures += st.id_fail;
    r.offdiag_violations += st.off_viol;
    r.offdiag_max = std::max(r.offdiag_max, st.off_max);
    r.diag_min = std::min(r.diag_min, st.dmin);
    r.diag_max = std::max(r.diag_max, st.dmax);
    r.diag_lower_failures += st.low_fail;
    r.diag_upper_failures += st.up_fail;
    for (const auto& e : st.examples)
      if (r.offdiag_examples.size() < 8) r.offdiag_examples.push_back(e);
  }
  r.pairs = static_cast<std::int64_t>(4) * m * m;
  r.identities_hold = r.identity_failures == 0;
  return r;
}

inline nlohmann::json to_json(const SeparationReport& r) {
  nlohmann::json ex = nlohmann::json::array();
  for (const auto& e : r.offdiag_examples)
    ex.push_back({{"i", e.i}, {"sigma_i", e.sigma_i}, {"j", e.j}, {"sigma_j", e.sigma_j}, {"value", e.value}});
  return {{"eta", r.eta},
          {"pairs", r.pairs},
          {"identity_max_rel_error", r.identity_max_rel_error},
          {"identity_failures", r.identity_failures},
          {"identities_hold", r.identities_hold},
          {"offdiag_violations", r.offdiag_violations},
          {"offdiag_max", r.offdiag_max},
          {"offdiag_examples", std::move(ex)},
          {"diag_min", r.diag_min},
          {"diag_max", r.diag_max},
          {"diag_lower", r.diag_lower},
          {"diag_upper", r.diag_upper},
          {"diag_lower_applicable", r.diag_lower_applicable},
          {"diag_lower_failures", r.diag_lower_failures},
          {"diag_upper_failures", r.diag_upper_failures}};
}

// --- decomposition ------------------------------------------------------------------

/// w = sum λ_{i,σ} plus_{i,σ} + λ_B κ(-η e0 + y) with y ∈ Q_1°.
struct VertexDecomposition {
  Eigen::VectorXd lambda_plus;   // λ_{i,+1}
  Eigen::VectorXd lambda_minus;  // λ_{i,-1}
  double lambda_b = 0.0;
  Eigen::VectorXd witness;  // y
  double reconstruction_error = 0.0;
};

inline Eigen::VectorXd reconstruct(const VertexDecomposition& d, const QuasiOrthogonalSystem& sys, double eta,
                                   double kappa) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(sys.n + 1);
  const double top = d.lambda_plus.sum() + d.lambda_minus.sum();
  w[0] = (1.0 - eta) * top - kappa * eta * d.lambda_b;
  if (sys.m > 0) w.tail(sys.n) = sys.vectors.transpose() * (d.lambda_plus - d.lambda_minus);
  w.tail(sys.n) += kappa * d.lambda_b * d.witness;
  return w;
}

/// The height fixes the top mass Λ = (w0 + κη)/(1 - η + κη); the slice
/// program then splits w_perp between ΛQ and κ(1-Λ)Q_1°. Slack left by a
/// slice gauge below 1 is spread evenly over all 2m top coefficients, which
/// moves no mass in w_perp.
inline VertexDecomposition decompose_vertex(const Eigen::VectorXd& w, const QuasiOrthogonalSystem& sys, double eta,
                                            double kappa, double tol = 1e-7) {
  const int n = sys.n, m = sys.m;
  if (w.size() != n + 1) throw Error(ErrorCode::InvalidConfig, "point has the wrong dimension");
  if (!(eta >= 0.0 && eta < 1.0) || !(kappa > 0.0)) throw Error(ErrorCode::InvalidConfig, "need 0 <= eta < 1, kappa > 0");
  const double span = 1.0 - eta + kappa * eta;
  double top = (w[0] + kappa * eta) / span;
  if (top < -tol || top > 1.0 + tol) throw Error(ErrorCode::NotInBody, "height outside K(eta, kappa)");
  top = std::clamp(top, 0.0, 1.0);
  if (m == 0 && top > tol) throw Error(ErrorCode::NotInBody, "no top vertices");
  if (m == 0) top = 0.0;
  const double bottom = 1.0 - top;
  Eigen::VectorXd wp = w.tail(n);
  auto slice = programs::slice_gauge(sys, top, kappa * bottom, wp);
  if (!(slice.gauge <= 1.0 + tol)) throw Error(ErrorCode::NotInBody, "point outside K(eta, kappa)");

  VertexDecomposition d;
  d.lambda_plus = slice.p;
  d.lambda_minus = slice.q;
  if (m > 0) {
    const double slack = std::max(0.0, top - (slice.p.sum() + slice.q.sum()));
    d.lambda_plus.array() += slack / (2.0 * m);
    d.lambda_minus.array() += slack / (2.0 * m);
  }
  d.lambda_b = bottom;
  if (bottom > 0.0) {
    d.witness = (wp - (m > 0 ? Eigen::VectorXd(sys.vectors.transpose() * (slice.p - slice.q))
                             : Eigen::VectorXd::Zero(n))) /
                (kappa * bottom);
  } else {
    d.witness = Eigen::VectorXd::Zero(n);
  }
  d.reconstruction_error = (reconstruct(d, sys, eta, kappa) - w).lpNorm<Eigen::Infinity>();
  return d;
}

inline nlohmann::json to_json(const VertexDecomposition& d) {
  auto vec = [](const Eigen::VectorXd& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v[k]);
    return a;
  };
  return {{"lambda_plus", vec(d.lambda_plus)},
          {"lambda_minus", vec(d.lambda_minus)},
          {"lambda_b", d.lambda_b},
          {"witness", vec(d.witness)},
          {"reconstruction_error", d.reconstruction_error}};
}

// --- constants ------------------------------------------------------------------

struct PaperConstants {
  int n = 0, m = 0;
  double kappa = 1.0;
  double delta = 0.0;
  double R = 0.0;               // n / (96 Δ² max(κ,1))
  double threshold = 0.0;       // 12 max(κ,1)
  double per_vertex = 0.0;      // 4n / (9Δ²)
  double lower = 0.0;           // 9Δ² m / (4n)
  double lower_ceil = 0.0;      // ceil(lower)
  double lambda_bound = 0.0;    // 9Δ² / (4n)
  double stated_lower = 0.0;    // m / n
};

inline PaperConstants paper_constants_for_delta(int n, int m, double kappa, double delta) {
  if (n < 1 || m < 1 || !(kappa > 0.0) || !(delta > 0.0))
    throw Error(ErrorCode::InvalidConfig, "constants need positive n, m, kappa, delta");
  PaperConstants c;
  c.n = n;
  c.m = m;
  c.kappa = kappa;
  c.delta = delta;
  const double k1 = std::max(kappa, 1.0), d2 = delta * delta;
  c.R = n / (96.0 * d2 * k1);
  c.threshold = 12.0 * k1;
  c.per_vertex = 4.0 * n / (9.0 * d2);
  c.lower = 9.0 * d2 * m / (4.0 * n);
  c.lower_ceil = std::ceil(c.lower);
  c.lambda_bound = 9.0 * d2 / (4.0 * n);
  c.stated_lower = static_cast<double>(m) / n;
  return c;
}

/// Δ = c sqrt(log m) as in the design generator.
inline PaperConstants paper_constants(int n, int m, double kappa, double c_config) {
  if (m < 2) throw Error(ErrorCode::InvalidConfig, "constants need m >= 2");
  return paper_constants_for_delta(n, m, kappa, design_delta(m, c_config));
}

inline nlohmann::json to_json(const PaperConstants& c) {
  return {{"n", c.n},
          {"m", c.m},
          {"kappa", c.kappa},
          {"delta", c.delta},
          {"R", c.R},
          {"threshold", c.threshold},
          {"per_vertex", c.per_vertex},
          {"lower", c.lower},
          {"lower_ceil", c.lower_ceil},
          {"lambda_bound", c.lambda_bound},
          {"stated_lower", c.stated_lower}};
}

// --- covering certificate ---------------------------------------------------------

enum class CoveringConclusion { LowerBoundHolds, SandwichViolated, Inconclusive };

inline std::string to_string(CoveringConclusion c) {
  switch (c) {
    case CoveringConclusion::LowerBoundHolds: return "LowerBoundHolds";
    case CoveringConclusion::SandwichViolated: return "SandwichViolated";
    case CoveringConclusion::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

inline constexpr double kThresholdTol = 1e-9;

struct CoveringCertificate {
  double threshold = 0.0;
  std::vector<std::vector<int>> covering_sets;  // S_α, ascending
  std::vector<int> uncovered;
  double per_vertex_bound = 0.0;
  double implied_lower_bound = 0.0;
  int max_cover = 0;            // max_α |S_α|
  int empirical_lower_bound = 0;  // ceil(m / max_cover) when every index is covered
  bool per_vertex_respected = false;
  CoveringConclusion conclusion = CoveringConclusion::Inconclusive;
};

/// S_α = {i : <w_α, minus_{i,+1}> >= 12 max(κ,1) - 1e-9}.
inline CoveringCertificate covering_certificate(const CandidatePolytope& p, const QuasiOrthogonalSystem& sys,
                                                double kappa, bool claims_sandwich = false) {
  if (p.dimension() != sys.n + 1) throw Error(ErrorCode::InvalidConfig, "polytope dimension must be n + 1");
  CoveringCertificate c;
  auto k = paper_constants_for_delta(sys.n, std::max(sys.m, 1), kappa, sys.delta);
  c.threshold = k.threshold;
  c.per_vertex_bound = k.per_vertex;
  c.implied_lower_bound = k.lower;
  const int m = sys.m;
  Eigen::MatrixXd minus_plus(m, sys.n + 1);
  const double h = minus_height(sys);
  for (int i = 0; i < m; ++i) {
    minus_plus(i, 0) = h;
    minus_plus.row(i).tail(sys.n) = sys.vectors.row(i);
  }
  c.covering_sets.resize(static_cast<std::size_t>(p.size()));
  parallel_for(c.covering_sets.size(), [&](std::size_t a) {
    Eigen::VectorXd ip = minus_plus * p.vertex(static_cast<int>(a));
    for (int i = 0; i < m; ++i)
      if (ip[i] >= c.threshold - kThresholdTol) c.covering_sets[a].push_back(i);
  });
  std::vector<char> covered(static_cast<std::size_t>(m), 0);
  for (const auto& s : c.covering_sets) {
    for (int i : s) covered[static_cast<std::size_t>(i)] = 1;
    c.max_cover = std::max(c.max_cover, static_cast<int>(s.size()));
  }
  for (int i = 0; i < m; ++i)
    if (!covered[static_cast<std::size_t>(i)]) c.uncovered.push_back(i);
  c.per_vertex_respected = c.max_cover <= c.per_vertex_bound + kThresholdTol;
  if (c.uncovered.empty()) {
    c.conclusion = CoveringConclusion::LowerBoundHolds;
    c.empirical_lower_bound = c.max_cover > 0 ? (m + c.max_cover - 1) / c.max_cover : 0;
  } else if (claims_sandwich) {
    c.conclusion = CoveringConclusion::SandwichViolated;
  }
  return c;
}

inline nlohmann::json to_json(const CoveringCertificate& c) {
  nlohmann::json sets = nlohmann::json::object();
  for (std::size_t a = 0; a < c.covering_sets.size(); ++a)
    if (!c.covering_sets[a].empty()) sets[std::to_string(a)] = c.covering_sets[a];
  return {{"threshold", c.threshold},
          {"covering_sets", std::move(sets)},
          {"uncovered", c.uncovered},
          {"per_vertex_bound", c.per_vertex_bound},
          {"implied_lower_bound", c.implied_lower_bound},
          {"max_cover", c.max_cover},
          {"empirical_lower_bound", c.empirical_lower_bound},
          {"per_vertex_respected", c.per_vertex_respected},
          {"conclusion", to_string(c.conclusion)}};
}

// --- sandwich ------------------------------------------------------------------

struct SandwichReport {
  double R = 0.0;
  bool inner_ok = false;
  std::vector<int> inner_failures;  // vertices outside the body
  std::vector<int> outer_test_failures;  // i with R max_α <w_α, minus_{i,+1}> < <plus_{i,+1}, minus_{i,+1}>
  std::int64_t n_directions = 0;
  std::int64_t outer_direction_failures = 0;  // h_K(d) > R h_P(d)
  double worst_direction_ratio = 0.0;         // max h_K(d) / h_P(d) seen, +inf if h_P(d) <= 0 < h_K(d)
  bool outer_necessary_passed = false;        // necessary conditions only, never a proof
};

/// Inner inclusion through body membership at band tol; outer inclusion
/// K ⊆ R P through the m test directions and `n_directions` random ones.
inline SandwichReport verify_sandwich(const CandidatePolytope& p, const BodyOracle& body,
                                      const QuasiOrthogonalSystem& sys, double eta, double R,
                                      std::int64_t n_directions, std::uint64_t seed, double tol = 1e-7) {
  if (!(R > 1.0)) throw Error(ErrorCode::InvalidConfig, "sandwich ratio R must exceed 1");
  if (p.dimension() != body.dimension) throw Error(ErrorCode::InvalidConfig, "dimension mismatch");
  SandwichReport r;
  r.R = R;
  std::vector<char> in_fail(static_cast<std::size_t>(p.size()), 0);
  parallel_for(in_fail.size(), [&](std::size_t a) {
    in_fail[a] = body.membership(p.vertex(static_cast<int>(a)), tol) == Membership::Outside;
  });
  for (std::size_t a = 0; a < in_fail.size(); ++a)
    if (in_fail[a]) r.inner_failures.push_back(static_cast<int>(a));
  r.inner_ok = r.inner_failures.empty();

  for (int i = 0; i < sys.m; ++i) {
    auto t = test_vectors(sys, eta, i, 1);
    const double need = t.plus.dot(t.minus);
    if (R * p.support(t.minus) < need - tol * std::max(1.0, std::abs(need))) r.outer_test_failures.push_back(i);
  }

  r.n_directions = n_directions;
  std::vector<double> ratio(static_cast<std::size_t>(std::max<std::int64_t>(n_directions, 0)), 0.0);
  std::vector<char> dir_fail(ratio.size(), 0);
  parallel_for(ratio.size(), [&](std::size_t k) {
    CounterRng rng(seed, "sandwich_direction", k);
    Eigen::VectorXd d = uniform_on_sphere(rng, body.dimension);
    const double hk = body.support_value(d), hp = p.support(d);
    dir_fail[k] = hk > R * hp + tol * std::max(1.0, std::abs(hk));
    ratio[k] = hp > 0.0 ? hk / hp : (hk > 0.0 ? kInf : 0.0);
  });
  r.outer_direction_failures = std::count(dir_fail.begin(), dir_fail.end(), char{1});
  for (double v : ratio) r.worst_direction_ratio = std::max(r.worst_direction_ratio, v);
  r.outer_necessary_passed = r.outer_test_failures.empty() && r.outer_direction_failures == 0;
  return r;
}

inline nlohmann::json to_json(const SandwichReport& r) {
  return {{"R", r.R},
          {"inner_ok", r.inner_ok},
          {"inner_failures", r.inner_failures},
          {"outer_test_failures", r.outer_test_failures},
          {"n_directions", r.n_directions},
          {"outer_direction_failures", r.outer_direction_failures},
          {"worst_direction_ratio", r.worst_direction_ratio},
          {"outer_necessary_passed", r.outer_necessary_passed}};
}

}  // namespace hardbody
