#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "hardbody/hardness.hpp"

using namespace hardbody;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidConfig;
}

QuasiOrthogonalSystem desk(int n, int m, std::uint64_t seed) {
  DesignConfig cfg;
  cfg.n = n;
  cfg.m = m;
  cfg.seed = seed;
  return generate_design(cfg);
}

// orthogonal vectors of length sqrt(n)/Δ: verified for any Δ
QuasiOrthogonalSystem orthogonal(int n, double delta) {
  return make_system(Eigen::MatrixXd::Identity(n, n) * (std::sqrt(double(n)) / delta), delta);
}

CandidatePolytope single(const Eigen::VectorXd& w) { return make_polytope(w.transpose(), "single"); }

// brute-force S_alpha without any shared helpers
std::vector<std::vector<int>> brute_sets(const CandidatePolytope& p, const QuasiOrthogonalSystem& sys, double kappa) {
  std::vector<std::vector<int>> out(p.size());
  const double thr = 12.0 * std::max(kappa, 1.0);
  for (int a = 0; a < p.size(); ++a)
    for (int i = 0; i < sys.m; ++i) {
      double v = p.vertices(a, 0) * (-2.0 * std::sqrt(double(sys.n)) / sys.delta);
      for (int k = 0; k < sys.n; ++k) v += p.vertices(a, k + 1) * sys.vectors(i, k);
      if (v >= thr - 1e-9) out[a].push_back(i);
    }
  return out;
}

}  // namespace

TEST(TestVectors, HandExample) {
  Eigen::MatrixXd x(2, 2);
  x << 1, 0, 0, 1;
  auto sys = make_system(x, 2.0);
  auto t = test_vectors(sys, 0.0, 0, 1);
  EXPECT_EQ(t.plus, Eigen::Vector3d(1, 1, 0));
  EXPECT_NEAR((t.minus - Eigen::Vector3d(-std::sqrt(2.0), 1, 0)).norm(), 0.0, 1e-15);
  auto f = test_vectors(sys, 0.0, 0, -1);
  EXPECT_EQ(f.plus[0], t.plus[0]);
  EXPECT_EQ(f.minus[0], t.minus[0]);
  EXPECT_EQ(f.plus.tail(2), -t.plus.tail(2));
  EXPECT_EQ(f.minus.tail(2), -t.minus.tail(2));
  EXPECT_EQ(code_of([&] { test_vectors(sys, 0.6, 0, 1); }), ErrorCode::EtaTooLarge);
  EXPECT_EQ(code_of([&] { test_vectors(sys, 0.1, 2, 1); }), ErrorCode::InvalidConfig);
}

TEST(TestVectors, InnerProductIdentity) {
  auto sys = desk(8, 32, 4);
  for (double eta : {0.0, 0.2, 0.5})
    for (int i = 0; i < sys.m; i += 5) {
      auto t = test_vectors(sys, eta, i, 1);
      EXPECT_EQ(t.plus[0], 1.0 - eta);
      EXPECT_EQ(t.minus[0], -2.0 * std::sqrt(8.0) / sys.delta);
      double expect = -2.0 * (1.0 - eta) * std::sqrt(8.0) / sys.delta + sys.x(i).squaredNorm();
      EXPECT_NEAR(t.plus.dot(t.minus), expect, 1e-13);
    }
}

TEST(Separation, VerifiedDeskDesign) {
  auto sys = desk(16, 64, 2);
  ASSERT_TRUE(verify_design(sys).passed);
  for (double eta : {0.0, 0.3, 0.5}) {
    auto r = separation_report(sys, eta);
    EXPECT_TRUE(r.identities_hold);
    EXPECT_LE(r.identity_max_rel_error, 1e-12);
    EXPECT_EQ(r.offdiag_violations, 0);
    EXPECT_LE(r.offdiag_max, 0.0);
    EXPECT_EQ(r.diag_upper_failures, 0);
    EXPECT_EQ(r.pairs, 4 * 64 * 64);
    EXPECT_FALSE(r.diag_lower_applicable);
  }
}

TEST(Separation, SmallExampleFailsDiagonalLowerBound) {
  Eigen::MatrixXd x(1, 2);
  x << 1, 0;
  auto r = separation_report(make_system(x, 2.0), 0.0);
  EXPECT_NEAR(r.diag_min, 1.0 - std::sqrt(2.0), 1e-15);
  EXPECT_EQ(r.diag_lower_failures, 2);
  EXPECT_TRUE(r.identities_hold);
  EXPECT_EQ(code_of([] { separation_report(orthogonal(2, 1.0), 0.51); }), ErrorCode::EtaTooLarge);
}

TEST(Separation, DetectsNonOrthogonalPair) {
  Eigen::MatrixXd x(2, 2);
  x << 1, 0, 0.999, 0.05;
  auto r = separation_report(make_system(x, 8.0), 0.0);
  EXPECT_GT(r.offdiag_violations, 0);
  ASSERT_FALSE(r.offdiag_examples.empty());
  EXPECT_GT(r.offdiag_examples.front().value, 0.0);
  EXPECT_TRUE(r.identities_hold);
}

TEST(Decompose, TopBottomAndMidpoint) {
  auto sys = make_system(Eigen::MatrixXd::Identity(2, 2) * 0.8, 4.0);
  const double eta = 0.2, kappa = 1.5;
  auto top = decompose_vertex(test_vectors(sys, eta, 0, 1).plus, sys, eta, kappa);
  EXPECT_NEAR(top.lambda_plus[0], 1.0, 1e-6);
  EXPECT_NEAR(top.lambda_b, 0.0, 1e-9);
  EXPECT_LE(top.reconstruction_error, 1e-7);

  Eigen::Vector2d y(0.3, -0.5);
  Eigen::Vector3d bottom;
  bottom << -kappa * eta, kappa * y;
  auto bot = decompose_vertex(bottom, sys, eta, kappa);
  EXPECT_NEAR(bot.lambda_b, 1.0, 1e-9);
  EXPECT_NEAR((bot.witness - y).norm(), 0.0, 1e-7);
  EXPECT_NEAR(bot.lambda_plus.sum() + bot.lambda_minus.sum(), 0.0, 1e-9);

  Eigen::Vector3d mid = 0.5 * (test_vectors(sys, eta, 0, 1).plus + bottom);
  auto d = decompose_vertex(mid, sys, eta, kappa);
  EXPECT_NEAR(d.lambda_b, 0.5, 1e-9);
  EXPECT_NEAR(d.lambda_plus.sum() + d.lambda_minus.sum(), 0.5, 1e-9);
  EXPECT_LE(d.reconstruction_error, 1e-7);
  EXPECT_GE(d.lambda_plus.minCoeff(), 0.0);
  EXPECT_GE(d.lambda_minus.minCoeff(), 0.0);
  EXPECT_LE(std::max(d.witness.norm(), sys.max_abs_projection(d.witness)), 1.0 + 1e-7);
}

TEST(Decompose, NotInBody) {
  auto sys = desk(4, 16, 1);
  Eigen::VectorXd above = Eigen::VectorXd::Zero(5);
  above[0] = 1.5;
  EXPECT_EQ(code_of([&] { decompose_vertex(above, sys, 0.1, 1.0); }), ErrorCode::NotInBody);
  Eigen::VectorXd wide = Eigen::VectorXd::Zero(5);
  wide[1] = 3.0;
  EXPECT_EQ(code_of([&] { decompose_vertex(wide, sys, 0.1, 1.0); }), ErrorCode::NotInBody);
}

TEST(Decompose, CoverageBoundOnRandomPoints) {
  auto sys = desk(16, 48, 5);
  ASSERT_TRUE(verify_design(sys).passed);
  ASSERT_GE(sys.delta, 1.0);
  const double eta = 0.25;  // 1/sqrt(n)
  const auto mm = minus_matrix(sys);
  for (double kappa : {1.0, 2.0}) {
    for (int s = 0; s < 12; ++s) {
      CounterRng rng(s, "coverage", static_cast<std::uint64_t>(kappa));
      // random convex combination of top vertices and a bottom point
      const int a = static_cast<int>(uniform01(rng) * sys.m), b = static_cast<int>(uniform01(rng) * sys.m);
      Eigen::VectorXd y = uniform_in_ball(rng, 16, 1.0);
      y /= std::max(1.0, sys.max_abs_projection(y));
      Eigen::VectorXd bottom(17);
      bottom << -kappa * eta, kappa * y;
      double u1 = uniform01(rng), u2 = uniform01(rng), u3 = uniform01(rng);
      double tot = u1 + u2 + u3;
      Eigen::VectorXd w = (u1 * test_vectors(sys, eta, a, 1).plus + u2 * test_vectors(sys, eta, b, -1).plus +
                           u3 * bottom) /
                          tot;
      auto d = decompose_vertex(w, sys, eta, kappa);
      EXPECT_LE(d.reconstruction_error, 1e-6);
      const double scale = 4.0 * 16 / (sys.delta * sys.delta);
      for (int i = 0; i < sys.m; ++i)
        EXPECT_LE(mm.row(2 * i).dot(w), scale * d.lambda_plus[i] + 3.0 * kappa + 1e-6) << s << " " << i;
    }
  }
}

TEST(PaperConstants, Examples) {
  auto c = paper_constants_for_delta(96, 960, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(c.R, 1.0);
  EXPECT_DOUBLE_EQ(c.threshold, 12.0);
  EXPECT_NEAR(c.per_vertex, 42.666666666666664, 1e-12);
  EXPECT_DOUBLE_EQ(c.lower, 22.5);
  EXPECT_EQ(c.lower_ceil, 23.0);
  EXPECT_GE(c.lower_ceil, c.stated_lower);
  EXPECT_NEAR(c.lambda_bound, 9.0 / 384.0, 1e-15);
  auto c2 = paper_constants_for_delta(96, 960, 2.0, 1.0);
  EXPECT_DOUBLE_EQ(c2.R, c.R / 2);
  EXPECT_DOUBLE_EQ(c2.threshold, 2 * c.threshold);
  auto c3 = paper_constants(64, 4096, 1.0, 3.0);
  EXPECT_NEAR(c3.delta, 3.0 * std::sqrt(std::log(4096.0)), 1e-12);
  EXPECT_GE(c3.lower, c3.stated_lower);
}

TEST(Covering, ThresholdIsInclusive) {
  auto sys = desk(4, 8, 3);
  Eigen::VectorXd mi = test_vectors(sys, 0.0, 1, 1).minus;
  for (double target : {20.0, 12.0 - 5e-10}) {
    auto c = covering_certificate(single(target * mi / mi.squaredNorm()), sys, 1.0);
    EXPECT_TRUE(std::count(c.covering_sets[0].begin(), c.covering_sets[0].end(), 1)) << target;
  }
  auto below = covering_certificate(single((12.0 - 2e-9) * mi / mi.squaredNorm()), sys, 1.0);
  EXPECT_FALSE(std::count(below.covering_sets[0].begin(), below.covering_sets[0].end(), 1));
  // threshold scales with max(κ, 1)
  auto k2 = covering_certificate(single(20.0 * mi / mi.squaredNorm()), sys, 2.0);
  EXPECT_DOUBLE_EQ(k2.threshold, 24.0);
  EXPECT_FALSE(std::count(k2.covering_sets[0].begin(), k2.covering_sets[0].end(), 1));
}

TEST(Covering, MatchesBruteForceAndIsMonotone) {
  auto sys = desk(6, 24, 7);
  for (int s = 0; s < 5; ++s) {
    Eigen::MatrixXd v(10, 7);
    for (int a = 0; a < 10; ++a) {
      CounterRng rng(s, "poly", a);
      v.row(a) = (30.0 * gaussian_vector(rng, 7)).transpose();
    }
    auto p = make_polytope(v, "random");
    auto c = covering_certificate(p, sys, 1.0);
    EXPECT_EQ(c.covering_sets, brute_sets(p, sys, 1.0));
    auto bigger = make_polytope((Eigen::MatrixXd(20, 7) << v, 2.0 * v).finished(), "bigger");
    auto cb = covering_certificate(bigger, sys, 1.0);
    std::set<int> u1, u2;
    for (auto& s1 : c.covering_sets) u1.insert(s1.begin(), s1.end());
    for (auto& s2 : cb.covering_sets) u2.insert(s2.begin(), s2.end());
    EXPECT_TRUE(std::includes(u2.begin(), u2.end(), u1.begin(), u1.end()));
  }
}

TEST(Covering, DeskTopVerticesAreInconclusive) {
  auto sys = desk(8, 32, 1);
  auto p = make_polytope(plus_matrix(sys, 0.1), "top");
  auto c = covering_certificate(p, sys, 1.0);
  EXPECT_EQ(c.uncovered.size(), 32u);
  EXPECT_EQ(c.conclusion, CoveringConclusion::Inconclusive);
  EXPECT_EQ(covering_certificate(p, sys, 1.0, true).conclusion, CoveringConclusion::SandwichViolated);
}

TEST(Covering, SoundOnLargeVectorInstance) {
  // n/(8Δ²) >= 12: the top vertices cover every index
  auto sys = orthogonal(24, 0.5);
  const double eta = 0.1, kappa = 1.0;
  ASSERT_TRUE(verify_design(sys).passed);
  auto p = make_polytope(plus_matrix(sys, eta), "top");
  auto c = covering_certificate(p, sys, kappa);
  ASSERT_EQ(c.conclusion, CoveringConclusion::LowerBoundHolds);
  EXPECT_TRUE(c.per_vertex_respected);
  auto k = paper_constants_for_delta(24, 24, kappa, 0.5);
  EXPECT_GE(p.size(), std::ceil(24.0 / std::ceil(k.per_vertex)));
  EXPECT_GE(p.size(), c.empirical_lower_bound);
  for (std::size_t a = 0; a < c.covering_sets.size(); a += 7) {
    auto d = decompose_vertex(p.vertex(static_cast<int>(a)), sys, eta, kappa);
    for (int i : c.covering_sets[a]) EXPECT_GE(d.lambda_plus[i], k.lambda_bound - 1e-6);
  }
}

TEST(Sandwich, SingletonAndLargeR) {
  auto sys = desk(4, 16, 2);
  const double eta = 0.2;
  auto body = build_K_eta(sys, eta);
  auto zero = single(Eigen::VectorXd::Zero(5));
  auto r0 = verify_sandwich(zero, body, sys, eta, 2.0, 50, 1);
  EXPECT_TRUE(r0.inner_ok);
  EXPECT_FALSE(r0.outer_necessary_passed);
  EXPECT_EQ(r0.outer_direction_failures, 50);

  // top vertices plus a ring of bottom points
  Eigen::MatrixXd v(32 + 8, 5);
  v.topRows(32) = plus_matrix(sys, eta);
  for (int k = 0; k < 8; ++k) {
    v(32 + k, 0) = -eta;
    v.row(32 + k).tail(4).setZero();
    v(32 + k, 1 + k / 2) = k % 2 ? -0.5 : 0.5;
  }
  auto p = make_polytope(v, "hull");
  auto r = verify_sandwich(p, body, sys, eta, 1e3, 200, 1);
  EXPECT_TRUE(r.inner_ok);
  EXPECT_TRUE(r.outer_necessary_passed);
  EXPECT_LT(r.worst_direction_ratio, 1e3);
  EXPECT_EQ(code_of([&] { verify_sandwich(p, body, sys, eta, 1.0, 10, 1); }), ErrorCode::InvalidConfig);

  Eigen::VectorXd far = Eigen::VectorXd::Zero(5);
  far[0] = 2.0;
  auto bad = make_polytope((Eigen::MatrixXd(41, 5) << v, far.transpose()).finished(), "bad");
  EXPECT_EQ(verify_sandwich(bad, body, sys, eta, 1e3, 10, 1).inner_failures, std::vector<int>{40});
}
