#include <cmath>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "hardbody/polarity.hpp"

using namespace hardbody;

namespace {

QuasiOrthogonalSystem axes2() { return make_system(Eigen::Matrix2d::Identity(), 1.0); }

QuasiOrthogonalSystem desk(int n, int m, std::uint64_t seed) {
  DesignConfig cfg;
  cfg.n = n;
  cfg.m = m;
  cfg.seed = seed;
  return generate_design(cfg);
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidConfig;
}

Eigen::MatrixXd cube_vertices(int n) {
  Eigen::MatrixXd v(1 << n, n);
  for (int k = 0; k < (1 << n); ++k)
    for (int j = 0; j < n; ++j) v(k, j) = (k >> j) & 1 ? 1.0 : -1.0;
  return v;
}

Eigen::MatrixXd cross_vertices(int n) {
  Eigen::MatrixXd v(2 * n, n);
  v << Eigen::MatrixXd::Identity(n, n), -Eigen::MatrixXd::Identity(n, n);
  return v;
}

}  // namespace

TEST(PolarShift, HandFormulaExamples) {
  auto a = polar_shift(0.3, 0.0);
  EXPECT_EQ(a.kappa, 1.0);
  EXPECT_EQ(a.scale, 1.0);

  auto b = polar_shift(0.1, 0.5);
  EXPECT_EQ(b.kappa, (1.0 - 0.9 * 0.5) / (1.0 + 0.1 * 0.5));
  EXPECT_EQ(b.scale, 1.0 / (1.0 - 0.9 * 0.5));
  EXPECT_NEAR(b.kappa, 0.5238095238095238, 1e-15);
  EXPECT_NEAR(b.scale, 1.8181818181818181, 1e-15);

  auto c = polar_shift(0.0, -1.0);
  EXPECT_EQ(c.kappa, 2.0);
  EXPECT_EQ(c.scale, 0.5);
}

TEST(PolarShift, DomainEdges) {
  EXPECT_EQ(code_of([] { polar_shift(0.1, 1.0 / 0.9); }), ErrorCode::HOutOfRange);
  EXPECT_EQ(code_of([] { polar_shift(0.1, 1.0 / 0.9 - 5e-10); }), ErrorCode::HOutOfRange);
  EXPECT_EQ(code_of([] { polar_shift(0.5, -2.0); }), ErrorCode::HOutOfRange);
  EXPECT_NO_THROW(polar_shift(0.0, -1e6));
  EXPECT_NO_THROW(polar_shift(0.1, 1.0 / 0.9 - 1e-6));
}

TEST(PolarShift, AlgebraicIdentityOnGrid) {
  for (double eta : {0.0, 0.05, 0.1, 0.25, 0.5, 0.9})
    for (double h = -1.5; h < 1.0 / (1.0 - eta) - 1e-3; h += 0.0625) {
      if (eta > 0.0 && h <= -1.0 / eta + 1e-3) continue;
      auto r = polar_shift(eta, h);
      double lhs = r.kappa * (1.0 + eta * h), rhs = 1.0 - (1.0 - eta) * h;
      EXPECT_NEAR(lhs, rhs, 4.0 * std::numeric_limits<double>::epsilon() * std::abs(rhs));
      EXPECT_GT(r.kappa, 0.0);
      EXPECT_GT(r.scale, 0.0);
    }
}

TEST(PolarShift, KappaBoundGrid) {
  EXPECT_NEAR(kappa_bound_constant(), 2.0 * (1.0 + 10.0 * (1.0 + std::log(2.0))), 1e-12);
  auto big = kappa_grid_check(400);
  EXPECT_TRUE(big.holds) << big.max_kappa;
  EXPECT_EQ(big.points, 101 * 101);
  // below n + 1 = 200 log(2e) the denominator 1 + ηh reaches zero on the box
  auto small = kappa_grid_check(16);
  EXPECT_FALSE(small.holds);
  EXPECT_TRUE(std::isinf(small.max_kappa));
}

TEST(PolarOracle, BallAndCrossPolytope) {
  auto pb = polar_oracle(ball_oracle(3, 2.0));
  Eigen::Vector3d u = Eigen::Vector3d(1, 2, -2) / 3.0;
  EXPECT_EQ(pb.membership(u / 2.0, 1e-9), Membership::Boundary);
  EXPECT_EQ(pb.membership(0.4 * u, 1e-9), Membership::Inside);
  EXPECT_NEAR(pb.gauge(u), 2.0, 1e-14);

  auto square = polar_oracle(build_Q(axes2()));
  EXPECT_EQ(square.membership(Eigen::Vector2d(1, 1), 1e-9), Membership::Boundary);
  EXPECT_EQ(square.membership(Eigen::Vector2d(0.5, -0.9), 1e-9), Membership::Inside);
  EXPECT_EQ(square.membership(Eigen::Vector2d(1.2, 0), 1e-9), Membership::Outside);
  EXPECT_NEAR(square.support_value(Eigen::Vector2d(1, 1)), 2.0, 1e-8);
}

TEST(PolarOracle, DoublePolarOfDisk) {
  auto twice = polar_oracle(polar_oracle(ball_oracle(2)));
  for (int k = 0; k < 100; ++k) {
    CounterRng rng(4, "ray", k);
    Eigen::VectorXd u = uniform_on_sphere(rng, 2);
    EXPECT_NEAR(twice.gauge(u), 1.0, 1e-6);
    EXPECT_EQ(twice.membership(u, 1e-6), Membership::Boundary);
  }
}

TEST(PolarOracle, ScaleCovariance) {
  auto sys = desk(3, 12, 5);
  auto q = build_Q(sys);
  auto lhs = polar_oracle(scale(q, 2.5));
  auto rhs = scale(polar_oracle(q), 1.0 / 2.5);
  for (int k = 0; k < 20; ++k) {
    CounterRng rng(6, "ray", k);
    Eigen::VectorXd y = gaussian_vector(rng, 3);
    EXPECT_NEAR(lhs.gauge(y), rhs.gauge(y), 1e-8 * std::max(1.0, rhs.gauge(y)));
    EXPECT_NEAR(lhs.support_value(y), rhs.support_value(y), 1e-8 * std::max(1.0, rhs.support_value(y)));
  }
}

TEST(PolarOracle, OriginNotInterior) {
  auto off = translate(ball_oracle(2), Eigen::Vector2d(1.5, 0.0));
  EXPECT_EQ(code_of([&] { polar_oracle(off); }), ErrorCode::OriginNotInterior);
}

TEST(VerifyPolarShift, NoShiftIsIdentical) {
  auto rep = verify_polar_shift(axes2(), 0.25, 0.0, 500, 3, 1e-6, 100);
  EXPECT_EQ(rep.disagreements, 0);
  EXPECT_LE(rep.max_gauge_gap, 1e-7);
}

TEST(VerifyPolarShift, AxesSystemShifted) {
  auto rep = verify_polar_shift(axes2(), 0.25, 0.5, 3000, 11, 1e-6, 200);
  EXPECT_LE(rep.disagreement_fraction, 0.002);
  EXPECT_LE(rep.max_gauge_gap, 1e-6);
  EXPECT_EQ(rep.gauge_points, 200);
}

TEST(VerifyPolarShift, DeskSystemAcrossShifts) {
  auto sys = desk(4, 16, 2);
  for (double eta : {0.0, 0.1})
    for (double h : {-1.0, 0.3}) {
      auto rep = verify_polar_shift(sys, eta, h, 400, 1, 1e-6, 60);
      EXPECT_LE(rep.disagreement_fraction, 0.005) << eta << " " << h;
      EXPECT_LE(rep.max_gauge_gap, 1e-6) << eta << " " << h;
    }
}

TEST(VerifyPolarShift, UpperEndpointRejected) {
  EXPECT_EQ(code_of([] { verify_polar_shift(axes2(), 0.1, 1.0 / 0.9, 10, 1, 1e-6); }), ErrorCode::HOutOfRange);
}

TEST(DualCount, SquareAndCrossPolytope) {
  auto sq = dual_count(make_polytope(cube_vertices(2), "square"));
  EXPECT_EQ(sq.facet_count, 4);
  EXPECT_EQ(sq.polar_vertex_count, 4);
  EXPECT_EQ(sq.polar_vertex_count_direct, 4);
  EXPECT_TRUE(sq.match);

  auto cr = dual_count(make_polytope(cross_vertices(3), "cross"));
  EXPECT_EQ(cr.facet_count, 8);
  EXPECT_EQ(cr.polar_vertex_count_direct, 8);
  EXPECT_TRUE(cr.match);

  auto cube = dual_count(make_polytope(cube_vertices(3), "cube"));
  EXPECT_EQ(cube.facet_count, 6);
  EXPECT_EQ(cube.polar_vertex_count_direct, 6);
}

TEST(DualCount, RandomSimplicialPolytopesSatisfyEuler) {
  // points in general position give a simplicial 3-polytope: F = 2V - 4
  for (int s = 0; s < 10; ++s) {
    Eigen::MatrixXd pts(20, 3);
    for (int i = 0; i < 20; ++i) {
      CounterRng rng(s, "pts", i);
      pts.row(i) = gaussian_vector(rng, 3).transpose();
    }
    pts.row(0) << 3, 0, 0;
    pts.row(1) << -3, 0, 0;
    pts.row(2) << 0, 3, 0;
    pts.row(3) << 0, -3, 0;
    pts.row(4) << 0, 0, 3;
    pts.row(5) << 0, 0, -3;
    auto p = make_polytope(pts, "random");
    auto facets = hull_facets(p.vertices);
    std::set<int> hull_vertices;
    for (const auto& f : facets) {
      EXPECT_EQ(f.vertices.size(), 3u);
      hull_vertices.insert(f.vertices.begin(), f.vertices.end());
    }
    auto d = dual_count(p);
    EXPECT_EQ(d.facet_count, 2 * static_cast<int>(hull_vertices.size()) - 4);
    EXPECT_TRUE(d.match);
  }
}

TEST(DualCount, Errors) {
  Eigen::MatrixXd shifted = cube_vertices(2).array() + 2.0;
  EXPECT_EQ(code_of([&] { dual_count(make_polytope(shifted, "off")); }), ErrorCode::OriginNotInterior);
  Eigen::MatrixXd flat(3, 2);
  flat << -1, 0, 1, 0, 0.5, 0;
  EXPECT_EQ(code_of([&] { dual_count(make_polytope(flat, "flat")); }), ErrorCode::OriginNotInterior);
  EXPECT_EQ(code_of([] { dual_count(make_polytope(cross_vertices(9), "big")); }), ErrorCode::DimensionTooLarge);
}

TEST(Polytope, DeduplicatesAndRejectsEmpty) {
  Eigen::MatrixXd pts(3, 2);
  pts << 1, 0, 1 + 1e-14, 0, 0, 1;
  EXPECT_EQ(make_polytope(pts, "d").size(), 2);
  EXPECT_THROW(make_polytope(Eigen::MatrixXd(0, 2), "e"), Error);
}
