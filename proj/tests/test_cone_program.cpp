#include <gtest/gtest.h>

#include "hardbody/cone_program.hpp"
#include "hardbody/rng.hpp"

using namespace hardbody;
using cone::Program;
using cone::SocBlock;
using cone::SparseRow;

namespace {

// x >= 0 written as -x + s = 0
void nonneg(Program& p, int j) { p.add_lp_row({{j}, {-1.0}}, 0.0); }

}  // namespace

TEST(ConeProgram, SmallLinearProgram) {
  // min -x0 - 2 x1  s.t. x0 + x1 <= 4, x1 <= 3, x >= 0  -> x = (1, 3), value -7
  Program p;
  p.num_vars = 2;
  p.c = Eigen::Vector2d(-1, -2);
  p.a.resize(0, 2);
  p.b.resize(0);
  p.add_lp_row({{0, 1}, {1, 1}}, 4);
  p.add_lp_row({{1}, {1}}, 3);
  nonneg(p, 0);
  nonneg(p, 1);
  auto s = cone::solve(p);
  EXPECT_NEAR(s.primal_objective, -7.0, 1e-8);
  EXPECT_NEAR(s.x[0], 1.0, 1e-7);
  EXPECT_NEAR(s.x[1], 3.0, 1e-7);
}

TEST(ConeProgram, DiskSupport) {
  // max <d, v> s.t. |v| <= 1, d = (3,4) -> 5
  Program p;
  p.num_vars = 2;
  p.c = -Eigen::Vector2d(3, 4);
  p.a.resize(0, 2);
  p.b.resize(0);
  SocBlock blk;
  blk.cols = {0, 1};
  blk.g = Eigen::MatrixXd::Zero(3, 2);
  blk.g(1, 0) = -1;
  blk.g(2, 1) = -1;
  blk.h = Eigen::Vector3d(1, 0, 0);
  p.socs.push_back(blk);
  auto s = cone::solve(p);
  EXPECT_NEAR(-s.primal_objective, 5.0, 1e-8);
  EXPECT_NEAR(s.x[0], 0.6, 1e-7);
}

TEST(ConeProgram, CrossPolytopeGaugeWithEqualities) {
  // min sum(p+q) s.t. (p - q) = y, p,q >= 0: the l1 norm of y = (1,1) is 2.
  Program p;
  p.num_vars = 4;
  p.c = Eigen::Vector4d::Ones();
  p.a = Eigen::MatrixXd::Zero(2, 4);
  p.a << 1, 0, -1, 0, 0, 1, 0, -1;
  p.b = Eigen::Vector2d(1, 1);
  for (int j = 0; j < 4; ++j) nonneg(p, j);
  auto s = cone::solve(p);
  EXPECT_NEAR(s.primal_objective, 2.0, 1e-9);
  EXPECT_NEAR(s.dual_objective, 2.0, 1e-9);
}

// Random feasible, bounded SOCPs: check primal/dual feasibility and zero gap
// directly from the returned iterates.
TEST(ConeProgram, RandomProgramsSatisfyOptimalityConditions) {
  for (int trial = 0; trial < 20; ++trial) {
    CounterRng rng(trial, "socp");
    const int n = 6, neq = 2;
    Program p;
    p.num_vars = n;
    p.a = Eigen::MatrixXd(neq, n);
    for (int i = 0; i < neq; ++i) p.a.row(i) = gaussian_vector(rng, n).transpose();
    Eigen::VectorXd x0 = 0.1 * gaussian_vector(rng, n);
    p.b = p.a * x0;
    // box |x_j| <= 1 keeps it bounded, plus one ball of radius 2
    for (int j = 0; j < n; ++j) {
      p.add_lp_row({{j}, {1.0}}, 1.0);
      p.add_lp_row({{j}, {-1.0}}, 1.0);
    }
    SocBlock blk;
    for (int j = 0; j < n; ++j) blk.cols.push_back(j);
    blk.g = Eigen::MatrixXd::Zero(n + 1, n);
    blk.g.bottomRows(n) = -Eigen::MatrixXd::Identity(n, n);
    blk.h = Eigen::VectorXd::Zero(n + 1);
    blk.h[0] = 2.0;
    p.socs.push_back(blk);
    p.c = gaussian_vector(rng, n);
    auto s = cone::solve(p);
    EXPECT_NEAR(s.primal_objective, s.dual_objective, 1e-8 * (1 + std::abs(s.primal_objective)));
    EXPECT_LE((p.a * s.x - p.b).norm(), 1e-8);
    EXPECT_LE(s.x.cwiseAbs().maxCoeff(), 1.0 + 1e-8);
    EXPECT_LE(s.x.norm(), 2.0 + 1e-8);
  }
}
