#include <gtest/gtest.h>

#include <cmath>

#include "bfexact/saddlepoint.hpp"

using namespace bfexact;

TEST(Saddle, CgfDerivatives) {
  BfParams p(7, 12, 0.6, 1);
  EXPECT_NEAR(cgf(p, 0), 0.0, 1e-15);
  for (double xi : {-5.0, -1.0, 0.3, 8.0}) {
    double h = 1e-5;
    EXPECT_NEAR(cgf_d1(p, xi), (cgf(p, xi + h) - cgf(p, xi - h)) / (2 * h), 1e-7);
    EXPECT_NEAR(cgf_d2(p, xi), (cgf_d1(p, xi + h) - cgf_d1(p, xi - h)) / (2 * h), 1e-7);
  }
  BfParams q(10, 10, 1, 1);
  EXPECT_NEAR(cgf_d2(q, 0), 0.5 * trigamma(5), 1e-15);
  EXPECT_THROW(cgf(p, -7), Error);
  EXPECT_THROW(cgf_d1(p, 12), Error);
}

TEST(Saddle, StrictConvexity) {
  for (double n1 : {1.0, 5.0, 40.0})
    for (double n2 : {2.0, 10.0})
      for (double r : {0.05, 1.0, 20.0}) {
        BfParams p(n1, n2, r, 1);
        for (int i = 1; i < 100; ++i) {
          double xi = -n1 + (n1 + n2) * i / 100.0;
          EXPECT_GT(cgf_d2(p, xi), 0.0);
        }
      }
}

TEST(Saddle, CentreUsesLimitBranch) {
  BfParams p(6, 6, 1, 1);
  LrOutcome o = lr_survival(p, 0);
  EXPECT_EQ(o.result.value, 0.5);
  SaddleDiagnostics d = solve_saddle(p, 0);
  EXPECT_EQ(d.xi_hat, 0.0);
  // Tiny t: w below the limit threshold, still close to 1/2.
  LrOutcome s = lr_survival(p, 1e-9);
  EXPECT_NEAR(s.result.value, 0.5, 1e-6);
}

TEST(Saddle, NewtonConverges) {
  SaddleDiagnostics d = solve_saddle(BfParams(10, 10, 1, 1), 3);
  EXPECT_NE(d.edge_class, EdgeClass::NonConverged);
  EXPECT_LE(d.residual, 1e-10 * 3);
  EXPECT_LE(d.newton_iters, 60u);
}

TEST(Saddle, TinyDfDamped) {
  SaddleDiagnostics d = solve_saddle(BfParams(1, 5, 1, 1), 10);
  EXPECT_TRUE(d.damped);
  EXPECT_TRUE(d.edge_class == EdgeClass::TinyDf || d.edge_class == EdgeClass::NonConverged);
  if (d.edge_class == EdgeClass::NonConverged) {
    EXPECT_GT(d.xi_hat, 5 - 1e-3);
  }
}

TEST(Saddle, InteriorResidual) {
  for (double n : {5.0, 10.0, 20.0})
    for (double r : {0.5, 1.0, 2.0})
      for (double t : {1.0, 3.0, 6.0}) {
        BfParams p(n, n + 3, r, 1);
        SaddleDiagnostics d = solve_saddle(p, t);
        if (d.edge_class == EdgeClass::Interior) {
          EXPECT_LE(d.residual, 1e-10 * std::max(1.0, t));
        }
      }
}

TEST(Saddle, EdgeClassPriority) {
  EXPECT_EQ(detail::classify(BfParams(2, 30, 100, 1), 50, true), EdgeClass::TinyDf);
  EXPECT_EQ(detail::classify(BfParams(5, 30, 100, 1), 50, true), EdgeClass::ExtremeRatio);
  EXPECT_EQ(detail::classify(BfParams(5, 5, 2, 1), 9, true), EdgeClass::UltraHighTail);
  EXPECT_EQ(detail::classify(BfParams(3, 3, 1, 1), 1, true), EdgeClass::NearEqualSmallN);
  EXPECT_EQ(detail::classify(BfParams(10, 10, 1, 1), 1, true), EdgeClass::Interior);
  EXPECT_EQ(detail::classify(BfParams(10, 10, 1, 1), 1, false), EdgeClass::NonConverged);
}

TEST(Saddle, SignsAndMonotonicity) {
  BfParams p(8, 12, 0.5, 1);
  double prev = 1.0;
  for (int t = 2; t <= 10; ++t) {
    LrOutcome o = lr_survival(p, t);
    EXPECT_GT(o.diag.w, 0.0);
    EXPECT_GT(o.diag.u, 0.0);
    EXPECT_LE(o.result.value, prev);
    prev = o.result.value;
  }
  EXPECT_THROW(lr_survival(p, -1), Error);
}

TEST(Saddle, GridShapeAndSingleCell) {
  LrGrid one{{5}, {1}, {6}};
  auto truth = [](const BfParams&, double) { return 0.25; };
  auto cells = lr_error_grid(one, truth);
  ASSERT_EQ(cells.size(), 1u);
  double lr = lr_survival(BfParams(5, 5, 1, 1), 6).result.value;
  EXPECT_EQ(cells[0].lr, lr);
  EXPECT_DOUBLE_EQ(cells[0].delta_rel, std::abs(lr - 0.25) / 0.25);
  LrGrid full;
  EXPECT_EQ(full.nus.size() * full.nus.size() * full.rs.size() * full.ts.size(), 1944u);
  auto a = lr_error_grid(LrGrid{{5, 10}, {0.5, 2}, {6, 8}}, truth, 1);
  auto b = lr_error_grid(LrGrid{{5, 10}, {0.5, 2}, {6, 8}}, truth, 3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].lr, b[i].lr);
}
