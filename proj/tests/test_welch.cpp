#include <gtest/gtest.h>

#include <cmath>

#include "bfexact/welch.hpp"

using namespace bfexact;

TEST(Welch, Satterthwaite) {
  EXPECT_DOUBLE_EQ(satterthwaite_df(2.0, 2.0, 12, 12), 22.0);
  EXPECT_NEAR(satterthwaite_df(1.0, 1.0, 8, 1e6), 7.0, 1e-3);
  // (0.4 + 0.1)^2 / (0.16/9 + 0.01/9) = 0.25 * 9 / 0.17
  EXPECT_NEAR(satterthwaite_df(4, 1, 10, 10), 2.25 / 0.17, 1e-13);
  EXPECT_THROW(satterthwaite_df(0, 1, 10, 10), Error);
  EXPECT_THROW(satterthwaite_df(1, 1, 1, 10), Error);
}

TEST(Welch, PopulationQuantile) {
  EXPECT_DOUBLE_EQ(welch_df(BfParams(9, 9, 1, 1)), 18.0);
  EXPECT_NEAR(welch_quantile(BfParams(9, 9, 1, 1), 0.025), student_t_quantile(0.975, 18), 1e-14);
  // r = 4: 25 / (16/9 + 1/9) = 225/17
  EXPECT_NEAR(welch_df(BfParams(9, 9, 4, 1)), 225.0 / 17.0, 1e-13);
}

TEST(Welch, ExactNearNominalAtEqualVariance) {
  for (int n : {10, 20, 30, 50}) EXPECT_LE(std::abs(exact_size_distortion(size_cell_params(n, 1.0))), 0.003);
  EXPECT_LT(std::abs(exact_size_distortion(size_cell_params(50, 1.0))), 0.002);
}

TEST(Welch, McStandardErrorFormula) {
  McEstimate e = mc_size(10, 10, 2.0, 1.0, {5000, 9});
  EXPECT_DOUBLE_EQ(e.std_err, std::sqrt(e.estimate * (1 - e.estimate) / 5000));
}

TEST(Welch, McDeterministic) {
  auto a = size_distortion_grid({10, 20}, {-1, 0, 1}, {500, 42}, SizeMode::MonteCarlo, 1);
  auto b = size_distortion_grid({10, 20}, {-1, 0, 1}, {500, 42}, SizeMode::MonteCarlo, 3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].delta, b[i].delta);
    EXPECT_EQ(a[i].seed, derive_seed(42, i));
    EXPECT_EQ(a[i].reps, 500u);
  }
  EXPECT_THROW(size_distortion_grid({10}, {0}, {50, 1}, SizeMode::MonteCarlo), Error);
  EXPECT_THROW(size_distortion_grid({1}, {0}, {500, 1}, SizeMode::ExactCdf), Error);
}

TEST(Welch, ExactCellsCarryNoSeed) {
  auto c = size_distortion_grid({10}, {0, 1}, {}, SizeMode::ExactCdf);
  for (const auto& x : c) {
    EXPECT_EQ(x.reps, 1u);
    EXPECT_EQ(x.std_err, 0.0);
  }
}

TEST(SignFlip, Synthetic) {
  auto row = [](int n, std::vector<double> deltas) {
    std::vector<SizeCell> cells;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      SizeCell c;
      c.n = n;
      c.log2_r = -2.0 + double(i);
      c.r = std::exp2(c.log2_r);
      c.delta = deltas[i];
      cells.push_back(c);
    }
    return cells;
  };
  auto flat = sign_flip_contour(row(10, {0.01, 0.02, 0.01, 0.02, 0.03}));
  ASSERT_EQ(flat.size(), 1u);
  EXPECT_TRUE(flat[0].no_crossing());
  auto two = sign_flip_contour(row(10, {0.01, -0.01, -0.01, -0.01, 0.01}));
  // Crossings at log2 r = -1.5 and +1.5.
  EXPECT_TRUE(two[0].has_low);
  EXPECT_NEAR(two[0].r_low, std::exp2(-1.5), 1e-12);
  EXPECT_TRUE(two[0].has_high);
  EXPECT_NEAR(two[0].r_high, std::exp2(1.5), 1e-12);
  EXPECT_THROW(sign_flip_contour(row(10, {0.01, -0.01})), Error);
}
