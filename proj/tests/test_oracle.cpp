#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "bfexact/oracle.hpp"
#include "bfexact/specfun.hpp"

using namespace bfexact;

// References from 30-digit nested quadrature of the defining integral.
struct Frozen {
  double nu1, nu2, g, h, t, f;
};
const Frozen kFrozen[] = {
    {4, 6, 0.4, 0.5, 1.7, 0.096332674668482424226749480598},
    {3, 5, 1, 0.25, 2.0, 0.066457642892126870103703036064},
    {1, 1, 0.3, 1.0, 0.5, 0.28777142497644972208790806252},
    {2, 3, 1, 4, 0, 0.37717928621719714561691742282},
    {5, 10, 0.25, 1, 3, 0.0094486891376675647582687595285},
};

TEST(Oracle, FrozenValues) {
  for (const auto& c : kFrozen) {
    BfParams p(c.nu1, c.nu2, c.g, c.h);
    EvalResult r = pdf_quadrature(p, c.t);
    EXPECT_NEAR(r.value, c.f, 1e-10 * c.f) << p.describe();
    EXPECT_EQ(r.method, Method::Oracle);
  }
}

TEST(Oracle, Raw2DAgreesWithMixture) {
  for (const auto& c : kFrozen) {
    BfParams p(c.nu1, c.nu2, c.g, c.h);
    EvalResult r = pdf_quadrature(p, c.t, QuadSpec{1e-12, 1e-10, 2000}, OracleMode::Raw2D);
    EXPECT_NEAR(r.value, c.f, 1e-8 * c.f) << p.describe();
  }
}

TEST(Oracle, CollapseAndSymmetry) {
  BfParams p(3, 7, 0.6, 1.4);  // equal rates nu1/g = nu2/h
  EXPECT_NEAR(pdf_quadrature(p, 0).value, student_t_pdf(0, 10), 1e-10);
  BfParams q(2, 9, 0.3, 1.4);
  EXPECT_EQ(pdf_quadrature(q, 2.3).value, pdf_quadrature(q, -2.3).value);
  EXPECT_NEAR(pdf_quadrature(q, 2.3).value, pdf_quadrature(swap(q), 2.3).value, 1e-11);
}

TEST(Oracle, Normalization) {
  BfParams p(4, 6, 0.4, 0.5);
  auto f = [&](double t) { return pdf_quadrature(p, t).value; };
  // Tail beyond 50 is below 1e-12 at these degrees of freedom.
  double mass = 2 * integrate(f, 0.0, 50.0, QuadSpec{1e-13, 1e-12, 2000}).value;
  EXPECT_NEAR(mass, 1.0, 1e-8);
}

TEST(Oracle, TighterToleranceNeverWorseBound) {
  BfParams p(5, 10, 0.25, 1);
  double loose = pdf_quadrature(p, 3, QuadSpec{1e-8, 1e-6, 2000}).error_bound;
  double tight = pdf_quadrature(p, 3, QuadSpec{1e-13, 1e-12, 2000}).error_bound;
  EXPECT_LE(tight, loose);
}

TEST(Sampler, Reproducible) {
  BfParams p(4, 6, 0.4, 0.5);
  EXPECT_EQ(sample_T(p, {1000, 42}), sample_T(p, {1000, 42}));
  EXPECT_NE(sample_T(p, {1000, 42}), sample_T(p, {1000, 43}));
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_EQ(derive_seed(9, 5), derive_seed(9, 5));
}

TEST(Sampler, MedianNearZero) {
  BfParams p(4, 6, 0.4, 0.5);
  auto x = sample_T(p, {1000000, 3});
  std::nth_element(x.begin(), x.begin() + x.size() / 2, x.end());
  double se = 1.0 / (2 * pdf_quadrature(p, 0).value * std::sqrt(1e6));
  EXPECT_LT(std::abs(x[x.size() / 2]), 4 * se);
}

TEST(Sampler, CollapseMatchesStudent) {
  BfParams p(3, 5, 1, 1);
  McEstimate e = survival_mc(p, 1.5, {20000, 5}, Sided::One);
  double expect = 1 - student_t_cdf(1.5, 8);
  EXPECT_LT(std::abs(e.estimate - expect), 3 * std::sqrt(expect * (1 - expect) / 20000));
  McEstimate e2 = survival_mc(p, 2.0, {20000, 6}, Sided::One);
  double expect2 = 1 - student_t_cdf(2.0, 8);
  EXPECT_LT(std::abs(e2.estimate - expect2), 3 * std::sqrt(expect2 * (1 - expect2) / 20000));
}

TEST(Sampler, TwoSeedsSameDistribution) {
  BfParams p(2, 9, 0.3, 1.4);
  const std::size_t n = 20000;
  auto x = sample_T(p, {n, 100}), y = sample_T(p, {n, 200});
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < n && j < n) {
    if (x[i] <= y[j]) ++i; else ++j;
    d = std::max(d, std::abs(double(i) - double(j)) / n);
  }
  EXPECT_LT(d, 1.628 * std::sqrt(2.0 / n));  // 1% two-sample critical value
}

TEST(Sampler, SurvivalEdgeCases) {
  BfParams p(4, 6, 0.4, 0.5);
  McEstimate half = survival_mc(p, 0, {10000, 1}, Sided::One);
  EXPECT_LT(std::abs(half.estimate - 0.5), 4 * half.std_err);
  McEstimate none = survival_mc(p, 1e6, {10000, 1});
  EXPECT_EQ(none.estimate, 0.0);
  EXPECT_EQ(none.std_err, 0.0);
  EXPECT_THROW(survival_mc(p, -1, {10, 1}), Error);
  EXPECT_THROW(sample_T(p, {0, 1}), Error);
}
