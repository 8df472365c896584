#pragma once

#include <cmath>
#include <string>

#include "bfexact/error.hpp"

namespace bfexact {

/// Two normal samples: sizes and population variances.
struct SampleDesign {
  int n1 = 2;
  int n2 = 2;
  double sigma1_sq = 1.0;
  double sigma2_sq = 1.0;
};

/// Problem instance for the null distribution of
///   T = Z / sqrt(g W1/nu1 + h W2/nu2),  Z ~ N(0, g+h),  Wi ~ chi^2(nu_i).
///
/// Degrees of freedom may be non-integer for analytic work; the table and CLI
/// paths insist on integers. All t-independent constants are computed once.
class BfParams {
 public:
  BfParams(double nu1, double nu2, double g, double h) : nu1_(nu1), nu2_(nu2), g_(g), h_(h) {
    if (!(nu1 > 0.0) || !(nu2 > 0.0) || !std::isfinite(nu1) || !std::isfinite(nu2))
      fail(ErrorKind::InvalidDesign, "params", "degrees of freedom must be positive and finite");
    if (!(g > 0.0) || !(h > 0.0) || !std::isfinite(g) || !std::isfinite(h))
      fail(ErrorKind::InvalidDesign, "params", "scales g and h must be positive and finite");
    r_ = g_ / h_;
    a_ = 0.5 * nu1_;
    b_ = 0.5 * nu2_;
    c_ = a_ + b_ + 0.5;
    xi1_ = g_ / (nu1_ * (g_ + h_));
    xi2_ = h_ / (nu2_ * (g_ + h_));
    lambda1_ = nu1_ / (2.0 * g_);
    lambda2_ = nu2_ / (2.0 * h_);
  }

  double nu1() const noexcept { return nu1_; }
  double nu2() const noexcept { return nu2_; }
  double g() const noexcept { return g_; }
  double h() const noexcept { return h_; }

  /// g/h.
  double r() const noexcept { return r_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  /// (nu1 + nu2 + 1)/2; always a + b + 1/2.
  double c() const noexcept { return c_; }
  /// Scale constants of the residue series: lambda_i + alpha(t) = lambda_i (1 + xi_i t^2).
  double xi1() const noexcept { return xi1_; }
  double xi2() const noexcept { return xi2_; }
  /// Gamma rates of g W1/nu1 and h W2/nu2, i.e. nu1/(2g) and nu2/(2h).
  double lambda1() const noexcept { return lambda1_; }
  double lambda2() const noexcept { return lambda2_; }

  /// t^2 / (2(g+h)).
  double alpha(double t) const noexcept { return t * t / (2.0 * (g_ + h_)); }

  /// Argument of the hypergeometric kernel, 2F1(c, a; a+b; -rho(t)):
  ///   rho(t) = (nu1/g - nu2/h) / (nu2/h + t^2/(g+h)).
  double rho(double t) const noexcept {
    return (lambda1_ - lambda2_) / (alpha(t) + lambda2_);
  }

  bool integer_df() const noexcept {
    return nu1_ == std::floor(nu1_) && nu2_ == std::floor(nu2_);
  }

  /// True when both Gamma rates coincide, where T is exactly Student-t(nu1+nu2).
  bool collapses_to_student() const noexcept {
    return std::abs(lambda1_ - lambda2_) <= 1e-14 * std::max(lambda1_, lambda2_);
  }

  friend bool operator==(const BfParams& x, const BfParams& y) noexcept {
    return x.nu1_ == y.nu1_ && x.nu2_ == y.nu2_ && x.g_ == y.g_ && x.h_ == y.h_;
  }

  std::string describe() const {
    return "nu1=" + std::to_string(nu1_) + " nu2=" + std::to_string(nu2_) +
           " g=" + std::to_string(g_) + " h=" + std::to_string(h_);
  }

 private:
  double nu1_, nu2_, g_, h_;
  double r_, a_, b_, c_, xi1_, xi2_, lambda1_, lambda2_;
};

inline BfParams from_design(const SampleDesign& d) {
  if (d.n1 < 2 || d.n2 < 2)
    fail(ErrorKind::InvalidDesign, "params", "sample sizes must be at least 2");
  if (!(d.sigma1_sq > 0.0) || !(d.sigma2_sq > 0.0))
    fail(ErrorKind::InvalidDesign, "params", "population variances must be positive");
  return BfParams(d.n1 - 1, d.n2 - 1, d.sigma1_sq / d.n1, d.sigma2_sq / d.n2);
}

/// Interchange the samples: (nu1, nu2, g, h) -> (nu2, nu1, h, g).
inline BfParams swap(const BfParams& p) { return BfParams(p.nu2(), p.nu1(), p.h(), p.g()); }

}  // namespace bfexact
