#pragma once

#include <cmath>

#include "bfexact/error.hpp"
#include "bfexact/params.hpp"
#include "bfexact/specfun.hpp"

namespace bfexact {

/// Data-driven effective degrees of freedom from sample variances.
inline double satterthwaite_df(double s1_sq, double s2_sq, double n1, double n2) {
  if (!(s1_sq > 0.0) || !(s2_sq > 0.0)) fail(ErrorKind::DomainError, "welch", "sample variances must be positive");
  if (!(n1 >= 2.0) || !(n2 >= 2.0)) fail(ErrorKind::DomainError, "welch", "sample sizes must be at least 2");
  const double v1 = s1_sq / n1, v2 = s2_sq / n2;
  return (v1 + v2) * (v1 + v2) / (v1 * v1 / (n1 - 1.0) + v2 * v2 / (n2 - 1.0));
}

/// Effective degrees of freedom from the population scales g and h.
inline double welch_df(const BfParams& p) {
  const double g = p.g(), h = p.h();
  return (g + h) * (g + h) / (g * g / p.nu1() + h * h / p.nu2());
}

/// Upper alpha point of Student-t with welch_df(p) degrees of freedom.
inline double welch_quantile(const BfParams& p, double alpha_level) {
  if (!(alpha_level > 0.0 && alpha_level < 0.5)) fail(ErrorKind::DomainError, "welch", "alpha must lie in (0, 0.5)");
  return student_t_quantile(1.0 - alpha_level, welch_df(p));
}

}  // namespace bfexact
