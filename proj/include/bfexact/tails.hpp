#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "bfexact/density.hpp"
#include "bfexact/error.hpp"
#include "bfexact/eval_result.hpp"
#include "bfexact/params.hpp"
#include "bfexact/specfun.hpp"

namespace bfexact {

enum class TailMode {
  /// Coefficients and |t|^{-(2m+1)} ladder exactly as typeset. Documentary only.
  AsPublished,
  /// Descending series of the true density, f(t) ~ t^{-(nu1+nu2+1)} sum_m a_m (s/t^2)^m.
  OracleCalibrated,
};

/// f(t) ~ |t|^{-exponent_offset} * sum_m a_m (scale / t^2)^m for large |t|.
struct TailCoefficients {
  BfParams params{1, 1, 1, 1};
  std::vector<double> a_m;
  TailMode mode = TailMode::OracleCalibrated;
  double exponent_offset = 0.0;
  /// s in the ratio s/t^2; 1 for AsPublished.
  double scale = 1.0;
  /// Smallest |t| at which the series is used.
  double t_min = 0.0;
};

inline constexpr std::size_t kTailDefaultTerms = 200;
inline constexpr std::size_t kTailMaxTerms = 400;
inline constexpr std::size_t kPublishedMaxTerms = 32;

/// Leading tail constant of Student-t(nu): f(t) ~ C t^{-(nu+1)}.
inline double student_t_tail_constant(double nu) {
  return std::exp(std::lgamma(0.5 * (nu + 1.0)) + 0.5 * nu * std::log(nu) - 0.5 * std::log(std::numbers::pi) -
                  std::lgamma(0.5 * nu));
}

namespace detail {

// E[(L(U)/l_max)^m] for U ~ Beta(a, b), L(u) = l1 u + l2 (1-u).
inline std::vector<double> mixing_moments(const BfParams& p, std::size_t m_max) {
  const double a = p.a(), b = p.b();
  const double lmax = std::max(p.lambda1(), p.lambda2());
  const double lt1 = std::log(p.lambda1() / lmax), lt2 = std::log(p.lambda2() / lmax);
  const double lb = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  std::vector<double> mu(m_max + 1);
  for (std::size_t m = 0; m <= m_max; ++m) {
    const double dm = static_cast<double>(m);
    CompensatedSum s;
    for (std::size_t j = 0; j <= m; ++j) {
      const double dj = static_cast<double>(j);
      double l = std::lgamma(dm + 1.0) - std::lgamma(dj + 1.0) - std::lgamma(dm - dj + 1.0) + dj * lt1 +
                 (dm - dj) * lt2 + std::lgamma(a + dj) + std::lgamma(b + dm - dj) - std::lgamma(a + b + dm) - lb;
      s.add(std::exp(l));
    }
    mu[m] = s.value();
  }
  return mu;
}

inline double tail_term_ratio_bound(double c, std::size_t m, double q) {
  return std::max(1.0, (c + static_cast<double>(m)) / (static_cast<double>(m) + 1.0)) * q;
}

}  // namespace detail

/// Tail coefficients up to index m_max.
inline TailCoefficients tail_coefficients(const BfParams& p, std::size_t m_max = kTailDefaultTerms,
                                          TailMode mode = TailMode::OracleCalibrated) {
  TailCoefficients tc;
  tc.params = p;
  tc.mode = mode;
  if (mode == TailMode::AsPublished) {
    if (m_max > kPublishedMaxTerms) fail(ErrorKind::DomainError, "tails", "published coefficients need m_max <= 32");
    // (-1)^m A_m / m!,  A_m = Gamma(m+1/2) Gamma(m+a) Gamma(m+b) / (sqrt(pi) 2^{a+b+m} (g/nu1)^a (h/nu2)^b)
    const double a = p.a(), b = p.b();
    for (std::size_t m = 0; m <= m_max; ++m) {
      const double dm = static_cast<double>(m);
      double l = std::lgamma(dm + 0.5) + std::lgamma(dm + a) + std::lgamma(dm + b) -
                 0.5 * std::log(std::numbers::pi) - (a + b + dm) * std::log(2.0) - a * std::log(p.g() / p.nu1()) -
                 b * std::log(p.h() / p.nu2()) - std::lgamma(dm + 1.0);
      tc.a_m.push_back((m % 2 == 0 ? 1.0 : -1.0) * std::exp(l));
    }
    tc.exponent_offset = 1.0;
    tc.scale = 1.0;
    tc.t_min = 1.0;
    return tc;
  }
  if (m_max > kTailMaxTerms) fail(ErrorKind::DomainError, "tails", "m_max above the supported cap");
  const double c = p.c(), gh = 2.0 * (p.g() + p.h());
  const double lmax = std::max(p.lambda1(), p.lambda2());
  tc.scale = gh * lmax;
  tc.exponent_offset = 2.0 * c;
  // B0 = Gamma(c) l1^a l2^b (2(g+h))^c / (Gamma(a+b) sqrt(pi (2(g+h))))
  const double lb0 = std::lgamma(c) + p.a() * std::log(p.lambda1()) + p.b() * std::log(p.lambda2()) +
                     c * std::log(gh) - std::lgamma(p.a() + p.b()) - 0.5 * std::log(std::numbers::pi * gh);
  const std::vector<double> mu = detail::mixing_moments(p, m_max);
  double lpoch = 0.0;  // log of (c)_m / m!
  for (std::size_t m = 0; m <= m_max; ++m) {
    const double dm = static_cast<double>(m);
    tc.a_m.push_back((m % 2 == 0 ? 1.0 : -1.0) * std::exp(lb0 + lpoch) * mu[m]);
    lpoch += std::log((c + dm) / (dm + 1.0));
  }
  // Validity: the ratio s/t^2 stays below 0.6 and the last available term is
  // negligible against the first at double precision.
  const double M = static_cast<double>(m_max);
  const double q_ratio = std::abs(tc.a_m.back() / tc.a_m.front()) * (2.0 * c - 1.0) / (2.0 * c + 2.0 * M - 1.0) * 1e17;
  double t2 = std::max(tc.scale / 0.6, m_max > 0 ? tc.scale * std::pow(q_ratio, 1.0 / M) : tc.scale / 0.6);
  t2 = std::max(t2, tc.scale * std::max(1.0, (c + M) / (M + 1.0)) * 1.0001);
  tc.t_min = std::sqrt(t2);
  return tc;
}

/// Density from the first M terms (M = 0 means all available).
inline EvalResult pdf_tail(const TailCoefficients& tc, double t, std::size_t M = 0) {
  t = std::abs(t);
  if (!(t > 0.0)) fail(ErrorKind::DomainError, "tails", "tail series needs |t| > 0");
  if (M == 0 || M > tc.a_m.size()) M = tc.a_m.size();
  const double q = tc.scale / (t * t);
  const double lead = std::pow(t, -tc.exponent_offset);
  detail::CompensatedSum s;
  double qm = 1.0;
  for (std::size_t m = 0; m < M; ++m) {
    s.add(tc.a_m[m] * qm * lead);
    qm *= q;
  }
  double next = M < tc.a_m.size() ? std::abs(tc.a_m[M] * qm * lead) : std::abs(s.value()) * detail::kEps;
  return {s.value(), Method::TailSeries, M, next, false, false};
}

/// P(T > t) by term-wise integration of the descending series:
///   sum_m a_m s^m t^{-(2c+2m-1)} / (2c+2m-1),
/// truncated after M terms. The bound adds the magnitudes of every omitted
/// stored term and closes the rest with a geometric series, since past the
/// last stored index the term ratio stays below (c+m)/(m+1) * s/t^2 < 1.
inline EvalResult survival_tail(const BfParams& p, double t, const TailCoefficients& tc, std::size_t M) {
  if (tc.mode == TailMode::AsPublished)
    fail(ErrorKind::DomainError, "tails", "the published ladder starts at |t|^-1, which has no finite tail integral");
  if (!(tc.params == p)) fail(ErrorKind::DomainError, "tails", "coefficients belong to different parameters");
  if (!(t >= tc.t_min)) fail(ErrorKind::OutOfRegime, "tails", "t below the tail-series validity threshold");
  const std::size_t K = tc.a_m.size() - 1;
  if (M == 0 || M >= K) M = K;
  const double q = tc.scale / (t * t);
  const double e0 = tc.exponent_offset - 1.0;
  const double lead = std::pow(t, -e0);
  detail::CompensatedSum s;
  double omitted = 0.0;
  double qm = 1.0;
  for (std::size_t m = 0; m < K; ++m) {
    double term = tc.a_m[m] * qm * lead / (e0 + 2.0 * m);
    if (m < M) s.add(term); else omitted += std::abs(term);
    qm *= q;
  }
  const double rho = detail::tail_term_ratio_bound(p.c(), K, q);
  const bool rigorous = rho < 1.0;
  const double last = std::abs(tc.a_m[K] * qm * lead / (e0 + 2.0 * K));
  omitted += rigorous ? last / (1.0 - rho) : last;
  return {s.value(), Method::TailSeries, M, omitted + 2 * detail::kEps * s.abs_sum, rigorous, false};
}

/// survival_tail with the term count chosen adaptively: stop at the first
/// term below term_floor relative to the running sum.
inline EvalResult survival_tail_auto(const BfParams& p, double t, const TailCoefficients& tc,
                                     double term_floor = 1e-16) {
  if (tc.mode == TailMode::AsPublished)
    fail(ErrorKind::DomainError, "tails", "the published ladder has no finite tail integral");
  if (!(t >= tc.t_min)) fail(ErrorKind::OutOfRegime, "tails", "t below the tail-series validity threshold");
  const double q = tc.scale / (t * t);
  const double e0 = tc.exponent_offset - 1.0;
  const double lead = std::pow(t, -e0);
  detail::CompensatedSum s;
  double qm = 1.0;
  for (std::size_t m = 0; m < tc.a_m.size(); ++m) {
    double term = tc.a_m[m] * qm * lead / (e0 + 2.0 * m);
    const double rho = detail::tail_term_ratio_bound(p.c(), m, q);
    if (m > 0 && std::abs(term) <= term_floor * std::abs(s.value()) && rho < 1.0)
      return {s.value(), Method::TailSeries, m, std::abs(term) / (1.0 - rho) + 2 * detail::kEps * s.abs_sum, true,
              false};
    s.add(term);
    qm *= q;
  }
  fail(ErrorKind::NoConverge, "tails", "tail series did not reach the term floor");
}

struct TailFit {
  /// Fitted coefficients of t^{-(nu1+nu2+1+2m)}, m = 0..3.
  std::array<double, 4> b{};
  double condition = 0.0;
};

/// Cross-check of the leading tail coefficients by fitting
/// t^{nu1+nu2+1} f(t) = sum_{m<4} b_m t^{-2m} through the density at four
/// points of a geometric ladder.
inline TailFit fit_tail_coefficients(const BfParams& p, std::array<double, 4> ts = {40.0, 60.0, 90.0, 135.0}) {
  const double e = 2.0 * p.c();
  const double y0 = 1.0 / (ts[0] * ts[0]);
  double A[4][4], rhs[4];
  for (int i = 0; i < 4; ++i) {
    double y = 1.0 / (ts[i] * ts[i]) / y0;  // scaled nodes in (0, 1]
    double v = 1.0;
    for (int j = 0; j < 4; ++j) {
      A[i][j] = v;
      v *= y;
    }
    rhs[i] = pdf_hyp(p, ts[i]).value * std::pow(ts[i], e);
  }
  // Explicit inverse by Gauss-Jordan with partial pivoting, for the 1-norm condition number.
  double M[4][8];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 8; ++j) M[i][j] = j < 4 ? A[i][j] : (j - 4 == i ? 1.0 : 0.0);
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
    if (M[piv][col] == 0.0) fail(ErrorKind::FitIllConditioned, "tails", "singular fitting system");
    if (piv != col)
      for (int j = 0; j < 8; ++j) std::swap(M[piv][j], M[col][j]);
    double d = M[col][col];
    for (int j = 0; j < 8; ++j) M[col][j] /= d;
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      double f = M[r][col];
      for (int j = 0; j < 8; ++j) M[r][j] -= f * M[col][j];
    }
  }
  auto norm1 = [](auto&& get) {
    double best = 0.0;
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int i = 0; i < 4; ++i) s += std::abs(get(i, j));
      best = std::max(best, s);
    }
    return best;
  };
  TailFit fit;
  fit.condition = norm1([&](int i, int j) { return A[i][j]; }) * norm1([&](int i, int j) { return M[i][j + 4]; });
  if (fit.condition > 1e12) fail(ErrorKind::FitIllConditioned, "tails", "fitting system condition number above 1e12");
  double scale = 1.0;
  for (int m = 0; m < 4; ++m) {
    double v = 0.0;
    for (int k = 0; k < 4; ++k) v += M[m][k + 4] * rhs[k];
    fit.b[m] = v / scale;  // undo the node scaling: coefficient of t^{-2m}
    scale *= y0;
  }
  return fit;
}

}  // namespace bfexact
