#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>

#include "bfexact/detail/mp_real.hpp"
#include "bfexact/error.hpp"
#include "bfexact/eval_result.hpp"
#include "bfexact/oracle.hpp"
#include "bfexact/params.hpp"
#include "bfexact/specfun.hpp"

namespace bfexact {

struct ResidueSeriesConfig {
  std::size_t max_terms = 200000;
  double rel_tol = 1e-13;
  /// Working precision never grows beyond this; past it the series hands
  /// over to the hypergeometric route and flags the result.
  long max_precision_bits = 4096;
};

/// Bookkeeping from a residue-series evaluation.
struct ResidueDetail {
  EvalResult result;
  /// Samples were interchanged so that lambda1 >= lambda2.
  bool swapped = false;
  /// (lambda2 + alpha)/(lambda1 + alpha) in the oriented problem.
  double x = 1.0;
  /// Terms taken from the Gamma(-s) ladder.
  std::size_t simple_terms = 0;
  /// Terms taken from the second ladder (logarithmic once the ladders merge).
  std::size_t second_terms = 0;
  /// The Gamma(-s) ladder stops by itself; true iff the oriented nu2 is odd.
  bool ladder_terminates = false;
  long precision_bits = 0;
  /// log2 of sum|terms| / |sum|.
  double cancellation_bits = 0.0;
};

namespace detail {

struct MpSeries {
  MpReal sum;
  MpReal abs_sum;
  std::size_t simple = 0;
  std::size_t second = 0;
  bool converged = false;
};

// Sum of the right-hand residues of
//   Gamma(-s) Gamma(s - 1/2) Gamma(a + s) Gamma(bh - s) x^s,   bh = b + 1/2,
// for 0 < x < 1. When bh is an integer the two ladders share poles from
// s = bh on and those residues carry digamma terms.
inline MpSeries residue_sum(double a, double b, double lam1, double lam2, double al, long prec,
                            std::size_t max_terms, double rel_tol) {
  const auto pr = static_cast<mpfr_prec_t>(prec);
  const double bh = b + 0.5;
  const bool merged = bh == std::floor(bh);
  MpSeries out{MpReal(pr), MpReal(pr)};
  const MpReal x = (MpReal(pr, lam2) + al) / (MpReal(pr, lam1) + al);
  const MpReal am(pr, a), bhm(pr, bh);
  const double xd = x.to_double();
  const double geo = xd / (1.0 - xd);
  const double stop_rel = rel_tol * 1e-3;
  const double settle = a + bh + 2.0;

  auto small_enough = [&](const MpReal& next_mag, double k) {
    if (k < settle) return false;
    MpReal tail = next_mag * geo;
    return !(tail > abs(out.sum) * stop_rel);
  };

  MpReal ta = gamma(MpReal(pr, -0.5)) * gamma(am) * gamma(bhm);
  if (merged) {
    const auto n = static_cast<std::size_t>(bh);
    for (std::size_t k = 0; k < n; ++k) {
      out.sum += ta;
      out.abs_sum += abs(ta);
      ++out.simple;
      if (k + 1 == n) break;
      double dk = static_cast<double>(k);
      ta *= MpReal(pr, dk) - 0.5;
      ta *= am + dk;
      ta /= dk + 1.0;
      ta /= bhm - (dk + 1.0);
      ta *= x;
      ta = -ta;
    }
    // Double poles at s0 = N + j.
    const double N = bh;
    MpReal coef = gamma(bhm - 0.5) * gamma(am + bhm) * pow(x, bhm) / gamma(MpReal(pr, N + 1.0));
    if (static_cast<long>(N) % 2 == 0) coef = -coef;
    MpReal ps_h = digamma(bhm - 0.5);
    MpReal ps_a = digamma(am + bhm);
    MpReal ps_n = digamma(MpReal(pr, N + 1.0));
    MpReal ps_j = digamma(MpReal(pr, 1.0));
    const MpReal lx = log(x);
    for (std::size_t j = 0; j < max_terms; ++j) {
      double dj = static_cast<double>(j);
      MpReal term = coef * (ps_h + ps_a + lx - ps_n - ps_j);
      out.sum += term;
      out.abs_sum += abs(term);
      ++out.second;
      double s0 = N + dj;
      ps_h += MpReal(pr, 1.0) / (MpReal(pr, s0) - 0.5);
      ps_a += MpReal(pr, 1.0) / (am + s0);
      ps_n += MpReal(pr, 1.0) / MpReal(pr, N + dj + 1.0);
      ps_j += MpReal(pr, 1.0) / MpReal(pr, dj + 1.0);
      coef *= MpReal(pr, s0) - 0.5;
      coef *= am + s0;
      coef *= x;
      coef /= N + dj + 1.0;
      coef /= dj + 1.0;
      MpReal next = abs(coef) * (abs(ps_h) + abs(ps_a) + abs(lx) + abs(ps_n) + abs(ps_j));
      if (small_enough(next, dj)) {
        out.converged = true;
        break;
      }
    }
    return out;
  }

  MpReal tb = gamma(-bhm) * gamma(bhm - 0.5) * gamma(am + bhm) * pow(x, bhm);
  for (std::size_t k = 0; k < max_terms; ++k) {
    double dk = static_cast<double>(k);
    out.sum += ta;
    out.sum += tb;
    out.abs_sum += abs(ta);
    out.abs_sum += abs(tb);
    ++out.simple;
    ++out.second;
    ta *= MpReal(pr, dk) - 0.5;
    ta *= am + dk;
    ta /= dk + 1.0;
    ta /= bhm - (dk + 1.0);
    ta *= x;
    ta = -ta;
    tb *= bhm + (dk - 0.5);
    tb *= am + bhm + dk;
    tb /= dk + 1.0;
    tb /= bhm + (dk + 1.0);
    tb *= x;
    if (small_enough(abs(ta) + abs(tb), dk)) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace detail

/// Density by the hypergeometric closed form
///   f(t) = Gamma(c) l1^a l2^b / (Gamma(a+b) sqrt(2 pi (g+h))) (alpha + l2)^{-c}
///          * 2F1(c, a; a+b; -rho(t)),
/// oriented so that the 2F1 argument lies in [0, 1).
inline EvalResult pdf_hyp(const BfParams& p0, double t) {
  if (!std::isfinite(t)) fail(ErrorKind::DomainError, "density", "t must be finite");
  t = std::abs(t);
  if (p0.collapses_to_student()) {
    double nu = p0.nu1() + p0.nu2();
    double v = student_t_pdf(t, nu);
    return {v, Method::StudentTCollapse, 0, 4 * detail::kEps * v, false, false};
  }
  const BfParams p = p0.lambda2() >= p0.lambda1() ? p0 : swap(p0);
  const double al = p.alpha(t);
  const double z = (p.lambda2() - p.lambda1()) / (al + p.lambda2());
  const double w = (al + p.lambda1()) / (al + p.lambda2());
  EvalResult f = hyp2f1_unit(p.c(), p.a(), p.a() + p.b(), z, w);
  // Gamma(c)/Gamma(a+b) (l1/(alpha+l2))^a (l2/(alpha+l2))^b / sqrt(2 pi (g+h)(alpha+l2)),
  // arranged as powers of ratios to keep rounding independent of the scales.
  const double base = al + p.lambda2();
  double k = std::pow(p.lambda1() / base, p.a()) * std::pow(p.lambda2() / base, p.b()) /
             boost::math::tgamma_delta_ratio(p.a() + p.b(), 0.5) /
             std::sqrt(2.0 * std::numbers::pi * (p.g() + p.h()) * base);
  double v = k * f.value;
  double err = k * f.error_bound + 8 * detail::kEps * std::abs(v) * (1.0 + p.c());
  return {v, Method::Hypergeometric, f.terms_used, err, false, false};
}

/// Density by the complete residue series of the Mellin-Barnes integral,
/// summed in adaptive multiprecision.
inline ResidueDetail pdf_residue_detail(const BfParams& p0, double t, const ResidueSeriesConfig& cfg = {}) {
  if (!std::isfinite(t)) fail(ErrorKind::DomainError, "density", "t must be finite");
  if (cfg.max_terms < 1) fail(ErrorKind::DomainError, "density", "max_terms must be at least 1");
  t = std::abs(t);
  ResidueDetail d;
  d.swapped = p0.lambda1() < p0.lambda2();
  const BfParams p = d.swapped ? swap(p0) : p0;
  const double a = p.a(), b = p.b(), bh = b + 0.5;
  const double l1 = p.lambda1(), l2 = p.lambda2(), al = p.alpha(t);
  d.x = (l2 + al) / (l1 + al);
  d.ladder_terminates = bh == std::floor(bh);
  const double nu = p.nu1() + p.nu2();

  // At x = 1 Barnes' first lemma closes the sum: the Student-t density.
  if (p.collapses_to_student() || 1.0 - d.x <= 1e-13) {
    double v = p.collapses_to_student() ? student_t_pdf(t, nu) : 0.0;
    if (!p.collapses_to_student()) {
      double lpre = a * std::log(l1) + b * std::log(l2) - std::lgamma(a + b) + std::lgamma(p.c()) -
                    0.5 * std::log(2.0 * std::numbers::pi * (p.g() + p.h())) - a * std::log(l1 + al) -
                    bh * std::log(l2 + al);
      v = std::exp(lpre);
    }
    d.result = {v, Method::ResidueSeries, 0, std::max(1e-13, 1.0 - d.x) * nu * v, false, false};
    return d;
  }

  // The two ladders cancel roughly like (1-x)^{-(a+b)}; start with room for that.
  long prec = std::max(128L, static_cast<long>((a + b + 1.0) * std::log2(1.0 / (1.0 - d.x))) + 96);
  for (int attempt = 0; attempt < 4 && prec <= cfg.max_precision_bits; ++attempt) {
    detail::MpSeries s = detail::residue_sum(a, b, l1, l2, al, prec, cfg.max_terms, cfg.rel_tol);
    if (!s.converged) break;
    double cb = s.sum.is_zero() ? 1e9 : detail::log2_abs(s.abs_sum) - detail::log2_abs(s.sum);
    if (static_cast<double>(prec) - cb < 64.0) {
      prec = static_cast<long>(cb) + 96;
      continue;
    }
    // (l1/(l1+alpha))^a (l2/(l2+alpha))^b / (Gamma(a) Gamma(b) Gamma(-1/2) sqrt(2 pi (g+h)(l2+alpha)))
    const auto pr = static_cast<mpfr_prec_t>(prec);
    using detail::MpReal;
    MpReal am(pr, a), bm(pr, b), l1m(pr, l1), l2m(pr, l2);
    MpReal pre = pow(l1m / (l1m + al), am) * pow(l2m / (l2m + al), bm) /
                 (detail::gamma(am) * detail::gamma(bm) * detail::gamma(MpReal(pr, -0.5)));
    MpReal w = (l2m + al) * (p.g() + p.h()) * 2.0;
    pre /= detail::sqrt(w * detail::const_pi(pr));
    double v = (s.sum * pre).to_double();
    d.simple_terms = s.simple;
    d.second_terms = s.second;
    d.precision_bits = prec;
    d.cancellation_bits = cb;
    double err = std::abs(v) * (cfg.rel_tol * 1e-3 + std::ldexp(1.0, -static_cast<int>(prec - cb)) +
                                8 * detail::kEps * (1.0 + a + b));
    d.result = {v, Method::ResidueSeries, s.simple + s.second, err, false, false};
    return d;
  }
  // Series too slow or too ill-conditioned for the configured budget.
  d.result = pdf_hyp(p0, t);
  d.result.fell_back = true;
  d.precision_bits = prec;
  return d;
}

inline EvalResult pdf_residue(const BfParams& p, double t, const ResidueSeriesConfig& cfg = {}) {
  return pdf_residue_detail(p, t, cfg).result;
}

/// Term k of the residue sum exactly as typeset, in the xi scaling:
///   (-1)^k / k! Gamma(k+1/2) Gamma(k+a) Gamma(b-k+1/2)
///     / [(1 + xi1 t^2)^{k+a} (1 + xi2 t^2)^{b-k+1/2}].
/// A pole of Gamma(b-k+1/2) is read as a vanishing term, which is how the
/// ladder is claimed to stop at k = (nu2-1)/2 for odd nu2.
inline double published_residue_term(const BfParams& p, double t, std::size_t k) {
  const double a = p.a(), b = p.b(), dk = static_cast<double>(k);
  const double arg = b - dk + 0.5;
  if (detail::is_nonpos_int(arg)) return 0.0;
  int sg = 1;
  double lg3 = boost::math::lgamma(arg, &sg);
  double t2 = t * t;
  double l = std::lgamma(dk + 0.5) + std::lgamma(dk + a) + lg3 - std::lgamma(dk + 1.0) -
             (dk + a) * std::log1p(p.xi1() * t2) - arg * std::log1p(p.xi2() * t2);
  double sign = (k % 2 == 0 ? 1.0 : -1.0) * sg;
  return sign * std::exp(l);
}

/// The typeset residue sum cut off at k = (nu2-1)/2 (odd integer nu2 only).
/// The overall constant is fixed so that the value at t = 0 equals the
/// Student-t(nu1+nu2) density there, which is what the equal-variance case
/// requires.
inline EvalResult published_residue_sum(const BfParams& p, double t) {
  if (!(p.nu2() == std::floor(p.nu2())) || static_cast<long>(p.nu2()) % 2 == 0)
    fail(ErrorKind::DomainError, "density", "the truncated published sum needs an odd integer nu2");
  const std::size_t kmax = static_cast<std::size_t>((p.nu2() - 1.0) / 2.0);
  detail::CompensatedSum s0, st;
  for (std::size_t k = 0; k <= kmax; ++k) {
    s0.add(published_residue_term(p, 0.0, k));
    st.add(published_residue_term(p, t, k));
  }
  if (std::abs(s0.value()) <= 1e-12 * s0.abs_sum)
    fail(ErrorKind::DomainError, "density", "truncated published sum vanishes at t = 0; no calibration possible");
  double cst = student_t_pdf(0.0, p.nu1() + p.nu2()) / s0.value();
  double v = cst * st.value();
  return {v, Method::ResidueSeries, kmax + 1, std::abs(cst) * 4 * detail::kEps * st.abs_sum, false, false};
}

enum class Route { Auto, Residue, Hypergeometric, Oracle };

/// Route selector. Auto takes the Student-t collapse when the two gamma
/// rates coincide and the hypergeometric form otherwise.
inline EvalResult pdf(const BfParams& p, double t, Route route = Route::Auto) {
  switch (route) {
    case Route::Residue: return pdf_residue(p, t);
    case Route::Oracle: return pdf_quadrature(p, t);
    case Route::Hypergeometric:
    case Route::Auto: break;
  }
  return pdf_hyp(p, t);
}

}  // namespace bfexact
