#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>

#include "bfexact/density.hpp"
#include "bfexact/error.hpp"
#include "bfexact/eval_result.hpp"
#include "bfexact/params.hpp"
#include "bfexact/quadrature.hpp"
#include "bfexact/specfun.hpp"
#include "bfexact/tails.hpp"
#include "bfexact/welch_approx.hpp"

namespace bfexact {

struct CdfConfig {
  double bulk_limit = 8.0;
  double tail_limit = 15.0;
  /// Tail masses get small, so only the relative tolerance matters here.
  QuadSpec quad{1e-300, 1e-12, 2000};
  double term_floor = 1e-16;
  std::size_t tail_terms = kTailDefaultTerms;
};

enum class Side { Upper, TwoSided };

namespace detail {

inline void check_config(const CdfConfig& cfg) {
  if (!(cfg.bulk_limit > 0.0) || !(cfg.bulk_limit < cfg.tail_limit))
    fail(ErrorKind::DomainError, "cdfq", "need 0 < bulk_limit < tail_limit");
}

}  // namespace detail

/// P(T > t), t >= 0, as a mixture of scaled Student-t tails:
///   int_0^1 w(u) S_nu(t / s(u)) du,  s(u)^2 = 2 (g+h) L(u) / nu,
/// where w is the density of the mixing variable and nu = nu1 + nu2.
/// Equivalently the bulk kernel has kappa(u) = 1 / (2 (g+h) L(u)).
inline EvalResult survival_bulk(const BfParams& p, double t, const QuadSpec& q = CdfConfig{}.quad) {
  if (!(t >= 0.0)) fail(ErrorKind::DomainError, "cdfq", "survival_bulk needs t >= 0");
  if (t == 0.0) return {0.5, Method::BulkQuadrature, 0, 0.0, false, false};
  const double nu = p.nu1() + p.nu2();
  if (p.collapses_to_student()) return {student_t_sf(t, nu), Method::StudentTCollapse, 0, 0.0, false, false};
  const double a = p.a(), b = p.b(), l1 = p.lambda1(), l2 = p.lambda2();
  const double lk = a * std::log(l1) + b * std::log(l2) - log_beta(a, b);
  const double ea = 2.0 * a - 1.0, eb = 2.0 * b - 1.0;
  const double gh2 = 2.0 * (p.g() + p.h()) / nu;
  auto f = [&](double th) {
    double s = std::sin(th), co = std::cos(th);
    double L = l1 * s * s + l2 * co * co;
    double w = 2.0 * (ea == 0.0 ? 1.0 : std::pow(s, ea)) * (eb == 0.0 ? 1.0 : std::pow(co, eb)) *
               std::exp(lk - (a + b) * std::log(L));
    return w * student_t_sf(t / std::sqrt(gh2 * L), nu);
  };
  QuadResult r = integrate_strict(f, 0.0, 0.5 * std::numbers::pi, q, "cdfq");
  return {r.value, Method::BulkQuadrature, r.evaluations, r.error, false, false};
}

/// Evaluator bound to one parameter point; the tail coefficients are built on
/// first use and then shared.
class Distribution {
 public:
  explicit Distribution(const BfParams& p, const CdfConfig& cfg = {}) : p_(p), cfg_(cfg) { detail::check_config(cfg); }

  const BfParams& params() const { return p_; }
  const CdfConfig& config() const { return cfg_; }

  const TailCoefficients& tail() const {
    std::call_once(tail_once_, [this] { tail_ = tail_coefficients(p_, cfg_.tail_terms); });
    return tail_;
  }

  /// P(T > t) for t >= 0, by the regime rules of cdf().
  EvalResult upper(double t) const {
    if (!(t >= 0.0)) fail(ErrorKind::DomainError, "cdfq", "upper tail needs t >= 0");
    if (t == 0.0) return {0.5, Method::BulkQuadrature, 0, 0.0, true, false};
    if (p_.collapses_to_student()) {
      double v = student_t_sf(t, p_.nu1() + p_.nu2());
      return {v, Method::StudentTCollapse, 0, 4 * detail::kEps * v, false, false};
    }
    if (t > cfg_.bulk_limit) {
      const TailCoefficients& tc = tail();
      if (t >= tc.t_min) {
        try {
          return survival_tail_auto(p_, t, tc, cfg_.term_floor);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::NoConverge && e.kind() != ErrorKind::OutOfRegime) throw;
        }
      }
    }
    return survival_bulk(p_, t, cfg_.quad);
  }

  /// F(t); F(-t) = 1 - F(t) by construction.
  EvalResult cdf(double t) const {
    if (!std::isfinite(t)) {
      if (std::isnan(t)) fail(ErrorKind::DomainError, "cdfq", "t is NaN");
      return {t > 0 ? 1.0 : 0.0, Method::BulkQuadrature, 0, 0.0, true, false};
    }
    if (t == 0.0) return {0.5, Method::BulkQuadrature, 0, 0.0, true, false};
    EvalResult s = upper(std::abs(t));
    if (t > 0.0) s.value = 1.0 - s.value;
    return s;
  }

  double pdf(double t) const { return pdf_hyp(p_, t).value; }

 private:
  BfParams p_;
  CdfConfig cfg_;
  mutable std::once_flag tail_once_;
  mutable TailCoefficients tail_;
};

inline EvalResult cdf(const BfParams& p, double t, const CdfConfig& cfg = {}) { return Distribution(p, cfg).cdf(t); }

/// P(T > t) for t >= 0.
inline EvalResult survival(const BfParams& p, double t, const CdfConfig& cfg = {}) {
  return Distribution(p, cfg).upper(t);
}

struct RegimeContinuity {
  double jump_bulk = 0.0;
  double jump_tail = 0.0;
  /// |bulk - tail series| at tail_limit when the series is valid there, else 0.
  double route_gap_tail = 0.0;
};

/// Compares the cdf just below and just above both regime limits. Raises
/// RegimeDiscontinuity beyond 1e-8.
inline RegimeContinuity check_regime_continuity(const BfParams& p, const CdfConfig& cfg = {}, double eps = 1e-6) {
  Distribution d(p, cfg);
  RegimeContinuity rc;
  rc.jump_bulk = std::abs(d.cdf(cfg.bulk_limit + eps).value - d.cdf(cfg.bulk_limit - eps).value);
  rc.jump_tail = std::abs(d.cdf(cfg.tail_limit + eps).value - d.cdf(cfg.tail_limit - eps).value);
  if (!p.collapses_to_student() && cfg.tail_limit >= d.tail().t_min)
    rc.route_gap_tail = std::abs(survival_bulk(p, cfg.tail_limit, cfg.quad).value -
                                 survival_tail_auto(p, cfg.tail_limit, d.tail(), cfg.term_floor).value);
  if (rc.jump_bulk > 1e-8 || rc.jump_tail > 1e-8 || rc.route_gap_tail > 1e-8)
    fail(ErrorKind::RegimeDiscontinuity, "cdfq", "cdf jumps at a regime boundary");
  return rc;
}

struct QuantileResult {
  double t = 0.0;
  /// |tail mass at t - alpha|.
  double residual = 0.0;
  std::size_t newton_steps = 0;
  std::size_t bisection_steps = 0;
  Method method = Method::BulkQuadrature;
};

/// Upper: P(T > t) = alpha. TwoSided: P(|T| > t) = alpha. Newton on the tail
/// mass from the Welch seed, with a maintained bracket and bisection whenever
/// a Newton iterate leaves it.
inline QuantileResult quantile_detail(const Distribution& d, double alpha_level, Side side) {
  if (!(alpha_level > 0.0 && alpha_level < 0.5)) fail(ErrorKind::DomainError, "cdfq", "alpha must lie in (0, 0.5)");
  const BfParams& p = d.params();
  const double q = side == Side::Upper ? alpha_level : 0.5 * alpha_level;
  QuantileResult out;
  auto mass = [&](double t) { return d.upper(t); };

  double lo = 0.0, hi = std::max(1.0, 2.0 * welch_quantile(p, q));
  EvalResult shi = mass(hi);
  for (int i = 0; i < 200 && shi.value > q; ++i) {
    lo = hi;
    hi *= 2.0;
    shi = mass(hi);
  }
  if (shi.value > q) fail(ErrorKind::NoConverge, "cdfq", "could not bracket the quantile");

  double t = welch_quantile(p, q);
  if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
  EvalResult st = mass(t);
  for (std::size_t it = 0; it < 300; ++it) {
    double diff = st.value - q;
    if (diff > 0.0) lo = t; else hi = t;
    if (std::abs(diff) <= 1e-15 * q || hi - lo <= 4 * detail::kEps * hi) break;
    double f = d.pdf(t);
    double next = f > 0.0 ? t + diff / f : lo - 1.0;
    if (next > lo && next < hi) {
      ++out.newton_steps;
      double step = next - t;
      t = next;
      st = mass(t);
      if (std::abs(step) <= 2 * detail::kEps * t) break;
    } else {
      ++out.bisection_steps;
      if (out.bisection_steps > 200) fail(ErrorKind::NoConverge, "cdfq", "quantile bisection did not converge");
      t = 0.5 * (lo + hi);
      st = mass(t);
    }
  }
  out.t = t;
  out.residual = std::abs(st.value - q) * (side == Side::TwoSided ? 2.0 : 1.0);
  out.method = st.method;
  return out;
}

inline double quantile(const BfParams& p, double alpha_level, Side side = Side::Upper, const CdfConfig& cfg = {}) {
  return quantile_detail(Distribution(p, cfg), alpha_level, side).t;
}

}  // namespace bfexact
