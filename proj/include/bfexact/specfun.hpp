#pragma once

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>

#include "bfexact/error.hpp"
#include "bfexact/eval_result.hpp"

namespace bfexact {

namespace detail {

// Neumaier's variant of compensated summation.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  double abs_sum = 0.0;

  void add(double x) noexcept {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
    abs_sum += std::abs(x);
  }
  double value() const noexcept { return sum + comp; }
};

inline bool is_nonpos_int(double x) noexcept { return x <= 0.0 && x == std::floor(x); }

constexpr double kEps = std::numeric_limits<double>::epsilon();

}  // namespace detail

inline double log_gamma(double x) {
  if (!(x > 0.0)) fail(ErrorKind::DomainError, "specfun", "log_gamma needs x > 0");
  return boost::math::lgamma(x);
}

inline double digamma(double x) {
  if (!(x > 0.0)) fail(ErrorKind::DomainError, "specfun", "digamma needs x > 0");
  return boost::math::digamma(x);
}

inline double trigamma(double x) {
  if (!(x > 0.0)) fail(ErrorKind::DomainError, "specfun", "trigamma needs x > 0");
  return boost::math::trigamma(x);
}

inline double log_beta(double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

/// I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0))
    fail(ErrorKind::DomainError, "specfun", "incomplete_beta argument out of range");
  return boost::math::ibeta(a, b, x);
}

/// 1 - I_x(a, b), computed without forming the difference.
inline double incomplete_beta_complement(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0))
    fail(ErrorKind::DomainError, "specfun", "incomplete_beta argument out of range");
  return boost::math::ibetac(a, b, x);
}

inline double normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

/// Upper tail 1 - Phi(x).
inline double normal_sf(double x) noexcept { return 0.5 * boost::math::erfc(x / std::numbers::sqrt2); }

inline double student_t_pdf(double t, double nu) {
  if (!(nu > 0.0)) fail(ErrorKind::DomainError, "specfun", "student_t_pdf needs nu > 0");
  double lc = log_gamma(0.5 * (nu + 1.0)) - log_gamma(0.5 * nu) - 0.5 * std::log(nu * std::numbers::pi);
  return std::exp(lc - 0.5 * (nu + 1.0) * std::log1p(t * t / nu));
}

/// P(T > t) for T ~ t_nu.
inline double student_t_sf(double t, double nu) {
  if (!(nu > 0.0)) fail(ErrorKind::DomainError, "specfun", "student_t_sf needs nu > 0");
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  double at = std::abs(t);
  double t2 = at * at;
  double upper;
  if (t2 < nu)
    upper = 0.5 * incomplete_beta_complement(0.5, 0.5 * nu, t2 / (nu + t2));
  else
    upper = 0.5 * incomplete_beta(0.5 * nu, 0.5, nu / (nu + t2));
  return t >= 0.0 ? upper : 1.0 - upper;
}

inline double student_t_cdf(double t, double nu) { return student_t_sf(-t, nu); }

/// Inverse of student_t_cdf, polished by Newton steps on the nearer tail.
inline double student_t_quantile(double p, double nu) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::DomainError, "specfun", "quantile needs 0 < p < 1");
  if (!(nu > 0.0)) fail(ErrorKind::DomainError, "specfun", "quantile needs nu > 0");
  if (p == 0.5) return 0.0;
  double q = p < 0.5 ? p : 1.0 - p;  // upper-tail mass of |t|
  boost::math::students_t_distribution<double> dist(nu);
  double t = boost::math::quantile(boost::math::complement(dist, q));
  for (int it = 0; it < 4; ++it) {
    double f = student_t_pdf(t, nu);
    if (!(f > 0.0)) break;
    double step = (student_t_sf(t, nu) - q) / f;
    t += step;
    if (std::abs(step) <= 4 * detail::kEps * std::abs(t)) break;
  }
  return p < 0.5 ? -t : t;
}

struct Hyp2F1Request {
  double a_par;
  double b_par;
  double c_par;
  double z;
};

namespace detail {

constexpr std::size_t kHypMaxTerms = 100000;

// Plain Gauss series. Terminates exactly when a or b is a non-positive integer.
inline EvalResult hyp_series(double a, double b, double c, double z) {
  CompensatedSum s;
  double term = 1.0;
  s.add(term);
  bool terminating = is_nonpos_int(a) || is_nonpos_int(b);
  for (std::size_t n = 0; n < kHypMaxTerms; ++n) {
    double dn = static_cast<double>(n);
    if ((a + dn) == 0.0 || (b + dn) == 0.0)
      return {s.value(), Method::Hypergeometric, n + 1, kEps * s.abs_sum, false, false};
    double ratio = (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0)) * z;
    term *= ratio;
    s.add(term);
    if (terminating) continue;
    double v = std::abs(s.value());
    double q = std::abs(ratio);
    // Once the ratio settles below one the rest is dominated by a geometric tail.
    if (dn > std::abs(a) + std::abs(b) + std::abs(c) && q < 1.0) {
      double tail = std::abs(term) * q / (1.0 - q);
      if (tail <= 0.25 * kEps * v || tail == 0.0)
        return {s.value(), Method::Hypergeometric, n + 2, tail + 2 * kEps * s.abs_sum, false, false};
    }
  }
  fail(ErrorKind::NoConverge, "hyp2f1", "series did not converge within the term cap");
}

// 1/Gamma(x) with sign, as (sign, log|.|); sign 0 marks a pole of Gamma.
struct LogGam {
  double log_abs;
  int sign;
};
inline LogGam lgam_signed(double x) {
  if (is_nonpos_int(x)) return {0.0, 0};
  int sg = 1;
  double l = boost::math::lgamma(x, &sg);
  return {l, sg};
}

// Connection to 1-z when c-a-b is not an integer.
inline EvalResult hyp_one_minus_z(double a, double b, double c, double w) {
  double s = c - a - b;
  LogGam gc = lgam_signed(c), gs = lgam_signed(s), gms = lgam_signed(-s);
  LogGam gca = lgam_signed(c - a), gcb = lgam_signed(c - b), ga = lgam_signed(a), gb = lgam_signed(b);
  EvalResult out{0.0, Method::Hypergeometric, 0, 0.0, false, false};
  if (gca.sign != 0 && gcb.sign != 0) {
    EvalResult f1 = hyp_series(a, b, 1.0 - s, w);
    double k1 = gc.sign * gs.sign * gca.sign * gcb.sign *
                std::exp(gc.log_abs + gs.log_abs - gca.log_abs - gcb.log_abs);
    out.value += k1 * f1.value;
    out.error_bound += std::abs(k1) * f1.error_bound;
    out.terms_used += f1.terms_used;
  }
  if (ga.sign != 0 && gb.sign != 0) {
    EvalResult f2 = hyp_series(c - a, c - b, 1.0 + s, w);
    double k2 = gc.sign * gms.sign * ga.sign * gb.sign *
                std::exp(gc.log_abs + gms.log_abs - ga.log_abs - gb.log_abs + s * std::log(w));
    out.value += k2 * f2.value;
    out.error_bound += std::abs(k2) * f2.error_bound;
    out.terms_used += f2.terms_used;
  }
  out.error_bound += 8 * kEps * std::abs(out.value);
  return out;
}

// Logarithmic connection for c = a + b + m, m = 0, 1, 2, ...
inline EvalResult hyp_log_case(double a, double b, int m, double w) {
  double c = a + b + m;
  double lw = std::log(w);
  CompensatedSum s;
  std::size_t terms = 0;
  if (m > 0) {
    // Gamma(m) Gamma(c) / (Gamma(a+m) Gamma(b+m)) * sum_{n<m} (a)_n (b)_n / (n! (1-m)_n) w^n
    double k = std::exp(std::lgamma(double(m)) + std::lgamma(c) - std::lgamma(a + m) - std::lgamma(b + m));
    LogGam gam = lgam_signed(a + m), gbm = lgam_signed(b + m);
    k *= gam.sign * gbm.sign;
    double term = 1.0;
    for (int n = 0; n < m; ++n) {
      s.add(k * term);
      term *= (a + n) * (b + n) / ((n + 1.0) * (1.0 - m + n)) * w;
      ++terms;
    }
  }
  // - (z-1)^m Gamma(c)/(Gamma(a)Gamma(b)) * sum_n (a+m)_n (b+m)_n / (n! (n+m)!) w^n [ln w - psi(n+1) - psi(n+m+1) + psi(a+n+m) + psi(b+n+m)]
  LogGam ga = lgam_signed(a), gb = lgam_signed(b);
  double k2 = -(m % 2 == 0 ? 1.0 : -1.0) * ga.sign * gb.sign *
              std::exp(std::lgamma(c) - ga.log_abs - gb.log_abs - std::lgamma(m + 1.0) + m * lw);
  double coef = 1.0;
  double p1 = boost::math::digamma(1.0);
  double pm = boost::math::digamma(m + 1.0);
  double pa = boost::math::digamma(a + m);
  double pb = boost::math::digamma(b + m);
  for (std::size_t n = 0; n < kHypMaxTerms; ++n) {
    double dn = static_cast<double>(n);
    double term = k2 * coef * (lw - p1 - pm + pa + pb);
    s.add(term);
    ++terms;
    double ratio = (a + m + dn) * (b + m + dn) / ((dn + 1.0) * (dn + m + 1.0)) * w;
    p1 += 1.0 / (dn + 1.0);
    pm += 1.0 / (dn + m + 1.0);
    pa += 1.0 / (a + m + dn);
    pb += 1.0 / (b + m + dn);
    coef *= ratio;
    double q = std::abs(ratio);
    if (dn > std::abs(a) + std::abs(b) + m && q < 0.5) {
      double next = std::abs(k2 * coef) * (std::abs(lw) + std::abs(pa) + std::abs(pb) + std::abs(p1) + std::abs(pm));
      if (next * 2.0 <= 0.25 * kEps * std::abs(s.value()) || next == 0.0) break;
    }
    if (n + 1 == kHypMaxTerms) fail(ErrorKind::NoConverge, "hyp2f1", "log-case series hit the term cap");
  }
  return {s.value(), Method::Hypergeometric, terms, 4 * kEps * s.abs_sum, false, false};
}

// Evaluate on 0 <= z < 1; w = 1 - z is passed separately so callers that
// know it more accurately than 1 - z can say so.
inline EvalResult hyp_unit_interval(double a, double b, double c, double z, double w) {
  if (z <= 0.9 || is_nonpos_int(a) || is_nonpos_int(b)) return hyp_series(a, b, c, z);
  double s = c - a - b;
  double sr = std::round(s);
  if (std::abs(s - sr) > 1e-12) return hyp_one_minus_z(a, b, c, w);
  int m = static_cast<int>(sr);
  if (m >= 0) {
    if (is_nonpos_int(a + m) || is_nonpos_int(b + m)) return hyp_series(a, b, c, z);
    return hyp_log_case(a, b, m, w);
  }
  // Euler: F(a,b;c;z) = (1-z)^s F(c-a, c-b; c; z) raises the excess to -m.
  double ap = c - a, bp = c - b;
  if (is_nonpos_int(ap) || is_nonpos_int(bp) || is_nonpos_int(ap - m) || is_nonpos_int(bp - m))
    return hyp_series(a, b, c, z);
  EvalResult r = hyp_log_case(ap, bp, -m, w);
  double f = std::pow(w, s);
  r.value *= f;
  r.error_bound *= f;
  return r;
}

}  // namespace detail

/// Gauss 2F1(a, b; c; z) on the real line z < 1.
inline EvalResult hyp2f1(const Hyp2F1Request& req) {
  double a = req.a_par, b = req.b_par, c = req.c_par, z = req.z;
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(z))
    fail(ErrorKind::DomainError, "hyp2f1", "non-finite argument");
  if (!(z < 1.0)) fail(ErrorKind::DomainError, "hyp2f1", "real-line evaluator needs z < 1");
  bool term_a = detail::is_nonpos_int(a), term_b = detail::is_nonpos_int(b);
  if (detail::is_nonpos_int(c)) {
    bool ok = (term_a && a > c) || (term_b && b > c);
    if (!ok) fail(ErrorKind::DomainError, "hyp2f1", "c is a pole and the series does not terminate first");
    return detail::hyp_series(a, b, c, z);
  }
  if (z == 0.0) return {1.0, Method::Hypergeometric, 1, 0.0, true, false};
  if (term_a || term_b) return detail::hyp_series(a, b, c, z);
  if (z > 0.0) return detail::hyp_unit_interval(a, b, c, z, 1.0 - z);
  // Pfaff: F(a,b;c;z) = (1-z)^{-a} F(a, c-b; c; z/(z-1)); pull out whichever
  // parameter leaves a terminating or smaller remaining series.
  double w = z / (z - 1.0);
  double pa = a, pb = c - b;
  if (!detail::is_nonpos_int(c - b) && (detail::is_nonpos_int(c - a) || std::abs(b) < std::abs(a))) {
    pa = b;
    pb = c - a;
  }
  EvalResult r = detail::hyp_unit_interval(pa, pb, c, w, 1.0 / (1.0 - z));
  double f = std::pow(1.0 - z, -pa);
  r.value *= f;
  r.error_bound *= f;
  return r;
}

inline EvalResult hyp2f1(double a, double b, double c, double z) { return hyp2f1({a, b, c, z}); }

/// 2F1(a, b; c; z) for 0 <= z < 1 given both z and w = 1 - z, for callers that
/// can form w without cancellation. No terminating or pole checks.
inline EvalResult hyp2f1_unit(double a, double b, double c, double z, double w) {
  if (!(z >= 0.0 && z < 1.0) || !(w > 0.0))
    fail(ErrorKind::DomainError, "hyp2f1", "hyp2f1_unit needs 0 <= z < 1");
  if (z == 0.0) return {1.0, Method::Hypergeometric, 1, 0.0, true, false};
  return detail::hyp_unit_interval(a, b, c, z, w);
}

}  // namespace bfexact
