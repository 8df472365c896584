#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "bfexact/error.hpp"
#include "bfexact/eval_result.hpp"
#include "bfexact/params.hpp"
#include "bfexact/quadrature.hpp"
#include "bfexact/specfun.hpp"

namespace bfexact {

enum class OracleMode {
  GammaExact,  // radial integral done exactly, one adaptive integral over the mixing variable
  Raw2D,       // nested adaptive quadrature over both chi-square variables
};

struct McSpec {
  std::uint64_t replications = 5000;
  std::uint64_t seed = 1;
};

namespace detail {

// log of Gamma(c) l1^a l2^b / (Gamma(a) Gamma(b) sqrt(2 pi (g+h))).
inline double oracle_log_const(const BfParams& p) {
  return std::lgamma(p.c()) + p.a() * std::log(p.lambda1()) + p.b() * std::log(p.lambda2()) -
         std::lgamma(p.a()) - std::lgamma(p.b()) - 0.5 * std::log(2.0 * std::numbers::pi * (p.g() + p.h()));
}

inline EvalResult pdf_mixture(const BfParams& p, double t, const QuadSpec& q) {
  const double al = p.alpha(t);
  const double lk = oracle_log_const(p);
  const double l1 = p.lambda1(), l2 = p.lambda2();
  const double ea = 2.0 * p.a() - 1.0, eb = 2.0 * p.b() - 1.0, c = p.c();
  // u = sin^2(theta) removes the endpoint singularities of u^{a-1}(1-u)^{b-1}.
  auto f = [&](double th) {
    double s = std::sin(th), co = std::cos(th);
    double u = s * s, v = co * co;
    double L = l1 * u + l2 * v;
    double lw = lk - c * std::log(al + L);
    double ps = ea == 0.0 ? 1.0 : std::pow(s, ea);
    double pc = eb == 0.0 ? 1.0 : std::pow(co, eb);
    return 2.0 * ps * pc * std::exp(lw);
  };
  QuadResult r = integrate_strict(f, 0.0, 0.5 * std::numbers::pi, q, "oracle");
  return {r.value, Method::Oracle, r.evaluations, r.error, false, false};
}

inline EvalResult pdf_raw2d(const BfParams& p, double t, const QuadSpec& q) {
  // f(t) = E[ sqrt(D) exp(-alpha D) ] / sqrt(2 pi (g+h)),  D = X1 + X2,
  // X1 ~ Gamma(a, rate l1), X2 ~ Gamma(b, rate l2). Each X is written as
  // x = (s/(1-s))^2 / rate on s in (0,1).
  const double al = p.alpha(t);
  const double a = p.a(), b = p.b(), l1 = p.lambda1(), l2 = p.lambda2();
  const double lg1 = a * std::log(l1) - std::lgamma(a);
  const double lg2 = b * std::log(l2) - std::lgamma(b);
  QuadSpec inner = q;
  inner.abs_tol = q.abs_tol * 0.1;
  double inner_err = 0.0;
  std::size_t evals = 0;
  // log of the gamma density times the Jacobian, on the mapped variable.
  auto mapped = [](double s, double rate, double shape, double lg, double& x) {
    double v = s / (1.0 - s);
    x = v * v / rate;
    double ldx = std::log(2.0 * v / rate) - 2.0 * std::log1p(-s);
    return lg + (shape - 1.0) * std::log(x) - rate * x + ldx;
  };
  auto outer = [&](double s1) {
    if (s1 <= 0.0 || s1 >= 1.0) return 0.0;
    double x1 = 0.0;
    double lw1 = mapped(s1, l1, a, lg1, x1);
    auto in = [&](double s2) {
      if (s2 <= 0.0 || s2 >= 1.0) return 0.0;
      double x2 = 0.0;
      double lw2 = mapped(s2, l2, b, lg2, x2);
      double d = x1 + x2;
      return std::exp(lw1 + lw2 + 0.5 * std::log(d) - al * d);
    };
    QuadResult r = integrate(in, 0.0, 1.0, inner);
    inner_err += r.error;
    evals += r.evaluations;
    return r.value;
  };
  QuadResult r = integrate(outer, 0.0, 1.0, q);
  double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * (p.g() + p.h()));
  if (!r.converged) fail(ErrorKind::ToleranceNotMet, "oracle", "raw 2-D quadrature budget exhausted");
  return {r.value * norm, Method::Oracle, evals, (r.error + inner_err / 15.0) * norm, false, false};
}

}  // namespace detail

/// Ground-truth density by quadrature of the defining integral.
inline EvalResult pdf_quadrature(const BfParams& p, double t, const QuadSpec& q = {},
                                 OracleMode mode = OracleMode::GammaExact) {
  if (!std::isfinite(t)) fail(ErrorKind::DomainError, "oracle", "t must be finite");
  return mode == OracleMode::GammaExact ? detail::pdf_mixture(p, std::abs(t), q)
                                        : detail::pdf_raw2d(p, std::abs(t), q);
}

/// splitmix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the index-th independent stream under a root seed.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) noexcept {
  return splitmix64(root + 0x9e3779b97f4a7c15ULL * (index + 1));
}

/// Reproducible variate source. Uniforms take the top 53 bits of
/// mt19937_64; normals use Marsaglia's polar method; gammas use
/// Marsaglia-Tsang with the u^{1/k} boost for shape below one. None of these
/// depend on the standard library's unspecified distribution algorithms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  double gamma(double shape) noexcept {
    if (shape < 1.0) return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double chi_square(double nu) noexcept { return 2.0 * gamma(0.5 * nu); }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Stream of draws of T = Z / sqrt(g W1/nu1 + h W2/nu2) under the null.
class TSampler {
 public:
  TSampler(const BfParams& p, std::uint64_t seed) : p_(p), rng_(seed), sd_(std::sqrt(p.g() + p.h())) {}

  double operator()() noexcept {
    double z = sd_ * rng_.normal();
    double w1 = rng_.chi_square(p_.nu1());
    double w2 = rng_.chi_square(p_.nu2());
    return z / std::sqrt(p_.g() * w1 / p_.nu1() + p_.h() * w2 / p_.nu2());
  }

 private:
  BfParams p_;
  Rng rng_;
  double sd_;
};

inline std::vector<double> sample_T(const BfParams& p, const McSpec& m) {
  if (m.replications < 1) fail(ErrorKind::DomainError, "oracle", "replications must be at least 1");
  TSampler s(p, m.seed);
  std::vector<double> out(m.replications);
  for (auto& x : out) x = s();
  return out;
}

struct McEstimate {
  double estimate = 0.0;
  double std_err = 0.0;
};

enum class Sided { One, Two };

/// Monte Carlo tail mass: P(T > t) for one-sided, P(|T| > t) for two-sided.
inline McEstimate survival_mc(const BfParams& p, double t, const McSpec& m, Sided side = Sided::Two) {
  if (!(t >= 0.0)) fail(ErrorKind::DomainError, "oracle", "survival_mc needs t >= 0");
  if (m.replications < 1) fail(ErrorKind::DomainError, "oracle", "replications must be at least 1");
  TSampler s(p, m.seed);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < m.replications; ++i) {
    double x = s();
    if (side == Sided::Two ? std::abs(x) > t : x > t) ++hits;
  }
  double n = static_cast<double>(m.replications);
  double ph = static_cast<double>(hits) / n;
  return {ph, std::sqrt(ph * (1.0 - ph) / n)};
}

}  // namespace bfexact
