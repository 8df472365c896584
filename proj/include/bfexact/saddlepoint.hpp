#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <string_view>
#include <vector>

#include "bfexact/detail/parallel.hpp"
#include "bfexact/error.hpp"
#include "bfexact/eval_result.hpp"
#include "bfexact/params.hpp"
#include "bfexact/specfun.hpp"

namespace bfexact {

enum class EdgeClass { Interior, TinyDf, ExtremeRatio, UltraHighTail, NearEqualSmallN, NonConverged };

inline constexpr std::string_view to_string(EdgeClass e) {
  switch (e) {
    case EdgeClass::Interior: return "Interior";
    case EdgeClass::TinyDf: return "TinyDf";
    case EdgeClass::ExtremeRatio: return "ExtremeRatio";
    case EdgeClass::UltraHighTail: return "UltraHighTail";
    case EdgeClass::NearEqualSmallN: return "NearEqualSmallN";
    case EdgeClass::NonConverged: return "NonConverged";
  }
  return "Unknown";
}

struct SaddleDiagnostics {
  double xi_hat = 0.0;
  double w = 0.0;
  double u = 0.0;
  std::size_t newton_iters = 0;
  bool damped = false;
  EdgeClass edge_class = EdgeClass::Interior;
  /// |K'(xi_hat) - t|.
  double residual = 0.0;
};

inline constexpr double kSaddleGuard = 1e-7;

namespace detail {

inline void check_cgf_domain(const BfParams& p, double xi) {
  if (!(xi > -p.nu1() + kSaddleGuard && xi < p.nu2() - kSaddleGuard))
    fail(ErrorKind::DomainError, "saddlepoint", "xi outside the open interval (-nu1, nu2)");
}

inline bool in_cgf_domain(const BfParams& p, double xi) {
  return xi > -p.nu1() + kSaddleGuard && xi < p.nu2() - kSaddleGuard;
}

}  // namespace detail

/// K(xi) = ln G(a + xi/2) + ln G(b - xi/2) - ln G(a) - ln G(b) + (xi/2) ln r.
inline double cgf(const BfParams& p, double xi) {
  detail::check_cgf_domain(p, xi);
  return std::lgamma(p.a() + 0.5 * xi) + std::lgamma(p.b() - 0.5 * xi) - std::lgamma(p.a()) - std::lgamma(p.b()) +
         0.5 * xi * std::log(p.r());
}

inline double cgf_d1(const BfParams& p, double xi) {
  detail::check_cgf_domain(p, xi);
  return 0.5 * (digamma(p.a() + 0.5 * xi) - digamma(p.b() - 0.5 * xi) + std::log(p.r()));
}

inline double cgf_d2(const BfParams& p, double xi) {
  detail::check_cgf_domain(p, xi);
  return 0.25 * (trigamma(p.a() + 0.5 * xi) + trigamma(p.b() - 0.5 * xi));
}

namespace detail {

inline EdgeClass classify(const BfParams& p, double t, bool converged) {
  if (!converged) return EdgeClass::NonConverged;
  const double lr = std::abs(std::log10(p.r()));
  const double numin = std::min(p.nu1(), p.nu2());
  if (numin <= 2.0) return EdgeClass::TinyDf;
  if (lr > 1.0) return EdgeClass::ExtremeRatio;
  if (std::abs(t) > 0.8 * (p.nu1() + p.nu2())) return EdgeClass::UltraHighTail;
  if (lr <= 0.1 && numin <= 4.0) return EdgeClass::NearEqualSmallN;
  return EdgeClass::Interior;
}

}  // namespace detail

/// Damped Newton for K'(xi) = t started from xi = 0, so the first full step
/// lands on t/K''(0). A step is halved while it would leave the guarded
/// domain or fail to reduce |K' - t|.
inline SaddleDiagnostics solve_saddle(const BfParams& p, double t) {
  SaddleDiagnostics d;
  const double tol = 1e-10 * std::max(1.0, std::abs(t));
  double xi = 0.0;
  double res = cgf_d1(p, xi) - t;
  bool converged = std::abs(res) <= tol;
  for (std::size_t it = 0; it < 60 && !converged; ++it) {
    double step = res / cgf_d2(p, xi);
    double lam = 1.0;
    double cand = xi - step;
    double cres = 0.0;
    bool accepted = false;
    for (int h = 0; h < 60; ++h) {
      if (detail::in_cgf_domain(p, cand)) {
        cres = cgf_d1(p, cand) - t;
        if (std::abs(cres) < std::abs(res)) {
          accepted = true;
          break;
        }
      }
      lam *= 0.5;
      cand = xi - lam * step;
      d.damped = true;
    }
    ++d.newton_iters;
    if (!accepted) break;
    xi = cand;
    res = cres;
    converged = std::abs(res) <= tol;
  }
  d.xi_hat = xi;
  d.residual = std::abs(res);
  d.edge_class = detail::classify(p, t, converged);
  return d;
}

struct LrOutcome {
  EvalResult result;
  SaddleDiagnostics diag;
  /// The cell falls in one of the documented edge regimes; the value is still returned.
  bool edge() const { return diag.edge_class != EdgeClass::Interior; }
};

/// Lugannani-Rice P(T >= t) ~ 1 - Phi(w) + phi(w) (1/w - 1/u) with
/// w = sign(t) sqrt(2 (t xi - K(xi))) and u = t sqrt(K''(xi)).
inline LrOutcome lr_survival(const BfParams& p, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) fail(ErrorKind::DomainError, "saddlepoint", "lr_survival needs finite t >= 0");
  LrOutcome out;
  if (t == 0.0) {
    out.diag.edge_class = detail::classify(p, t, true);
    out.result = {0.5, Method::Saddlepoint, 0, 0.0, false, false};
    return out;
  }
  out.diag = solve_saddle(p, t);
  const double xi = out.diag.xi_hat;
  const double k = cgf(p, xi);
  const double k2 = cgf_d2(p, xi);
  const double w2 = std::max(0.0, 2.0 * (t * xi - k));
  const double w = std::copysign(std::sqrt(w2), t);
  const double u = t * std::sqrt(k2);
  out.diag.w = w;
  out.diag.u = u;
  double v;
  if (std::abs(w) < 1e-5) {
    // Continuity value at the centre; K''' by central differences of K''.
    const double h = 1e-4;
    const double k2c = cgf_d2(p, 0.0);
    const double k3 = (cgf_d2(p, h) - cgf_d2(p, -h)) / (2.0 * h);
    v = 0.5 - k3 / (6.0 * std::sqrt(2.0 * std::numbers::pi) * std::pow(k2c, 1.5));
  } else {
    v = normal_sf(w) + normal_pdf(w) * (1.0 / w - 1.0 / u);
  }
  v = std::min(1.0, std::max(0.0, v));
  out.result = {v, Method::Saddlepoint, out.diag.newton_iters, 0.0, false, false};
  return out;
}

struct LrGrid {
  std::vector<double> nus{1, 2, 5, 10, 20, 40};
  std::vector<double> rs{0.05, 0.1, 0.25, 0.5, 1, 2, 4, 10, 20};
  std::vector<double> ts{6, 8, 10, 12, 15, 20};
};

struct LrCell {
  double nu1, nu2, r, t;
  double lr;
  double truth;
  double delta_rel;
  EdgeClass edge_class;
};

/// delta_rel = |LR - truth| / truth on every (nu1, nu2, r, t) cell, with
/// h = 1 and g = r. Rows come out in grid order regardless of threads.
inline std::vector<LrCell> lr_error_grid(const LrGrid& grid,
                                         const std::function<double(const BfParams&, double)>& ground_truth,
                                         unsigned threads = 1) {
  std::vector<LrCell> cells;
  for (double n1 : grid.nus)
    for (double n2 : grid.nus)
      for (double r : grid.rs)
        for (double t : grid.ts) cells.push_back({n1, n2, r, t, 0, 0, 0, EdgeClass::Interior});
  detail::parallel_for(cells.size(), threads, [&](std::size_t i) {
    LrCell& c = cells[i];
    BfParams p(c.nu1, c.nu2, c.r, 1.0);
    LrOutcome lr = lr_survival(p, c.t);
    c.lr = lr.result.value;
    c.truth = ground_truth(p, c.t);
    c.delta_rel = std::abs(c.lr - c.truth) / c.truth;
    c.edge_class = lr.diag.edge_class;
  });
  return cells;
}

}  // namespace bfexact
