#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "bfexact/error.hpp"

namespace bfexact {

struct QuadSpec {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  std::size_t max_subdivisions = 2000;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  std::size_t intervals = 0;
  bool converged = false;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo, hi, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double lo, double hi) {
  double center = 0.5 * (lo + hi);
  double half = 0.5 * (hi - lo);
  double fc = f(center);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  double fv1[7], fv2[7];
  for (int j = 0; j < 3; ++j) {
    int jt = 2 * j + 1;
    double dx = half * kXgk[jt];
    double f1 = f(center - dx), f2 = f(center + dx);
    fv1[jt] = f1;
    fv2[jt] = f2;
    resg += kWg[j] * (f1 + f2);
    resk += kWgk[jt] * (f1 + f2);
    resabs += kWgk[jt] * (std::abs(f1) + std::abs(f2));
  }
  for (int j = 0; j < 4; ++j) {
    int jt = 2 * j;
    double dx = half * kXgk[jt];
    double f1 = f(center - dx), f2 = f(center + dx);
    fv1[jt] = f1;
    fv2[jt] = f2;
    resk += kWgk[jt] * (f1 + f2);
    resabs += kWgk[jt] * (std::abs(f1) + std::abs(f2));
  }
  double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  double result = resk * half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50 * eps)) err = std::max(50 * eps * resabs, err);
  return {lo, hi, result, err};
}

}  // namespace detail

/// Globally adaptive G7-K15 on a finite interval: the interval with the
/// largest error estimate is bisected until the total estimate meets
/// max(abs_tol, rel_tol*|I|) or the subdivision budget runs out.
template <class F>
QuadResult integrate(F&& f, double lo, double hi, const QuadSpec& spec = {}) {
  if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0))
    fail(ErrorKind::DomainError, "quadrature", "tolerances must be positive");
  QuadResult out;
  if (lo == hi) {
    out.converged = true;
    return out;
  }
  std::priority_queue<detail::Segment> heap;
  detail::Segment first = detail::gk15(f, lo, hi);
  heap.push(first);
  double total = first.value, err = first.error;
  std::size_t n = 1;
  out.evaluations = 15;
  while (err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total)) && n < spec.max_subdivisions) {
    detail::Segment s = heap.top();
    heap.pop();
    double mid = 0.5 * (s.lo + s.hi);
    if (!(mid > s.lo && mid < s.hi)) {
      heap.push(s);
      break;
    }
    detail::Segment l = detail::gk15(f, s.lo, mid);
    detail::Segment r = detail::gk15(f, mid, s.hi);
    out.evaluations += 30;
    heap.push(l);
    heap.push(r);
    ++n;
    // Resum from scratch now and then so drift in the running totals stays small.
    if (n % 64 == 0) {
      auto copy = heap;
      total = 0.0;
      err = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        err += copy.top().error;
        copy.pop();
      }
    } else {
      total += l.value + r.value - s.value;
      err += l.error + r.error - s.error;
    }
  }
  double t = 0.0, e = 0.0;
  std::vector<double> vals;
  vals.reserve(heap.size());
  while (!heap.empty()) {
    vals.push_back(heap.top().value);
    e += heap.top().error;
    heap.pop();
  }
  std::sort(vals.begin(), vals.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
  for (double v : vals) t += v;
  out.value = t;
  out.error = e;
  out.intervals = n;
  out.converged = e <= std::max(spec.abs_tol, spec.rel_tol * std::abs(t));
  return out;
}

/// As integrate(), but raises ToleranceNotMet when the budget is exhausted.
template <class F>
QuadResult integrate_strict(F&& f, double lo, double hi, const QuadSpec& spec, const char* where) {
  QuadResult r = integrate(f, lo, hi, spec);
  if (!r.converged)
    fail(ErrorKind::ToleranceNotMet, where,
         "quadrature budget exhausted (estimate " + std::to_string(r.error) + ")");
  return r;
}

}  // namespace bfexact
