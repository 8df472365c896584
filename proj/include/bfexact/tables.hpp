#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "bfexact/cdfq.hpp"
#include "bfexact/detail/io.hpp"
#include "bfexact/detail/parallel.hpp"
#include "bfexact/error.hpp"
#include "bfexact/eval_result.hpp"
#include "bfexact/params.hpp"

namespace bfexact {

struct GridSpec {
  std::vector<int> nu1{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20, 30};
  std::vector<int> nu2{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20, 30};
  std::vector<double> r{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 0.95, 1.0};
  std::vector<double> alpha{0.10, 0.05, 0.025, 0.01, 0.005, 0.001};
  Side side = Side::Upper;

  /// nu in 1..30, 40, 60, 120 on both axes.
  static GridSpec full() {
    GridSpec g;
    g.nu1.clear();
    for (int i = 1; i <= 30; ++i) g.nu1.push_back(i);
    for (int i : {40, 60, 120}) g.nu1.push_back(i);
    g.nu2 = g.nu1;
    return g;
  }
};

struct CriticalValueRecord {
  int nu1 = 0;
  int nu2 = 0;
  double r = 1.0;
  double alpha_level = 0.05;
  double t_alpha = 0.0;
  double self_check_residual = 0.0;
  Method method = Method::BulkQuadrature;
};

inline constexpr double kTableResidualBound = 1e-11;

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

inline double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::DomainError, "tables", "bad number '" + s + "' in " + what);
  }
}

// "1-30,40,60" -> 1..30, 40, 60
inline std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
  std::vector<int> out;
  for (const auto& item : split(s, ',')) {
    if (item.empty()) continue;
    auto dash = item.find('-', 1);
    if (dash != std::string::npos) {
      int lo = static_cast<int>(parse_double(item.substr(0, dash), what));
      int hi = static_cast<int>(parse_double(item.substr(dash + 1), what));
      if (hi < lo) fail(ErrorKind::DomainError, "tables", "empty range '" + item + "' in " + what);
      for (int i = lo; i <= hi; ++i) out.push_back(i);
    } else {
      double v = parse_double(item, what);
      if (v != std::floor(v)) fail(ErrorKind::DomainError, "tables", what + " must be integers");
      out.push_back(static_cast<int>(v));
    }
  }
  return out;
}

inline std::vector<double> parse_double_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split(s, ','))
    if (!item.empty()) out.push_back(parse_double(item, what));
  return out;
}

}  // namespace detail

/// Apply one key=value setting (keys: nu, nu1, nu2, r, alpha, side).
inline void apply_grid_setting(GridSpec& g, const std::string& key, const std::string& value) {
  if (key == "nu") {
    g.nu1 = detail::parse_int_list(value, key);
    g.nu2 = g.nu1;
  } else if (key == "nu1") {
    g.nu1 = detail::parse_int_list(value, key);
  } else if (key == "nu2") {
    g.nu2 = detail::parse_int_list(value, key);
  } else if (key == "r") {
    g.r = detail::parse_double_list(value, key);
  } else if (key == "alpha") {
    g.alpha = detail::parse_double_list(value, key);
  } else if (key == "side") {
    if (value == "upper") g.side = Side::Upper;
    else if (value == "two") g.side = Side::TwoSided;
    else fail(ErrorKind::DomainError, "tables", "side must be 'upper' or 'two'");
  } else {
    fail(ErrorKind::DomainError, "tables", "unknown grid key '" + key + "'");
  }
}

inline void validate_grid(const GridSpec& g) {
  if (g.nu1.empty() || g.nu2.empty() || g.r.empty() || g.alpha.empty())
    fail(ErrorKind::DomainError, "tables", "grid axes must be nonempty");
  for (int v : g.nu1)
    if (v < 1) fail(ErrorKind::DomainError, "tables", "degrees of freedom must be at least 1");
  for (int v : g.nu2)
    if (v < 1) fail(ErrorKind::DomainError, "tables", "degrees of freedom must be at least 1");
  for (double v : g.r)
    if (!(v > 0.0 && v <= 1.0)) fail(ErrorKind::DomainError, "tables", "stored ratios must satisfy 0 < r <= 1");
  for (double v : g.alpha)
    if (!(v > 0.0 && v < 0.5)) fail(ErrorKind::DomainError, "tables", "alpha must lie in (0, 0.5)");
}

/// Plain-text grid description: one key=value per line, '#' starts a comment.
inline GridSpec parse_grid_spec(std::istream& in, GridSpec base = {}) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::DomainError, "tables", "line " + std::to_string(lineno) + ": expected key=value");
    apply_grid_setting(base, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  validate_grid(base);
  return base;
}

inline GridSpec read_grid_spec(const std::string& path, GridSpec base = {}) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::DomainError, "tables", "cannot open grid file " + path);
  return parse_grid_spec(in, std::move(base));
}

struct TableRun {
  std::vector<CriticalValueRecord> records;
  /// One message per (nu1, nu2, r, alpha) that failed; the run carries on.
  std::vector<std::string> failures;
};

/// One record per (nu1, nu2, r, alpha) with h = 1 and g = r, sorted by
/// (nu1, nu2, r, alpha).
inline TableRun generate_table(const GridSpec& grid, unsigned threads = 1, const CdfConfig& cfg = {}) {
  validate_grid(grid);
  std::vector<int> n1s = grid.nu1, n2s = grid.nu2;
  std::vector<double> rs = grid.r, as = grid.alpha;
  std::sort(n1s.begin(), n1s.end());
  n1s.erase(std::unique(n1s.begin(), n1s.end()), n1s.end());
  std::sort(n2s.begin(), n2s.end());
  n2s.erase(std::unique(n2s.begin(), n2s.end()), n2s.end());
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
  std::sort(as.begin(), as.end());
  as.erase(std::unique(as.begin(), as.end()), as.end());

  struct Job {
    int n1, n2;
    double r;
  };
  std::vector<Job> jobs;
  for (int a : n1s)
    for (int b : n2s)
      for (double r : rs) jobs.push_back({a, b, r});
  std::vector<std::vector<CriticalValueRecord>> recs(jobs.size());
  std::vector<std::vector<std::string>> errs(jobs.size());
  detail::parallel_for(jobs.size(), threads, [&](std::size_t i) {
    const Job& j = jobs[i];
    Distribution d(BfParams(j.n1, j.n2, j.r, 1.0), cfg);
    for (double a : as) {
      try {
        QuantileResult q = quantile_detail(d, a, grid.side);
        CriticalValueRecord rec{j.n1, j.n2, j.r, a, q.t, q.residual, q.method};
        if (!(q.residual < kTableResidualBound))
          errs[i].push_back("nu1=" + std::to_string(j.n1) + " nu2=" + std::to_string(j.n2) + " r=" +
                            detail::fmt17(j.r) + " alpha=" + detail::fmt17(a) + ": residual " +
                            detail::fmt17(q.residual) + " above bound");
        recs[i].push_back(rec);
      } catch (const Error& e) {
        errs[i].push_back("nu1=" + std::to_string(j.n1) + " nu2=" + std::to_string(j.n2) + " r=" +
                          detail::fmt17(j.r) + " alpha=" + detail::fmt17(a) + ": " + e.what());
      }
    }
  });
  TableRun run;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    run.records.insert(run.records.end(), recs[i].begin(), recs[i].end());
    run.failures.insert(run.failures.end(), errs[i].begin(), errs[i].end());
  }
  return run;
}

inline std::string table_csv(const std::vector<CriticalValueRecord>& records) {
  std::string out = "nu1,nu2,r,alpha,t_alpha,residual,method\n";
  for (const auto& r : records) {
    out += std::to_string(r.nu1) + ',' + std::to_string(r.nu2) + ',' + detail::fmt17(r.r) + ',' +
           detail::fmt17(r.alpha_level) + ',' + detail::fmt17(r.t_alpha) + ',' + detail::fmt17(r.self_check_residual) +
           ',' + std::string(to_string(r.method)) + '\n';
  }
  return out;
}

inline Method parse_method(const std::string& s) {
  for (Method m : {Method::ResidueSeries, Method::Hypergeometric, Method::StudentTCollapse, Method::TailSeries,
                   Method::Saddlepoint, Method::BulkQuadrature, Method::Oracle})
    if (to_string(m) == s) return m;
  fail(ErrorKind::DomainError, "tables", "unknown method '" + s + "'");
}

inline std::vector<CriticalValueRecord> parse_table_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != "nu1,nu2,r,alpha,t_alpha,residual,method")
    fail(ErrorKind::DomainError, "tables", "missing or unexpected table header");
  std::vector<CriticalValueRecord> out;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    auto f = detail::split(line, ',');
    if (f.size() != 7) fail(ErrorKind::DomainError, "tables", "table row needs 7 fields");
    CriticalValueRecord r;
    r.nu1 = static_cast<int>(detail::parse_double(f[0], "nu1"));
    r.nu2 = static_cast<int>(detail::parse_double(f[1], "nu2"));
    r.r = detail::parse_double(f[2], "r");
    r.alpha_level = detail::parse_double(f[3], "alpha");
    r.t_alpha = detail::parse_double(f[4], "t_alpha");
    r.self_check_residual = detail::parse_double(f[5], "residual");
    r.method = parse_method(f[6]);
    out.push_back(r);
  }
  return out;
}

namespace detail {

// Fritsch-Carlson monotone cubic through (x_i, y_i), evaluated at x.
inline double pchip(const std::vector<double>& x, const std::vector<double>& y, double xq) {
  const std::size_t n = x.size();
  if (n == 1) return y[0];
  std::vector<double> h(n - 1), del(n - 1), d(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    del[i] = (y[i + 1] - y[i]) / h[i];
  }
  if (n == 2) {
    d[0] = d[1] = del[0];
  } else {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (del[i - 1] * del[i] <= 0.0) {
        d[i] = 0.0;
      } else {
        double w1 = 2.0 * h[i] + h[i - 1], w2 = h[i] + 2.0 * h[i - 1];
        d[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
      }
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
      double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
      if (s * d0 <= 0.0) return 0.0;
      if (d0 * d1 <= 0.0 && std::abs(s) > std::abs(3.0 * d0)) return 3.0 * d0;
      return s;
    };
    d[0] = end_slope(h[0], h[1], del[0], del[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
  }
  std::size_t k = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), xq) - x.begin());
  k = k == 0 ? 0 : std::min(k - 1, n - 2);
  double s = (xq - x[k]) / h[k];
  double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  return h00 * y[k] + h10 * h[k] * d[k] + h01 * y[k + 1] + h11 * h[k] * d[k + 1];
}

}  // namespace detail

/// Critical value for samples of sizes n1, n2 with sample variances s1_sq,
/// s2_sq, read off a table. Ratios above one are folded through the sample
/// interchange; between rows the value is a monotone cubic in log10 r.
inline double lookup(int n1, int n2, double s1_sq, double s2_sq, double alpha_level,
                     const std::vector<CriticalValueRecord>& table) {
  if (n1 < 2 || n2 < 2) fail(ErrorKind::InvalidDesign, "tables", "sample sizes must be at least 2");
  if (!(s1_sq > 0.0) || !(s2_sq > 0.0)) fail(ErrorKind::InvalidDesign, "tables", "variances must be positive");
  int nu1 = n1 - 1, nu2 = n2 - 1;
  double r = (s1_sq / n1) / (s2_sq / n2);
  if (r > 1.0) {
    std::swap(nu1, nu2);
    r = 1.0 / r;
  }
  std::vector<std::pair<double, double>> row;
  for (const auto& rec : table)
    if (rec.nu1 == nu1 && rec.nu2 == nu2 && std::abs(rec.alpha_level - alpha_level) <= 1e-12 * alpha_level)
      row.emplace_back(rec.r, rec.t_alpha);
  if (row.empty()) fail(ErrorKind::OutOfGrid, "tables", "no table rows for these degrees of freedom and alpha");
  std::sort(row.begin(), row.end());
  for (const auto& [rr, tv] : row)
    if (std::abs(rr - r) <= 1e-12 * rr) return tv;
  if (r < row.front().first || r > row.back().first)
    fail(ErrorKind::ExtrapolationRefused, "tables", "variance ratio outside the tabulated range");
  std::vector<double> xs, ys;
  for (const auto& [rr, tv] : row) {
    xs.push_back(std::log10(rr));
    ys.push_back(tv);
  }
  return detail::pchip(xs, ys, std::log10(r));
}

}  // namespace bfexact
