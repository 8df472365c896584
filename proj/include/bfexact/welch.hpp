#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

#include "bfexact/cdfq.hpp"
#include "bfexact/detail/parallel.hpp"
#include "bfexact/error.hpp"
#include "bfexact/oracle.hpp"
#include "bfexact/params.hpp"
#include "bfexact/specfun.hpp"
#include "bfexact/welch_approx.hpp"

namespace bfexact {

enum class SizeMode { MonteCarlo, ExactCdf };

inline constexpr std::string_view to_string(SizeMode m) {
  return m == SizeMode::MonteCarlo ? "mc" : "exact";
}

/// One cell of the size-distortion study: n1 = n2 = n, sigma1^2 / sigma2^2 = r.
struct SizeCell {
  int n = 0;
  double log2_r = 0.0;
  double r = 1.0;
  SizeMode mode = SizeMode::ExactCdf;
  double delta = 0.0;
  double std_err = 0.0;
  std::uint64_t reps = 1;
  std::uint64_t seed = 0;
};

inline constexpr double kNominalSize = 0.05;

inline BfParams size_cell_params(int n, double r) { return from_design({n, n, r, 1.0}); }

/// Exact size of the two-sided 5% Welch test that uses the population
/// degrees of freedom, minus 0.05.
inline double exact_size_distortion(const BfParams& p, const CdfConfig& cfg = {}) {
  const double crit = welch_quantile(p, 0.5 * kNominalSize);
  return 2.0 * survival(p, crit, cfg).value - kNominalSize;
}

/// Monte Carlo size of the Welch test as practised: each replicate draws the
/// two sample variances and uses its own Satterthwaite degrees of freedom.
inline McEstimate mc_size(int n1, int n2, double sigma1_sq, double sigma2_sq, const McSpec& m) {
  if (m.replications < 1) fail(ErrorKind::DomainError, "welch", "replications must be at least 1");
  Rng rng(m.seed);
  const double nu1 = n1 - 1.0, nu2 = n2 - 1.0;
  const double sd = std::sqrt(sigma1_sq / n1 + sigma2_sq / n2);
  std::uint64_t rejections = 0;
  for (std::uint64_t i = 0; i < m.replications; ++i) {
    double z = sd * rng.normal();
    double s1 = sigma1_sq * rng.chi_square(nu1) / nu1;
    double s2 = sigma2_sq * rng.chi_square(nu2) / nu2;
    double t = z / std::sqrt(s1 / n1 + s2 / n2);
    double df = satterthwaite_df(s1, s2, n1, n2);
    if (2.0 * student_t_sf(std::abs(t), df) < kNominalSize) ++rejections;
  }
  double n = static_cast<double>(m.replications);
  double ph = static_cast<double>(rejections) / n;
  return {ph, std::sqrt(ph * (1.0 - ph) / n)};
}

/// Delta(n, r) over the grid, rows ordered by (n, log2 r) as given. Cell i of
/// a Monte Carlo run uses stream derive_seed(m.seed, i).
inline std::vector<SizeCell> size_distortion_grid(const std::vector<int>& n_values,
                                                  const std::vector<double>& log2r_values, const McSpec& m,
                                                  SizeMode mode, unsigned threads = 1) {
  for (int n : n_values)
    if (n < 2) fail(ErrorKind::DomainError, "welch", "sample sizes must be at least 2");
  if (mode == SizeMode::MonteCarlo && m.replications < 100)
    fail(ErrorKind::DomainError, "welch", "Monte Carlo mode needs at least 100 replications");
  std::vector<SizeCell> cells;
  for (int n : n_values)
    for (double l2 : log2r_values) {
      SizeCell c;
      c.n = n;
      c.log2_r = l2;
      c.r = std::exp2(l2);
      c.mode = mode;
      cells.push_back(c);
    }
  detail::parallel_for(cells.size(), threads, [&](std::size_t i) {
    SizeCell& c = cells[i];
    if (mode == SizeMode::ExactCdf) {
      c.delta = exact_size_distortion(size_cell_params(c.n, c.r));
      c.std_err = 0.0;
      c.reps = 1;
      c.seed = 0;
    } else {
      c.seed = derive_seed(m.seed, i);
      c.reps = m.replications;
      McEstimate e = mc_size(c.n, c.n, c.r, 1.0, {m.replications, c.seed});
      c.delta = e.estimate - kNominalSize;
      c.std_err = e.std_err;
    }
  });
  return cells;
}

/// Zero crossings of delta in one n-row, located by linear interpolation in
/// log2 r; the crossing nearest r = 1 is reported on each side.
struct SignFlip {
  int n = 0;
  bool has_low = false;
  bool has_high = false;
  double r_low = 0.0;
  double r_high = 0.0;
  /// Neither side changes sign: the NoCrossing outcome for this row.
  bool no_crossing() const { return !has_low && !has_high; }
};

/// |delta| at or below this counts as zero, not as a sign.
inline constexpr double kDeltaZero = 1e-12;

inline std::vector<SignFlip> sign_flip_contour(const std::vector<SizeCell>& cells) {
  std::map<int, std::vector<const SizeCell*>> rows;
  for (const auto& c : cells) rows[c.n].push_back(&c);
  std::vector<SignFlip> out;
  for (auto& [n, row] : rows) {
    if (row.size() < 3) fail(ErrorKind::DomainError, "welch", "each row needs at least 3 r-points");
    std::sort(row.begin(), row.end(), [](auto* x, auto* y) { return x->log2_r < y->log2_r; });
    SignFlip sf;
    sf.n = n;
    auto crossing = [](const SizeCell* x, const SizeCell* y) {
      return (x->delta > kDeltaZero && y->delta < -kDeltaZero) || (x->delta < -kDeltaZero && y->delta > kDeltaZero);
    };
    auto interp = [](const SizeCell* x, const SizeCell* y) {
      double f = x->delta / (x->delta - y->delta);
      return std::exp2(x->log2_r + f * (y->log2_r - x->log2_r));
    };
    for (std::size_t i = 0; i + 1 < row.size(); ++i) {
      const SizeCell *x = row[i], *y = row[i + 1];
      if (!crossing(x, y)) continue;
      double r = interp(x, y);
      if (r < 1.0) {
        sf.has_low = true;
        sf.r_low = r;  // later (closer to 1) crossings overwrite
      } else if (!sf.has_high) {
        sf.has_high = true;
        sf.r_high = r;
      }
    }
    out.push_back(sf);
  }
  return out;
}

}  // namespace bfexact
