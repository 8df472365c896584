// Command-line front end: density, cdf and quantile evaluation, critical-value
// tables, the Welch size study and the saddlepoint error grid.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bfexact/bfexact.hpp"

namespace {

using namespace bfexact;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct ParamFlags {
  std::optional<double> nu1, nu2, g, h;
  std::optional<int> n1, n2;
  std::optional<double> s1sq, s2sq;

  void add(CLI::App* app) {
    app->add_option("--nu1", nu1, "degrees of freedom of the first sample");
    app->add_option("--nu2", nu2, "degrees of freedom of the second sample");
    app->add_option("--g", g, "scale of the first variance component");
    app->add_option("--h", h, "scale of the second variance component");
    app->add_option("--n1", n1, "first sample size");
    app->add_option("--n2", n2, "second sample size");
    app->add_option("--sigma1sq", s1sq, "first population variance");
    app->add_option("--sigma2sq", s2sq, "second population variance");
  }

  BfParams resolve() const {
    bool direct = nu1 || nu2 || g || h;
    bool design = n1 || n2 || s1sq || s2sq;
    if (direct && design)
      fail(ErrorKind::InvalidDesign, "cli", "use either --nu1/--nu2/--g/--h or --n1/--n2/--sigma1sq/--sigma2sq, not both");
    if (design) {
      if (!(n1 && n2 && s1sq && s2sq))
        fail(ErrorKind::InvalidDesign, "cli", "--n1, --n2, --sigma1sq and --sigma2sq are all required");
      return from_design({*n1, *n2, *s1sq, *s2sq});
    }
    if (!(nu1 && nu2 && g && h)) fail(ErrorKind::InvalidDesign, "cli", "--nu1, --nu2, --g and --h are all required");
    return BfParams(*nu1, *nu2, *g, *h);
  }
};

std::string num(double v, bool pretty) {
  if (!pretty) return detail::fmt17(v);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    detail::write_atomic(out, text);
}

Route parse_route(const std::string& m) {
  if (m == "auto") return Route::Auto;
  if (m == "residue") return Route::Residue;
  if (m == "hyp") return Route::Hypergeometric;
  if (m == "oracle") return Route::Oracle;
  fail(ErrorKind::DomainError, "cli", "unknown method " + m);
}

unsigned resolve_threads(int flag) { return flag > 0 ? static_cast<unsigned>(flag) : detail::default_threads(); }

std::vector<double> log2r_axis(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) fail(ErrorKind::DomainError, "cli", "bad log2 r range");
  std::vector<double> out;
  long n = std::lround((hi - lo) / step);
  for (long i = 0; i <= n; ++i) out.push_back(lo + step * static_cast<double>(i));
  return out;
}

// Cross-route agreement on a small grid; one line per (nu1, nu2).
int selftest(bool pretty) {
  const std::vector<double> nus{1, 2, 3, 5, 10, 40};
  const std::vector<double> rs{0.05, 0.25, 1, 4, 20};
  const std::vector<double> ts{0, 0.5, 1, 2, 4, 8};
  bool all = true;
  std::cout << "nu1\\nu2";
  for (double b : nus) std::cout << '\t' << b;
  std::cout << '\n';
  for (double a : nus) {
    std::cout << a;
    for (double b : nus) {
      double worst = 0.0;
      for (double r : rs)
        for (double t : ts) {
          BfParams p(a, b, r, 1.0);
          double x = pdf_residue(p, t).value, y = pdf_hyp(p, t).value;
          worst = std::max(worst, std::abs(x - y) / std::max(1.0, std::abs(y)));
        }
      bool ok = worst <= 1e-9;
      all = all && ok;
      std::cout << '\t' << (ok ? "PASS" : "FAIL");
      if (pretty) std::cout << '(' << num(worst, true) << ')';
    }
    std::cout << '\n';
  }
  std::cout << (all ? "selftest: PASS\n" : "selftest: FAIL\n");
  return all ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact Behrens-Fisher distribution tools"};
  app.set_help_flag("--help", "print this help and exit");  // -h would clash with --h
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  bool pretty = false;
  int threads = 0;
  app.add_flag("--pretty", pretty, "human-readable numbers");
  app.add_option("--threads", threads, "worker threads (default: BF_THREADS or all cores)");

  ParamFlags pf_pdf, pf_cdf, pf_q;
  double t = 0.0;
  std::string method = "auto";

  auto* c_pdf = app.add_subcommand("pdf", "density at t");
  pf_pdf.add(c_pdf);
  c_pdf->add_option("--t", t, "evaluation point")->required();
  c_pdf->add_option("--method", method, "auto|residue|hyp|oracle")
      ->check(CLI::IsMember({"auto", "residue", "hyp", "oracle"}));

  auto* c_cdf = app.add_subcommand("cdf", "distribution function at t");
  pf_cdf.add(c_cdf);
  c_cdf->add_option("--t", t, "evaluation point")->required();
  c_cdf->add_option("--method", method, "auto|residue|hyp|oracle")
      ->check(CLI::IsMember({"auto", "residue", "hyp", "oracle"}));

  double alpha = 0.05;
  std::string side = "upper";
  auto* c_q = app.add_subcommand("quantile", "critical value");
  pf_q.add(c_q);
  c_q->add_option("--alpha", alpha, "tail probability")->required();
  c_q->add_option("--side", side, "upper|two")->check(CLI::IsMember({"upper", "two"}));

  std::string grid_file, out;
  bool full_grid = false;
  std::string g_nu, g_nu1, g_nu2, g_r, g_alpha, g_side;
  auto* c_tab = app.add_subcommand("table", "critical-value table as CSV");
  c_tab->add_option("--grid", grid_file, "key=value grid file");
  c_tab->add_flag("--full", full_grid, "start from the full grid instead of the desk grid");
  c_tab->add_option("--nu", g_nu, "both df axes, e.g. 1-10,15");
  c_tab->add_option("--nu1", g_nu1, "first df axis");
  c_tab->add_option("--nu2", g_nu2, "second df axis");
  c_tab->add_option("--r", g_r, "variance ratios in (0, 1]");
  c_tab->add_option("--alpha", g_alpha, "tail probabilities");
  c_tab->add_option("--side", g_side, "upper|two");
  c_tab->add_option("--out", out, "output CSV (default stdout)");

  std::string mode = "exact";
  std::uint64_t reps = 5000, seed = 1;
  std::vector<int> ns{10, 20, 30, 50};
  double l2lo = -3.0, l2hi = 3.0, l2step = 0.25;
  auto* c_w = app.add_subcommand("welch-size", "size distortion of the Welch test");
  c_w->add_option("--mode", mode, "exact|mc")->check(CLI::IsMember({"exact", "mc"}));
  c_w->add_option("--reps", reps, "Monte Carlo replications per cell");
  c_w->add_option("--seed", seed, "root seed");
  c_w->add_option("--n", ns, "common sample sizes")->delimiter(',');
  c_w->add_option("--log2r-min", l2lo, "smallest log2 variance ratio");
  c_w->add_option("--log2r-max", l2hi, "largest log2 variance ratio");
  c_w->add_option("--log2r-step", l2step, "log2 ratio step");
  c_w->add_option("--out", out, "output CSV (default stdout)");

  auto* c_lr = app.add_subcommand("lr-grid", "saddlepoint relative error against the exact tail");
  c_lr->add_option("--out", out, "output CSV (default stdout)");

  auto* c_self = app.add_subcommand("selftest", "cross-route agreement matrix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    const unsigned nthreads = resolve_threads(threads);
    if (*c_pdf) {
      BfParams p = pf_pdf.resolve();
      EvalResult r = pdf(p, t, parse_route(method));
      std::cout << num(r.value, pretty);
      if (pretty) std::cout << "  [" << to_string(r.method) << ", bound " << num(r.error_bound, true) << ']';
      std::cout << '\n';
    } else if (*c_cdf) {
      BfParams p = pf_cdf.resolve();
      EvalResult r;
      Route route = parse_route(method);
      if (route == Route::Auto) {
        r = cdf(p, t);
      } else {
        // Integrate the chosen density route from 0 to |t|.
        auto f = [&](double x) { return pdf(p, x, route).value; };
        QuadResult q = integrate_strict(f, 0.0, std::abs(t), QuadSpec{1e-15, 1e-12, 2000}, "cli");
        r = {t >= 0 ? 0.5 + q.value : 0.5 - q.value, Method::BulkQuadrature, q.evaluations, q.error, false, false};
      }
      std::cout << num(r.value, pretty);
      if (pretty) std::cout << "  [" << to_string(r.method) << ']';
      std::cout << '\n';
    } else if (*c_q) {
      BfParams p = pf_q.resolve();
      Distribution d(p);
      QuantileResult q = quantile_detail(d, alpha, side == "two" ? Side::TwoSided : Side::Upper);
      std::cout << num(q.t, pretty);
      if (pretty) std::cout << "  [residual " << num(q.residual, true) << ", " << q.newton_steps << " Newton steps]";
      std::cout << '\n';
    } else if (*c_tab) {
      GridSpec g = full_grid ? GridSpec::full() : GridSpec{};
      if (!grid_file.empty()) g = read_grid_spec(grid_file, g);
      if (!g_nu.empty()) apply_grid_setting(g, "nu", g_nu);
      if (!g_nu1.empty()) apply_grid_setting(g, "nu1", g_nu1);
      if (!g_nu2.empty()) apply_grid_setting(g, "nu2", g_nu2);
      if (!g_r.empty()) apply_grid_setting(g, "r", g_r);
      if (!g_alpha.empty()) apply_grid_setting(g, "alpha", g_alpha);
      if (!g_side.empty()) apply_grid_setting(g, "side", g_side);
      validate_grid(g);
      TableRun run = generate_table(g, nthreads);
      for (const auto& f : run.failures) std::cerr << "table: " << f << '\n';
      if (!run.failures.empty()) {
        std::cerr << "table: " << run.failures.size() << " record(s) failed; nothing written\n";
        return kExitNumerical;
      }
      emit(table_csv(run.records), out);
    } else if (*c_w) {
      SizeMode m = mode == "mc" ? SizeMode::MonteCarlo : SizeMode::ExactCdf;
      auto cells = size_distortion_grid(ns, log2r_axis(l2lo, l2hi, l2step), McSpec{reps, seed}, m, nthreads);
      std::string csv = "n,log2_r,mode,reps,seed,delta,std_err\n";
      for (const auto& c : cells)
        csv += std::to_string(c.n) + ',' + detail::fmt17(c.log2_r) + ',' + std::string(to_string(c.mode)) + ',' +
               std::to_string(c.reps) + ',' + std::to_string(c.seed) + ',' + detail::fmt17(c.delta) + ',' +
               detail::fmt17(c.std_err) + '\n';
      emit(csv, out);
    } else if (*c_lr) {
      auto cells = lr_error_grid(LrGrid{}, [](const BfParams& p, double x) { return survival(p, x).value; }, nthreads);
      std::string csv = "nu1,nu2,r,t,delta_rel,edge_class\n";
      for (const auto& c : cells)
        csv += detail::fmt17(c.nu1) + ',' + detail::fmt17(c.nu2) + ',' + detail::fmt17(c.r) + ',' +
               detail::fmt17(c.t) + ',' + detail::fmt17(c.delta_rel) + ',' + std::string(to_string(c.edge_class)) +
               '\n';
      emit(csv, out);
    } else if (*c_self) {
      return selftest(pretty);
    }
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return e.is_validation() ? kExitValidation : kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}
