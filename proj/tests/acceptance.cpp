// Acceptance checks A1..A10. Each criterion prints one PASS/FAIL line with the
// measured figure next to its tolerance. With an argument (e.g. "A3") only
// that criterion runs; the exit status is nonzero if anything failed.
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bfexact/bfexact.hpp"

using namespace bfexact;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

const std::vector<double> kNu{1, 2, 3, 5, 10, 40};
const std::vector<double> kR{0.05, 0.25, 1, 4, 20};

// A1: equal-variance collapse.
Outcome a1() {
  double pdf_err = 0, cdf_err = 0, q_err = 0;
  for (double nu : {2.0, 4.0, 10.0, 18.0, 60.0}) {
    BfParams p(nu / 2, nu / 2, 1, 1);
    Distribution d(p);
    for (int i = 0; i <= 400; ++i) {
      double t = -8 + 16.0 * i / 400;
      pdf_err = std::max(pdf_err, std::abs(pdf(p, t).value - student_t_pdf(t, nu)));
      cdf_err = std::max(cdf_err, std::abs(d.cdf(t).value - student_t_cdf(t, nu)));
    }
    for (double a : {0.1, 0.05, 0.025, 0.01, 0.001})
      q_err = std::max(q_err, std::abs(quantile_detail(d, a, Side::Upper).t - student_t_quantile(1 - a, nu)));
  }
  bool ok = pdf_err <= 1e-12 && cdf_err <= 1e-10 && q_err <= 1e-10;
  return {ok, "pdf " + sci(pdf_err) + " <= 1e-12, cdf " + sci(cdf_err) + " <= 1e-10, quantile " + sci(q_err) +
                  " <= 1e-10"};
}

// A2: residue vs hypergeometric route.
Outcome a2() {
  double worst = 0;
  for (double n1 : kNu)
    for (double n2 : kNu)
      for (double r : kR)
        for (double t : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
          BfParams p(n1, n2, r, 1);
          double x = pdf_residue(p, t).value, y = pdf_hyp(p, t).value;
          worst = std::max(worst, std::abs(x - y) / std::max(1.0, y));
        }
  return {worst <= 1e-9, "max |residue - hyp| / max(1, f) = " + sci(worst) + " <= 1e-9 over 1080 points"};
}

// A3: both routes against the quadrature oracle; normalization.
Outcome a3() {
  std::mt19937_64 eng(20240601);
  std::uniform_int_distribution<int> nu(1, 40);
  std::uniform_real_distribution<double> lr(std::log(0.05), std::log(20.0)), tt(0.0, 10.0);
  double worst_ratio = 0;
  int bad = 0;
  for (int i = 0; i < 200; ++i) {
    BfParams p(nu(eng), nu(eng), std::exp(lr(eng)), 1.0);
    double t = tt(eng);
    EvalResult o = pdf_quadrature(p, t);
    double tol = std::max(1e-9, 10 * o.error_bound);
    double e = std::max(std::abs(pdf_residue(p, t).value - o.value), std::abs(pdf_hyp(p, t).value - o.value));
    worst_ratio = std::max(worst_ratio, e / tol);
    if (e > tol) ++bad;
  }
  const double sets[10][3] = {{1, 2, 0.1}, {1, 40, 0.05}, {2, 9, 3},   {3, 8, 0.25}, {4, 6, 0.8},
                              {5, 1, 20},  {7, 30, 0.3},  {10, 3, 4}, {2.5, 6.5, 0.6}, {40, 2, 0.05}};
  double norm_err = 0;
  for (const auto& s : sets) {
    BfParams p(s[0], s[1], s[2], 1);
    auto f = [&](double t) { return pdf_hyp(p, t).value; };
    // [0, 8] directly, [8, inf) through t = 8 / u.
    auto g = [&](double u) { return u <= 0 ? 0.0 : pdf_hyp(p, 8 / u).value * 8 / (u * u); };
    QuadSpec q{1e-300, 1e-13, 4000};
    double m = 2 * (integrate(f, 0, 8, q).value + integrate(g, 0, 1, q).value);
    norm_err = std::max(norm_err, std::abs(m - 1));
  }
  bool ok = bad == 0 && norm_err <= 1e-8;
  return {ok, std::to_string(bad) + "/200 cases outside max(1e-9, 10x oracle bound) (worst error/tol " +
                  sci(worst_ratio) + "), normalization " + sci(norm_err) + " <= 1e-8"};
}

// A4: the published truncated residue sum for odd nu2.
Outcome a4() {
  bool zero_ok = true;
  double worst = 0;
  std::string note;
  for (double n2 : {1.0, 3.0, 5.0, 7.0})
    for (double n1 : {2.0, 5.0})
      for (double r : {0.25, 4.0}) {
        BfParams p(n1, n2, r, 1);
        std::size_t k = static_cast<std::size_t>((n2 + 1) / 2);
        for (double t : {0.5, 1.0, 2.0, 4.0}) {
          if (published_residue_term(p, t, k) != 0.0) zero_ok = false;
          try {
            double s = published_residue_sum(p, t).value, h = pdf_hyp(p, t).value;
            worst = std::max(worst, std::abs(s - h));
          } catch (const Error& e) {
            worst = INFINITY;
            note = " (truncated sum not normalizable for some cells)";
          }
        }
      }
  bool ok = zero_ok && worst <= 1e-10;
  return {ok, std::string("term k=(nu2+1)/2 exactly zero: ") + (zero_ok ? "yes" : "no") +
                  "; max |truncated sum - hyp| = " + sci(worst) + " <= 1e-10" + note};
}

// A5: regime continuity at 8 and 15; monotone cdf on [-20, 20].
Outcome a5() {
  double jump = 0, excess = 0;
  int nonmono = 0;
  for (double n1 : kNu)
    for (double n2 : kNu)
      for (double r : kR) {
        BfParams p(n1, n2, r, 1);
        Distribution d(p);
        try {
          RegimeContinuity rc = check_regime_continuity(p);
          jump = std::max({jump, rc.jump_bulk, rc.jump_tail, rc.route_gap_tail});
          // The measured jump includes the true increment 2 eps f(t); report what is left.
          excess = std::max({excess, std::abs(rc.jump_bulk - 2e-6 * d.pdf(8)), std::abs(rc.jump_tail - 2e-6 * d.pdf(15))});
        } catch (const Error&) {
          jump = std::max(jump, 1.0);
        }
        double prev = 0;
        for (int i = 0; i <= 400; ++i) {
          double v = d.cdf(-20 + 0.1 * i).value;
          if (v < prev) ++nonmono;
          prev = v;
        }
      }
  bool ok = jump <= 1e-8 && nonmono == 0;
  return {ok, "max boundary jump " + sci(jump) + " <= 1e-8 (" + sci(excess) + " beyond 2 eps f), " +
                  std::to_string(nonmono) +
                  " monotonicity violations over 180 parameter points"};
}

// A6: desk table residuals and parity.
Outcome a6() {
  auto t0 = std::chrono::steady_clock::now();
  TableRun run = generate_table(GridSpec{}, detail::default_threads());
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double worst_res = 0;
  for (const auto& r : run.records) worst_res = std::max(worst_res, r.self_check_residual);
  std::mt19937_64 eng(77);
  std::uniform_int_distribution<std::size_t> pick(0, run.records.size() - 1);
  double parity = 0;
  for (int i = 0; i < 50; ++i) {
    const auto& rec = run.records[pick(eng)];
    double other = quantile(BfParams(rec.nu2, rec.nu1, 1.0 / rec.r, 1.0), rec.alpha_level);
    parity = std::max(parity, std::abs(other - rec.t_alpha));
  }
  bool ok = run.failures.empty() && worst_res < 1e-11 && parity <= 1e-9 && secs < 600;
  return {ok, std::to_string(run.records.size()) + " records, " + std::to_string(run.failures.size()) +
                  " failures, max residual " + sci(worst_res) + " < 1e-11, parity " + sci(parity) +
                  " <= 1e-9, " + sci(secs) + " s < 600 s"};
}

// A7: tail series against the bulk integral; bound honesty.
Outcome a7() {
  double worst = 0;
  bool honest = true;
  for (auto [n1, n2] : {std::pair{5.0, 10.0}, {3.0, 8.0}, {10.0, 10.0}})
    for (double r : {0.25, 1.0, 4.0}) {
      BfParams p(n1, n2, r, 1);
      TailCoefficients tc = tail_coefficients(p);
      for (double t : {10.0, 12.0, 15.0}) {
        try {
          double s = survival_tail_auto(p, t, tc).value;
          double b = survival_bulk(p, t).value;
          worst = std::max(worst, std::abs(s - b) / b);
          for (std::size_t M : {2u, 4u, 8u}) {
            EvalResult x = survival_tail(p, t, tc, M), y = survival_tail(p, t, tc, M + 3);
            if (std::abs(x.value - y.value) > x.error_bound) honest = false;
          }
        } catch (const Error&) {
          worst = INFINITY;
        }
      }
    }
  bool ok = worst <= 1e-8 && honest;
  return {ok, "max relative |tail - bulk| = " + sci(worst) + " <= 1e-8; truncation bounds " +
                  (honest ? "honest" : "violated")};
}

// A8: saddlepoint accuracy band and breakdown cells.
Outcome a8() {
  auto truth = [](const BfParams& p, double t) { return survival(p, t).value; };
  auto cells = lr_error_grid(LrGrid{}, truth, detail::default_threads());
  double band = 0, breakdown = 0;
  for (const auto& c : cells) {
    if (std::abs(std::log10(c.r)) <= 1 && c.nu1 >= 5 && c.nu2 >= 5 && c.t <= 12) band = std::max(band, c.delta_rel);
    if (c.r <= 0.1 && c.t > 0.7 * c.nu2) breakdown = std::max(breakdown, c.delta_rel);
  }
  bool ok = band < 1e-4 && breakdown > 1e-3;
  return {ok, "band max delta_rel " + sci(band) + " < 1e-4; breakdown max delta_rel " + sci(breakdown) + " > 1e-3"};
}

// A9: Welch sign flips and Monte Carlo agreement.
Outcome a9() {
  std::vector<double> l2;
  for (int i = -12; i <= 12; ++i) l2.push_back(0.25 * i);
  const std::vector<int> ns{10, 20, 30, 50};
  unsigned th = detail::default_threads();
  auto exact = size_distortion_grid(ns, l2, {}, SizeMode::ExactCdf, th);
  auto flips = sign_flip_contour(exact);
  const std::map<int, std::pair<double, double>> ref{{10, {0.38, 1.9}}, {50, {0.62, 2.8}}};
  std::string msg;
  bool cross_ok = true;
  for (const auto& f : flips) {
    auto it = ref.find(f.n);
    if (it == ref.end()) continue;
    bool lo = f.has_low && std::abs(std::log2(f.r_low) - std::log2(it->second.first)) <= 0.25;
    bool hi = f.has_high && std::abs(std::log2(f.r_high) - std::log2(it->second.second)) <= 0.25;
    cross_ok = cross_ok && lo && hi;
    msg += "n=" + std::to_string(f.n) + " (" + (f.has_low ? sci(f.r_low) : "none") + ", " +
           (f.has_high ? sci(f.r_high) : "none") + ") vs (" + sci(it->second.first) + ", " +
           sci(it->second.second) + "); ";
  }
  auto mc = size_distortion_grid(ns, l2, {5000, 2024}, SizeMode::MonteCarlo, th);
  int off = 0;
  for (std::size_t i = 0; i < mc.size(); ++i)
    if (std::abs(mc[i].delta - exact[i].delta) > 3 * mc[i].std_err) ++off;
  bool ok = cross_ok && off == 0;
  return {ok, msg + std::to_string(off) + "/" + std::to_string(mc.size()) + " MC cells beyond 3 SE of exact"};
}

// A10: byte-identical CSVs from the CLI across runs and thread counts.
int shell(const std::string& cmd) {
  int s = std::system(cmd.c_str());
  return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
}

std::string slurp(const std::filesystem::path& f) {
  std::ifstream in(f, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome a10() {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / ("bfexact_acc_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string cli = BFEXACT_CLI;
  struct Job {
    std::string name, args;
  };
  const std::vector<Job> jobs{{"welch", "welch-size --mode mc --reps 5000 --seed 42"},
                              {"table", "table --nu 1-6 --alpha 0.05,0.01"}};
  bool ok = true;
  std::string msg;
  for (const auto& j : jobs) {
    std::vector<std::string> outs;
    for (const char* th : {"1", "1", "4"}) {
      fs::path f = dir / (j.name + "_" + std::to_string(outs.size()) + ".csv");
      int rc = shell(cli + " " + j.args + " --threads " + th + " --out " + f.string());
      if (rc != 0) ok = false;
      outs.push_back(slurp(f));
    }
    bool same = !outs[0].empty() && outs[0] == outs[1] && outs[0] == outs[2];
    ok = ok && same;
    msg += j.name + ": " + (same ? "identical" : "DIFFERENT") + " (" + std::to_string(outs[0].size()) + " bytes); ";
  }
  fs::remove_all(dir);
  return {ok, msg + "runs 1/1/4 threads"};
}

struct Criterion {
  const char* id;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {"A1", 5, a1},   {"A2", 30, a2}, {"A3", 120, a3}, {"A4", 0, a4},  {"A5", 0, a5},
      {"A6", 0, a6},   {"A7", 0, a7},  {"A8", 120, a8}, {"A9", 300, a9}, {"A10", 0, a10},
  };
  std::string only = argc > 1 ? argv[1] : "";
  bool any_fail = false, found = false;
  for (const auto& c : all) {
    if (!only.empty() && only != c.id) continue;
    found = true;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = sci(secs) + " s";
    if (c.budget_s > 0) {
      timing += " (budget " + sci(c.budget_s) + " s)";
      if (secs >= c.budget_s) o.pass = false;
    }
    std::cout << c.id << ' ' << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << "  [" << timing << "]\n";
    any_fail = any_fail || !o.pass;
  }
  if (!found) {
    std::cerr << "unknown criterion " << only << '\n';
    return 2;
  }
  return any_fail ? 1 : 0;
}
