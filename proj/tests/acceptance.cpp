// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "occ/estimate.hpp"
#include "occ/likelihood.hpp"
#include "occ/report.hpp"
#include "occ/sim.hpp"

using namespace occ;

namespace {

int failures = 0;

struct Check {
  std::string detail;
  bool ok = true;

  void near(const char* what, double value, double target, double tol) {
    const bool pass = std::abs(value - target) <= tol;
    append(what, value, pass, "target " + fmt(target) + " +/- " + fmt(tol));
  }
  void below(const char* what, double value, double limit) {
    append(what, value, value < limit, "limit < " + fmt(limit));
  }
  void that(const char* what, bool pass) {
    ok = ok && pass;
    detail += std::string("\n      ") + (pass ? "ok   " : "FAIL ") + what;
  }

 private:
  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }
  void append(const char* what, double value, bool pass, const std::string& bound) {
    ok = ok && pass;
    detail += std::string("\n      ") + (pass ? "ok   " : "FAIL ") + what + " = " + fmt(value) +
              " (" + bound + ")";
  }
};

void report(int id, const char* title, const std::function<void(Check&)>& body) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail += std::string("\n      exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("[%s] %d. %s (%.2fs)%s\n", c.ok ? "PASS" : "FAIL", id, title, secs, c.detail.c_str());
  std::fflush(stdout);
  if (!c.ok) ++failures;
}

double uniform(std::mt19937_64& gen, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(gen);
}

SuffStats random_stats(std::mt19937_64& gen) {
  const int sites = 2 + static_cast<int>(gen() % 30);
  const int tau = 2 + static_cast<int>(gen() % 5);
  const int f0 = static_cast<int>(gen() % (sites + 1));
  const int o = sites - f0;
  const int y = o + (o == 0 ? 0 : static_cast<int>(gen() % (o * (tau - 1) + 1)));
  const int b = (y - o) + static_cast<int>(gen() % (o * (tau - 1) - (y - o) + 1));
  return SuffStats(sites, tau, f0, y, b);
}

StudySummary study(int sites, int tau, double psi, double p, std::uint64_t seed, bool drop) {
  StudyOptions opts;
  opts.drop_boundary = drop;
  return run_study(StudyCell{sites, tau, psi, p, 1000, seed}, opts);
}

}  // namespace

int main() {
  const SuffStats frog(27, 4, 12, 47, 36);

  report(1, "Frog application, partial likelihood", [&](Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = fit_partial(frog);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    c.near("p~", r.p_hat, 0.889, 0.001);
    c.near("SE(p~)", r.se_p, 0.052, 0.001);
    c.near("psi~", r.psi_hat, 0.556, 0.001);
    c.near("SE(psi~)", r.se_psi, 0.096, 0.001);
    c.below("runtime ms", ms, 100.0);
  });

  report(2, "Frog application, full and two-stage likelihood", [&](Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto full = fit_full(frog);
    const auto two = fit_two_stage(frog);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto* r : {&full, &two}) {
      const bool is_full = r == &full;
      c.near(is_full ? "full p^" : "two-stage p^", r->p_hat, 0.780, 0.005);
      c.near(is_full ? "full SE(p^)" : "two-stage SE(p^)", r->se_p, 0.054, 0.005);
      c.near(is_full ? "full psi^" : "two-stage psi^", r->psi_hat, 0.557, 0.005);
      c.near(is_full ? "full SE(psi^)" : "two-stage SE(psi^)", r->se_psi, 0.096, 0.005);
    }
    c.below("|psi full - two-stage|", std::abs(full.psi_hat - two.psi_hat), 1e-4);
    c.below("|p full - two-stage|", std::abs(full.p_hat - two.p_hat), 1e-4);
    c.below("runtime s", secs, 1.0);
  });

  report(3, "Rare detection cell S=1000 tau=5 psi=0.4 p=0.1, 1000 replicates", [&](Check& c) {
    const auto s = study(1000, 5, 0.4, 0.1, 1001, false);
    c.near("median p~", s.partial.p.median_estimate, 0.100, 0.005);
    c.near("median psi~", s.partial.psi.median_estimate, 0.401, 0.015);
    c.near("median SE(p~)", s.partial.p.median_se, 0.016, 0.003);
    c.near("median SE(psi~)", s.partial.psi.median_se, 0.058, 0.010);
    c.near("psi efficiency", s.efficiency_psi, 0.925, 0.05);
  });

  report(4, "Small survey cell S=27 tau=4 psi=0.6 p=0.6, 1000 replicates", [&](Check& c) {
    const auto s = study(27, 4, 0.6, 0.6, 1003, false);
    c.near("median p~", s.partial.p.median_estimate, 0.600, 0.02);
    c.near("median psi~", s.partial.psi.median_estimate, 0.604, 0.02);
    c.near("median p^ (full)", s.full.p.median_estimate, 0.600, 0.02);
    c.near("median psi^ (full)", s.full.psi.median_estimate, 0.604, 0.02);
    c.near("psi efficiency", s.efficiency_psi, 0.991, 0.05);
    c.near("p efficiency", s.efficiency_p, 0.709, 0.08);
  });

  report(5, "Small-p bias, psi^ >= 1 replicates dropped", [&](Check& c) {
    const auto t5 = study(100, 5, 0.6, 0.05, 1005, true);
    c.below("tau=5 median psi~ (partial)", t5.partial.psi.median_estimate, 0.55);
    c.below("tau=5 median psi^ (full)", t5.full.psi.median_estimate, 0.55);
    const auto t10 = study(100, 10, 0.6, 0.05, 1010, true);
    c.near("tau=10 median psi~ (partial)", t10.partial.psi.median_estimate, 0.587, 0.05);
    c.near("tau=10 median psi^ (full)", t10.full.psi.median_estimate, 0.587, 0.05);
  });

  report(6, "Sensitivity profile S=77 tau=3 f0=45", [&](Check& c) {
    const SuffStats s(77, 3, 45, 57);
    const auto prof = sensitivity_profile(s, 99);
    c.near("psi_bar floor (p=0.99)", prof.points.back().psi_bar, 32.0 / 77.0, 0.0005);
    c.near("psi_bar as p -> 1", psi_given_p(1.0 - 1e-12, s), 0.4156, 0.0005);
    bool above = true;
    bool monotone = true;
    for (std::size_t i = 0; i < prof.points.size(); ++i) {
      if (prof.points[i].p <= 0.15) above = above && prof.points[i].psi_bar > 1.0;
      if (i > 0) monotone = monotone && prof.points[i].psi_bar < prof.points[i - 1].psi_bar;
    }
    c.that("psi_bar > 1 for every grid p <= 0.15", above);
    c.that("psi_bar strictly decreasing on the grid", monotone);
  });

  report(7, "Deterministic property suite", [&](Check& c) {
    std::mt19937_64 gen(7);

    double worst_mixed = 0.0;
    const double h4 = 1e-4;
    for (int i = 0; i < 100; ++i) {
      const auto s = random_stats(gen);
      const double eta = uniform(gen, 0.05, 0.95);
      const double p = uniform(gen, 0.05, 0.95);
      const auto f = [&](double e, double q) { return orth_loglik({e, q}, s); };
      const double mixed =
          (f(eta + h4, p + h4) - f(eta + h4, p - h4) - f(eta - h4, p + h4) + f(eta - h4, p - h4)) /
          (4 * h4 * h4);
      worst_mixed = std::max(worst_mixed, std::abs(mixed));
    }
    c.below("max |d2 l / d eta d p| (100 points)", worst_mixed, 1e-6);

    double worst_decomp = 0.0;
    for (int i = 0; i < 100; ++i) {
      const auto s = random_stats(gen);
      const OrthParams at{uniform(gen, 0.01, 0.99), uniform(gen, 0.01, 0.99)};
      worst_decomp = std::max(worst_decomp, std::abs(partial_decomposition(at, s).sum() - orth_loglik(at, s)));
    }
    c.below("max |decomposition sum - orth loglik|", worst_decomp, 1e-10);

    double worst_norm = 0.0;
    for (int sites = 1; sites <= 2; ++sites) {
      for (int tau = 1; tau <= 3; ++tau) {
        for (int k = 0; k < 10; ++k) {
          const double psi = uniform(gen, 0.0, 1.0);
          const double p = uniform(gen, 0.0, 1.0);
          double total = 0.0;
          for (int mask = 0; mask < (1 << (sites * tau)); ++mask) {
            double prob = 1.0;
            for (int s = 0; s < sites; ++s) {
              int ys = 0;
              for (int t = 0; t < tau; ++t) ys += (mask >> (s * tau + t)) & 1;
              const double occ = psi * std::pow(p, ys) * std::pow(1 - p, tau - ys);
              prob *= ys == 0 ? occ + (1 - psi) : occ;
            }
            total += prob;
          }
          worst_norm = std::max(worst_norm, std::abs(total - 1.0));
        }
      }
    }
    c.below("max |sum of exact probabilities - 1|", worst_norm, 1e-12);

    double worst_identity = 0.0;
    int fitted = 0;
    while (fitted < 50) {
      RngStream rng(gen());
      const auto s = compute_suff_stats(
          simulate_history(10 + static_cast<int>(gen() % 200), 3 + static_cast<int>(gen() % 4),
                           uniform(gen, 0.2, 0.8), uniform(gen, 0.2, 0.8), rng));
      const int o = s.detected();
      if (s.f0() == 0 || o == 0 || s.y() == o || s.y() == o * s.occasions()) continue;
      const auto full = fit_full(s);
      if (full.boundary_flag) continue;
      ++fitted;
      worst_identity = std::max(
          worst_identity, std::abs(full.psi_hat - static_cast<double>(o) / (s.sites() * full.theta_hat)));
    }
    c.below("max |psi^ - O/(S theta^)| over 50 full fits", worst_identity, 1e-6);

    double worst_fd = 0.0;
    const double h5 = 1e-5;
    for (int i = 0; i < 50;) {
      const auto s = random_stats(gen);
      if (s.f0() == 0 || s.f0() == s.sites()) continue;
      ++i;
      const double eta = uniform(gen, 0.2, 0.8);
      const double psi = uniform(gen, 0.2, 0.8);
      const double p = uniform(gen, 0.2, 0.8);
      const auto g = joint_scores_full({psi, p}, s);
      const double diffs[] = {
          score_eta({eta, p}, s) - (orth_loglik({eta + h5, p}, s) - orth_loglik({eta - h5, p}, s)) / (2 * h5),
          score_p_conditional(p, s) - (conditional_loglik(p + h5, s) - conditional_loglik(p - h5, s)) / (2 * h5),
          g[0] - (full_loglik({psi + h5, p}, s) - full_loglik({psi - h5, p}, s)) / (2 * h5),
          g[1] - (full_loglik({psi, p + h5}, s) - full_loglik({psi, p - h5}, s)) / (2 * h5)};
      for (double d : diffs) worst_fd = std::max(worst_fd, std::abs(d));
    }
    c.below("max |score - central difference| (50 points)", worst_fd, 1e-6);

    // Var(psi~) formula against the empirical variance of psi~
    const int reps = 10000;
    const int sites = 1000;
    const int tau = 5;
    const double psi = 0.4;
    const double p = 0.2;
    std::vector<double> estimates;
    double formula = 0.0;
    for (int r = 0; r < reps; ++r) {
      RngStream rng = RngStream::substream(2024, r);
      const auto s = compute_suff_stats(simulate_history(sites, tau, psi, p, rng));
      estimates.push_back(fit_partial(s).psi_hat);
      formula += var_psi_partial(psi, p, s);
    }
    formula /= reps;
    const double empirical = robust_summaries(estimates).variance;
    c.below("|empirical Var(psi~) / formula - 1|", std::abs(empirical / formula - 1.0), 0.10);
  });

  report(8, "Seeded studies replay bit-identically", [&](Check& c) {
    const StudyCell cell{27, 4, 0.6, 0.6, 300, 88};
    StudyOptions one;
    one.threads = 1;
    StudyOptions many;
    many.threads = 8;
    const std::vector<StudySummary> a{run_study(cell, one)};
    const std::vector<StudySummary> b{run_study(cell, many)};
    const std::vector<StudySummary> d{run_study(cell, many)};
    c.that("single-thread and 8-thread summaries identical", emit_study(a, Format::Json) == emit_study(b, Format::Json));
    c.that("repeated run identical", emit_study(b, Format::Csv) == emit_study(d, Format::Csv));
  });

  std::printf("%s: %d criterion/criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
