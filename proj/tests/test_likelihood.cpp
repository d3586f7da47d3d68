#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "occ/likelihood.hpp"

using namespace occ;

namespace {

// Exact probability of one detection history, including the unoccupied-site
// mass; independent of the fitting kernels.
double history_probability(const std::vector<int>& cells, int sites, int tau, double psi, double p) {
  double prob = 1.0;
  for (int s = 0; s < sites; ++s) {
    int ys = 0;
    for (int t = 0; t < tau; ++t) ys += cells[s * tau + t];
    const double occupied = psi * std::pow(p, ys) * std::pow(1.0 - p, tau - ys);
    prob *= ys == 0 ? occupied + (1.0 - psi) : occupied;
  }
  return prob;
}

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// Same model over per-site counts y_s, with binomial coefficients.
double count_probability(const std::vector<int>& counts, int tau, double psi, double p) {
  double prob = 1.0;
  for (int ys : counts) {
    const double occupied = psi * binomial(tau, ys) * std::pow(p, ys) * std::pow(1.0 - p, tau - ys);
    prob *= ys == 0 ? occupied + (1.0 - psi) : occupied;
  }
  return prob;
}

SuffStats random_stats(std::mt19937_64& gen) {
  for (;;) {
    const int sites = 2 + static_cast<int>(gen() % 20);
    const int tau = 2 + static_cast<int>(gen() % 4);
    const int f0 = static_cast<int>(gen() % (sites + 1));
    const int o = sites - f0;
    const int y = o + (o == 0 ? 0 : static_cast<int>(gen() % (o * (tau - 1) + 1)));
    const int b_min = y - o;
    const int b = b_min + static_cast<int>(gen() % (o * (tau - 1) - b_min + 1));
    return SuffStats(sites, tau, f0, y, b);
  }
}

double uniform(std::mt19937_64& gen, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(gen);
}

}  // namespace

TEST_CASE("full loglik hand values") {
  const SuffStats single(1, 1, 0, 1);
  CHECK(full_loglik({0.5, 0.5}, single) == doctest::Approx(2.0 * std::log(0.5)).epsilon(1e-14));
  CHECK(full_loglik({0.5, 0.5}, single) == doctest::Approx(-1.3862944).epsilon(1e-7));

  const SuffStats s(6, 3, 0, 10);
  const double p = 0.37;
  CHECK(full_loglik({1.0, p}, s) ==
        doctest::Approx(10 * std::log(p) + 8 * std::log(1 - p)).epsilon(1e-14));
}

TEST_CASE("full loglik returns -inf for impossible configurations") {
  const double ninf = -std::numeric_limits<double>::infinity();
  const SuffStats s(4, 3, 2, 3);
  CHECK(full_loglik({0.0, 0.5}, s) == ninf);
  CHECK(full_loglik({0.5, 0.0}, s) == ninf);
  CHECK(full_loglik({0.5, 1.0}, s) == ninf);
  CHECK(full_loglik({1.0, 1.0}, s) == ninf);  // f0 > 0 but nothing can be missed
  CHECK(std::isfinite(full_loglik({1.0, 0.5}, s)));
}

TEST_CASE("frog grid argmax sits at the published estimates") {
  // Published values are rounded to 3 decimals (the exact MLE has p = 0.7815),
  // so the grid maximum is located and compared at the published precision.
  const SuffStats frog(27, 4, 12, 47);
  double best = -std::numeric_limits<double>::infinity();
  double best_psi = 0.0;
  double best_p = 0.0;
  for (int i = 0; i < 200; ++i) {
    for (int j = 0; j < 200; ++j) {
      const double psi = (i + 0.5) / 200.0;
      const double p = (j + 0.5) / 200.0;
      const double v = full_loglik({psi, p}, frog);
      if (v > best) {
        best = v;
        best_psi = psi;
        best_p = p;
      }
    }
  }
  const double cell = 1.0 / 200.0;
  CHECK(std::abs(best_psi - 0.557) <= 0.005 + cell);
  CHECK(std::abs(best_p - 0.780) <= 0.005 + cell);
  CHECK(best - full_loglik({0.557, 0.780}, frog) < 1e-3);
}

TEST_CASE("orth loglik equals full loglik at psi = eta / theta") {
  std::mt19937_64 gen(11);
  for (int i = 0; i < 100; ++i) {
    const auto s = random_stats(gen);
    const double psi = uniform(gen, 0.02, 0.98);
    const double p = uniform(gen, 0.02, 0.98);
    const double eta = psi * theta_of(p, s.occasions());
    CHECK(std::abs(orth_loglik({eta, p}, s) - full_loglik({psi, p}, s)) < 1e-10);
  }
}

TEST_CASE("orth loglik hand value") {
  // matrix {{1,0},{0,0}}: S=2, tau=2, f0=1, O=1, y=1, b=1
  const SuffStats s(2, 2, 1, 1, 1);
  const double expected = std::log(0.5) + std::log(0.5) + std::log(0.5) + std::log(0.5) -
                          std::log(1.0 - 0.25);
  CHECK(orth_loglik({0.5, 0.5}, s) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("score_eta vanishes at O/S") {
  std::mt19937_64 gen(3);
  for (int i = 0; i < 50; ++i) {
    const auto s = random_stats(gen);
    if (s.f0() == 0 || s.f0() == s.sites()) continue;
    const double eta = static_cast<double>(s.detected()) / s.sites();
    CHECK(std::abs(score_eta({eta, 0.4}, s)) < 1e-10);
  }
}

TEST_CASE("conditional score trends positive as p -> 1 when every occasion is a detection") {
  const SuffStats s(10, 4, 4, 24);  // y = O*tau
  // Positive all the way to the boundary: no interior root, the maximum sits at p = 1.
  for (double p : {0.1, 0.5, 0.9, 0.99, 0.999, 0.9999, 1.0 - 1e-9}) {
    CHECK(score_p_conditional(p, s) > 0.0);
  }
  CHECK_THROWS_AS(score_p_conditional(1.0, s), Error);
  CHECK_THROWS_AS(score_eta({0.0, 0.5}, s), Error);
}

TEST_CASE("scores agree with central differences") {
  std::mt19937_64 gen(5);
  const double h = 1e-5;
  int checked = 0;
  while (checked < 50) {
    const auto s = random_stats(gen);
    if (s.f0() == 0 || s.f0() == s.sites()) continue;
    ++checked;
    const double eta = uniform(gen, 0.2, 0.8);
    const double p = uniform(gen, 0.2, 0.8);
    const double psi = uniform(gen, 0.2, 0.8);

    const double fd_eta = (orth_loglik({eta + h, p}, s) - orth_loglik({eta - h, p}, s)) / (2 * h);
    CHECK(std::abs(score_eta({eta, p}, s) - fd_eta) < 1e-6);

    const double fd_p = (conditional_loglik(p + h, s) - conditional_loglik(p - h, s)) / (2 * h);
    CHECK(std::abs(score_p_conditional(p, s) - fd_p) < 1e-6);

    const double fd_pp = (score_p_conditional(p + h, s) - score_p_conditional(p - h, s)) / (2 * h);
    CHECK(curvature_p_conditional(p, s) == doctest::Approx(fd_pp).epsilon(1e-6));

    const auto g = joint_scores_full({psi, p}, s);
    const double fd_psi = (full_loglik({psi + h, p}, s) - full_loglik({psi - h, p}, s)) / (2 * h);
    const double fd_fp = (full_loglik({psi, p + h}, s) - full_loglik({psi, p - h}, s)) / (2 * h);
    CHECK(std::abs(g[0] - fd_psi) < 1e-6);
    CHECK(std::abs(g[1] - fd_fp) < 1e-6);

    const auto hess = full_hessian({psi, p}, s);
    const auto gp = joint_scores_full({psi + h, p}, s);
    const auto gm = joint_scores_full({psi - h, p}, s);
    const auto gq = joint_scores_full({psi, p + h}, s);
    const auto gr = joint_scores_full({psi, p - h}, s);
    CHECK(hess[0][0] == doctest::Approx((gp[0] - gm[0]) / (2 * h)).epsilon(1e-6));
    CHECK(hess[0][1] == doctest::Approx((gq[0] - gr[0]) / (2 * h)).epsilon(1e-6));
    CHECK(hess[1][0] == doctest::Approx((gp[1] - gm[1]) / (2 * h)).epsilon(1e-6));
    CHECK(hess[1][1] == doctest::Approx((gq[1] - gr[1]) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("joint psi score vanishes at O/(S theta)") {
  const SuffStats s(27, 4, 12, 47);
  const double p = 0.6;
  const double psi = 15.0 / (27.0 * theta_of(p, 4));
  CHECK(std::abs(joint_scores_full({psi, p}, s)[0]) < 1e-10);
}

TEST_CASE("eta and p are orthogonal") {
  std::mt19937_64 gen(17);
  const double h = 1e-4;
  for (int i = 0; i < 100; ++i) {
    const auto s = random_stats(gen);
    const double eta = uniform(gen, 0.05, 0.95);
    const double p = uniform(gen, 0.05, 0.95);
    const auto f = [&](double e, double q) { return orth_loglik({e, q}, s); };
    const double mixed =
        (f(eta + h, p + h) - f(eta + h, p - h) - f(eta - h, p + h) + f(eta - h, p - h)) / (4 * h * h);
    CHECK(std::abs(mixed) < 1e-6);
  }
}

TEST_CASE("partial decomposition reassembles the orthogonal likelihood") {
  std::mt19937_64 gen(23);
  for (int i = 0; i < 100; ++i) {
    const auto s = random_stats(gen);
    const OrthParams at{uniform(gen, 0.02, 0.98), uniform(gen, 0.02, 0.98)};
    const auto c = partial_decomposition(at, s);
    CHECK(std::abs(c.sum() - orth_loglik(at, s)) < 1e-10);
  }
}

TEST_CASE("partial decomposition edge cases") {
  const SuffStats none(5, 3, 5, 0, 0);
  const auto c = partial_decomposition({0.3, 0.4}, none);
  CHECK(c.first_detection == 0.0);
  CHECK(c.redetection == 0.0);

  // redetection component peaks at (y - O)/b
  const SuffStats s(20, 5, 8, 30, 35);
  const double target = 18.0 / 35.0;
  double best_p = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  const int n = 10000;
  for (int i = 1; i < n; ++i) {
    const double p = static_cast<double>(i) / n;
    const double v = partial_decomposition({0.5, p}, s).redetection;
    if (v > best) {
      best = v;
      best_p = p;
    }
  }
  CHECK(std::abs(best_p - target) <= 1.0 / n);
  CHECK_THROWS_AS(partial_decomposition({0.5, 0.5}, SuffStats(20, 5, 8, 30)), Error);
}

TEST_CASE("exact model sums to one over every history") {
  std::mt19937_64 gen(29);
  for (int sites = 1; sites <= 2; ++sites) {
    for (int tau = 1; tau <= 3; ++tau) {
      const int cells = sites * tau;
      for (int point = 0; point < 10; ++point) {
        const double psi = uniform(gen, 0.0, 1.0);
        const double p = uniform(gen, 0.0, 1.0);
        double total = 0.0;
        for (int mask = 0; mask < (1 << cells); ++mask) {
          std::vector<int> h(cells);
          for (int c = 0; c < cells; ++c) h[c] = (mask >> c) & 1;
          total += history_probability(h, sites, tau, psi, p);
        }
        CHECK(std::abs(total - 1.0) < 1e-12);

        // Count-level version with binomial coefficients.
        double by_counts = 0.0;
        std::vector<int> counts(sites, 0);
        for (;;) {
          by_counts += count_probability(counts, tau, psi, p);
          int k = 0;
          while (k < sites && ++counts[k] > tau) counts[k++] = 0;
          if (k == sites) break;
        }
        CHECK(std::abs(by_counts - 1.0) < 1e-12);
      }
    }
  }
}

TEST_CASE("fitting kernel differs from the exact log-probability by a data-only constant") {
  // Two parameter points, same history: differences of log-probabilities match
  // differences of full_loglik.
  const std::vector<int> h{1, 0, 1, 0, 0, 0, 0, 1, 1};
  const auto stats = SuffStats(3, 3, 1, 4, 3);
  const ModelParams a{0.3, 0.6};
  const ModelParams b{0.8, 0.25};
  const double exact = std::log(history_probability(h, 3, 3, a.psi, a.p)) -
                       std::log(history_probability(h, 3, 3, b.psi, b.p));
  CHECK(full_loglik(a, stats) - full_loglik(b, stats) == doctest::Approx(exact).epsilon(1e-12));
}
