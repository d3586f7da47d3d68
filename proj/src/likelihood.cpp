#include "occ/likelihood.hpp"

#include <cmath>
#include <limits>

namespace occ {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// n * log(x) with 0 * log(0) = 0.
double xlogx(double n, double x) {
  if (n == 0.0) return 0.0;
  if (x <= 0.0) return kNegInf;
  return n * std::log(x);
}

// n * log(1 - x) with 0 * log(0) = 0.
double xlog1m(double n, double x) {
  if (n == 0.0) return 0.0;
  if (x >= 1.0) return kNegInf;
  return n * std::log1p(-x);
}

// (1 - p)^k evaluated through log1p so large tau does not lose precision.
double miss_pow(double p, int k) {
  if (k == 0) return 1.0;
  if (p >= 1.0) return 0.0;
  return std::exp(k * std::log1p(-p));
}

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }
bool interior(double x) { return x > 0.0 && x < 1.0; }

void require_interior(double x, const char* name) {
  if (!interior(x)) {
    throw Error(ErrorKind::Domain, std::string(name) + " must lie strictly inside (0, 1)");
  }
}

// Sum of terms where any -inf dominates; avoids inf - inf = NaN.
template <typename... Ts>
double sum_terms(Ts... terms) {
  if (((terms == kNegInf) || ...)) return kNegInf;
  return (terms + ...);
}

}  // namespace

double full_loglik(const ModelParams& params, const SuffStats& stats) {
  validate(params);
  const double tau = stats.occasions();
  const double o = stats.detected();
  const double y = stats.y();
  // 1 - psi*theta written as (1 - psi) + psi*(1-p)^tau to keep precision near psi*theta ~ 1
  const double unseen = (1.0 - params.psi) + params.psi * miss_pow(params.p, stats.occasions());
  return sum_terms(xlogx(stats.f0(), unseen), xlogx(o, params.psi), xlogx(y, params.p),
                   xlog1m(o * tau - y, params.p));
}

double conditional_loglik(double p, const SuffStats& stats) {
  if (!in_unit(p)) throw Error(ErrorKind::Domain, "p must lie in [0, 1]");
  const double tau = stats.occasions();
  const double o = stats.detected();
  const double y = stats.y();
  const double lp = xlogx(y, p);
  const double lq = xlog1m(o * tau - y, p);
  if (lp == kNegInf || lq == kNegInf) return kNegInf;
  // y >= O, so p = 0 with O > 0 was caught above; theta > 0 here whenever O > 0
  const double log_theta = o == 0.0 ? 0.0 : -o * std::log(theta_of(p, stats.occasions()));
  return lp + lq + log_theta;
}

double orth_loglik(const OrthParams& orth, const SuffStats& stats) {
  if (!in_unit(orth.eta)) throw Error(ErrorKind::Domain, "eta must lie in [0, 1]");
  const double occupancy = sum_terms(xlog1m(stats.f0(), orth.eta), xlogx(stats.detected(), orth.eta));
  return sum_terms(occupancy, conditional_loglik(orth.p, stats));
}

double score_eta(const OrthParams& orth, const SuffStats& stats) {
  require_interior(orth.eta, "eta");
  return -stats.f0() / (1.0 - orth.eta) + stats.detected() / orth.eta;
}

double score_p_conditional(double p, const SuffStats& stats) {
  require_interior(p, "p");
  const int tau = stats.occasions();
  const double o = stats.detected();
  const double y = stats.y();
  const double theta = theta_of(p, tau);
  // O tau (1 - theta) / ((1 - p) theta) == O tau (1-p)^(tau-1) / theta
  const double truncation = o * tau * miss_pow(p, tau - 1) / theta;
  return y / p - (o * tau - y) / (1.0 - p) - truncation;
}

double curvature_p_conditional(double p, const SuffStats& stats) {
  require_interior(p, "p");
  const int tau = stats.occasions();
  const double o = stats.detected();
  const double y = stats.y();
  const double theta = theta_of(p, tau);
  const double d1 = tau * miss_pow(p, tau - 1);
  const double d2 = tau == 1 ? 0.0 : -double(tau) * (tau - 1) * miss_pow(p, tau - 2);
  const double log_theta_dd = (d2 * theta - d1 * d1) / (theta * theta);
  return -y / (p * p) - (o * tau - y) / ((1.0 - p) * (1.0 - p)) - o * log_theta_dd;
}

PartialComponents partial_decomposition(const OrthParams& orth, const SuffStats& stats) {
  if (!in_unit(orth.eta)) throw Error(ErrorKind::Domain, "eta must lie in [0, 1]");
  if (!in_unit(orth.p)) throw Error(ErrorKind::Domain, "p must lie in [0, 1]");
  const double o = stats.detected();
  const double redetections = stats.y() - o;
  const double b = stats.b();
  const double a = stats.a();

  PartialComponents c{};
  c.occupancy = sum_terms(xlog1m(stats.f0(), orth.eta), xlogx(o, orth.eta));
  if (o == 0.0) {
    c.first_detection = 0.0;
  } else {
    const double lp = xlogx(o, orth.p);
    c.first_detection = lp == kNegInf
                            ? kNegInf
                            : sum_terms(lp, xlog1m(a, orth.p),
                                        -o * std::log(theta_of(orth.p, stats.occasions())));
  }
  c.redetection = sum_terms(xlogx(redetections, orth.p), xlog1m(b - redetections, orth.p));
  return c;
}

std::array<double, 2> joint_scores_full(const ModelParams& params, const SuffStats& stats) {
  require_interior(params.psi, "psi");
  require_interior(params.p, "p");
  const int tau = stats.occasions();
  const double s = stats.sites();
  const double f0 = stats.f0();
  const double o = stats.detected();
  const double y = stats.y();
  const double psi = params.psi;
  const double p = params.p;
  const double theta = theta_of(p, tau);
  const double unseen = (1.0 - psi) + psi * miss_pow(p, tau);

  const double d_psi = (o - s * psi * theta) / (psi * unseen);
  const double d_p =
      y / p - (o * tau - y) / (1.0 - p) - f0 * psi * tau * miss_pow(p, tau - 1) / unseen;
  return {d_psi, d_p};
}

Matrix2 full_hessian(const ModelParams& params, const SuffStats& stats) {
  require_interior(params.psi, "psi");
  require_interior(params.p, "p");
  const int tau = stats.occasions();
  const double f0 = stats.f0();
  const double o = stats.detected();
  const double y = stats.y();
  const double psi = params.psi;
  const double p = params.p;
  const double theta = theta_of(p, tau);
  const double unseen = (1.0 - psi) + psi * miss_pow(p, tau);
  const double d1 = tau * miss_pow(p, tau - 1);
  const double d2 = tau == 1 ? 0.0 : -double(tau) * (tau - 1) * miss_pow(p, tau - 2);

  const double h_psi_psi = -f0 * theta * theta / (unseen * unseen) - o / (psi * psi);
  const double h_psi_p = -f0 * d1 / (unseen * unseen);
  const double h_p_p = -y / (p * p) - (o * tau - y) / ((1.0 - p) * (1.0 - p)) -
                       f0 * psi * d2 / unseen - f0 * psi * psi * d1 * d1 / (unseen * unseen);
  return {{{h_psi_psi, h_psi_p}, {h_psi_p, h_p_p}}};
}

}  // namespace occ
