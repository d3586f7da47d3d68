#include "occ/estimate.hpp"

#include <cmath>
#include <limits>

#include "occ/likelihood.hpp"

namespace occ {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kRootEdge = 1e-10;
constexpr double kBoundaryEdge = 1e-7;

double miss_pow(double p, int k) {
  if (k == 0) return 1.0;
  if (p >= 1.0) return 0.0;
  return std::exp(k * std::log1p(-p));
}

void require_detections(const SuffStats& stats) {
  if (stats.detected() == 0) {
    throw Error(ErrorKind::Degenerate, "no site has a detection; p is not estimable");
  }
}

// tau == 1: eta is estimable but psi and p enter only through psi * p.
FitResult unidentified(Method method, const SuffStats& stats) {
  FitResult r;
  r.method = method;
  r.psi_hat = kNaN;
  r.p_hat = kNaN;
  r.theta_hat = kNaN;
  r.eta_hat = static_cast<double>(stats.detected()) / stats.sites();
  r.se_psi = kNaN;
  r.se_p = kNaN;
  r.converged = true;
  r.boundary_flag = true;
  r.identifiable = false;
  return r;
}

// y == O tau: every occasion at every detected site was a detection, p-hat = 1.
FitResult saturated(Method method, const SuffStats& stats) {
  FitResult r;
  r.method = method;
  r.p_hat = 1.0;
  r.theta_hat = 1.0;
  r.eta_hat = static_cast<double>(stats.detected()) / stats.sites();
  r.psi_hat = r.eta_hat;
  r.se_psi = kNaN;
  r.se_p = kNaN;
  r.converged = true;
  r.boundary_flag = true;
  return r;
}

// Newton iterations on the joint score equations. Steps are halved until the
// point stays interior and the log-likelihood does not drop.
int newton_polish(ModelParams& at, const SuffStats& stats) {
  int steps = 0;
  double current = full_loglik(at, stats);
  for (; steps < 50; ++steps) {
    const auto g = joint_scores_full(at, stats);
    const auto h = full_hessian(at, stats);
    const double det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    if (!(h[0][0] < 0.0) || !(det > 0.0)) break;
    const double d_psi = -(h[1][1] * g[0] - h[0][1] * g[1]) / det;
    const double d_p = -(-h[1][0] * g[0] + h[0][0] * g[1]) / det;

    double scale = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 30; ++halving, scale *= 0.5) {
      const ModelParams trial{at.psi + scale * d_psi, at.p + scale * d_p};
      if (!(trial.psi > 0.0 && trial.psi < 1.0 && trial.p > 0.0 && trial.p < 1.0)) continue;
      const double value = full_loglik(trial, stats);
      if (value >= current - 1e-12 * std::abs(current)) {
        at = trial;
        current = value;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    if (std::abs(scale * d_psi) < 1e-15 && std::abs(scale * d_p) < 1e-15) {
      ++steps;
      break;
    }
  }
  return steps;
}

}  // namespace

double psi_given_p(double p, const SuffStats& stats) {
  return static_cast<double>(stats.detected()) / (stats.sites() * theta_of(p, stats.occasions()));
}

FitResult fit_full(const SuffStats& stats, const OptimSettings& settings,
                   std::optional<ModelParams> start) {
  settings.validate();
  require_detections(stats);
  if (stats.occasions() == 1) return unidentified(Method::Full, stats);
  if (stats.f0() == 0) {
    throw Error(ErrorKind::Degenerate, "every site has a detection; psi has no interior MLE");
  }
  if (stats.y() == stats.detected() * stats.occasions()) return saturated(Method::Full, stats);

  if (!start) {
    start = ModelParams{0.5, 0.5};
    if (stats.has_b() && stats.b() > 0) {
      try {
        const FitResult partial = fit_partial(stats);
        if (!partial.boundary_flag) start = ModelParams{partial.psi_hat, partial.p_hat};
      } catch (const Error&) {
        // fall back to the centre of the square
      }
    }
  }

  const auto objective = [&](double psi, double p) { return full_loglik({psi, p}, stats); };
  const Optimum2 opt = maximize_2d(objective, {start->psi, start->p}, settings);

  ModelParams at{opt.point.x, opt.point.y};
  FitResult r;
  r.method = Method::Full;
  r.iterations = opt.iterations;
  r.converged = true;

  const auto near_edge = [](double v) { return v < kBoundaryEdge || v > 1.0 - kBoundaryEdge; };
  if (!near_edge(at.psi) && !near_edge(at.p)) r.iterations += newton_polish(at, stats);

  r.psi_hat = at.psi;
  r.p_hat = at.p;
  r.theta_hat = theta_of(at.p, stats.occasions());
  r.eta_hat = r.psi_hat * r.theta_hat;
  r.se_psi = kNaN;
  r.se_p = kNaN;
  r.boundary_flag = near_edge(at.psi) || near_edge(at.p);
  if (!r.boundary_flag) {
    try {
      const auto se = standard_errors(numerical_hessian(objective, {at.psi, at.p}, settings));
      r.se_psi = se[0];
      r.se_p = se[1];
    } catch (const Error&) {
      // SEs stay unavailable
    }
  }
  return r;
}

FitResult fit_two_stage(const SuffStats& stats, const OptimSettings& settings) {
  settings.validate();
  require_detections(stats);
  if (stats.occasions() == 1) return unidentified(Method::TwoStage, stats);
  if (stats.y() == stats.detected() * stats.occasions()) return saturated(Method::TwoStage, stats);
  if (stats.y() == stats.detected()) {
    throw Error(ErrorKind::UndefinedPsi,
                "no re-detections; the conditional MLE of p is 0 and psi is undefined");
  }

  const int tau = stats.occasions();
  const double s = stats.sites();
  const double eta = stats.detected() / s;

  const RootResult root = root_find_1d([&](double p) { return score_p_conditional(p, stats); },
                                       [&](double p) { return curvature_p_conditional(p, stats); },
                                       kRootEdge, 1.0 - kRootEdge, settings);
  const double p = root.root;
  const double theta = theta_of(p, tau);

  FitResult r;
  r.method = Method::TwoStage;
  r.p_hat = p;
  r.theta_hat = theta;
  r.eta_hat = eta;
  r.psi_hat = eta / theta;
  r.iterations = root.iterations;
  r.converged = true;

  const double curvature = curvature_p_conditional(p, stats);
  const double var_p = curvature < 0.0 ? -1.0 / curvature : kNaN;
  const double var_eta = eta * (1.0 - eta) / s;
  const double dtheta = tau * miss_pow(p, tau - 1);
  const double var_psi =
      var_eta / (theta * theta) + eta * eta * dtheta * dtheta * var_p / std::pow(theta, 4);
  r.se_p = std::sqrt(var_p);
  r.se_psi = std::sqrt(var_psi);
  r.boundary_flag = r.psi_hat >= 1.0 || p <= kBoundaryEdge || p >= 1.0 - kBoundaryEdge;
  return r;
}

double var_psi_partial(double psi, double p, const SuffStats& stats) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::Domain, "p must lie strictly inside (0, 1)");
  if (!(psi > 0.0)) throw Error(ErrorKind::Domain, "psi must be positive");
  const int tau = stats.occasions();
  const double theta = theta_of(p, tau);
  if (!(psi * theta < 1.0)) throw Error(ErrorKind::Domain, "psi * theta must be below 1");
  const double b = stats.b();
  if (!(b >= 1.0)) throw Error(ErrorKind::Domain, "b must be at least 1");

  const double s = stats.sites();
  const double known_p_var = psi * (1.0 - psi * theta) / (s * theta);
  const double slope = tau * miss_pow(p, tau - 1) / theta;
  return (known_p_var + psi * psi) * slope * slope * p * (1.0 - p) / b + known_p_var;
}

FitResult fit_partial(const SuffStats& stats) {
  require_detections(stats);
  if (stats.occasions() == 1) return unidentified(Method::Partial, stats);
  const int b = stats.b();
  if (b == 0) {
    throw Error(ErrorKind::Degenerate, "b = 0: no occasions follow a first detection");
  }

  const double redetections = stats.y() - stats.detected();
  const double p = redetections / b;
  if (p == 0.0) {
    throw Error(ErrorKind::UndefinedPsi, "no re-detections; p~ = 0 and theta~ = 0");
  }

  FitResult r;
  r.method = Method::Partial;
  r.p_hat = p;
  r.theta_hat = theta_of(p, stats.occasions());
  r.eta_hat = static_cast<double>(stats.detected()) / stats.sites();
  r.psi_hat = r.eta_hat / r.theta_hat;
  r.converged = true;
  r.se_p = kNaN;
  r.se_psi = kNaN;
  r.boundary_flag = r.psi_hat >= 1.0 || p >= 1.0;
  if (p < 1.0) {
    r.se_p = std::sqrt(p * (1.0 - p) / b);
    if (r.eta_hat < 1.0) r.se_psi = std::sqrt(var_psi_partial(r.psi_hat, p, stats));
  }
  return r;
}

FitResult fit(Method method, const SuffStats& stats, const OptimSettings& settings) {
  switch (method) {
    case Method::Full: return fit_full(stats, settings);
    case Method::TwoStage: return fit_two_stage(stats, settings);
    case Method::Partial: return fit_partial(stats);
  }
  throw Error(ErrorKind::Domain, "unknown method");
}

FitResult clamp_psi(FitResult result) {
  if (result.psi_hat > 1.0) {
    result.psi_hat = 1.0;
    result.eta_hat = result.theta_hat;
    result.se_psi = kNaN;
    result.boundary_flag = true;
  }
  return result;
}

SensitivityPoint sensitivity_at(double p, const SuffStats& stats) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::Domain, "p must lie strictly inside (0, 1)");
  const int tau = stats.occasions();
  const double share = static_cast<double>(stats.detected()) / stats.sites();
  const double theta = theta_of(p, tau);
  const double slope = tau * miss_pow(p, tau - 1);
  const double psi_bar = share / theta;
  return {p, psi_bar, -share * slope / (theta * theta), share * slope / theta, psi_bar > 1.0};
}

SensitivityProfile sensitivity_profile(const SuffStats& stats, int grid_size) {
  if (stats.f0() == 0 || stats.f0() == stats.sites()) {
    throw Error(ErrorKind::Degenerate, "sensitivity profile needs 0 < f0 < S");
  }
  if (grid_size < 1) throw Error(ErrorKind::Domain, "grid size must be at least 1");
  SensitivityProfile prof;
  prof.points.reserve(static_cast<std::size_t>(grid_size));
  for (int i = 1; i <= grid_size; ++i) {
    prof.points.push_back(sensitivity_at(static_cast<double>(i) / (grid_size + 1), stats));
  }
  return prof;
}

}  // namespace occ
