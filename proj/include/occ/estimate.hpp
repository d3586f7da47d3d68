#pragma once

// Estimators for (psi, p).
//
//   full       joint maximization of the (psi, p) likelihood, SEs from a
//              numerically differentiated observed information matrix
//   two_stage  eta-hat = O/S, then p-hat from the conditional (zero-truncated)
//              likelihood, psi-hat = eta-hat / theta-hat. Same MLE as `full`.
//   partial    closed form: p~ = (y - O)/b from the re-detections only,
//              psi~ = (O/S) / theta(p~)
//
// Degenerate data raise Error; boundary solutions come back with
// boundary_flag set and NaN standard errors. psi estimates >= 1 are reported
// as-is (see clamp_psi for the truncated variant).

#include <optional>
#include <vector>

#include "occ/core.hpp"
#include "occ/optim.hpp"

namespace occ {

/// Joint MLE. Without an explicit start, the partial estimates are used when b
/// is available and interior, else (0.5, 0.5).
FitResult fit_full(const SuffStats& stats, const OptimSettings& settings = {},
                   std::optional<ModelParams> start = std::nullopt);

FitResult fit_two_stage(const SuffStats& stats, const OptimSettings& settings = {});

FitResult fit_partial(const SuffStats& stats);

FitResult fit(Method method, const SuffStats& stats, const OptimSettings& settings = {});

/// Approximate variance of the partial-likelihood psi estimator:
///   (V + psi^2) * tau^2 (1-p)^(2(tau-1)) / theta^2 * p(1-p)/b + V,
///   V = psi (1 - psi theta) / (S theta)
double var_psi_partial(double psi, double p, const SuffStats& stats);

/// Returns a copy with psi_hat truncated to 1 (eta_hat and the SE follow).
FitResult clamp_psi(FitResult result);

/// psi for known p: O / (S theta(p)).
double psi_given_p(double p, const SuffStats& stats);

struct SensitivityPoint {
  double p;
  double psi_bar;
  /// d psi_bar / dp, evaluated analytically: -(O/S) tau (1-p)^(tau-1) / theta^2.
  double derivative;
  /// (O/S) tau (1-p)^(tau-1) / theta, the magnitude-only form often quoted
  /// for this derivative. Kept for comparison; it differs from `derivative`
  /// in sign and by a factor of theta.
  double printed_derivative;
  bool exceeds_one;
};

struct SensitivityProfile {
  std::vector<SensitivityPoint> points;  // increasing in p
};

SensitivityPoint sensitivity_at(double p, const SuffStats& stats);

/// psi_bar on the open uniform grid p_i = i / (grid_size + 1), i = 1..grid_size.
/// Throws Error(Degenerate) unless 0 < f0 < S.
SensitivityProfile sensitivity_profile(const SuffStats& stats, int grid_size);

}  // namespace occ
