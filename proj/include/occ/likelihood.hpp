#pragma once

// Log-likelihood kernels for the homogeneous occupancy model.
//
// All kernels drop the binomial coefficients, so values are log-likelihoods up
// to an additive constant that is identical across every parameterisation.
// A configuration with zero probability (log of 0 with a positive count)
// evaluates to -infinity instead of throwing, so optimizers can reject it.
// Score and curvature functions need strictly interior arguments and throw
// Error(Domain) otherwise.

#include <array>

#include "occ/core.hpp"

namespace occ {

/// Orthogonal parameterisation: eta = psi * theta(p) together with p.
struct OrthParams {
  double eta;
  double p;
};

/// Likelihood in (psi, p):
///   f0 log(1 - psi theta) + O log psi + y log p + (O tau - y) log(1 - p)
double full_loglik(const ModelParams& params, const SuffStats& stats);

/// Likelihood in (eta, p). Separates into an eta part and a p part:
///   f0 log(1 - eta) + O log eta + [y log p + (O tau - y) log(1 - p) - O log theta]
/// and equals full_loglik at psi = eta / theta exactly.
double orth_loglik(const OrthParams& orth, const SuffStats& stats);

/// The p part of orth_loglik: the log-likelihood of the detected sites'
/// counts conditional on at least one detection (zero-truncated binomial).
double conditional_loglik(double p, const SuffStats& stats);

double score_eta(const OrthParams& orth, const SuffStats& stats);
/// d/dp of conditional_loglik.
double score_p_conditional(double p, const SuffStats& stats);
/// d2/dp2 of conditional_loglik.
double curvature_p_conditional(double p, const SuffStats& stats);

/// The three log-factors of the (eta, p) likelihood once the detected sites'
/// histories are split at their first detection.
struct PartialComponents {
  double occupancy;        // f0 log(1 - eta) + O log eta
  double first_detection;  // O log p + a log(1 - p) - O log theta
  double redetection;      // (y - O) log p + (b - (y - O)) log(1 - p)

  double sum() const { return occupancy + first_detection + redetection; }
};

/// Requires stats.has_b().
PartialComponents partial_decomposition(const OrthParams& orth, const SuffStats& stats);

/// (d/dpsi, d/dp) of full_loglik.
std::array<double, 2> joint_scores_full(const ModelParams& params, const SuffStats& stats);

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Analytic Hessian of full_loglik in (psi, p).
Matrix2 full_hessian(const ModelParams& params, const SuffStats& stats);

}  // namespace occ
