#pragma once

// Domain types for the homogeneous site-occupancy model.
//
// A survey visits S sites on tau occasions each. A site is occupied with
// probability psi; an occupied site yields a detection on each occasion
// independently with probability p. Every estimator in this library works
// from the sufficient statistics (S, tau, f0, y, b) rather than the raw
// detection matrix.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "occ/error.hpp"

namespace occ {

/// S x tau binary detection matrix, stored row-major (one row per site).
class DetectionHistory {
 public:
  /// Throws Error(Domain) unless every cell is 0/1 and the shape is S x tau
  /// with S, tau >= 1.
  DetectionHistory(int sites, int occasions, std::vector<std::uint8_t> cells);
  static DetectionHistory from_rows(const std::vector<std::vector<int>>& rows);

  int sites() const noexcept { return sites_; }
  int occasions() const noexcept { return occasions_; }
  bool at(int site, int occasion) const { return cells_[index(site, occasion)] != 0; }
  std::span<const std::uint8_t> row(int site) const {
    return {cells_.data() + static_cast<std::size_t>(site) * occasions_,
            static_cast<std::size_t>(occasions_)};
  }
  std::span<const std::uint8_t> cells() const noexcept { return cells_; }

  friend bool operator==(const DetectionHistory&, const DetectionHistory&) = default;

 private:
  std::size_t index(int site, int occasion) const {
    return static_cast<std::size_t>(site) * occasions_ + occasion;
  }

  int sites_;
  int occasions_;
  std::vector<std::uint8_t> cells_;
};

/// Aggregate counts consumed by every estimator.
///
///   f0  sites with no detection        O = S - f0
///   y   total detections
///   b   occasions after the first detection, summed over detected sites
///   a   occasions before the first detection, a = O*tau - O - b
///
/// b (and hence a) is optional: some published data sets only report
/// (S, tau, f0, y). Without b the partial-likelihood estimator is unavailable.
class SuffStats {
 public:
  /// Validates all invariants; throws Error(InvariantViolation) naming the
  /// first inequality that fails.
  SuffStats(int sites, int occasions, int f0, int y, std::optional<int> b = std::nullopt);

  int sites() const noexcept { return sites_; }
  int occasions() const noexcept { return occasions_; }
  int f0() const noexcept { return f0_; }
  int detected() const noexcept { return sites_ - f0_; }
  int y() const noexcept { return y_; }
  bool has_b() const noexcept { return b_.has_value(); }
  /// Throws Error(Degenerate) when b was not supplied.
  int b() const;
  int a() const;
  std::optional<int> b_opt() const noexcept { return b_; }

  friend bool operator==(const SuffStats&, const SuffStats&) = default;

 private:
  int sites_;
  int occasions_;
  int f0_;
  int y_;
  std::optional<int> b_;
};

SuffStats compute_suff_stats(const DetectionHistory& history);

/// (psi, p) on the probability scale.
struct ModelParams {
  double psi;
  double p;
};

/// Throws Error(Domain) if either component lies outside [0, 1].
void validate(const ModelParams& params);

/// Probability of at least one detection in tau occasions, 1 - (1-p)^tau.
double theta_of(double p, int occasions);
/// Probability that occupancy is detected at a site, psi * theta.
double eta_of(const ModelParams& params, int occasions);

enum class Method { Full, TwoStage, Partial };

std::string_view to_string(Method method) noexcept;
/// Accepts "full", "two_stage", "partial"; throws Error(Domain) otherwise.
Method parse_method(std::string_view name);

struct FitResult {
  Method method = Method::Full;
  double psi_hat = 0.0;
  double p_hat = 0.0;
  double se_psi = 0.0;  // NaN when unavailable
  double se_p = 0.0;    // NaN when unavailable
  double eta_hat = 0.0;
  double theta_hat = 0.0;
  bool converged = false;
  int iterations = 0;
  /// Any estimate on the edge of the parameter space, or psi_hat >= 1.
  bool boundary_flag = false;
  /// False when tau == 1: only eta is estimable, psi and p are reported as NaN.
  bool identifiable = true;
};

}  // namespace occ
