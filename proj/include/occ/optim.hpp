#pragma once

// Small numeric kernels used by the estimators: a bracketed 1-D root finder,
// a derivative-free maximizer over the open unit square, and central
// difference Hessians.

#include <array>
#include <functional>

#include "occ/error.hpp"
#include "occ/likelihood.hpp"

namespace occ {

struct OptimSettings {
  double tol_x = 1e-10;
  double tol_f = 1e-12;
  int max_iter = 500;
  double fd_step = 1e-5;  // relative

  /// Throws Error(Domain) unless every field is strictly positive.
  void validate() const;
};

using ScalarFn = std::function<double(double)>;
using BivariateFn = std::function<double(double, double)>;

struct RootResult {
  double root;
  int iterations;
};

/// Safeguarded Newton/bisection on [lo, hi]. A Newton step is taken only when
/// it lands strictly inside the current bracket; otherwise the bracket is
/// bisected. f is never evaluated outside [lo, hi].
///
/// Throws Error(NoBracket) when f(lo) and f(hi) share a sign and
/// Error(MaxIter) when settings.max_iter iterations do not converge.
RootResult root_find_1d(const ScalarFn& f, const ScalarFn& df, double lo, double hi,
                        const OptimSettings& settings = {});

/// Same, with the derivative replaced by the secant slope through the
/// previous iterate.
RootResult root_find_1d(const ScalarFn& f, double lo, double hi,
                        const OptimSettings& settings = {});

struct Point2 {
  double x;
  double y;
};

struct Optimum2 {
  Point2 point;
  double value;
  int iterations;
};

/// Nelder-Mead maximization of f over the open unit square. The search runs
/// in logit coordinates, so f is never asked for a value on the boundary.
/// Converged when the simplex has diameter <= tol_x (probability scale) and
/// its values spread by no more than tol_f; the simplex is then rebuilt around
/// the best vertex and the search repeats until a restart brings no gain.
///
/// Throws Error(NonFinite) if f(start) is not finite and Error(MaxIter) when
/// the iteration budget runs out.
Optimum2 maximize_2d(const BivariateFn& f, Point2 start, const OptimSettings& settings = {});

/// Central-difference Hessian with a single mixed estimate, so the result is
/// exactly symmetric. Steps are fd_step * max(|coordinate|, 1).
/// Throws Error(NonFinite) if any probe evaluates to a non-finite value.
Matrix2 numerical_hessian(const BivariateFn& f, Point2 at, const OptimSettings& settings = {});

/// Standard errors from a log-likelihood Hessian: square roots of the diagonal
/// of (-H)^-1. Throws Error(Singular) when -H is not positive definite.
std::array<double, 2> standard_errors(const Matrix2& hessian);

}  // namespace occ
