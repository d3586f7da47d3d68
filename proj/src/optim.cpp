#include "occ/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace occ {

void OptimSettings::validate() const {
  if (!(tol_x > 0.0) || !(tol_f > 0.0) || !(fd_step > 0.0) || max_iter < 1) {
    throw Error(ErrorKind::Domain, "optimizer settings must be strictly positive");
  }
}

namespace {

RootResult safeguarded(const ScalarFn& f, const ScalarFn* df, double lo, double hi,
                       const OptimSettings& settings) {
  settings.validate();
  if (!(lo < hi)) throw Error(ErrorKind::Domain, "root bracket needs lo < hi");
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0.0) return {lo, 0};
  if (f_hi == 0.0) return {hi, 0};
  if (std::signbit(f_lo) == std::signbit(f_hi) || std::isnan(f_lo) || std::isnan(f_hi)) {
    throw Error(ErrorKind::NoBracket, "f has the same sign at both ends of the bracket");
  }

  // Orient so that f(neg) < 0 < f(pos).
  double neg = f_lo < 0.0 ? lo : hi;
  double pos = f_lo < 0.0 ? hi : lo;

  double prev_x = lo;
  double prev_f = f_lo;
  double x = 0.5 * (lo + hi);

  for (int iter = 1; iter <= settings.max_iter; ++iter) {
    const double fx = f(x);
    if (fx == 0.0) return {x, iter};
    if (fx < 0.0) {
      neg = x;
    } else {
      pos = x;
    }

    double slope = std::numeric_limits<double>::quiet_NaN();
    if (df != nullptr) {
      slope = (*df)(x);
    } else if (x != prev_x) {
      slope = (fx - prev_f) / (x - prev_x);
    }

    const double left = std::min(neg, pos);
    const double right = std::max(neg, pos);
    double next = x - fx / slope;
    bool newton = std::isfinite(next) && next > left && next < right;
    if (!newton) next = 0.5 * (left + right);

    const double step = std::abs(next - x);
    prev_x = x;
    prev_f = fx;
    x = next;
    if (step <= settings.tol_x * std::max(1.0, std::abs(x)) ||
        right - left <= settings.tol_x * std::max(1.0, std::abs(x))) {
      return {x, iter};
    }
  }
  throw Error(ErrorKind::MaxIter, "root finder did not converge");
}

double logit(double x) { return std::log(x / (1.0 - x)); }
double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

struct Vertex {
  double u[2];
  double cost;  // -f, +inf where f is not finite
};

}  // namespace

RootResult root_find_1d(const ScalarFn& f, const ScalarFn& df, double lo, double hi,
                        const OptimSettings& settings) {
  return safeguarded(f, &df, lo, hi, settings);
}

RootResult root_find_1d(const ScalarFn& f, double lo, double hi, const OptimSettings& settings) {
  return safeguarded(f, nullptr, lo, hi, settings);
}

Optimum2 maximize_2d(const BivariateFn& f, Point2 start, const OptimSettings& settings) {
  settings.validate();
  constexpr double kEdge = 1e-9;
  start.x = std::clamp(start.x, kEdge, 1.0 - kEdge);
  start.y = std::clamp(start.y, kEdge, 1.0 - kEdge);

  const auto cost = [&](const double u[2]) {
    const double x = logistic(u[0]);
    const double y = logistic(u[1]);
    // logistic() rounds to exactly 0 or 1 for large |u|
    if (x <= 0.0 || x >= 1.0 || y <= 0.0 || y >= 1.0) return std::numeric_limits<double>::infinity();
    const double v = f(x, y);
    return std::isfinite(v) ? -v : std::numeric_limits<double>::infinity();
  };

  Vertex best{{logit(start.x), logit(start.y)}, 0.0};
  best.cost = cost(best.u);
  if (!std::isfinite(best.cost)) {
    throw Error(ErrorKind::NonFinite, "objective is not finite at the starting point");
  }

  int iterations = 0;
  double step = 0.5;
  for (;;) {
    std::array<Vertex, 3> simplex{best, best, best};
    simplex[1].u[0] += step;
    simplex[2].u[1] += step;
    simplex[1].cost = cost(simplex[1].u);
    simplex[2].cost = cost(simplex[2].u);

    bool settled = false;
    while (!settled) {
      std::sort(simplex.begin(), simplex.end(),
                [](const Vertex& a, const Vertex& b) { return a.cost < b.cost; });

      double diameter = 0.0;
      for (int i = 1; i < 3; ++i) {
        for (int d = 0; d < 2; ++d) {
          diameter = std::max(diameter, std::abs(logistic(simplex[i].u[d]) -
                                                 logistic(simplex[0].u[d])));
        }
      }
      const double spread = simplex[2].cost - simplex[0].cost;
      if (diameter <= settings.tol_x &&
          spread <= settings.tol_f * std::max(1.0, std::abs(simplex[0].cost))) {
        settled = true;
        break;
      }
      if (++iterations > settings.max_iter) {
        throw Error(ErrorKind::MaxIter, "Nelder-Mead exceeded its iteration budget");
      }

      double centroid[2];
      for (int d = 0; d < 2; ++d) centroid[d] = 0.5 * (simplex[0].u[d] + simplex[1].u[d]);
      const auto along = [&](double scale) {
        Vertex v{};
        for (int d = 0; d < 2; ++d) v.u[d] = centroid[d] + scale * (simplex[2].u[d] - centroid[d]);
        v.cost = cost(v.u);
        return v;
      };

      const Vertex reflected = along(-1.0);
      if (reflected.cost < simplex[0].cost) {
        const Vertex expanded = along(-2.0);
        simplex[2] = expanded.cost < reflected.cost ? expanded : reflected;
      } else if (reflected.cost < simplex[1].cost) {
        simplex[2] = reflected;
      } else {
        const bool outside = reflected.cost < simplex[2].cost;
        const Vertex contracted = along(outside ? -0.5 : 0.5);
        if (contracted.cost < (outside ? reflected.cost : simplex[2].cost)) {
          simplex[2] = contracted;
        } else {
          for (int i = 1; i < 3; ++i) {
            for (int d = 0; d < 2; ++d) {
              simplex[i].u[d] = simplex[0].u[d] + 0.5 * (simplex[i].u[d] - simplex[0].u[d]);
            }
            simplex[i].cost = cost(simplex[i].u);
          }
        }
      }
    }

    const double gain = best.cost - simplex[0].cost;
    const bool moved = simplex[0].u[0] != best.u[0] || simplex[0].u[1] != best.u[1];
    best = simplex[0];
    if (!moved || gain <= settings.tol_f * std::max(1.0, std::abs(best.cost))) break;
    step = 0.05;
  }

  return {{logistic(best.u[0]), logistic(best.u[1])}, -best.cost, iterations};
}

Matrix2 numerical_hessian(const BivariateFn& f, Point2 at, const OptimSettings& settings) {
  settings.validate();
  const auto scaled = [&](double v) { return settings.fd_step * std::max(std::abs(v), 1.0); };
  const double hx = scaled(at.x);
  const double hy = scaled(at.y);

  const auto eval = [&](double dx, double dy) {
    const double v = f(at.x + dx, at.y + dy);
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::NonFinite, "objective is not finite near the Hessian point");
    }
    return v;
  };

  const double f00 = eval(0.0, 0.0);
  const double hxx = (eval(hx, 0.0) - 2.0 * f00 + eval(-hx, 0.0)) / (hx * hx);
  const double hyy = (eval(0.0, hy) - 2.0 * f00 + eval(0.0, -hy)) / (hy * hy);
  const double hxy =
      (eval(hx, hy) - eval(hx, -hy) - eval(-hx, hy) + eval(-hx, -hy)) / (4.0 * hx * hy);
  return {{{hxx, hxy}, {hxy, hyy}}};
}

std::array<double, 2> standard_errors(const Matrix2& hessian) {
  const double i11 = -hessian[0][0];
  const double i22 = -hessian[1][1];
  const double i12 = -hessian[0][1];
  const double det = i11 * i22 - i12 * i12;
  // det / (i11*i22) = 1 - correlation^2; central differences resolve it to ~1e-7
  if (!(i11 > 0.0) || !(i22 > 0.0) || !(det > 1e-6 * i11 * i22) || !std::isfinite(det)) {
    throw Error(ErrorKind::Singular, "observed information is not positive definite");
  }
  return {std::sqrt(i22 / det), std::sqrt(i11 / det)};
}

}  // namespace occ
