#pragma once

#include <functional>
#include <limits>

namespace levykernel::quad {

using Integrand = std::function<double(double)>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Adaptive Gauss-Kronrod (15 point) on a finite interval. Refinement stops
/// once the error estimate is below rel_tol * L1 norm or abs_tol.
double gauss_kronrod(const Integrand& f, double a, double b, double rel_tol, double abs_tol = 0.0);

/// Integrate over [a, b] (0 < a < b <= inf) on geometric panels of ratio 2,
/// each panel at most `max_width` wide. The integrand must be eventually
/// decreasing; panels stop once three in a row contribute nothing.
double log_panels(const Integrand& f, double a, double b, double rel_tol,
                  double max_width = kInf);

/// Integral of cos(omega s) f(s) over [a, b] with f smooth on the interval.
/// Panels grow geometrically (ratio 1.5, capped by `max_width`); each panel
/// is integrated either by Gauss-Legendre (few oscillations) or by a Filon
/// rule on a degree-12 Chebyshev interpolant of f.
///
/// For b = inf, `tail_bound(s)` must bound |int_s^inf cos(omega u) f(u) du|;
/// panels stop once it drops below `abs_tol`.
double filon_cos(const Integrand& f, double a, double b, double omega,
                 double max_width = kInf,
                 const Integrand& tail_bound = {}, double abs_tol = 0.0);

struct Minimum {
  double x;
  double value;
};

/// Golden-section search for the minimum of a unimodal function on [lo, hi].
Minimum golden_section(const Integrand& f, double lo, double hi, double rel_tol = 1e-8);

/// Largest x in [lo, hi] with pred(x) true, assuming pred is true on a prefix.
double bisect_last_true(const std::function<bool(double)>& pred, double lo, double hi,
                        double rel_tol = 1e-13);

}  // namespace levykernel::quad
