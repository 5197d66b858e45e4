#include "levykernel/quadrature.hpp"

#include <Eigen/Dense>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace levykernel::quad {

namespace {

constexpr int kFilonNodes = 13;
constexpr double kFilonSwitch = 12.0;  // panel half-phase above which Filon is used

struct FilonBasis {
  std::array<double, kFilonNodes> nodes{};
  Eigen::Matrix<double, kFilonNodes, kFilonNodes> inverse_vandermonde;

  FilonBasis() {
    Eigen::Matrix<double, kFilonNodes, kFilonNodes> v;
    for (int j = 0; j < kFilonNodes; ++j) {
      nodes[j] = std::cos(std::numbers::pi * (2.0 * j + 1.0) / (2.0 * kFilonNodes));
      double p = 1.0;
      for (int k = 0; k < kFilonNodes; ++k) {
        v(j, k) = p;
        p *= nodes[j];
      }
    }
    inverse_vandermonde = v.fullPivLu().inverse();
  }
};

const FilonBasis& filon_basis() {
  static const FilonBasis basis;
  return basis;
}

// int_{c-h}^{c+h} cos(omega s) f(s) ds
double filon_panel(const Integrand& f, double c, double h, double omega) {
  const double kappa = omega * h;
  if (kappa <= kFilonSwitch) {
    auto g = [&](double s) { return std::cos(omega * s) * f(s); };
    return boost::math::quadrature::gauss<double, 30>::integrate(g, c - h, c + h);
  }
  const auto& basis = filon_basis();
  Eigen::Matrix<double, kFilonNodes, 1> values;
  for (int j = 0; j < kFilonNodes; ++j) values[j] = f(c + h * basis.nodes[j]);
  const Eigen::Matrix<double, kFilonNodes, 1> coeff = basis.inverse_vandermonde * values;

  // mu_k = int_{-1}^{1} x^k e^{i kappa x} dx, forward recursion (stable for kappa > k).
  using cd = std::complex<double>;
  const cd ik(0.0, kappa);
  const cd ep = std::exp(ik);
  const cd em = std::conj(ep);
  cd mu = (ep - em) / ik;
  cd acc = coeff[0] * mu;
  double sign = -1.0;
  for (int k = 1; k < kFilonNodes; ++k) {
    mu = (ep - sign * em) / ik - (static_cast<double>(k) / ik) * mu;
    acc += coeff[k] * mu;
    sign = -sign;
  }
  return h * std::real(std::exp(cd(0.0, omega * c)) * acc);
}

}  // namespace

namespace {

// Kronrod 15 against Gauss 7 with the usual (200 e)^{3/2} sharpening of the
// raw difference; boost's own estimate carries a roundoff floor that is far
// too pessimistic on short panels near the origin.
double gk_recursive(const Integrand& f, double a, double b, double rel_tol, double abs_tol,
                    int depth) {
  const double k = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0);
  const double g = boost::math::quadrature::gauss<double, 7>::integrate(f, a, b);
  const double scale = std::abs(k);
  const double diff = std::abs(k - g);
  double err = diff;
  if (scale > 0.0) err = scale * std::min(1.0, std::pow(200.0 * diff / scale, 1.5));
  if (err <= std::max(rel_tol * scale, abs_tol) || depth >= 20) return k;
  const double m = 0.5 * (a + b);
  return gk_recursive(f, a, m, rel_tol, 0.5 * abs_tol, depth + 1) +
         gk_recursive(f, m, b, rel_tol, 0.5 * abs_tol, depth + 1);
}

}  // namespace

double gauss_kronrod(const Integrand& f, double a, double b, double rel_tol, double abs_tol) {
  if (!(b > a)) return 0.0;
  return gk_recursive(f, a, b, rel_tol, abs_tol, 0);
}

double log_panels(const Integrand& f, double a, double b, double rel_tol, double max_width) {
  if (!(a > 0.0)) throw std::invalid_argument("log_panels: lower limit must be positive");
  if (!(b > a)) return 0.0;
  double sum = 0.0;
  double lo = a;
  int quiet = 0;
  for (int panel = 0; panel < 20000 && lo < b; ++panel) {
    const double hi = std::min({b, 2.0 * lo, lo + max_width});
    const double part = gauss_kronrod(f, lo, hi, rel_tol, 0.01 * rel_tol * std::abs(sum));
    sum += part;
    lo = hi;
    quiet = (std::abs(part) <= 1e-17 * std::abs(sum) || (part == 0.0 && sum != 0.0)) ? quiet + 1 : 0;
    if (quiet >= 3) break;
  }
  return sum;
}

double filon_cos(const Integrand& f, double a, double b, double omega, double max_width,
                 const Integrand& tail_bound, double abs_tol) {
  if (!(a > 0.0)) throw std::invalid_argument("filon_cos: lower limit must be positive");
  if (!(b > a)) return 0.0;
  const bool unbounded = std::isinf(b);
  if (unbounded && !tail_bound) throw std::invalid_argument("filon_cos: unbounded range needs a tail bound");
  double sum = 0.0;
  double lo = a;
  for (int panel = 0; panel < 100000 && lo < b; ++panel) {
    const double hi = std::min({b, 1.5 * lo, lo + max_width});
    sum += filon_panel(f, 0.5 * (lo + hi), 0.5 * (hi - lo), omega);
    lo = hi;
    if (unbounded && tail_bound(lo) <= abs_tol) break;
  }
  return sum;
}

Minimum golden_section(const Integrand& f, double lo, double hi, double rel_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 400; ++it) {
    if (std::abs(b - a) <= rel_tol * (std::abs(c) + std::abs(d)) + 1e-300) break;
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  Minimum best{c, fc};
  if (fd < best.value) best = {d, fd};
  // Endpoints matter for monotone objectives.
  const double fa = f(lo), fb = f(hi);
  if (fa < best.value) best = {lo, fa};
  if (fb < best.value) best = {hi, fb};
  return best;
}

double bisect_last_true(const std::function<bool(double)>& pred, double lo, double hi,
                        double rel_tol) {
  if (!pred(lo)) throw std::domain_error("bisect_last_true: predicate false at lower bracket");
  if (pred(hi)) return hi;
  for (int it = 0; it < 300; ++it) {
    const double mid = (lo > 0.0 && hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    if (pred(mid)) lo = mid; else hi = mid;
    if (hi - lo <= rel_tol * hi) break;
  }
  return lo;
}

}  // namespace levykernel::quad
