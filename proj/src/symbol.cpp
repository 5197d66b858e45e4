#include "levykernel/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "levykernel/parallel.hpp"
#include "levykernel/quadrature.hpp"

namespace levykernel {

namespace {

using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;

constexpr int kExtraDirections = 64;

Spline log_spline(const std::vector<double>& values, double t0, double step) {
  std::vector<double> logs(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) logs[i] = std::log(values[i]);
  return Spline(logs.begin(), logs.end(), t0, step);
}

}  // namespace

SymbolTable::SymbolTable(LevyMeasure nu, FrequencyGrid grid) : nu_(std::move(nu)), grid_(grid) {
  if (!(grid_.r_min > 0) || !(grid_.r_max > grid_.r_min) || grid_.per_decade < 2)
    throw std::invalid_argument("frequency grid needs 0 < r_min < r_max and at least 2 points per decade");
  const int n = static_cast<int>(std::lround(grid_.per_decade * std::log10(grid_.r_max / grid_.r_min))) + 1;
  log_r0_ = std::log(grid_.r_min);
  log_step_ = (std::log(grid_.r_max) - log_r0_) / (n - 1);
  r_.resize(n);
  for (int j = 0; j < n; ++j) r_[j] = std::exp(log_r0_ + j * log_step_);

  phi1_.assign(n, 0.0);
  parallel_for(n, [&](std::size_t j) { phi1_[j] = nu_.radial().one_minus_cos(r_[j]); });
  for (double v : phi1_)
    if (!(v > 0) || !std::isfinite(v)) throw std::domain_error("characteristic exponent vanishes on the grid: degenerate measure");
  phi1_spline_ = log_spline(phi1_, log_r0_, log_step_);
  low_slope_ = (std::log(phi1_[1]) - std::log(phi1_[0])) / log_step_;
  {
    constexpr int kStride = 4;
    std::vector<double> err((n - 1 + kStride - 1) / kStride, 0.0);
    parallel_for(err.size(), [&](std::size_t i) {
      const double w = std::exp(log_r0_ + (i * kStride + 0.5) * log_step_);
      err[i] = std::abs(std::exp(phi1_spline_(std::log(w))) / nu_.radial().one_minus_cos(w) - 1.0);
    });
    for (double e : err) interp_error_ = std::max(interp_error_, e);
  }

  const AngularMeasure& mu = nu_.angular();
  if (nu_.dim() == 1 || mu.is_uniform()) {
    directions_ = {Point(1.0, 0.0)};
  } else {
    for (const auto& a : mu.atom_list()) directions_.push_back(a.direction);
    for (int k = 0; k < kExtraDirections; ++k) {
      const double th = std::numbers::pi * k / kExtraDirections;
      directions_.emplace_back(std::cos(th), std::sin(th));
    }
  }

  phi_nodes_.assign(directions_.size(), std::vector<double>(n, 0.0));
  if (nu_.dim() == 1) {
    for (int j = 0; j < n; ++j) phi_nodes_[0][j] = mu.total_mass() * phi1_[j];
  } else if (mu.is_uniform()) {
    const double c = 2.0 * mu.total_mass() / std::numbers::pi;
    parallel_for(n, [&](std::size_t j) {
      auto f = [&](double th) { return radial_phi(r_[j] * std::cos(th)); };
      phi_nodes_[0][j] = c * quad::gauss_kronrod(f, 0.0, 0.5 * std::numbers::pi, 1e-11);
    });
  } else {
    for (std::size_t k = 0; k < directions_.size(); ++k)
      for (int j = 0; j < n; ++j) {
        double sum = 0.0;
        for (const auto& a : mu.atom_list()) sum += a.weight * radial_phi(r_[j] * std::abs(directions_[k].dot(a.direction)));
        phi_nodes_[k][j] = sum;
      }
  }
  for (const auto& ray : phi_nodes_) {
    for (double v : ray)
      if (!(v > 0)) throw std::domain_error("characteristic exponent vanishes along a probe direction: degenerate angular measure");
    ray_splines_.push_back(log_spline(ray, log_r0_, log_step_));
  }

  psi_nodes_.assign(n, 0.0);
  double running = 0.0;
  for (int j = 0; j < n; ++j) {
    for (const auto& ray : phi_nodes_) running = std::max(running, ray[j]);
    psi_nodes_[j] = running;
  }

  if (std::holds_alternative<HighIntensity>(nu_.radial().family())) t_p_ = 1.0;
}

double SymbolTable::radial_phi(double w) const {
  w = std::abs(w);
  if (w == 0.0) return 0.0;
  if (w < r_.front()) return phi1_.front() * std::pow(w / r_.front(), low_slope_);
  if (w > r_.back() * (1.0 + 1e-12)) throw GridRangeError("frequency above the tabulated range: extend the frequency grid");
  return std::exp(phi1_spline_(std::min(std::log(w), log_r0_ + log_step_ * (r_.size() - 1))));
}

double SymbolTable::ray_phi(std::size_t dir, double r) const {
  const auto& ray = phi_nodes_[dir];
  if (r < r_.front()) {
    const double slope = (std::log(ray[1]) - std::log(ray[0])) / log_step_;
    return ray.front() * std::pow(r / r_.front(), slope);
  }
  if (r > r_.back() * (1.0 + 1e-12)) throw GridRangeError("frequency above the tabulated range: extend the frequency grid");
  return std::exp(ray_splines_[dir](std::min(std::log(r), log_r0_ + log_step_ * (r_.size() - 1))));
}

double SymbolTable::phi(const Point& xi) const {
  const double r = nu_.dim() == 1 ? std::abs(xi[0]) : xi.norm();
  if (r == 0.0) return 0.0;
  if (isotropic()) return ray_phi(0, r);
  double sum = 0.0;
  for (const auto& a : nu_.angular().atom_list()) sum += a.weight * radial_phi(xi.dot(a.direction));
  return sum;
}

double SymbolTable::psi(double r) const {
  if (!(r > 0)) throw std::invalid_argument("psi: r must be positive");
  if (r < r_.front() * (1.0 - 1e-12)) throw GridRangeError("psi: radius below the tabulated range");
  if (r > r_.back() * (1.0 + 1e-12)) throw GridRangeError("psi: radius above the tabulated range: extend the frequency grid");
  const double u = (std::log(r) - log_r0_) / log_step_;
  const auto j = std::clamp<long>(static_cast<long>(std::floor(u)), 0, static_cast<long>(r_.size()) - 1);
  double value = psi_nodes_[j];
  for (std::size_t k = 0; k < directions_.size(); ++k) value = std::max(value, ray_phi(k, r));
  return value;
}

double SymbolTable::concentration_exponent(double t, double R) const {
  std::call_once(laplace_->once, [this] {
    const double radius = nu_.radial().exp_moment_radius();
    if (radius == 0.0) return;
    const double s_max = std::isinf(radius) ? 50.0 / nu_.support_radius() : 0.999 * radius;
    constexpr std::size_t n = 256;
    laplace_->s.resize(n + 1);
    laplace_->lambda.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) laplace_->s[j] = s_max * double(j) / double(n);
    parallel_for(n + 1, [&](std::size_t j) { laplace_->lambda[j] = nu_.laplace_exponent(Point(laplace_->s[j], 0.0)); });
  });
  double best = 0.0;
  for (std::size_t j = 0; j < laplace_->s.size(); ++j)
    best = std::max(best, laplace_->s[j] * std::abs(R) - t * laplace_->lambda[j]);
  return best;
}

double SymbolTable::psi_inverse(double s) const {
  if (s < 0) throw std::invalid_argument("psi_inverse: level must be nonnegative");
  if (s == 0.0) return 0.0;
  if (s < psi_nodes_.front()) throw GridRangeError("psi_inverse: level below the tabulated range");
  if (s > psi_nodes_.back()) throw GridRangeError("psi_inverse: level above the tabulated range: extend the frequency grid");
  const auto it = std::upper_bound(psi_nodes_.begin(), psi_nodes_.end(), s);
  const std::size_t j = static_cast<std::size_t>(it - psi_nodes_.begin()) - 1;
  if (j + 1 >= r_.size()) return r_.back();
  return quad::bisect_last_true([&](double r) { return psi(r) <= s; }, r_[j], r_[j + 1], 1e-14);
}

double SymbolTable::L0_fit(double lo, double hi) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < r_.size(); ++j)
    if (r_[j] >= lo * (1 - 1e-12) && r_[j] <= hi * (1 + 1e-12)) best = std::min(best, psi_nodes_[j] / H(nu_, r_[j]));
  return best;
}

double SymbolTable::upper_ratio(double lo, double hi) const {
  double best = 0.0;
  for (std::size_t j = 0; j < r_.size(); ++j)
    if (r_[j] >= lo * (1 - 1e-12) && r_[j] <= hi * (1 + 1e-12)) best = std::max(best, psi_nodes_[j] / H(nu_, r_[j]));
  return best;
}

A1Report SymbolTable::check_A1(const std::vector<double>& t_grid) const {
  A1Report rep;
  const int d = nu_.dim();
  const std::size_t n = r_.size();
  // directions averaged for anisotropic tables; isotropic ones need one ray
  std::vector<Point> dirs;
  if (isotropic()) {
    dirs = {Point(1.0, 0.0)};
  } else {
    for (int k = 0; k < 2 * kExtraDirections; ++k) {
      const double th = std::numbers::pi * k / (2.0 * kExtraDirections);
      dirs.emplace_back(std::cos(th), std::sin(th));
    }
  }
  const double sphere = d == 1 ? 2.0 : 2.0 * std::numbers::pi;
  bool ok = true;
  std::ostringstream diag;
  for (double t : t_grid) {
    if (!(t > 0) || !(t < t_p_)) throw std::domain_error("check_A1: t outside (0, t_p)");
    double integral = 0.0;
    for (const auto& e : dirs) {
      std::vector<double> g(n);
      for (std::size_t j = 0; j < n; ++j) {
        const double ph = isotropic() ? phi_nodes_[0][j] : phi(Point(r_[j] * e));
        g[j] = std::exp(-t * ph) * std::pow(r_[j], d + 1);  // extra r from d(log r)
      }
      if (g.back() > 1e-10 * *std::max_element(g.begin(), g.end())) {
        ok = false;
        diag << "integral not converged at t=" << t << "; ";
      }
      // Simpson in log r, trapezoid on a leftover interval
      double sum = 0.0;
      std::size_t j = 0;
      for (; j + 2 < n; j += 2) sum += log_step_ / 3.0 * (g[j] + 4.0 * g[j + 1] + g[j + 2]);
      if (j + 1 < n) sum += 0.5 * log_step_ * (g[j] + g[j + 1]);
      sum += std::pow(r_.front(), d + 1) / (d + 1);  // e^{-t Phi} ~ 1 below the grid
      integral += sum;
    }
    integral *= sphere / static_cast<double>(dirs.size());
    const double scaled = integral * std::pow(h(t), d + 1);
    rep.t.push_back(t);
    rep.scaled_integral.push_back(scaled);
  }
  if (rep.t.empty()) throw std::invalid_argument("check_A1: empty t grid");
  const auto [lo, hi] = std::minmax_element(rep.scaled_integral.begin(), rep.scaled_integral.end());
  rep.M0_est = *hi;
  // variation per decade of t
  const double decades = std::max(1.0, std::log10(rep.t.back() / rep.t.front()));
  const double variation = std::pow(*hi / *lo, 1.0 / decades);
  const bool stable = std::isfinite(*hi) && *lo > 0 && variation < 10.0;
  if (!stable) diag << "scaled integral varies by " << variation << "x per decade of t";
  rep.pass = ok && stable;
  rep.diagnostic = diag.str();
  return rep;
}

}  // namespace levykernel
