#pragma once

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "levykernel/levy_measure.hpp"

namespace levykernel {

/// Log-spaced frequency grid [r_min, r_max].
struct FrequencyGrid {
  double r_min = 1e-4;
  double r_max = 1e6;
  int per_decade = 600;
};

/// Raised when a frequency or level falls outside the tabulated range.
struct GridRangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct A1Report {
  std::vector<double> t;
  std::vector<double> scaled_integral;  // int e^{-t Phi}|xi| dxi * h(t)^{d+1}
  double M0_est = 0.0;
  bool pass = false;
  std::string diagnostic;
};

/// Tabulated characteristic exponent with its radial majorant
/// Psi(r) = sup_{|xi| <= r} Phi(xi), generalized inverse and scale h(t).
/// Immutable after construction.
class SymbolTable {
 public:
  explicit SymbolTable(LevyMeasure nu, FrequencyGrid grid = {});

  [[nodiscard]] const LevyMeasure& measure() const { return nu_; }
  [[nodiscard]] int dim() const { return nu_.dim(); }
  [[nodiscard]] const FrequencyGrid& grid() const { return grid_; }
  [[nodiscard]] const std::vector<double>& radii() const { return r_; }
  [[nodiscard]] const std::vector<Point>& probe_directions() const { return directions_; }
  /// Phi(r_j e) for probe direction index `dir`.
  [[nodiscard]] double phi_node(std::size_t dir, std::size_t j) const { return phi_nodes_[dir][j]; }
  [[nodiscard]] double psi_node(std::size_t j) const { return psi_nodes_[j]; }
  [[nodiscard]] double t_p() const { return t_p_; }
  [[nodiscard]] bool isotropic() const { return directions_.size() == 1; }
  /// Largest relative error of the radial interpolant at probed interval midpoints.
  [[nodiscard]] double interp_rel_error() const { return interp_error_; }

  /// Phi from the table; below the grid a power law continues the first
  /// segment, above it a GridRangeError is raised.
  [[nodiscard]] double phi(const Point& xi) const;
  [[nodiscard]] double phi(double r) const { return phi(Point(r, 0.0)); }
  [[nodiscard]] double psi(double r) const;
  /// Right end of the level set {Psi <= s}.
  [[nodiscard]] double psi_inverse(double s) const;
  /// sup_j (s_j R - t Lambda(s_j)) over a Laplace-exponent table built on
  /// first use: a lower bound for the concentration exponent D^2 along the
  /// first axis. 0 when nu has no exponential moment.
  [[nodiscard]] double concentration_exponent(double t, double R) const;
  [[nodiscard]] double h(double t) const { return 1.0 / psi_inverse(1.0 / t); }

  /// inf of Psi/H over the grid nodes in [lo, hi].
  [[nodiscard]] double L0_fit(double lo = 1e-3, double hi = 1e4) const;
  /// sup of Psi/H over the same nodes (at most 2 up to quadrature error).
  [[nodiscard]] double upper_ratio(double lo = 1e-3, double hi = 1e4) const;

  [[nodiscard]] A1Report check_A1(const std::vector<double>& t_grid) const;

 private:
  // radial transform int (1 - cos(w s)) q(s) ds from its spline
  [[nodiscard]] double radial_phi(double w) const;
  [[nodiscard]] double ray_phi(std::size_t dir, double r) const;

  LevyMeasure nu_;
  FrequencyGrid grid_;
  std::vector<double> r_;
  double log_r0_ = 0.0, log_step_ = 0.0;
  std::vector<double> phi1_;  // radial transform on the grid
  boost::math::interpolators::cardinal_cubic_b_spline<double> phi1_spline_;
  double low_slope_ = 2.0;
  double interp_error_ = 0.0;
  std::vector<Point> directions_;
  std::vector<std::vector<double>> phi_nodes_;
  std::vector<boost::math::interpolators::cardinal_cubic_b_spline<double>> ray_splines_;
  std::vector<double> psi_nodes_;
  double t_p_ = std::numeric_limits<double>::infinity();

  struct LaplaceCache {
    std::once_flag once;
    std::vector<double> s, lambda;
  };
  std::shared_ptr<LaplaceCache> laplace_ = std::make_shared<LaplaceCache>();
};

}  // namespace levykernel
