#pragma once

#include <Eigen/Core>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "levykernel/levy_measure.hpp"
#include "levykernel/symbol.hpp"

namespace levykernel {

/// Spatial grid request. Zero fields are chosen automatically.
struct GridSpec {
  double x_max = 0.0;      // window that must be resolved; default 10 h(t)
  double dx = 0.0;         // default min(h(t)/64, x_max/256)
  double period = 0.0;     // half-period X of the periodic grid; default grown until aliasing is negligible
  double alias_tol = 1e-8;
  bool enforce_horizon = true;  // refuse t >= t_p
  std::size_t max_points = std::size_t{1} << 23;
};

/// Symmetric density on the lattice x_k = k dx, k = 0..N, of the periodic
/// grid [-X, X) with X = N dx.
struct DensityGrid {
  double t = 0.0;
  double dx = 0.0;
  double X = 0.0;
  double x_max = 0.0;
  double cutoff = 0.0;  // frequency beyond which e^{-t Phi} was treated as negligible
  double eps_trunc = 0.0;
  double eps_alias = 0.0;
  double eps_series = 0.0;  // Poisson tail of the split construction
  double eps_interp = 0.0;  // symbol interpolation error propagated to p
  std::string method;
  Eigen::VectorXd values;

  [[nodiscard]] std::size_t N() const { return values.size() - 1; }
  [[nodiscard]] double x(std::size_t k) const { return k * dx; }
  /// Cubic interpolation (exact at nodes); |x| beyond X is an error.
  [[nodiscard]] double at(double x) const;
  /// sum over the full period times dx.
  [[nodiscard]] double mass() const;
  [[nodiscard]] double error_bound() const { return eps_trunc + eps_alias + eps_series + eps_interp; }
};

/// Two-dimensional density on [-X, X)^2 with (2N)^2 nodes; index (i, j)
/// holds x = ((i - N) dx, (j - N) dx).
struct DensityGrid2D {
  double t = 0.0;
  double dx = 0.0;
  double X = 0.0;
  double cutoff = 0.0;
  double eps_trunc = 0.0;
  double eps_alias = 0.0;
  Eigen::MatrixXd values;

  [[nodiscard]] std::size_t N() const { return values.rows() / 2; }
  [[nodiscard]] double at_node(long i, long j) const { return values(i + N(), j + N()); }
  [[nodiscard]] double mass() const { return values.sum() * dx * dx; }
};

struct ConcentrationBound {
  double t = 0.0;
  double x = 0.0;  // |x|
  double D2 = 0.0;
  double s_star = 0.0;
  bool vacuous = false;
};

struct ChainingBound {
  double t = 0.0;
  double x = 0.0;
  long k = 1;
  double rho = 0.0;
  double link_inf = 0.0;  // certified inf of p_{t/k} over B(x/k, 2 rho)
  double value = 0.0;
  double log_value = -std::numeric_limits<double>::infinity();
  bool vacuous = false;
};

/// Monotone F with its inverse, certified against Psi(s)/s on (0, s_max].
struct MonotoneMap {
  std::function<double(double)> F;
  std::function<double(double)> F_inv;
  double s_max = std::numeric_limits<double>::infinity();
};

DensityGrid density_fourier(const SymbolTable& table, double t, const GridSpec& spec = {});
DensityGrid2D density_fourier_2d(const SymbolTable& table, double t, const GridSpec& spec = {});

/// Resolved grid parameters (X, dx) for time t; density_fourier uses the same plan.
GridSpec plan_grid(const SymbolTable& table, double t, const GridSpec& spec = {});

/// Small jumps by Fourier inversion, jumps of size >= r through the
/// compound-Poisson series of order N (N < 0 picks the smallest order whose
/// Poisson tail is below 1e-10).
DensityGrid density_split(const LevyMeasure& nu, double t, double r, int N, const GridSpec& spec);

/// sup_k |(g1 * g2)(x_k) - g3(x_k)|; the grids must share dx and N.
double semigroup_residual(const DensityGrid& g1, const DensityGrid& g2, const DensityGrid& g3);

/// sup of |g1 - g2| over common nodes with |x| <= x_max (same dx required).
double sup_difference(const DensityGrid& g1, const DensityGrid& g2, double x_max);

ConcentrationBound concentration_upper(const LevyMeasure& nu, double t, const Point& x);
inline ConcentrationBound concentration_upper(const LevyMeasure& nu, double t, double x) {
  return concentration_upper(nu, t, Point(x, 0.0));
}

/// Memoized density grids of one table, keyed by t.
class DensityCache {
 public:
  DensityCache(const SymbolTable& table, GridSpec spec) : table_(table), spec_(spec) {}
  const DensityGrid& get(double t, double x_needed);

 private:
  const SymbolTable& table_;
  GridSpec spec_;
  std::map<double, std::unique_ptr<DensityGrid>> grids_;
  std::mutex guard_;
};

/// Lower bound p_t(x) >= [inf_{B(x/k, 2 rho)} p_{t/k}]^k (|B_rho|)^{k-1}; d = 1.
ChainingBound chaining_lower(const SymbolTable& table, double t, double x, long k, double rho,
                             DensityCache* cache = nullptr);

/// Certified infimum of a grid density over |z - c| <= radius.
double certified_inf(const DensityGrid& g, double c, double radius);

/// Dyadic chain length 2^n <= (4|x|/eta) F^{-1}(2|x|/(eta t)) < 2^{n+1}, or 1.
long chain_length_gaussian(const SymbolTable& table, double t, double x, double eta, const MonotoneMap& F);

/// n = floor(4|x| / (3 r0)) + 1 for |x| >= r0.
long chain_length_xlog(double t, double x, double r0);

}  // namespace levykernel
