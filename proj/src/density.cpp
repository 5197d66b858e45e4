#include "levykernel/density.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "levykernel/quadrature.hpp"

namespace levykernel {

namespace {

constexpr double kCutoffExponent = 32.0;  // e^{-32} < 1.3e-14
constexpr double kPoissonTail = 1e-10;

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place-free DCT-I (FFTW REDFT00) of length n + 1.
Eigen::VectorXd dct1(const Eigen::VectorXd& in) {
  const int n = static_cast<int>(in.size());
  Eigen::VectorXd input = in;
  Eigen::VectorXd out(n);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_r2r_1d(n, input.data(), out.data(), FFTW_REDFT00, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

std::size_t next_smooth(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 8);; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

struct Plan {
  double X, dx, x_max, cutoff, eps_alias;
  std::size_t N;
};

// smallest frequency beyond which t Phi stays above the cutoff exponent on the grid
double frequency_cutoff(const SymbolTable& table, double t) {
  const auto& r = table.radii();
  const std::size_t dirs = table.probe_directions().size();
  std::size_t first = r.size();
  for (std::size_t j = r.size(); j-- > 0;) {
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < dirs; ++k) lowest = std::min(lowest, table.phi_node(k, j));
    if (t * lowest > kCutoffExponent) first = j;
    else break;
  }
  if (first >= r.size()) throw GridRangeError("frequency cutoff unreachable on the tabulated range: increase frequency range");
  return r[first];
}

double tail_probability(const SymbolTable& table, double t, double X) {
  const LevyMeasure& nu = table.measure();
  double p = std::min(1.0, t * H(nu, 1.0 / X));
  p = std::min(p, 2.0 * std::exp(-table.concentration_exponent(t, X)));
  return p;
}

Plan make_plan(const SymbolTable& table, double t, const GridSpec& spec) {
  if (!(t > 0)) throw std::invalid_argument("t must be positive");
  if (spec.enforce_horizon && !(t < table.t_p())) throw std::domain_error("t beyond validity horizon");
  const double h = table.h(t);
  Plan plan{};
  plan.cutoff = frequency_cutoff(table, t);
  plan.x_max = spec.x_max > 0 ? spec.x_max : 10.0 * h;
  double dx = spec.dx > 0 ? spec.dx
                          : std::min({h / 64.0, plan.x_max / 256.0, std::numbers::pi / plan.cutoff});
  double X;
  if (spec.period > 0) {
    X = spec.period;
    plan.eps_alias = table.dim() == 1 ? 2.0 * tail_probability(table, t, X) / X : 0.0;
  } else {
    X = std::max(2.0 * plan.x_max, 8.0 * h);
    for (;;) {
      plan.eps_alias = 2.0 * tail_probability(table, t, X) / X;
      if (plan.eps_alias < spec.alias_tol) break;
      X *= 2.0;
      if (X / dx > static_cast<double>(spec.max_points))
        throw std::runtime_error("density grid would exceed max_points; raise the limit or the alias tolerance");
    }
  }
  if (X / dx > static_cast<double>(spec.max_points))
    throw std::runtime_error("density grid would exceed max_points");
  if (spec.dx > 0 && spec.period > 0) {
    plan.N = static_cast<std::size_t>(std::llround(X / dx));
  } else {
    plan.N = next_smooth(static_cast<std::size_t>(std::ceil(X / dx)));
  }
  plan.X = X;
  plan.dx = X / static_cast<double>(plan.N);
  return plan;
}

// (1/pi) int_{w}^{r_max} e^{-t Phi} along the ray, from the table nodes
double truncation_estimate(const SymbolTable& table, double t, double w) {
  const auto& r = table.radii();
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < r.size(); ++j)
    if (r[j + 1] > w) sum += std::exp(-t * table.phi_node(0, j)) * (r[j + 1] - std::max(r[j], w));
  return sum / std::numbers::pi;
}

// (1/pi) int |d e^{-t Phi}| dxi with |d Phi| <= rel Phi
double interpolation_estimate(const SymbolTable& table, const Eigen::VectorXd& spectrum, double dxi) {
  double sum = 0.0;
  for (Eigen::Index m = 1; m < spectrum.size(); ++m)
    if (spectrum[m] > 0) sum -= spectrum[m] * std::log(spectrum[m]);  // t Phi e^{-t Phi}
  return table.interp_rel_error() * sum * dxi / std::numbers::pi;
}

DensityGrid invert(const Eigen::VectorXd& spectrum, const Plan& plan, double t) {
  const double dxi = std::numbers::pi / plan.X;
  DensityGrid g;
  g.t = t;
  g.dx = plan.dx;
  g.X = plan.X;
  g.x_max = plan.x_max;
  g.cutoff = plan.cutoff;
  g.eps_alias = plan.eps_alias;
  g.values = dct1(spectrum) * (dxi / (2.0 * std::numbers::pi));
  return g;
}

}  // namespace

double DensityGrid::at(double x) const {
  const double u = std::abs(x) / dx;
  if (u > static_cast<double>(N()) * (1 + 1e-12)) throw std::out_of_range("point outside the density grid");
  const long n = static_cast<long>(N());
  auto node = [&](long k) {
    k = std::abs(k);
    if (k > n) k = 2 * n - k;  // periodic and even
    return values[k];
  };
  const long k = std::min(static_cast<long>(std::floor(u)), n - 1);
  const double s = u - static_cast<double>(k);
  if (s == 0.0) return values[k];
  const double f0 = node(k - 1), f1 = node(k), f2 = node(k + 1), f3 = node(k + 2);
  return f0 * (-s * (s - 1) * (s - 2) / 6.0) + f1 * ((s + 1) * (s - 1) * (s - 2) / 2.0) +
         f2 * (-(s + 1) * s * (s - 2) / 2.0) + f3 * ((s + 1) * s * (s - 1) / 6.0);
}

double DensityGrid::mass() const {
  const std::size_t n = N();
  double sum = values[0] + values[n];
  for (std::size_t k = 1; k < n; ++k) sum += 2.0 * values[k];
  return sum * dx;
}

GridSpec plan_grid(const SymbolTable& table, double t, const GridSpec& spec) {
  const Plan p = make_plan(table, t, spec);
  GridSpec out = spec;
  out.x_max = p.x_max;
  out.dx = p.dx;
  out.period = p.X;
  return out;
}

DensityGrid density_fourier(const SymbolTable& table, double t, const GridSpec& spec) {
  if (table.dim() != 1) throw std::invalid_argument("density_fourier: use density_fourier_2d for d = 2");
  const Plan plan = make_plan(table, t, spec);
  const double dxi = std::numbers::pi / plan.X;
  const double r_top = table.radii().back();
  Eigen::VectorXd f(plan.N + 1);
  for (std::size_t m = 0; m <= plan.N; ++m) {
    const double xi = m * dxi;
    f[m] = xi > r_top ? 0.0 : std::exp(-t * table.phi(xi));
  }
  DensityGrid g = invert(f, plan, t);
  g.method = "fourier";
  g.eps_trunc = truncation_estimate(table, t, plan.N * dxi);
  g.eps_interp = interpolation_estimate(table, f, dxi);
  return g;
}

DensityGrid2D density_fourier_2d(const SymbolTable& table, double t, const GridSpec& spec) {
  if (table.dim() != 2) throw std::invalid_argument("density_fourier_2d: measure must be two-dimensional");
  GridSpec s = spec;
  if (s.max_points == GridSpec{}.max_points) s.max_points = 2048;
  const Plan plan = make_plan(table, t, s);
  const long n = static_cast<long>(plan.N);
  const long size = 2 * n;
  const double dxi = std::numbers::pi / plan.X;
  const double r_top = table.radii().back();
  std::vector<std::complex<double>> buffer(static_cast<std::size_t>(size * size));
  for (long i = 0; i < size; ++i) {
    const double a = (i < n ? i : i - size) * dxi;
    for (long j = 0; j < size; ++j) {
      const double b = (j < n ? j : j - size) * dxi;
      const double r = std::hypot(a, b);
      buffer[i * size + j] = r > r_top ? 0.0 : std::exp(-t * table.phi(Point(a, b)));
    }
  }
  fftw_plan p;
  auto* data = reinterpret_cast<fftw_complex*>(buffer.data());
  {
    std::lock_guard lock(fftw_planner_mutex());
    p = fftw_plan_dft_2d(static_cast<int>(size), static_cast<int>(size), data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(p);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
  DensityGrid2D g;
  g.t = t;
  g.dx = plan.dx;
  g.X = plan.X;
  g.cutoff = plan.cutoff;
  g.eps_alias = plan.eps_alias;
  g.eps_trunc = truncation_estimate(table, t, plan.N * dxi);
  g.values.resize(size, size);
  const double scale = dxi * dxi / (4.0 * std::numbers::pi * std::numbers::pi);
  for (long i = 0; i < size; ++i)
    for (long j = 0; j < size; ++j) {
      // output index k corresponds to x = k dx, reorder to [-N, N)
      const long ki = (i + n) % size, kj = (j + n) % size;
      g.values(i, j) = scale * buffer[ki * size + kj].real();
    }
  return g;
}

DensityGrid density_split(const LevyMeasure& nu, double t, double r, int N, const GridSpec& spec) {
  if (nu.dim() != 1) throw std::invalid_argument("density_split: d = 1 only");
  if (!(r > 0)) throw std::invalid_argument("density_split: r must be positive");
  const SymbolTable full(nu);
  const Plan plan = make_plan(full, t, spec);
  const SplitMeasure parts = split(nu, r);
  const double lambda = parts.big.total_mass;

  // Poisson(lambda t) tail beyond order N
  const double mean = lambda * t;
  auto tail_beyond = [mean](int order) {
    double term = std::exp(-mean), cdf = term;
    for (int n = 1; n <= order; ++n) {
      term *= mean / n;
      cdf += term;
    }
    return std::max(0.0, 1.0 - cdf);
  };
  int order = N;
  if (order < 0) {
    order = 0;
    while (tail_beyond(order) >= kPoissonTail) ++order;
  } else if (tail_beyond(order) >= kPoissonTail) {
    int need = order;
    while (tail_beyond(need) >= kPoissonTail) ++need;
    throw std::invalid_argument("series order too small for lambda t = " + std::to_string(mean) +
                                "; need N >= " + std::to_string(need));
  }

  const SymbolTable small(parts.small);
  const double dxi = std::numbers::pi / plan.X;
  const double r_top = small.radii().back();
  const double M = nu.angular().total_mass();
  Eigen::VectorXd f(plan.N + 1);
  for (std::size_t m = 0; m <= plan.N; ++m) {
    const double xi = m * dxi;
    const double base = xi > r_top ? 0.0 : std::exp(-t * small.phi(xi));
    if (base < 1e-18 || lambda == 0.0) {
      f[m] = lambda == 0.0 ? base : 0.0;
      continue;
    }
    const double z = t * M * parts.big.measure.radial().cos_transform(xi);
    double series = 1.0;
    for (int n = order; n >= 1; --n) series = 1.0 + series * z / n;
    f[m] = base * std::exp(-mean) * series;
  }
  DensityGrid g = invert(f, plan, t);
  g.method = "split";
  g.eps_interp = small.interp_rel_error() * (1.0 / std::numbers::pi) * [&] {
    double sum = 0.0;
    for (std::size_t m = 1; m <= plan.N; ++m) {
      const double xi = m * dxi;
      if (xi > r_top) break;
      const double a = t * small.phi(xi);
      sum += a * std::exp(-a);
    }
    return sum * dxi;
  }();
  g.eps_trunc = truncation_estimate(full, t, plan.N * dxi);
  g.eps_series = tail_beyond(order);
  return g;
}

double semigroup_residual(const DensityGrid& g1, const DensityGrid& g2, const DensityGrid& g3) {
  if (g1.N() != g2.N() || g1.N() != g3.N() || std::abs(g1.dx - g2.dx) > 1e-12 * g1.dx ||
      std::abs(g1.dx - g3.dx) > 1e-12 * g1.dx)
    throw std::invalid_argument("semigroup_residual: incompatible grids");
  const Eigen::VectorXd a = dct1(g1.values);
  const Eigen::VectorXd b = dct1(g2.values);
  const double n2 = 2.0 * static_cast<double>(g1.N());
  const Eigen::VectorXd conv = dct1(a.cwiseProduct(b)) * (g1.dx / n2);
  return (conv - g3.values).cwiseAbs().maxCoeff();
}

double sup_difference(const DensityGrid& g1, const DensityGrid& g2, double x_max) {
  if (std::abs(g1.dx - g2.dx) > 1e-12 * g1.dx) throw std::invalid_argument("sup_difference: grids differ in step");
  const std::size_t top = std::min({g1.N(), g2.N(), static_cast<std::size_t>(x_max / g1.dx)});
  double worst = 0.0;
  for (std::size_t k = 0; k <= top; ++k) worst = std::max(worst, std::abs(g1.values[k] - g2.values[k]));
  return worst;
}

ConcentrationBound concentration_upper(const LevyMeasure& nu, double t, const Point& x) {
  if (!(t > 0)) throw std::invalid_argument("concentration_upper: t must be positive");
  ConcentrationBound out;
  out.t = t;
  const double R = nu.dim() == 1 ? std::abs(x[0]) : x.norm();
  out.x = R;
  if (R == 0.0) return out;
  const double radius = nu.radial().exp_moment_radius();
  if (radius == 0.0) {
    out.vacuous = true;
    return out;
  }
  const double s_max = std::isinf(radius) ? 50.0 / nu.support_radius() : 0.999 * radius;
  const Point e = nu.dim() == 1 ? Point(1.0, 0.0) : Point(x / R);
  auto v = [&](double s) { return -s * R + t * nu.laplace_exponent(Point(s * e)); };
  const auto best = quad::golden_section(v, 0.0, s_max, 1e-8);
  out.D2 = std::max(0.0, -best.value);
  out.s_star = best.x;
  return out;
}

const DensityGrid& DensityCache::get(double t, double x_needed) {
  std::lock_guard lock(guard_);
  auto it = grids_.find(t);
  if (it != grids_.end() && it->second->N() * it->second->dx >= x_needed) return *it->second;
  GridSpec s = spec_;
  s.x_max = std::max(spec_.x_max, 1.25 * x_needed);
  auto grid = std::make_unique<DensityGrid>(density_fourier(table_, t, s));
  auto& slot = grids_[t];
  slot = std::move(grid);
  return *slot;
}

double certified_inf(const DensityGrid& g, double c, double radius) {
  double lo = c - radius, hi = c + radius;
  if (lo < 0.0 && hi >= 0.0) {
    hi = std::max(-lo, hi);
    lo = 0.0;
  } else if (hi < 0.0) {
    std::swap(lo, hi);
    lo = -lo;
    hi = -hi;
  }
  const long n = static_cast<long>(g.N());
  const long k_lo = static_cast<long>(std::floor(lo / g.dx));
  const long k_hi = static_cast<long>(std::ceil(hi / g.dx));
  if (k_hi > n) throw std::out_of_range("certified_inf: ball leaves the density grid");
  auto node = [&](long k) {
    k = std::abs(k);
    if (k > n) k = 2 * n - k;
    return g.values[k];
  };
  double low = std::numeric_limits<double>::infinity();
  double curvature = 0.0;
  for (long k = k_lo; k <= k_hi; ++k) {
    low = std::min(low, node(k));
    curvature = std::max(curvature, std::abs(node(k + 1) - 2.0 * node(k) + node(k - 1)));
  }
  return low - curvature / 8.0 - g.error_bound();
}

ChainingBound chaining_lower(const SymbolTable& table, double t, double x, long k, double rho,
                             DensityCache* cache) {
  if (table.dim() != 1) throw std::invalid_argument("chaining_lower: d = 1 only");
  if (k < 1) throw std::invalid_argument("chaining_lower: k must be at least 1");
  if (!(rho > 0)) throw std::invalid_argument("chaining_lower: rho must be positive");
  ChainingBound out;
  out.t = t;
  out.x = std::abs(x);
  out.k = k;
  out.rho = rho;
  const double tk = t / static_cast<double>(k);
  const double center = out.x / static_cast<double>(k);
  const double needed = center + 2.0 * rho;
  std::unique_ptr<DensityGrid> own;
  const DensityGrid* g;
  if (cache) {
    g = &cache->get(tk, needed);
  } else {
    GridSpec s;
    s.x_max = 1.25 * needed;
    own = std::make_unique<DensityGrid>(density_fourier(table, tk, s));
    g = own.get();
  }
  out.link_inf = certified_inf(*g, center, 2.0 * rho);
  if (!(out.link_inf > 0)) {
    out.vacuous = true;
    return out;
  }
  const double kd = static_cast<double>(k);
  out.log_value = kd * std::log(out.link_inf) + (kd - 1.0) * std::log(2.0 * rho);
  out.value = std::exp(out.log_value);
  return out;
}

long chain_length_gaussian(const SymbolTable& table, double t, double x, double eta, const MonotoneMap& F) {
  if (!(eta > 0)) throw std::invalid_argument("chain_length_gaussian: eta must be positive");
  if (!(t > 0)) throw std::invalid_argument("chain_length_gaussian: t must be positive");
  const auto& r = table.radii();
  for (std::size_t j = 0; j < r.size() && r[j] <= F.s_max; ++j)
    if (F.F(r[j]) > table.psi_node(j) / r[j] * (1 + 1e-9))
      throw std::domain_error("F exceeds Psi(s)/s on the probed range");
  const double ax = std::abs(x);
  if (ax == 0.0) return 1;
  const double arg = 2.0 * ax / (eta * t);
  if (std::isfinite(F.s_max) && arg > F.F(F.s_max) * (1 + 1e-12))
    throw std::domain_error("F^{-1} evaluated outside the certified range");
  const double bracket = 4.0 * ax / eta * F.F_inv(arg);
  if (bracket < 1.0) return 1;
  const int n = std::min(62, static_cast<int>(std::floor(std::log2(bracket))));
  return long{1} << n;
}

long chain_length_xlog([[maybe_unused]] double t, double x, double r0) {
  if (!(r0 > 0)) throw std::invalid_argument("chain_length_xlog: r0 must be positive");
  const double ax = std::abs(x);
  if (ax < r0) throw std::domain_error("chain undefined below r0");
  return static_cast<long>(std::floor(4.0 * ax / (3.0 * r0))) + 1;
}

}  // namespace levykernel
