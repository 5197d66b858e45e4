#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "levykernel/config.hpp"
#include "levykernel/density.hpp"
#include "levykernel/verify.hpp"

using namespace levykernel;

namespace {

double cauchy(double t, double x) { return t / (std::numbers::pi * (t * t + x * x)); }

}  // namespace

TEST_CASE("cauchy oracle") {
  const SymbolTable table(builtin_measure("cauchy"));
  for (double t : {0.5, 1.0, 2.0}) {
    GridSpec spec;
    spec.x_max = 10.0;
    const DensityGrid g = density_fourier(table, t, spec);
    double worst = 0.0;
    for (std::size_t k = 0; g.x(k) <= 10.0; ++k) worst = std::max(worst, std::abs(g.values[k] - cauchy(t, g.x(k))));
    CHECK(worst < 1e-6);
    CHECK(g.at(3.3) == doctest::Approx(cauchy(t, 3.3)).epsilon(1e-5));
  }
}

TEST_CASE("cauchy self-similarity p_t(x) = p_1(x/t) / t") {
  const SymbolTable table(builtin_measure("cauchy"));
  GridSpec s1, s2;
  s1.x_max = 5.0;
  s1.dx = 1.0 / 64;
  s1.period = 2000.0;
  s2.x_max = 10.0;
  s2.dx = 2.0 / 64;
  s2.period = 4000.0;
  const DensityGrid g1 = density_fourier(table, 1.0, s1);
  const DensityGrid g2 = density_fourier(table, 2.0, s2);
  REQUIRE(g1.N() == g2.N());
  double worst = 0.0;
  for (std::size_t k = 0; g2.x(k) <= 10.0; ++k) worst = std::max(worst, std::abs(g2.values[k] - 0.5 * g1.values[k]));
  CHECK(worst < 1e-8);
}

TEST_CASE("unit mass and positivity for random measures") {
  gen::Rng g(31);
  for (int i = 0; i < 5; ++i) {
    const SymbolTable table(gen::any_family(g));
    const double t_hi = std::isfinite(table.t_p()) ? 0.9 * table.t_p() : 5.0;
    const double t = g.log_uniform(0.01, t_hi);
    const DensityGrid d = density_fourier(table, t);
    CHECK(d.mass() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(d.values.minCoeff() > -1e-8);
    CHECK(std::isfinite(d.error_bound()));
    CHECK(d.error_bound() < 1e-5 * d.values[0]);
  }
}

TEST_CASE("semigroup property p_s * p_t = p_{s+t}") {
  for (const char* f : {"truncated", "tempered", "high_intensity"}) {
    const SymbolTable table(builtin_measure(f));
    const double s = 0.2, t = 0.5;
    // one grid for all three times, fine enough for the smallest
    GridSpec spec = plan_grid(table, s);
    const GridSpec wide = plan_grid(table, s + t);
    spec.period = std::max(spec.period, wide.period);
    const DensityGrid a = density_fourier(table, s, spec);
    const DensityGrid b = density_fourier(table, t, spec);
    const DensityGrid c = density_fourier(table, s + t, spec);
    CHECK(semigroup_residual(a, b, c) < 1e-6);
  }
}

TEST_CASE("split construction agrees with direct inversion") {
  for (const char* f : {"truncated", "tempered"}) {
    const LevyMeasure nu = builtin_measure(f);
    const SymbolTable table(nu);
    const double t = 1.0;
    const GridSpec spec = plan_grid(table, t);
    const DensityGrid direct = density_fourier(table, t, spec);
    // h(1) > r0 for the truncated family, so h(1)/4 is what puts mass in the series
    for (double r : {table.h(t), table.h(t) / 4.0}) {
      const DensityGrid sp = density_split(nu, t, r, -1, spec);
      CHECK(sup_difference(direct, sp, spec.x_max) < 1e-6);
    }
    CHECK(tail_mass(nu, table.h(t) / 4.0) > 0.5);
  }
}

TEST_CASE("p_t(0) is nonincreasing in t") {
  gen::Rng g(32);
  for (int i = 0; i < 3; ++i) {
    const SymbolTable table(gen::any_family(g));
    const double t_hi = std::isfinite(table.t_p()) ? 0.9 * table.t_p() : 10.0;
    double prev = std::numeric_limits<double>::infinity();
    for (double t : logspace(0.02, t_hi, 8)) {
      const double p0 = density_fourier(table, t).values[0];
      CHECK(p0 <= prev * (1 + 1e-9));
      prev = p0;
    }
  }
}

TEST_CASE("exponential upper bound dominates the density") {
  gen::Rng g(33);
  for (int i = 0; i < 5; ++i) {
    const LevyMeasure nu = gen::any_family(g);
    const SymbolTable table(nu);
    const double t_hi = std::isfinite(table.t_p()) ? 0.9 * table.t_p() : 2.0;
    const double t = g.log_uniform(0.05, t_hi);
    GridSpec spec;
    spec.x_max = 20.0 * table.h(t);
    const DensityGrid d = density_fourier(table, t, spec);
    for (int k = 0; k < 10; ++k) {
      const double x = g.uniform(0.0, spec.x_max);
      const ConcentrationBound b = concentration_upper(nu, t, x);
      CHECK(d.at(x) <= std::exp(-b.D2) * d.values[0] + 1e-9);
    }
  }
}

TEST_CASE("chaining lower bound never exceeds the density") {
  gen::Rng g(34);
  const SymbolTable table(builtin_measure("truncated"));
  GridSpec spec;
  DensityCache cache(table, spec);
  for (int i = 0; i < 15; ++i) {
    const double t = g.log_uniform(0.02, 1.0);
    const double x = g.uniform(0.5, 6.0) * table.h(t);
    const long k = long{1} << g.integer(0, 3);
    const double rho = g.uniform(0.05, 0.5) * table.h(t / k);
    const ChainingBound b = chaining_lower(table, t, x, k, rho, &cache);
    GridSpec fine;
    fine.x_max = 2.0 * x;
    CHECK(b.value <= density_fourier(table, t, fine).at(x) + 1e-12);
  }
  CHECK_THROWS(chaining_lower(table, 0.1, 1.0, 0, 0.1));
  CHECK_THROWS(chaining_lower(table, 0.1, 1.0, 2, 0.0));
}

TEST_CASE("certified infimum sits below every node in the ball") {
  const SymbolTable table(builtin_measure("tempered"));
  const DensityGrid d = density_fourier(table, 0.3);
  const double c = 0.7, rad = 0.2;
  const double inf = certified_inf(d, c, rad);
  for (double z = c - rad; z <= c + rad; z += d.dx) CHECK(inf <= d.at(z));
}

TEST_CASE("xlog chain length") {
  CHECK(chain_length_xlog(0.1, 1.0, 1.0) == 2);
  CHECK(chain_length_xlog(0.1, -3.0, 1.0) == 5);
  CHECK_THROWS_AS(chain_length_xlog(0.1, 0.5, 1.0), std::domain_error);
  gen::Rng g(35);
  for (int i = 0; i < 100; ++i) {
    const double r0 = g.log_uniform(0.1, 10.0);
    const double x = g.uniform(1.0, 50.0) * r0;
    const long n = chain_length_xlog(1.0, x, r0);
    CHECK(static_cast<double>(n) > 4.0 * x / (3.0 * r0));
    CHECK(static_cast<double>(n) <= 2.0 * x / r0);
  }
}

TEST_CASE("gaussian chain length with the linear majorant of the truncated family") {
  const LevyMeasure nu = builtin_measure("truncated");
  const SymbolTable table(nu);
  // Psi(s) >= L0 H(s) >= L0 m0 s^2 for s <= 1/r0
  const double a = table.L0_fit() * second_moment(nu);
  const MonotoneMap F{[a](double s) { return a * s; }, [a](double y) { return y / a; }, 1.0};
  const double t = 1.0, eta = 1.0;
  CHECK(chain_length_gaussian(table, t, 0.0, eta, F) == 1);
  CHECK(chain_length_gaussian(table, t, 1e-3, eta, F) == 1);
  for (double x : {0.2, 0.5, 0.7, 0.9}) {
    const long k = chain_length_gaussian(table, t, x, eta, F);
    const double bracket = 4.0 * x / eta * F.F_inv(2.0 * x / (eta * t));
    if (bracket < 1.0) {
      CHECK(k == 1);
    } else {
      CHECK(static_cast<double>(k) <= bracket);
      CHECK(static_cast<double>(2 * k) > bracket);
    }
  }
  // bracket grows like x^2 for linear F
  CHECK(chain_length_gaussian(table, t, 0.9, eta, F) >= 2 * chain_length_gaussian(table, t, 0.45, eta, F));
  // arguments past s_max are outside the certified range
  CHECK_THROWS_AS(chain_length_gaussian(table, t, 10.0, eta, F), std::domain_error);
  // F too large for Psi(s)/s
  const MonotoneMap big{[](double s) { return 100.0 * s; }, [](double y) { return y / 100.0; }, 1.0};
  CHECK_THROWS_AS(chain_length_gaussian(table, t, 0.1, eta, big), std::domain_error);
}

TEST_CASE("high intensity horizon") {
  const SymbolTable table(builtin_measure("high_intensity"));
  CHECK_THROWS_AS(density_fourier(table, 1.5), std::domain_error);
  GridSpec spec;
  spec.enforce_horizon = false;
  CHECK_NOTHROW(density_fourier(table, 1.5, spec));
}

TEST_CASE("two-dimensional density is radially symmetric with unit mass") {
  const SymbolTable table(load_measure(std::filesystem::path(LEVYKERNEL_TESTDATA) / "truncated_2d.json"));
  const DensityGrid2D d = density_fourier_2d(table, 0.5);
  CHECK(d.mass() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(d.at_node(3, 4) == doctest::Approx(d.at_node(-4, 3)).epsilon(1e-12));
  CHECK(d.at_node(5, 0) == doctest::Approx(d.at_node(0, -5)).epsilon(1e-12));
  CHECK(d.at_node(0, 0) > d.at_node(5, 0));
}
