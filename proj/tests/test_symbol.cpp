#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "levykernel/config.hpp"
#include "levykernel/symbol.hpp"
#include "levykernel/verify.hpp"

using namespace levykernel;

TEST_CASE("cauchy profile has Phi(xi) = |xi| and h(t) = t") {
  const SymbolTable table(builtin_measure("cauchy"));
  for (double r : {1e-3, 0.1, 1.0, 37.0, 1e4}) {
    CHECK(table.phi(r) == doctest::Approx(r).epsilon(1e-7));
    CHECK(table.psi(r) == doctest::Approx(r).epsilon(1e-7));
  }
  for (double t : {1e-3, 0.5, 1.0, 2.0, 100.0}) CHECK(table.h(t) == doctest::Approx(t).epsilon(1e-7));
  CHECK(table.L0_fit() == doctest::Approx(std::numbers::pi / 4).epsilon(1e-6));
}

TEST_CASE("truncated symbol: quadratic at zero, stable at infinity") {
  const SymbolTable table(builtin_measure("truncated"));
  // m0 xi^2 / 2 with m0 = 4
  CHECK(table.phi(1e-3) == doctest::Approx(2e-6).epsilon(1e-5));
  // two-sided stable constant 2 Gamma(-1/2) cos(3 pi/4) / 1.5, less the missing tail 4/3
  const double c = 2.0 * boost::math::tgamma(-0.5) * std::cos(0.75 * std::numbers::pi) / 1.5;
  const double xi = 1e5;
  CHECK(table.phi(xi) == doctest::Approx(c * std::pow(xi, 1.5) - 4.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("frequencies above the grid are an error") {
  const SymbolTable table(builtin_measure("truncated"));
  CHECK_THROWS_AS((void)table.phi(1e7), GridRangeError);
  CHECK_NOTHROW((void)table.phi(1e-6));
}

TEST_CASE("spline interpolation error is small") {
  for (const char* f : {"truncated", "tempered", "high_intensity"}) {
    const SymbolTable table(builtin_measure(f));
    CHECK(table.interp_rel_error() < 1e-6);
  }
}

TEST_CASE("horizon t_p") {
  CHECK(SymbolTable(builtin_measure("high_intensity")).t_p() == doctest::Approx(1.0));
  CHECK(std::isinf(SymbolTable(builtin_measure("truncated")).t_p()));
}

TEST_CASE("Psi is the monotone majorant of Phi and bounded by 2H") {
  gen::Rng g(5);
  for (int i = 0; i < 6; ++i) {
    const SymbolTable table(gen::any_family(g));
    double prev = 0.0;
    for (double r : logspace(1e-3, 1e4, 60)) {
      const double psi = table.psi(r);
      CHECK(psi >= prev);
      CHECK(psi >= table.phi(r) * (1 - 1e-12));
      CHECK(psi <= 2.0 * H(table.measure(), r) * (1 + 1e-8));
      prev = psi;
    }
    CHECK(table.L0_fit() > 0.05);
    CHECK(table.upper_ratio() <= 2.0 * (1 + 1e-8));
  }
}

TEST_CASE("psi_inverse inverts Psi and h is increasing") {
  gen::Rng g(6);
  for (int i = 0; i < 6; ++i) {
    const SymbolTable table(gen::any_family(g));
    for (int k = 0; k < 20; ++k) {
      const double r = g.log_uniform(1e-2, 1e3);
      const double s = table.psi(r);
      CHECK(table.psi(table.psi_inverse(s)) == doctest::Approx(s).epsilon(1e-9));
      CHECK(table.psi_inverse(s) >= r * (1 - 1e-9));
    }
    const double t_hi = std::isfinite(table.t_p()) ? 0.9 * table.t_p() : 50.0;
    double prev = 0.0;
    for (double t : logspace(1e-3, t_hi, 30)) {
      const double h = table.h(t);
      CHECK(h > prev);
      prev = h;
    }
  }
}

TEST_CASE("scaling nu -> 2 nu halves the time scale") {
  const LevyMeasure nu = builtin_measure("truncated");
  const SymbolTable a(nu), b(nu.scaled(2.0));
  for (double t : {0.01, 0.3, 2.0}) CHECK(b.h(t / 2.0) == doctest::Approx(a.h(t)).epsilon(1e-9));
}

TEST_CASE("A1 integral scaled by h^{d+1} stays bounded for the truncated family") {
  const SymbolTable table(builtin_measure("truncated"));
  const A1Report rep = table.check_A1(logspace(1e-3, 10.0, 25));
  CHECK(rep.pass);
  for (double v : rep.scaled_integral) {
    CHECK(v > 0.5);
    CHECK(v < 2.0);
  }
}

TEST_CASE("isotropic table in two dimensions") {
  const LevyMeasure nu = load_measure(std::filesystem::path(LEVYKERNEL_TESTDATA) / "truncated_2d.json");
  const SymbolTable table(nu);
  CHECK(table.isotropic());
  const double r = 3.0;
  CHECK(table.phi(Point(r, 0.0)) == doctest::Approx(table.phi(Point(r / std::sqrt(2.0), r / std::sqrt(2.0)))).epsilon(1e-9));
}
