#include <doctest.h>

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "levykernel/config.hpp"
#include "levykernel/levy_measure.hpp"
#include "levykernel/verify.hpp"

using namespace levykernel;

namespace {

LevyMeasure stable15() { return builtin_measure("truncated"); }

}  // namespace

TEST_CASE("truncated stable closed forms") {
  const LevyMeasure nu = stable15();  // s^{-2.5} on (0, 1), mass 2
  CHECK(second_moment(nu) == doctest::Approx(4.0).epsilon(1e-10));
  for (double r : {0.05, 0.3, 0.9}) {
    const double exact = 2.0 * (std::pow(r, -1.5) - 1.0) / 1.5;
    CHECK(tail_mass(nu, r) == doctest::Approx(exact).epsilon(1e-10));
  }
  CHECK(tail_mass(nu, 1.0) == 0.0);
  CHECK(tail_mass(nu, 5.0) == 0.0);

  // H(r) = 4 r^2 for r <= 1, then 2 (2 r^{3/2} + (r^{3/2} - 1)/1.5)
  CHECK(H(nu, 0.5) == doctest::Approx(1.0).epsilon(1e-10));
  const double r = 7.0;
  CHECK(H(nu, r) == doctest::Approx(2.0 * (2.0 * std::pow(r, 1.5) + (std::pow(r, 1.5) - 1.0) / 1.5)).epsilon(1e-9));

  // one side of the ball (0.3, 0.7)
  const double ball = (std::pow(0.3, -1.5) - std::pow(0.7, -1.5)) / 1.5;
  CHECK(ball_mass(nu, 0.5, 0.2) == doctest::Approx(ball).epsilon(1e-9));
  CHECK(ball_mass(nu, 3.0, 0.5) == 0.0);
}

TEST_CASE("split of the tempered profile at r = 1") {
  // 2 int_1^inf s^{-3/2} e^{-s} ds = 2 Gamma(-1/2, 1) = 2 (2/e - 2 sqrt(pi) erfc(1))
  const double lambda = 2.0 * (2.0 / std::numbers::e - 2.0 * std::sqrt(std::numbers::pi) * boost::math::erfc(1.0));
  CHECK(lambda == doctest::Approx(0.356295).epsilon(1e-6));
  const LevyMeasure nu = builtin_measure("tempered");
  const SplitMeasure sp = split(nu, 1.0);
  CHECK(sp.big.total_mass == doctest::Approx(lambda).epsilon(1e-9));
  CHECK(tail_mass(nu, 1.0) == doctest::Approx(lambda).epsilon(1e-9));
}

TEST_CASE("split beyond the support leaves no big jumps") {
  const SplitMeasure sp = split(stable15(), 1.5);
  CHECK(sp.big.total_mass == 0.0);
}

TEST_CASE("split masses add up for random thresholds") {
  gen::Rng g(11);
  for (int i = 0; i < 20; ++i) {
    const LevyMeasure nu = gen::any_family(g);
    const double r = g.log_uniform(0.05, 0.8);
    const double rho = g.uniform(0.2, 0.95) * r;
    const SplitMeasure sp = split(nu, r);
    CHECK(sp.big.total_mass == doctest::Approx(tail_mass(nu, r)).epsilon(1e-9));
    // tail above rho < r = small part on [rho, r) + all of the big part
    CHECK(tail_mass(sp.small, rho) + sp.big.total_mass == doctest::Approx(tail_mass(nu, rho)).epsilon(1e-9));
    CHECK(tail_mass(sp.small, r) == 0.0);
  }
}

TEST_CASE("H is finite, nondecreasing and at most quadruples under doubling") {
  gen::Rng g(7);
  for (int i = 0; i < 30; ++i) {
    const LevyMeasure nu = gen::any_family(g);
    double prev = 0.0;
    for (double r : logspace(1e-3, 1e3, 25)) {
      const double h = H(nu, r);
      REQUIRE(std::isfinite(h));
      CHECK(h >= prev * (1 - 1e-10));
      CHECK(H(nu, 2.0 * r) <= 4.0 * h * (1 + 1e-9));
      prev = h;
    }
  }
}

TEST_CASE("tail mass is nonincreasing and H dominates r^2 times it") {
  gen::Rng g(8);
  for (int i = 0; i < 30; ++i) {
    const LevyMeasure nu = gen::any_family(g);
    double prev = std::numeric_limits<double>::infinity();
    for (double s : logspace(1e-2, 5.0, 20)) {
      const double m = tail_mass(nu, s);
      CHECK(m <= prev * (1 + 1e-12));
      CHECK(m <= H(nu, 1.0 / s) * (1 + 1e-9));
      prev = m;
    }
  }
}

TEST_CASE("power-law profiles recover beta1 = beta2 = d + alpha") {
  gen::Rng g(3);
  for (int i = 0; i < 10; ++i) {
    const double alpha = g.uniform(0.1, 1.9);
    const LevyMeasure nu(1, RadialProfile(TruncatedStable{alpha, 10.0, 1.0}), AngularMeasure::uniform(1, 2.0));
    const DoublingReport rep = doubling_check(nu.radial(), 1, logspace(1e-4, 9.0, 60));
    CHECK(rep.pass);
    CHECK(rep.beta1_est == doctest::Approx(1.0 + alpha).epsilon(1e-6));
    CHECK(rep.beta2_est == doctest::Approx(1.0 + alpha).epsilon(1e-6));
  }
}

TEST_CASE("staircase profile violates doubling") {
  const DoublingReport rep = doubling_check(staircase_density(1), 1, logspace(1e-12, 1.0, 400));
  CHECK_FALSE(rep.pass);
  CHECK(rep.beta2_est >= 3.0);
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(RadialProfile(TruncatedStable{2.5, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(RadialProfile(TemperedStable{0.5, 0.0, -1.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(RadialProfile(HighIntensity{1.0, 1.0, Continuation::Zero}), std::invalid_argument);
  CHECK_THROWS(tail_mass(stable15(), 0.0));
}

TEST_CASE("lebesgue density of the two-sided profile") {
  const LevyMeasure nu = stable15();
  CHECK(nu.lebesgue_density(Point(0.5, 0.0)) == doctest::Approx(std::pow(0.5, -2.5)));
  CHECK(nu.lebesgue_density(Point(-0.5, 0.0)) == doctest::Approx(std::pow(0.5, -2.5)));
  CHECK(nu.lebesgue_density(Point(1.5, 0.0)) == 0.0);
}
