#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "generators.hpp"
#include "levykernel/config.hpp"
#include "levykernel/verify.hpp"

using namespace levykernel;

namespace {

Envelope gaussian_envelope() {
  Envelope env;
  env.name = "gauss";
  env.slots = {{"c", 1.0}, {"rate", 1.0}};
  env.lower_slot = env.upper_slot = "c";
  env.rate_slots = {"rate"};
  env.h = [](double t) { return std::sqrt(t); };
  env.shape = [](const Envelope& e, double t, double x, double) {
    return std::exp(-e.slot("rate") * x * x / t) / std::sqrt(t);
  };
  return env;
}

// p = 3 t^{-1/2} e^{-2 x^2 / t} times a multiplicative wobble in [1/w, w]
std::vector<Sample> gaussian_samples(double wobble, gen::Rng& g) {
  std::vector<Sample> out;
  for (double t : logspace(1e-2, 10.0, 13)) {
    for (double x : linspace(0.0, 2.0 * std::sqrt(t), 9)) {
      Sample s;
      s.t = t;
      s.x = x;
      s.h = std::sqrt(t);
      s.p0 = 3.0 / std::sqrt(t);
      s.p = s.p0 * std::exp(-2.0 * x * x / t) * std::pow(wobble, g.uniform(-1.0, 1.0));
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("fit recovers an exact envelope") {
  gen::Rng g(51);
  Envelope env = gaussian_envelope();
  const FitReport rep = fit_sandwich(env, gaussian_samples(1.0, g));
  CHECK(rep.pass);
  CHECK(rep.side == "two-sided");
  CHECK(env.slot("rate") == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(rep.spread < 1.0 + 1e-3);
  CHECK(env.slot("c") == doctest::Approx(3.0).epsilon(1e-3));
}

TEST_CASE("spread of a wobbling density stays within the wobble") {
  gen::Rng g(52);
  for (int i = 0; i < 10; ++i) {
    const double w = g.uniform(1.1, 3.0);
    Envelope env = gaussian_envelope();
    const FitReport rep = fit_sandwich(env, gaussian_samples(w, g));
    CHECK(rep.pass);
    CHECK(rep.spread <= w * w * (1 + 1e-3));
    CHECK(rep.ratio_inf <= rep.ratio_sup);
  }
}

TEST_CASE("a single point has inf equal to sup") {
  Envelope env = gaussian_envelope();
  env.rate_slots.clear();
  Sample s;
  s.t = 1.0;
  s.x = 0.5;
  s.h = 1.0;
  s.p = 0.2;
  s.p0 = 0.4;
  const FitReport rep = fit_sandwich(env, {s});
  CHECK(rep.ratio_inf == rep.ratio_sup);
  CHECK(rep.spread == 1.0);
}

TEST_CASE("fits reject empty regions and short time ranges") {
  gen::Rng g(53);
  Envelope env = gaussian_envelope();
  const auto samples = gaussian_samples(1.0, g);
  CHECK_THROWS_AS(fit_sandwich(env, samples, {}, [](const Sample& s) { return s.t > 100.0; }), std::invalid_argument);

  std::vector<Sample> short_range;
  for (const auto& s : samples)
    if (s.t < 1.0) short_range.push_back(s);
  CHECK_THROWS_AS(fit_near_diagonal(short_range, 1), std::invalid_argument);
  CHECK_NOTHROW(fit_near_diagonal(samples, 1));
}

TEST_CASE("one-sided fits report drift of the constant") {
  gen::Rng g(54);
  Envelope env = gaussian_envelope();
  env.upper_slot.clear();
  env.rate_slots.clear();
  env.slots["rate"] = 2.0;
  const FitReport rep = fit_sandwich(env, gaussian_samples(1.0, g));
  CHECK(rep.side == "lower");
  CHECK(rep.stability == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.pass);
}

TEST_CASE("certified check catches a corrupted density") {
  const SymbolTable table(builtin_measure("truncated"));
  const auto ts = logspace(0.01, 1.0, 12);
  auto xs = [](double, double h) { return linspace(0.0, 6.0 * h, 12); };
  const CertifiedReport clean = check_certified(table, ts, xs, 0.5);
  CHECK(clean.pass);
  CHECK(clean.lower_violations + clean.upper_violations == 0);
  const CertifiedReport high = check_certified(table, ts, xs, 0.5, 1e-9, 1.1);
  CHECK_FALSE(high.pass);
  CHECK(high.upper_violations > 0);
  const CertifiedReport low = check_certified(table, ts, xs, 0.5, 1e-9, 0.5);
  CHECK_FALSE(low.pass);
  CHECK(low.lower_violations > 0);
}

TEST_CASE("staircase profile fails the doubling report") {
  const FitReport rep = doubling_report(doubling_check(staircase_density(1), 1, logspace(1e-12, 1.0, 400)), "staircase");
  CHECK_FALSE(rep.pass);
}

TEST_CASE("cauchy Psi/H ratio") {
  const SymbolTable table(builtin_measure("cauchy"));
  const FitReport rep = psi_h_report(table);
  CHECK(rep.pass);
  CHECK(rep.ratio_inf == doctest::Approx(0.785398).epsilon(1e-5));
}

TEST_CASE("verify the truncated family and round trip the report") {
  const SymbolTable table(builtin_measure("truncated"));
  const VerifyResult res = verify_measure(table);
  CHECK(res.pass);
  for (const auto& r : res.reports) CHECK_MESSAGE(r.pass, r.envelope, ": ", r.diagnostic);
  const std::string text = report_json({res});
  const auto back = parse_report_json(text);
  REQUIRE(back.size() == 1);
  CHECK(back[0].family == res.family);
  CHECK(back[0].reports.size() == res.reports.size());
  CHECK(report_json(back) == text);
  CHECK(report_csv(back) == report_csv({res}));
}

TEST_CASE("tolerance from the environment") {
  ::unsetenv("LEVYKERNEL_TOL");
  CHECK(tolerance_from_env(1e-9) == 1e-9);
  ::setenv("LEVYKERNEL_TOL", "1e-6", 1);
  CHECK(tolerance_from_env(1e-9) == 1e-6);
  ::setenv("LEVYKERNEL_TOL", "tight", 1);
  CHECK_THROWS_AS(tolerance_from_env(1e-9), std::invalid_argument);
  ::setenv("LEVYKERNEL_TOL", "-1", 1);
  CHECK_THROWS_AS(tolerance_from_env(1e-9), std::invalid_argument);
  ::unsetenv("LEVYKERNEL_TOL");
}
