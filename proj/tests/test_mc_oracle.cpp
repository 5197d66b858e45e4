#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <json.hpp>
#include <numbers>
#include <random>

#include "levykernel/config.hpp"
#include "levykernel/mc_oracle.hpp"
#include "levykernel/verify.hpp"

using namespace levykernel;

namespace {

std::vector<double> first_coordinate(const std::vector<Point>& pts) {
  std::vector<double> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = pts[i][0];
  return out;
}

std::vector<double> sorted_normals(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::vector<double> v(n);
  for (auto& x : v) x = z(rng);
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("increments do not depend on the thread count") {
  const LevyMeasure nu = builtin_measure("truncated");
  SamplerConfig cfg;
  cfg.n = 150'000;
  cfg.seed = 99;
  ::setenv("LEVYKERNEL_THREADS", "1", 1);
  const auto a = sample_increments(nu, 0.5, cfg, 1.0);
  ::setenv("LEVYKERNEL_THREADS", "3", 1);
  const auto b = sample_increments(nu, 0.5, cfg, 1.0);
  ::unsetenv("LEVYKERNEL_THREADS");
  REQUIRE(a.size() == cfg.n);
  CHECK(a == b);
  cfg.seed = 100;
  CHECK(sample_increments(nu, 0.5, cfg, 1.0) != a);
}

TEST_CASE("jump radii follow the tail distribution") {
  for (const char* f : {"truncated", "tempered", "high_intensity"}) {
    const IncrementSampler s(builtin_measure(f), 1.0, 0.01);
    CHECK(radius_ks_distance(s, 100'000, 5) < 0.01);
    double prev = 0.0;
    for (double u : {0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
      const double r = s.radius_quantile(u);
      CHECK(r >= prev);
      CHECK(s.radius_cdf(r) == doctest::Approx(u).epsilon(1e-3));
      prev = r;
    }
  }
}

TEST_CASE("second moment of the increment is t m0") {
  const LevyMeasure nu = builtin_measure("truncated");
  SamplerConfig cfg;
  cfg.n = 300'000;
  cfg.seed = 3;
  cfg.epsilon = 0.1;
  const double t = 1.0;
  const auto x = first_coordinate(sample_increments(nu, t, cfg, 0.3));
  double m = 0.0, m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    m += v;
    m2 += v * v;
    m4 += v * v * v * v;
  }
  const double n = static_cast<double>(x.size());
  m /= n;
  m2 /= n;
  m4 /= n;
  const double se = std::sqrt((m4 - m2 * m2) / n);
  CHECK(std::abs(m2 - 4.0 * t) < 3.0 * se);
  CHECK(std::abs(m) < 4.0 * std::sqrt(m2 / n));
}

TEST_CASE("cutoff beyond the support leaves a Gaussian") {
  const LevyMeasure nu = builtin_measure("truncated");
  const IncrementSampler s(nu, 1.0, 2.0);
  CHECK(s.jump_rate() == 0.0);
  CHECK(s.small_variance() == doctest::Approx(4.0).epsilon(1e-9));
  SamplerConfig cfg;
  cfg.n = 200'000;
  cfg.epsilon = 2.0;
  const auto x = first_coordinate(sample_increments(nu, 1.0, cfg, 0.3));
  const double inside = static_cast<double>(std::count_if(x.begin(), x.end(), [](double v) { return std::abs(v) < 2.0; }));
  // P(|N(0, 4)| < 2) = erf(1 / sqrt 2)
  CHECK(inside / static_cast<double>(x.size()) == doctest::Approx(std::erf(1.0 / std::sqrt(2.0))).epsilon(0.01));
}

TEST_CASE("a single increment needs an explicit cutoff") {
  std::mt19937_64 rng(1);
  SamplerConfig cfg;
  CHECK_THROWS(sample_increment(builtin_measure("truncated"), 1.0, cfg, rng));
  cfg.epsilon = 0.05;
  CHECK_NOTHROW(sample_increment(builtin_measure("truncated"), 1.0, cfg, rng));
}

TEST_CASE("kde of normal samples matches the smoothed normal density") {
  const auto v = sorted_normals(200'000, 17);
  const double bw = 0.1;
  const auto xs = linspace(-3.0, 3.0, 61);
  const auto k = kde_evaluate(v, xs, bw);
  const double s2 = 1.0 + bw * bw;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double exact = std::exp(-xs[i] * xs[i] / (2.0 * s2)) / std::sqrt(2.0 * std::numbers::pi * s2);
    CHECK(std::abs(k[i] - exact) < 0.01);
  }
  const double sil = silverman_bandwidth(v, 1e9);
  CHECK(sil == doctest::Approx(0.9 * std::pow(200'000.0, -0.2)).epsilon(0.03));
}

TEST_CASE("kde fluctuation halves when the sample grows fourfold") {
  const double bw = 0.2;
  const auto xs = linspace(-3.0, 3.0, 61);
  auto rms_gap = [&](std::size_t n, std::uint64_t seed) {
    double total = 0.0;
    for (int rep = 0; rep < 64; ++rep) {
      const auto a = kde_evaluate(sorted_normals(n, seed + 2 * rep), xs, bw);
      const auto b = kde_evaluate(sorted_normals(n, seed + 2 * rep + 1), xs, bw);
      for (std::size_t i = 0; i < xs.size(); ++i) total += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return std::sqrt(total / (64.0 * static_cast<double>(xs.size())));
  };
  const double ratio = rms_gap(2'000, 1000) / rms_gap(8'000, 2000);
  CHECK(ratio > 1.6);
  CHECK(ratio < 2.5);
}

TEST_CASE("kde comparison needs samples and nodes in the central region") {
  const SymbolTable table(builtin_measure("truncated"));
  const DensityGrid g = density_fourier(table, 1.0);
  const double h = table.h(1.0);
  CHECK_THROWS_AS(kde_compare(std::vector<double>(100, 50.0 * h), g, h), std::invalid_argument);
  CHECK_THROWS_AS(kde_compare({}, g, h), std::invalid_argument);
}

TEST_CASE("monte carlo check against the truncated density") {
  const SymbolTable table(builtin_measure("truncated"));
  SamplerConfig cfg;
  cfg.n = 300'000;
  cfg.seed = 11;
  const McSummary s = mc_check(table, 1.0, cfg);
  CHECK(s.kde.sup_rel < 0.05);
  CHECK(s.ks_radii < 0.01);
  CHECK(s.epsilon == doctest::Approx(table.h(1.0) / 10.0));
  const auto doc = nlohmann::json::parse(mc_summary_json(s));
  CHECK(doc.at("sup_rel").get<double>() == s.kde.sup_rel);
  CHECK(mc_summary_json(mc_check(table, 1.0, cfg)) == mc_summary_json(s));
}
