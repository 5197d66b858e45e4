// One line per acceptance criterion; exit status 1 if any is red.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "levykernel/config.hpp"
#include "levykernel/density.hpp"
#include "levykernel/mc_oracle.hpp"
#include "levykernel/quadrature.hpp"
#include "levykernel/verify.hpp"

using namespace levykernel;

namespace {

constexpr double kCauchyTol = 1e-6;
constexpr double kCauchySeconds = 10.0;
constexpr double kPsiFloor = 0.05;
constexpr double kCeiling = 100.0;
constexpr double kCertTol = 1e-9;
constexpr double kScaleSpread = 10.0;
constexpr double kSemigroupTol = 1e-6;
constexpr double kSplitTol = 1e-6;
constexpr double kMcRel = 0.10;
constexpr double kMcSeconds = 60.0;
constexpr double kBetaTol = 1e-6;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const FitReport* find(const VerifyResult& r, const std::string& name) {
  for (const auto& f : r.reports)
    if (f.envelope == name) return &f;
  return nullptr;
}

// verify runs are shared between criteria
const VerifyResult& verified(const std::string& family) {
  static std::map<std::string, VerifyResult> done;
  auto it = done.find(family);
  if (it == done.end()) {
    static std::map<std::string, std::unique_ptr<SymbolTable>> tables;
    tables[family] = std::make_unique<SymbolTable>(builtin_measure(family));
    VerifyOptions opt;
    opt.certified = false;
    it = done.emplace(family, verify_measure(*tables[family], opt)).first;
  }
  return it->second;
}

Outcome cauchy_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const SymbolTable table(builtin_measure("cauchy"));
  double worst = 0.0;
  for (double t : {0.5, 1.0, 2.0}) {
    GridSpec spec;
    spec.x_max = 10.0;
    const DensityGrid g = density_fourier(table, t, spec);
    for (std::size_t k = 0; g.x(k) <= 10.0; ++k)
      worst = std::max(worst, std::abs(g.values[k] - t / (std::numbers::pi * (t * t + g.x(k) * g.x(k)))));
  }
  const double secs = seconds_since(t0);
  return {worst <= kCauchyTol && secs < kCauchySeconds,
          fmt("max |p - t/(pi(t^2+x^2))| = %.2e (tol %.0e), %.1f s (limit %.0f s)", worst, kCauchyTol, secs,
              kCauchySeconds)};
}

Outcome psi_h_sandwich() {
  bool ok = true;
  std::string detail;
  for (const char* f : {"truncated", "tempered", "high_intensity"}) {
    const SymbolTable table(builtin_measure(f));
    double lo = quad::kInf, hi = 0.0;
    for (double r : logspace(1e-3, 1e4, 700)) {
      const double q = table.psi(r) / H(table.measure(), r);
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    ok = ok && lo >= kPsiFloor && hi <= 2.0 * (1 + 1e-8) && table.L0_fit() > 0;
    detail += fmt("%s Psi/H in [%.3f, %.3f]; ", f, lo, hi);
  }
  return {ok, detail + fmt("need inf >= %.2f and sup <= 2", kPsiFloor)};
}

Outcome near_diagonal() {
  bool ok = true;
  std::string detail;
  for (const char* f : {"truncated", "tempered", "high_intensity"}) {
    const VerifyResult& r = verified(f);
    const FitReport* nd = find(r, "near_diagonal_theta");
    const double theta = r.summary.at("theta");
    const bool good = nd && nd->pass && theta > 0 && nd->spread <= kCeiling;
    ok = ok && good;
    detail += fmt("%s theta %.3g spread %.3g; ", f, theta, nd ? nd->spread : NAN);
  }
  return {ok, detail + fmt("ceiling %.0f over >= 3 decades of t", kCeiling)};
}

Outcome certified() {
  const SymbolTable table(builtin_measure("truncated"));
  const double theta = verified("truncated").summary.at("theta");
  const double r0 = table.measure().support_radius();
  const auto ts = logspace(0.05, 5.0, 50);
  auto xs = [r0](double, double h) { return linspace(0.0, 4.0 * h + r0, 50); };
  const CertifiedReport clean = check_certified(table, ts, xs, theta, kCertTol);
  const CertifiedReport bad = check_certified(table, ts, xs, theta, kCertTol, 1.1);
  const std::size_t v = clean.lower_violations + clean.upper_violations;
  const std::size_t vb = bad.lower_violations + bad.upper_violations;
  return {v == 0 && vb >= 1,
          fmt("%zu points, %zu violations (tol %.0e p_t(0)); x1.1 control: %zu violations", clean.points, v, kCertTol,
              vb)};
}

Outcome truncated_regimes() {
  const VerifyResult& r = verified("truncated");
  bool ok = true;
  std::string detail;
  for (const char* name : {"near_diagonal", "levy_tail", "gaussian", "expxlog"}) {
    const FitReport* f = find(r, name);
    ok = ok && f && f->pass;
    detail += fmt("%s %s (spread %.3g, per decade %.3g); ", name, f && f->pass ? "ok" : "FAIL", f ? f->spread : NAN,
                  f ? f->stability : NAN);
  }
  const FitReport* lt = find(r, "levy_tail");
  ok = ok && lt && lt->spread <= kCeiling;
  return {ok, detail + fmt("t f(|x|) spread %.3g (ceiling %.0f)", lt ? lt->spread : NAN, kCeiling)};
}

Outcome tempered_sandwich() {
  const VerifyResult& r = verified("tempered");
  const FitReport* s = find(r, "tempered_sandwich");
  const FitReport* lo = find(r, "tempered_lower");
  const FitReport* up = find(r, "tempered_upper");
  const bool ok = s && lo && up && s->pass && lo->pass && up->pass;
  return {ok, fmt("t in {5, 10, 20}, |x| <= 40: lower %s, upper %s (rate m/(2 4^beta)), %zu points %s",
                  lo && lo->pass ? "ok" : "FAIL", up && up->pass ? "ok" : "FAIL", s ? s->points : 0,
                  s && s->pass ? "inside" : (s ? s->diagnostic.c_str() : "missing"))};
}

Outcome scale_asymptotics() {
  const VerifyResult& r = verified("high_intensity");
  const FitReport* s = find(r, "scale_asymptotics");
  const bool ok = s && s->spread <= kScaleSpread;
  return {ok, fmt("h(t)/(t^1/2 log(2/t)^((1-beta)/2)) in [%.3f, %.3f], C/c = %.3f (limit %.0f)",
                  s ? s->ratio_inf : NAN, s ? s->ratio_sup : NAN, s ? s->spread : NAN, kScaleSpread)};
}

Outcome semigroup() {
  double worst = 0.0;
  std::string detail;
  for (const char* f : {"truncated", "tempered", "high_intensity", "cauchy"}) {
    const SymbolTable table(builtin_measure(f));
    double fam = 0.0;
    for (auto [t, s] : {std::pair{1.0, 1.0}, std::pair{0.5, 1.5}}) {
      GridSpec base;
      base.enforce_horizon = false;  // t + s = 2 lies past the high-intensity horizon
      GridSpec spec = plan_grid(table, std::min(t, s), base);
      for (double u : {t, s, t + s}) spec.period = std::max(spec.period, plan_grid(table, u, base).period);
      const DensityGrid a = density_fourier(table, t, spec);
      const DensityGrid b = density_fourier(table, s, spec);
      const DensityGrid c = density_fourier(table, t + s, spec);
      fam = std::max(fam, semigroup_residual(a, b, c));
    }
    worst = std::max(worst, fam);
    detail += fmt("%s %.1e; ", f, fam);
  }
  return {worst <= kSemigroupTol, detail + fmt("tol %.0e", kSemigroupTol)};
}

Outcome split_vs_fourier() {
  double worst = 0.0;
  std::string detail;
  for (const char* f : {"truncated", "tempered"}) {
    const LevyMeasure nu = builtin_measure(f);
    const SymbolTable table(nu);
    const GridSpec spec = plan_grid(table, 1.0);
    const DensityGrid direct = density_fourier(table, 1.0, spec);
    // h(1) exceeds r0 for the truncated family, leaving no big jumps; h(1)/4 exercises the series
    for (double r : {table.h(1.0), table.h(1.0) / 4.0}) {
      const double d = sup_difference(direct, density_split(nu, 1.0, r, -1, spec), spec.x_max);
      worst = std::max(worst, d);
      detail += fmt("%s r = %.3g (jump mass %.3g) %.1e; ", f, r, tail_mass(nu, r), d);
    }
  }
  return {worst <= kSplitTol, detail + fmt("tol %.0e", kSplitTol)};
}

Outcome monte_carlo() {
  const auto t0 = std::chrono::steady_clock::now();
  const SymbolTable table(builtin_measure("truncated"));
  SamplerConfig cfg;
  cfg.n = 1'000'000;
  cfg.seed = 1;
  const McSummary s = mc_check(table, 1.0, cfg);
  const double secs = seconds_since(t0);
  return {s.kde.sup_rel <= kMcRel && secs < kMcSeconds,
          fmt("n = %zu, relative sup error %.4f on |x| <= %.3f (tol %.2f), KS radii %.4f, %.1f s (limit %.0f s)", s.n,
              s.kde.sup_rel, s.kde.x_max, kMcRel, s.ks_radii, secs, kMcSeconds)};
}

Outcome doubling() {
  double worst = 0.0;
  bool ok = true;
  for (double alpha : {0.3, 0.8, 1.2, 1.5, 1.9}) {
    const LevyMeasure nu(1, RadialProfile(TruncatedStable{alpha, 10.0, 1.0}), AngularMeasure::uniform(1, 2.0));
    const DoublingReport rep = doubling_check(nu.radial(), 1, logspace(1e-4, 9.0, 60));
    worst = std::max({worst, std::abs(rep.beta1_est - 1.0 - alpha), std::abs(rep.beta2_est - 1.0 - alpha)});
    ok = ok && rep.pass;
  }
  const DoublingReport stair = doubling_check(staircase_density(1), 1, logspace(1e-12, 1.0, 400));
  ok = ok && worst <= kBetaTol && !stair.pass;
  return {ok, fmt("power laws: max |beta - (1 + alpha)| = %.1e (tol %.0e); staircase %s", worst, kBetaTol,
                  stair.pass ? "passes (wrong)" : "fails as it should")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"cauchy oracle", cauchy_oracle},
      {"Psi/H sandwich", psi_h_sandwich},
      {"near-diagonal fit", near_diagonal},
      {"certified sandwich", certified},
      {"truncated two-sided regimes", truncated_regimes},
      {"tempered sandwich", tempered_sandwich},
      {"high-intensity scale", scale_asymptotics},
      {"semigroup", semigroup},
      {"split vs fourier", split_vs_fourier},
      {"monte carlo", monte_carlo},
      {"doubling diagnostics", doubling},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria pass\n", criteria.size() - failed, criteria.size());
  return failed ? 1 : 0;
}
