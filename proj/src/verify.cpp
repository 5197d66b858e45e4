#include "levykernel/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <json.hpp>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "levykernel/quadrature.hpp"

namespace levykernel {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTiny = 1e-300;

enum class Side { Two, Lower, Upper };

Side side_of(const Envelope& env) {
  if (!env.lower_slot.empty() && !env.upper_slot.empty()) return Side::Two;
  if (!env.lower_slot.empty()) return Side::Lower;
  if (!env.upper_slot.empty()) return Side::Upper;
  throw std::invalid_argument("envelope " + env.name + " claims neither side");
}

const char* side_name(Side s) {
  switch (s) {
    case Side::Two: return "two-sided";
    case Side::Lower: return "lower";
    case Side::Upper: return "upper";
  }
  return "?";
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::string grid_text(const std::vector<const Sample*>& pts) {
  if (pts.empty()) return "empty";
  std::set<double> ts;
  double xmax = 0.0;
  for (const auto* s : pts) {
    ts.insert(s->t);
    xmax = std::max(xmax, std::abs(s->x));
  }
  return std::to_string(ts.size()) + " t in [" + fmt(*ts.begin()) + ", " + fmt(*ts.rbegin()) + "], |x| <= " +
         fmt(xmax) + ", " + std::to_string(pts.size()) + " points";
}

// Per-t extremum spread, normalized per decade of t.
double per_decade(const std::map<double, double>& ext) {
  if (ext.empty()) return kNaN;
  double lo = kInf, hi = 0.0;
  for (const auto& [t, v] : ext) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double decades = std::max(1.0, std::log10(ext.rbegin()->first / ext.begin()->first));
  return std::pow(hi / lo, 1.0 / decades);
}

}  // namespace

std::vector<double> logspace(double a, double b, int n) {
  if (n < 1 || !(a > 0) || !(b >= a)) throw std::invalid_argument("logspace: need 0 < a <= b and n >= 1");
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = n == 1 ? a : std::exp(std::log(a) + (std::log(b) - std::log(a)) * i / (n - 1));
  if (n > 1) out.back() = b;
  return out;
}

std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw std::invalid_argument("linspace: n >= 1");
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  if (n > 1) out.back() = b;
  return out;
}

double tolerance_from_env(double fallback) {
  const char* v = std::getenv("LEVYKERNEL_TOL");
  if (!v || !*v) return fallback;
  char* end = nullptr;
  const double tol = std::strtod(v, &end);
  if (end == v || *end != '\0' || !(tol > 0) || !std::isfinite(tol))
    throw std::invalid_argument(std::string("LEVYKERNEL_TOL must be a positive number, got '") + v + "'");
  return tol;
}

std::vector<Sample> sample_densities(const SymbolTable& table, const std::vector<double>& ts,
                                     const std::function<std::vector<double>(double, double)>& xs,
                                     const GridSpec& base) {
  std::vector<Sample> out;
  for (double t : ts) {
    const double h = table.h(t);
    std::vector<double> x = xs(t, h);
    if (x.empty()) continue;
    double need = 0.0;
    for (double v : x) need = std::max(need, std::abs(v));
    GridSpec spec = base;
    if (need > 0) spec.x_max = std::max(spec.x_max, need);
    const DensityGrid g = density_fourier(table, t, spec);
    const double p0 = g.values[0];
    std::sort(x.begin(), x.end());
    x.erase(std::unique(x.begin(), x.end()), x.end());
    for (double v : x) {
      if (std::abs(v) > g.x_max * (1 + 1e-12)) continue;
      out.push_back({t, v, g.at(v), p0, h, g.error_bound()});
    }
  }
  return out;
}

FitReport fit_sandwich(Envelope& env, const std::vector<Sample>& samples, const FitOptions& opt,
                       const std::function<bool(const Sample&)>& region) {
  const Side side = side_of(env);
  FitReport rep;
  rep.envelope = env.name;
  rep.side = side_name(side);

  std::vector<const Sample*> pts, low;
  for (const auto& s : samples) {
    if (region && !region(s)) continue;
    if (!env.contains(s.t, s.x, s.h)) continue;
    if (!(s.p > opt.floor_rel * s.p0)) {
      low.push_back(&s);
      continue;
    }
    pts.push_back(&s);
  }
  if (pts.empty() && low.empty())
    throw std::invalid_argument("envelope " + env.name + ": validity region does not meet the grid");
  rep.excluded = low.size();
  rep.points = pts.size();
  rep.grid = grid_text(pts);
  if (pts.empty()) {
    rep.diagnostic = "every point of the region is below the noise floor";
    return rep;
  }

  // log p - log shape at the current slots; points whose shape underflows are skipped
  std::vector<double> lr(pts.size());
  auto ratios = [&]() {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double sh = env.shape(env, pts[i]->t, pts[i]->x, pts[i]->h);
      lr[i] = sh > kTiny ? std::log(pts[i]->p) - std::log(sh) : kNaN;
    }
  };
  auto objective = [&]() {
    ratios();
    double lo = kInf, hi = -kInf, sum = 0.0;
    std::size_t n = 0;
    for (double v : lr) {
      if (std::isnan(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
      ++n;
    }
    if (n == 0) return kInf;
    const double mean = sum / static_cast<double>(n);
    // skipped points count against the fit
    const double penalty = static_cast<double>(pts.size() - n) * 10.0;
    switch (side) {
      case Side::Two: return hi - lo + penalty;
      case Side::Lower: return mean - lo + penalty;
      case Side::Upper: return hi - mean + penalty;
    }
    return kInf;
  };

  for (int sweep = 0; sweep < opt.sweeps && !env.rate_slots.empty(); ++sweep) {
    for (const auto& name : env.rate_slots) {
      const double centre = std::log(env.slot(name));
      auto f = [&](double u) {
        env.slots[name] = std::exp(centre - 7.0 + u);
        return objective();
      };
      const auto best = quad::golden_section(f, 0.0, 14.0, 1e-6);
      env.slots[name] = std::exp(centre - 7.0 + best.x);
    }
  }
  ratios();

  double lo = kInf, hi = -kInf;
  std::map<double, double> t_inf, t_sup;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double v = lr[i];
    if (std::isnan(v)) {
      ++skipped;
      continue;
    }
    const Sample& s = *pts[i];
    if (v < lo) {
      lo = v;
      rep.inf_t = s.t;
      rep.inf_x = s.x;
    }
    if (v > hi) {
      hi = v;
      rep.sup_t = s.t;
      rep.sup_x = s.x;
    }
    auto [a, fresh_a] = t_inf.try_emplace(s.t, v);
    if (!fresh_a) a->second = std::min(a->second, v);
    auto [b, fresh_b] = t_sup.try_emplace(s.t, v);
    if (!fresh_b) b->second = std::max(b->second, v);
  }
  if (!std::isfinite(lo)) {
    rep.diagnostic = "envelope underflows on every point";
    return rep;
  }
  rep.ratio_inf = std::exp(lo);
  rep.ratio_sup = std::exp(hi);
  rep.spread = rep.ratio_sup / rep.ratio_inf;
  for (auto& [t, v] : t_inf) v = std::exp(v);
  for (auto& [t, v] : t_sup) v = std::exp(v);
  const double st_low = per_decade(t_inf), st_high = per_decade(t_sup);
  if (!env.lower_slot.empty()) env.slots[env.lower_slot] = rep.ratio_inf;
  if (!env.upper_slot.empty()) env.slots[env.upper_slot] = rep.ratio_sup;
  rep.constants = env.slots;

  std::ostringstream diag;
  bool ok = rep.ratio_inf > 0 && std::isfinite(rep.ratio_sup);
  switch (side) {
    case Side::Two: {
      const double decades = std::max(1.0, std::log10(t_inf.rbegin()->first / t_inf.begin()->first));
      rep.stability = std::pow(rep.spread, 1.0 / decades);
      if (!(rep.stability <= opt.ceiling)) {
        ok = false;
        diag << "ratio spread " << fmt(rep.spread) << " is " << fmt(rep.stability) << " per decade of t, above "
             << fmt(opt.ceiling) << "; ";
      }
      break;
    }
    case Side::Lower:
      rep.stability = st_low;
      break;
    case Side::Upper:
      rep.stability = st_high;
      break;
  }
  if (side != Side::Two && !(rep.stability <= opt.ceiling)) {
    ok = false;
    diag << "fitted constant drifts by " << fmt(rep.stability) << " per decade of t; ";
  }
  if (skipped) {
    // a lower bound that underflows is trivially true there
    if (side != Side::Lower) ok = false;
    diag << skipped << " points where the envelope underflows; ";
  }
  // below the floor the density is noise, but the bound must stay consistent there
  std::size_t hidden = 0;
  for (const auto* s : low) {
    const double floor = opt.floor_rel * s->p0;
    const double sh = env.shape(env, s->t, s->x, s->h);
    if (side != Side::Upper && rep.ratio_inf * sh > floor + s->err) ++hidden;
    if (side != Side::Lower && rep.ratio_sup * sh < s->p - s->err) ++hidden;
  }
  if (hidden) {
    ok = false;
    diag << hidden << " sub-floor points contradict the fitted bound; ";
  }
  if (!low.empty()) diag << low.size() << " points below the noise floor excluded; ";
  rep.pass = ok;
  rep.diagnostic = diag.str();
  if (!rep.diagnostic.empty()) rep.diagnostic.resize(rep.diagnostic.size() - 2);
  return rep;
}

NearDiagonalFit fit_near_diagonal(const std::vector<Sample>& samples, int d, const FitOptions& opt) {
  if (samples.empty()) throw std::invalid_argument("fit_near_diagonal: no samples");
  double tmin = kInf, tmax = 0.0;
  for (const auto& s : samples) {
    tmin = std::min(tmin, s.t);
    tmax = std::max(tmax, s.t);
  }
  if (std::log10(tmax / tmin) < 3.0 - 1e-9)
    throw std::invalid_argument("fit_near_diagonal: t must span at least 3 decades");

  NearDiagonalFit out;
  double last_spread = kNaN;
  for (int k = 0; k <= 20; ++k) {
    const double theta = std::pow(2.0, -0.5 * k);
    double lo = kInf, hi = 0.0;
    const Sample *at_lo = nullptr, *at_hi = nullptr;
    std::set<double> ts;
    std::size_t n = 0;
    for (const auto& s : samples) {
      if (!(std::abs(s.x) < theta * s.h) && s.x != 0.0) continue;
      const double r = s.p * std::pow(s.h, d);
      ++n;
      ts.insert(s.t);
      if (r < lo) lo = r, at_lo = &s;
      if (r > hi) hi = r, at_hi = &s;
    }
    if (n == 0) break;
    last_spread = hi / lo;
    if (lo > 0 && last_spread <= opt.ceiling) {
      out.theta = theta;
      out.c_low = lo;
      out.c_high = hi;
      out.spread = last_spread;
      out.pass = true;
      FitReport& rep = out.report;
      rep.envelope = "near_diagonal_theta";
      rep.regime = regime_name(Regime::NearDiagonal);
      rep.side = "two-sided";
      rep.grid = std::to_string(ts.size()) + " t in [" + fmt(tmin) + ", " + fmt(tmax) + "], |x| < theta h(t)";
      rep.ratio_inf = lo;
      rep.ratio_sup = hi;
      rep.inf_t = at_lo->t;
      rep.inf_x = at_lo->x;
      rep.sup_t = at_hi->t;
      rep.sup_x = at_hi->x;
      rep.spread = last_spread;
      rep.stability = last_spread;
      rep.points = n;
      rep.constants = {{"theta", theta}, {"c_low", lo}, {"c_high", hi}};
      rep.pass = true;
      return out;
    }
  }
  out.report.envelope = "near_diagonal_theta";
  out.report.regime = regime_name(Regime::NearDiagonal);
  out.report.side = "two-sided";
  out.report.spread = last_spread;
  out.report.diagnostic = "no trial theta down to 2^-10 keeps the ratio spread within " + fmt(opt.ceiling) +
                          " (last spread " + fmt(last_spread) + ")";
  return out;
}

// --------------------------------------------------------------- certified

namespace {

// t Lambda(s) tabulated once; sup_j (s_j |x| - t Lambda_j) is a lower bound for
// D^2, so e^{-D^2} p_t(0) built from it is still an upper bound.
struct LaplaceTable {
  std::vector<double> s, lambda;

  explicit LaplaceTable(const LevyMeasure& nu) {
    const double radius = nu.radial().exp_moment_radius();
    if (radius == 0.0) return;
    const double s_max = std::isinf(radius) ? 50.0 / nu.support_radius() : 0.999 * radius;
    s = linspace(0.0, s_max, 2001);
    lambda.resize(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) lambda[j] = nu.laplace_exponent(Point(s[j], 0.0));
  }

  [[nodiscard]] double D2(double t, double x) const {
    double best = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) best = std::max(best, s[j] * std::abs(x) - t * lambda[j]);
    return best;
  }
};

}  // namespace

CertifiedReport check_certified(const SymbolTable& table, const std::vector<double>& ts,
                                const std::function<std::vector<double>(double, double)>& xs, double theta,
                                double tol, double corrupt) {
  if (table.dim() != 1) throw std::invalid_argument("check_certified: d = 1 only");
  if (!(theta > 0)) throw std::invalid_argument("check_certified: theta must be positive");
  const LaplaceTable lap(table.measure());
  GridSpec base;
  DensityCache cache(table, base);
  const long ks[] = {1, 2, 4, 8, 16};
  CertifiedReport rep;
  for (double t : ts) {
    const double h = table.h(t);
    const std::vector<double> x = xs(t, h);
    double need = 0.0;
    for (double v : x) need = std::max(need, std::abs(v));
    GridSpec spec;
    spec.x_max = std::max(need, 10.0 * h);
    const DensityGrid g = density_fourier(table, t, spec);
    const double p0 = g.values[0];
    for (long k : ks) {
      const double rho = theta * table.h(t / static_cast<double>(k)) / 4.0;
      cache.get(t / static_cast<double>(k), need / static_cast<double>(k) + 2.0 * rho);
    }
    for (double v : x) {
      ++rep.points;
      const double p = corrupt * g.at(v);
      const double upper = std::exp(-lap.D2(t, v)) * p0;
      if (p > upper + tol * p0) {
        ++rep.upper_violations;
        rep.violations.push_back({t, v, p, upper, "upper"});
      }
      double best = 0.0;
      bool any = false;
      for (long k : ks) {
        const double rho = theta * table.h(t / static_cast<double>(k)) / 4.0;
        const auto c = chaining_lower(table, t, v, k, rho, &cache);
        if (!c.vacuous) {
          any = true;
          best = std::max(best, c.value);
        }
      }
      if (!any) ++rep.vacuous_chains;
      if (best > p + tol * p0) {
        ++rep.lower_violations;
        rep.violations.push_back({t, v, p, best, "lower"});
      }
    }
  }
  rep.pass = rep.lower_violations == 0 && rep.upper_violations == 0;
  return rep;
}

// ----------------------------------------------------------- small reports

FitReport doubling_report(const DoublingReport& d, std::string name) {
  FitReport rep;
  rep.envelope = "doubling";
  rep.regime = std::move(name);
  rep.side = "diagnostic";
  rep.constants = {{"beta1", d.beta1_est}, {"beta2", d.beta2_est}, {"M1", d.M1_est}, {"M2", d.M2_est}};
  rep.points = d.witnesses.size();
  rep.pass = d.pass;
  if (!d.pass) rep.diagnostic = "profile violates the doubling condition (A2)";
  return rep;
}

FitReport psi_h_report(const SymbolTable& table, double lo, double hi) {
  FitReport rep;
  rep.envelope = "psi_over_H";
  rep.side = "two-sided";
  rep.grid = "frequency nodes in [" + fmt(lo) + ", " + fmt(hi) + "]";
  rep.ratio_inf = table.L0_fit(lo, hi);
  rep.ratio_sup = table.upper_ratio(lo, hi);
  rep.spread = rep.ratio_sup / rep.ratio_inf;
  rep.constants = {{"L0", rep.ratio_inf}};
  for (double r : table.radii())
    if (r >= lo * (1 - 1e-12) && r <= hi * (1 + 1e-12)) ++rep.points;
  std::ostringstream diag;
  bool ok = true;
  if (rep.ratio_sup > 2.0 * (1 + 1e-8)) {
    ok = false;
    diag << "Psi exceeds 2H (max ratio " << fmt(rep.ratio_sup) << ")";
  }
  if (!(rep.ratio_inf >= 0.05)) {
    ok = false;
    diag << (ok ? "" : "; ") << "inf Psi/H below 0.05";
  }
  rep.pass = ok;
  rep.diagnostic = diag.str();
  return rep;
}

FitReport certified_report(const CertifiedReport& c, std::string grid) {
  FitReport rep;
  rep.envelope = "certified_chain_concentration";
  rep.side = "two-sided";
  rep.grid = std::move(grid);
  rep.points = c.points;
  rep.constants = {{"lower_violations", static_cast<double>(c.lower_violations)},
                   {"upper_violations", static_cast<double>(c.upper_violations)},
                   {"vacuous_chains", static_cast<double>(c.vacuous_chains)}};
  rep.pass = c.pass;
  if (!c.pass) {
    std::ostringstream os;
    os << c.lower_violations << " lower and " << c.upper_violations << " upper violations";
    if (!c.violations.empty())
      os << "; first at t=" << fmt(c.violations.front().t) << " x=" << fmt(c.violations.front().x);
    rep.diagnostic = os.str();
  }
  return rep;
}

namespace {

FitReport a1_report(const SymbolTable& table, const std::vector<double>& ts) {
  const A1Report a = table.check_A1(ts);
  FitReport rep;
  rep.envelope = "A1_scaled_integral";
  rep.side = "diagnostic";
  rep.grid = std::to_string(ts.size()) + " t in [" + fmt(ts.front()) + ", " + fmt(ts.back()) + "]";
  const auto [lo, hi] = std::minmax_element(a.scaled_integral.begin(), a.scaled_integral.end());
  rep.ratio_inf = *lo;
  rep.ratio_sup = *hi;
  rep.spread = *hi / *lo;
  rep.points = a.t.size();
  rep.constants = {{"M0", a.M0_est}};
  rep.pass = a.pass;
  rep.diagnostic = a.diagnostic;
  return rep;
}

// Union of a near-diagonal refinement and a uniform sweep of [0, top].
std::function<std::vector<double>(double, double)> x_design(std::function<double(double, double)> top,
                                                            int n_wide, double near, int n_near) {
  return [top = std::move(top), n_wide, near, n_near](double t, double h) {
    std::vector<double> x = linspace(0.0, near * h, n_near);
    const double hi = top(t, h);
    if (hi > 0) {
      auto w = linspace(0.0, hi, n_wide);
      x.insert(x.end(), w.begin(), w.end());
    }
    std::erase_if(x, [hi, near, h](double v) { return v > std::max(hi, near * h); });
    return x;
  };
}

// Grids for fits reach far into the tails, so aliasing is pushed well below the floor.
GridSpec fine_spec() {
  GridSpec s;
  s.alias_tol = 1e-14;
  return s;
}

// Largest window the default plan resolves without aliasing.
double resolved_window(const SymbolTable& table, double t) {
  GridSpec s;
  s.enforce_horizon = false;
  return plan_grid(table, t, s).period;
}

void add(VerifyResult& res, FitReport rep, std::string regime = "") {
  if (!regime.empty()) rep.regime = std::move(regime);
  res.reports.push_back(std::move(rep));
}

FitReport failed_fit(const std::string& name, const std::exception& e) {
  FitReport rep;
  rep.envelope = name;
  rep.side = "two-sided";
  rep.diagnostic = e.what();
  return rep;
}

void finish(VerifyResult& res) {
  res.pass = std::all_of(res.reports.begin(), res.reports.end(), [](const FitReport& r) { return r.pass; });
}

std::vector<double> doubling_grid(double r_max) { return logspace(1e-4 * r_max, r_max, 81); }

}  // namespace

VerifyResult verify_truncated(const SymbolTable& table, const VerifyOptions& opt) {
  const LevyMeasure& nu = table.measure();
  if (!std::holds_alternative<TruncatedStable>(nu.radial().family()))
    throw std::invalid_argument("verify_truncated: truncated measure expected");
  VerifyResult res;
  res.family = nu.radial().family_name();
  const int d = nu.dim();
  const double r0 = nu.support_radius();
  const double m0 = second_moment(nu);
  const double c_star = 2.0 * std::numbers::e * m0 / r0;

  add(res, psi_h_report(table));
  add(res, doubling_report(doubling_check(nu.radial(), d, doubling_grid(r0)), "radial profile"));
  const auto ts = logspace(1e-3, 10.0, 25);
  add(res, a1_report(table, ts));

  // x up to the larger of 10 h(t_max) and 3 C^* t_max, capped by what each grid resolves
  const double x_cap = std::max(10.0 * table.h(ts.back()), 3.0 * c_star * ts.back());
  const auto samples = sample_densities(
      table, ts, x_design([&](double t, double) { return std::min(x_cap, resolved_window(table, t)); }, 400, 2.0, 41),
      fine_spec());

  const auto nd = fit_near_diagonal(samples, d, opt.fit);
  add(res, nd.report);
  if (!nd.pass) {
    finish(res);
    return res;
  }
  const double L0 = table.L0_fit();
  const RegimeThresholds th = thresholds_for(nu, nd.theta, L0, nd.theta);
  res.summary = {{"theta", nd.theta},   {"L0", L0},          {"eta_star", th.eta_star}, {"eta0", th.eta0},
                 {"C_star_upper", th.C_star_upper}, {"C_star_lower", th.C_star_lower}, {"t0", th.t0},
                 {"t1", th.t1},         {"r0", th.r0},       {"m0", th.m0},            {"kappa0", th.kappa0}};

  TruncatedConstants tc;
  auto run = [&](Envelope env, std::function<bool(const Sample&)> region = {}) {
    try {
      FitReport rep = fit_sandwich(env, samples, opt.fit, region);
      add(res, rep);
      return env;
    } catch (const std::invalid_argument& e) {
      add(res, failed_fit(env.name, e));
      return env;
    }
  };
  {
    Envelope e = run(make_near_diagonal(table, th));
    res.reports.back().regime = regime_name(Regime::NearDiagonal);
    tc.nd_low = e.slots["c_low"];
    tc.nd_high = e.slots["c_high"];
  }
  {
    Envelope e = run(make_levy_tail(table, th));
    res.reports.back().regime = regime_name(Regime::LevyTail);
    tc.lt_low = e.slots["c_low"];
    tc.lt_high = e.slots["c_high"];
  }
  {
    Envelope e = run(make_gaussian(table, th));
    res.reports.back().regime = regime_name(Regime::Gaussian);
    res.reports.back().constants["c4"] = e.slots["c2"];
    tc.c1 = e.slots["c1"];
    tc.c2 = tc.c4 = e.slots["c2"];
    tc.c3 = e.slots["c3"];
  }
  {
    Envelope e = run(make_expxlog(table, th));
    res.reports.back().regime = regime_name(Regime::ExpXLog);
    res.reports.back().constants["c9"] = e.slots["c6"];
    res.reports.back().constants["c10"] = e.slots["c7"];
    tc.c5 = e.slots["c5"];
    tc.c6 = tc.c9 = e.slots["c6"];
    tc.c7 = tc.c10 = e.slots["c7"];
    tc.c8 = e.slots["c8"];
  }
  for (const auto& [k, v] : std::map<std::string, double>{{"nd_low", tc.nd_low}, {"nd_high", tc.nd_high},
                                                          {"lt_low", tc.lt_low}, {"lt_high", tc.lt_high},
                                                          {"c1", tc.c1}, {"c2", tc.c2}, {"c3", tc.c3},
                                                          {"c5", tc.c5}, {"c6", tc.c6}, {"c7", tc.c7},
                                                          {"c8", tc.c8}})
    res.summary["truncated." + k] = v;

  run(make_main1(table, th.t1, th.C_star_upper));
  run(make_main2(r0, r0 / (2.0 * m0), th.C_star_upper));
  run(make_levy_lower(table, nd.theta, nd.theta / 2.0));
  run(make_prop1_upper(table, static_cast<double>(d), radial_lebesgue_density(nu), 1.0));

  if (opt.certified && d == 1) {
    const auto cts = logspace(0.05, 5.0, opt.certified_n);
    auto cxs = [&](double, double h) { return linspace(0.0, 4.0 * h + r0, opt.certified_n); };
    const auto c = check_certified(table, cts, cxs, nd.theta, opt.tol);
    add(res, certified_report(c, std::to_string(opt.certified_n) + "x" + std::to_string(opt.certified_n) +
                                     " grid, t in [0.05, 5], |x| <= 4 h(t) + r0"));
  }
  finish(res);
  return res;
}

VerifyResult verify_tempered(const SymbolTable& table, const VerifyOptions& opt) {
  const LevyMeasure& nu = table.measure();
  if (!std::holds_alternative<TemperedStable>(nu.radial().family()))
    throw std::invalid_argument("verify_tempered: tempered measure expected");
  VerifyResult res;
  res.family = nu.radial().family_name();
  const int d = nu.dim();
  add(res, psi_h_report(table));

  const auto nts = logspace(0.01, 10.0, 16);
  const auto nd = fit_near_diagonal(
      sample_densities(table, nts, [](double, double h) { return linspace(0.0, 1.2 * h, 25); }), d, opt.fit);
  add(res, nd.report);
  res.summary["theta"] = nd.theta;
  res.summary["L0"] = table.L0_fit();

  // smallest t0 for which both density-form bounds hold on t > t0
  const std::vector<double> scan_t = {0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0};
  auto xs = [](double, double) { return linspace(0.0, 40.0, 401); };
  const auto scan = sample_densities(table, scan_t, xs, fine_spec());
  double t0_fit = kNaN;
  for (double cand : scan_t) {
    try {
      Envelope lo = make_tempered_lower(table, cand * (1 - 1e-9));
      Envelope up = make_tempered_upper(table, cand * (1 - 1e-9));
      if (fit_sandwich(lo, scan, opt.fit).pass && fit_sandwich(up, scan, opt.fit).pass) {
        t0_fit = cand * (1 - 1e-9);
        break;
      }
    } catch (const std::invalid_argument&) {
    }
  }
  res.summary["t0_fit"] = std::isnan(t0_fit) ? kNaN : t0_fit;
  const double t0 = std::isnan(t0_fit) ? 5.0 * (1 - 1e-9) : std::min(t0_fit, 5.0 * (1 - 1e-9));

  const std::vector<double> ts = {5.0, 10.0, 20.0};
  const auto samples = sample_densities(table, ts, xs, fine_spec());
  Envelope lo = make_tempered_lower(table, t0);
  Envelope up = make_tempered_upper(table, t0);
  Envelope ball = make_tempered_ball(table, t0, 1.0, 0.5, 2.0);
  for (Envelope* e : {&lo, &up, &ball}) {
    try {
      add(res, fit_sandwich(*e, samples, opt.fit));
    } catch (const std::invalid_argument& ex) {
      add(res, failed_fit(e->name, ex));
    }
  }
  {
    // one sandwich: lower density form below p below the upper form
    FitReport rep;
    rep.envelope = "tempered_sandwich";
    rep.side = "two-sided";
    rep.grid = "t in {5, 10, 20}, |x| <= 40";
    const auto& a = res.reports[res.reports.size() - 3];
    const auto& b = res.reports[res.reports.size() - 2];
    rep.constants = {{"c7", lo.slot("c7")}, {"c8", lo.slot("c8")}, {"c9", lo.slot("c9")},
                     {"c1", up.slot("c1")}, {"c2", up.slot("c2")}};
    std::size_t bad = 0;
    for (const auto& s : samples) {
      const double l = lo.lower(s.t, s.x), u = up.upper(s.t, s.x);
      if (l > s.p + s.err + opt.fit.floor_rel * s.p0 || u < s.p - s.err) ++bad;
      ++rep.points;
    }
    rep.pass = a.pass && b.pass && bad == 0;
    if (bad) rep.diagnostic = std::to_string(bad) + " points outside the fitted sandwich";
    add(res, rep);
  }
  res.summary["tempered.c1"] = up.slot("c1");
  res.summary["tempered.c2"] = up.slot("c2");
  res.summary["tempered.c7"] = lo.slot("c7");
  res.summary["tempered.c8"] = lo.slot("c8");
  res.summary["tempered.c9"] = lo.slot("c9");
  finish(res);
  return res;
}

VerifyResult verify_high_intensity(const SymbolTable& table, const VerifyOptions& opt) {
  const LevyMeasure& nu = table.measure();
  const auto* fam = std::get_if<HighIntensity>(&nu.radial().family());
  if (!fam) throw std::invalid_argument("verify_high_intensity: high-intensity measure expected");
  VerifyResult res;
  res.family = nu.radial().family_name();
  const int d = nu.dim();
  add(res, psi_h_report(table));

  const auto nts = logspace(1e-4, 0.5, 16);
  const auto nd = fit_near_diagonal(
      sample_densities(table, nts, [](double, double h) { return linspace(0.0, 1.2 * h, 25); }), d, opt.fit);
  add(res, nd.report);
  res.summary["theta"] = nd.theta;
  res.summary["L0"] = table.L0_fit();

  {
    // h(t) / (t^{1/2} log(2/t)^{(1-beta)/2}) on [1e-6, 1e-1]
    FitReport rep;
    rep.envelope = "scale_asymptotics";
    rep.side = "two-sided";
    rep.grid = "51 t in [1e-6, 0.1]";
    double lo = kInf, hi = 0.0;
    for (double t : logspace(1e-6, 0.1, 51)) {
      const double r = table.h(t) / (std::sqrt(t) * std::pow(std::log(2.0 / t), 0.5 * (1.0 - fam->beta)));
      if (r < lo) lo = r, rep.inf_t = t;
      if (r > hi) hi = r, rep.sup_t = t;
      ++rep.points;
    }
    rep.ratio_inf = lo;
    rep.ratio_sup = hi;
    rep.spread = hi / lo;
    rep.constants = {{"c", lo}, {"C", hi}};
    rep.pass = rep.spread <= 10.0;
    if (!rep.pass) rep.diagnostic = "C/c exceeds 10";
    add(res, rep);
  }

  const auto ts = logspace(1e-4, 0.5, 12);
  const auto samples = sample_densities(table, ts, [](double, double h) {
    auto x = linspace(0.0, 0.99, 200);
    auto near = linspace(0.0, std::min(3.0 * h, 0.99), 31);
    x.insert(x.end(), near.begin(), near.end());
    return x;
  }, fine_spec());
  Envelope lo = make_high_intensity_lower(table);
  Envelope up = make_high_intensity_upper(table);
  for (Envelope* e : {&lo, &up}) {
    try {
      add(res, fit_sandwich(*e, samples, opt.fit));
    } catch (const std::invalid_argument& ex) {
      add(res, failed_fit(e->name, ex));
    }
  }
  res.summary["high_intensity.low"] = lo.slot("c8");
  res.summary["high_intensity.c7"] = lo.slot("c7");
  res.summary["high_intensity.high"] = up.slot("c8");
  res.summary["high_intensity.c9"] = up.slot("c9");
  finish(res);
  return res;
}

VerifyResult verify_measure(const SymbolTable& table, const VerifyOptions& opt) {
  const auto& fam = table.measure().radial().family();
  if (std::holds_alternative<TruncatedStable>(fam)) return verify_truncated(table, opt);
  if (std::holds_alternative<TemperedStable>(fam)) return verify_tempered(table, opt);
  if (std::holds_alternative<HighIntensity>(fam)) return verify_high_intensity(table, opt);

  // custom profile: scale comparison, doubling and the near-diagonal fit
  const LevyMeasure& nu = table.measure();
  VerifyResult res;
  res.family = nu.radial().family_name();
  add(res, psi_h_report(table));
  const auto& prof = std::get<CustomProfile>(fam);
  const double lo = prof.extend_below ? 1e-3 * prof.s.front() : prof.s.front();
  const double hi = std::isfinite(nu.support_radius()) ? nu.support_radius() : prof.s.back();
  add(res, doubling_report(doubling_check(nu.radial(), nu.dim(), logspace(lo, hi * (1 - 1e-9), 81)),
                           "radial profile"));
  const double t_hi = std::isfinite(table.t_p()) ? 0.5 * table.t_p() : 10.0;
  // heavy power tails make the default alias budget very expensive; the fit
  // only reads |x| <= 1.2 h(t), where 1e-6 aliasing is invisible at ceiling 100
  GridSpec spec;
  spec.alias_tol = 1e-6;
  const auto nd = fit_near_diagonal(
      sample_densities(table, logspace(t_hi * 1e-3, t_hi, 16),
                       [](double, double h) { return linspace(0.0, 1.2 * h, 25); }, spec),
      nu.dim(), opt.fit);
  add(res, nd.report);
  res.summary["theta"] = nd.theta;
  res.summary["L0"] = table.L0_fit();
  finish(res);
  return res;
}

// ---------------------------------------------------------------- emission

namespace {

ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

double from_num(const ordered_json& j) { return j.is_null() ? kNaN : j.get<double>(); }

ordered_json to_json(const FitReport& r) {
  ordered_json j;
  j["envelope"] = r.envelope;
  j["regime"] = r.regime;
  j["side"] = r.side;
  j["grid"] = r.grid;
  j["ratio_inf"] = num(r.ratio_inf);
  j["ratio_inf_at"] = {num(r.inf_t), num(r.inf_x)};
  j["ratio_sup"] = num(r.ratio_sup);
  j["ratio_sup_at"] = {num(r.sup_t), num(r.sup_x)};
  ordered_json c = ordered_json::object();
  for (const auto& [k, v] : r.constants) c[k] = num(v);
  j["constants"] = c;
  j["spread"] = num(r.spread);
  j["stability"] = num(r.stability);
  j["points"] = r.points;
  j["excluded"] = r.excluded;
  j["pass"] = r.pass;
  j["diagnostic"] = r.diagnostic;
  return j;
}

FitReport fit_from_json(const ordered_json& j) {
  FitReport r;
  r.envelope = j.at("envelope").get<std::string>();
  r.regime = j.at("regime").get<std::string>();
  r.side = j.at("side").get<std::string>();
  r.grid = j.at("grid").get<std::string>();
  r.ratio_inf = from_num(j.at("ratio_inf"));
  r.inf_t = from_num(j.at("ratio_inf_at").at(0));
  r.inf_x = from_num(j.at("ratio_inf_at").at(1));
  r.ratio_sup = from_num(j.at("ratio_sup"));
  r.sup_t = from_num(j.at("ratio_sup_at").at(0));
  r.sup_x = from_num(j.at("ratio_sup_at").at(1));
  for (const auto& [k, v] : j.at("constants").items()) r.constants[k] = from_num(v);
  r.spread = from_num(j.at("spread"));
  r.stability = from_num(j.at("stability"));
  r.points = j.at("points").get<std::size_t>();
  r.excluded = j.at("excluded").get<std::size_t>();
  r.pass = j.at("pass").get<bool>();
  r.diagnostic = j.at("diagnostic").get<std::string>();
  return r;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string report_json(const std::vector<VerifyResult>& results) {
  ordered_json doc;
  doc["pass"] = std::all_of(results.begin(), results.end(), [](const VerifyResult& r) { return r.pass; });
  ordered_json arr = ordered_json::array();
  for (const auto& res : results) {
    ordered_json j;
    j["family"] = res.family;
    j["pass"] = res.pass;
    ordered_json s = ordered_json::object();
    for (const auto& [k, v] : res.summary) s[k] = num(v);
    j["summary"] = s;
    ordered_json reps = ordered_json::array();
    for (const auto& r : res.reports) reps.push_back(to_json(r));
    j["reports"] = reps;
    arr.push_back(j);
  }
  doc["results"] = arr;
  return doc.dump(2) + "\n";
}

std::vector<VerifyResult> parse_report_json(const std::string& text) {
  const auto doc = ordered_json::parse(text);
  std::vector<VerifyResult> out;
  for (const auto& j : doc.at("results")) {
    VerifyResult res;
    res.family = j.at("family").get<std::string>();
    res.pass = j.at("pass").get<bool>();
    for (const auto& [k, v] : j.at("summary").items()) res.summary[k] = from_num(v);
    for (const auto& r : j.at("reports")) res.reports.push_back(fit_from_json(r));
    out.push_back(std::move(res));
  }
  return out;
}

std::string report_csv(const std::vector<VerifyResult>& results) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "family,envelope,regime,side,ratio_inf,ratio_sup,spread,stability,points,excluded,pass,diagnostic\n";
  for (const auto& res : results)
    for (const auto& r : res.reports)
      os << csv_field(res.family) << ',' << csv_field(r.envelope) << ',' << csv_field(r.regime) << ','
         << r.side << ',' << r.ratio_inf << ',' << r.ratio_sup << ',' << r.spread << ',' << r.stability << ','
         << r.points << ',' << r.excluded << ',' << (r.pass ? "true" : "false") << ','
         << csv_field(r.diagnostic) << '\n';
  return os.str();
}

void emit_report(const std::vector<VerifyResult>& results, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + p.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed: " + p.string());
  };
  write(dir / "report.json", report_json(results));
  write(dir / "report.csv", report_csv(results));
}

}  // namespace levykernel
