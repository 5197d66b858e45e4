#include "levykernel/envelopes.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace levykernel {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double xlog(double x, double t, double c3) {
  const double ax = std::abs(x);
  return ax == 0.0 ? 0.0 : ax * std::log(c3 * ax / t);
}

const TemperedStable& tempered_family(const SymbolTable& table) {
  const auto* fam = std::get_if<TemperedStable>(&table.measure().radial().family());
  if (!fam) throw std::invalid_argument("tempered envelope needs a tempered measure");
  return *fam;
}

const HighIntensity& high_family(const SymbolTable& table) {
  const auto* fam = std::get_if<HighIntensity>(&table.measure().radial().family());
  if (!fam) throw std::invalid_argument("high-intensity envelope needs a high-intensity measure");
  return *fam;
}

Envelope base(const SymbolTable& table, std::string name) {
  Envelope e;
  e.name = std::move(name);
  e.h = [&table](double t) { return table.h(t); };
  return e;
}

}  // namespace

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::NearDiagonal: return "near_diagonal";
    case Regime::LevyTail: return "levy_tail";
    case Regime::Gaussian: return "gaussian";
    case Regime::ExpXLog: return "expxlog";
  }
  return "?";
}

RegimeThresholds RegimeThresholds::compute(double r0, double m0, double kappa0, double theta, double L0,
                                           double eta_star) {
  if (!(r0 > 0) || !(m0 > 0) || !(L0 > 0) || !(theta > 0))
    throw std::invalid_argument("thresholds need positive r0, m0, L0 and theta");
  RegimeThresholds th;
  th.r0 = r0;
  th.m0 = m0;
  th.kappa0 = kappa0;
  th.theta = theta;
  th.L0 = L0;
  th.eta_star = eta_star;
  th.C_star_upper = 2.0 * std::numbers::e * m0 / r0;
  th.t1 = r0 / th.C_star_upper;
  th.eta0 = std::min({theta, L0 / 216.0, 1.0});
  th.C_star_lower = th.eta0 * L0 * m0 / (4.0 * r0);
  th.t0 = 4.0 * r0 * r0 / (th.eta0 * L0 * m0);
  return th;
}

RegimeThresholds thresholds_for(const LevyMeasure& nu, double theta, double L0, double eta_star) {
  const double r0 = nu.support_radius();
  if (!std::isfinite(r0)) throw std::invalid_argument("regime thresholds need a measure with bounded support");
  const double kappa0 = radial_lebesgue_density(nu)(r0);
  return RegimeThresholds::compute(r0, second_moment(nu), kappa0, theta, L0, eta_star);
}

Regime classify(const RegimeThresholds& th, double t, double x, double h_t) {
  const double ax = std::abs(x);
  if (ax <= th.eta_star * h_t) return Regime::NearDiagonal;
  if (ax > std::max(th.r0, th.C_star_upper * t)) return Regime::ExpXLog;
  if (t <= th.t1) return Regime::LevyTail;
  return Regime::Gaussian;
}

double env_main1(double h_t, int d, double t, double x, double c1, double c2) {
  return c1 * std::pow(h_t, -d) * std::exp(-c2 * x * x / t);
}

double env_main2(double t, double x, double c1, double c2, double c3) {
  return c1 * std::exp(-c2 * xlog(x, t, c3));
}

double env_levy_lower(const LevyMeasure& nu, double h_t, double t, double x, double L1, double L2) {
  return L1 * t * std::pow(h_t, -nu.dim()) * ball_mass(nu, x, L2 * h_t);
}

double env_prop1_upper(double h_t, int d, double t, double x, double gamma,
                       const std::function<double(double)>& f, double c1, double c2, double c3) {
  const double u = std::abs(x) / h_t;
  const double fx = x == 0.0 ? kInf : f(std::abs(x) / 4.0);
  const double inner = t * std::pow(h_t, gamma) * fx + std::exp(-c2 * u * std::log1p(c3 * u));
  return c1 * std::pow(h_t, -d) * std::min(1.0, inner);
}

double env_tempered_lower(int d, double t, double x, double beta, double c7, double c8, double c9) {
  const double ax = std::abs(x);
  return c7 * std::pow(t, -0.5 * d) * (std::exp(-c8 * ax * ax / t) + std::exp(-c9 * std::pow(ax, beta)));
}

double env_tempered_upper(int d, double t, double x, double m, double beta, double c1, double c2) {
  const double ax = std::abs(x);
  return c1 * std::pow(t, -0.5 * d) *
         (std::exp(-c2 * ax * ax / t) + std::exp(-m * std::pow(ax, beta) / (2.0 * std::pow(4.0, beta))));
}

double env_tempered_ball(const LevyMeasure& nu, double t, double x, double c3, double c4, double c5) {
  return c3 * std::pow(t, -0.5 * nu.dim()) *
         (std::exp(-c4 * x * x / t) + t * ball_mass(nu, x, c5 * std::sqrt(t)));
}

namespace {

double hi_cap(int d, double beta, double t) {
  return std::pow(t, -0.5 * d) * std::pow(std::log(2.0 / t), 0.5 * d * (beta - 1.0));
}

double hi_jump(int d, double beta, double t, double x) {
  const double ax = std::abs(x);
  if (ax == 0.0) return kInf;
  return t / (std::pow(ax, d + 2) * std::pow(std::log(2.0 / ax), beta));
}

}  // namespace

double env_high_intensity_lower(int d, double beta, double h_t, double t, double x, double c8, double c7) {
  const double u = std::abs(x) / h_t;
  return c8 * std::min(hi_cap(d, beta, t), hi_jump(d, beta, t, x) + std::pow(h_t, -d) * std::exp(-c7 * u * u));
}

double env_high_intensity_upper(int d, double beta, double h_t, double t, double x, double c8, double c9,
                                double c10) {
  const double u = std::abs(x) / h_t;
  return c8 * std::min(hi_cap(d, beta, t),
                       hi_jump(d, beta, t, x) + std::pow(h_t, -d) * std::exp(-c9 * u * std::log1p(c10 * u)));
}

// ------------------------------------------------------------------ Envelope

double Envelope::slot(const std::string& key) const {
  const auto it = slots.find(key);
  if (it == slots.end()) throw std::out_of_range("envelope " + name + " has no slot " + key);
  return it->second;
}

double Envelope::lower(double t, double x) const {
  if (lower_slot.empty()) throw std::logic_error("envelope " + name + " claims no lower bound");
  const double ht = h(t);
  if (!contains(t, x, ht)) return kNaN;
  return slot(lower_slot) * shape(*this, t, x, ht);
}

double Envelope::upper(double t, double x) const {
  if (upper_slot.empty()) throw std::logic_error("envelope " + name + " claims no upper bound");
  const double ht = h(t);
  if (!contains(t, x, ht)) return kNaN;
  return slot(upper_slot) * shape(*this, t, x, ht);
}

Envelope make_main1(const SymbolTable& table, double c3, double c4) {
  Envelope e = base(table, "main1");
  e.slots = {{"c1", kNaN}, {"c2", 1.0}, {"c3", c3}, {"c4", c4}};
  e.lower_slot = "c1";
  e.rate_slots = {"c2"};
  const int d = table.dim();
  e.shape = [d](const Envelope& s, double t, double x, double h) { return env_main1(h, d, t, x, 1.0, s.slot("c2")); };
  e.valid = [](const Envelope& s, double t, double x, double) {
    return t > s.slot("c3") && std::abs(x) <= s.slot("c4") * t;
  };
  return e;
}

Envelope make_main2(double r0, double c3, double c4) {
  Envelope e;
  e.name = "main2";
  e.h = [](double) { return 1.0; };
  e.slots = {{"c1", kNaN}, {"c2", 1.0}, {"c3", c3}, {"c4", c4}, {"r0", r0}};
  e.lower_slot = "c1";
  e.rate_slots = {"c2"};
  e.shape = [](const Envelope& s, double t, double x, double) { return env_main2(t, x, 1.0, s.slot("c2"), s.slot("c3")); };
  e.valid = [](const Envelope& s, double t, double x, double) {
    return std::abs(x) >= std::max(s.slot("r0"), s.slot("c4") * t);
  };
  return e;
}

Envelope make_levy_lower(const SymbolTable& table, double eta, double L2) {
  if (!(L2 > 0) || !(L2 < eta)) throw std::invalid_argument("levy lower envelope needs 0 < L2 < eta");
  Envelope e = base(table, "levy_lower");
  e.slots = {{"L1", kNaN}, {"L2", L2}, {"eta", eta}};
  e.lower_slot = "L1";
  const LevyMeasure* nu = &table.measure();
  e.shape = [nu](const Envelope& s, double t, double x, double h) { return env_levy_lower(*nu, h, t, x, 1.0, s.slot("L2")); };
  const double tp = table.t_p();
  e.valid = [tp](const Envelope& s, double t, double x, double h) { return t < tp && std::abs(x) >= s.slot("eta") * h; };
  return e;
}

Envelope make_prop1_upper(const SymbolTable& table, double gamma, std::function<double(double)> f, double c3) {
  Envelope e = base(table, "prop1_upper");
  e.slots = {{"c1", kNaN}, {"c2", 1.0}, {"c3", c3}, {"gamma", gamma}};
  e.upper_slot = "c1";
  e.rate_slots = {"c2"};
  const int d = table.dim();
  e.shape = [d, f = std::move(f)](const Envelope& s, double t, double x, double h) {
    return env_prop1_upper(h, d, t, x, s.slot("gamma"), f, 1.0, s.slot("c2"), s.slot("c3"));
  };
  const double tp = table.t_p();
  e.valid = [tp](const Envelope&, double t, double, double) { return t < tp; };
  return e;
}

namespace {

Envelope regime_envelope(const SymbolTable& table, const RegimeThresholds& th, Regime r, std::string name) {
  Envelope e = base(table, std::move(name));
  e.valid = [th, r](const Envelope&, double t, double x, double h) { return classify(th, t, x, h) == r; };
  return e;
}

}  // namespace

Envelope make_near_diagonal(const SymbolTable& table, const RegimeThresholds& th) {
  Envelope e = regime_envelope(table, th, Regime::NearDiagonal, "near_diagonal");
  e.slots = {{"c_low", kNaN}, {"c_high", kNaN}};
  e.lower_slot = "c_low";
  e.upper_slot = "c_high";
  const int d = table.dim();
  e.shape = [d](const Envelope&, double, double, double h) { return std::pow(h, -d); };
  return e;
}

Envelope make_levy_tail(const SymbolTable& table, const RegimeThresholds& th) {
  Envelope e = regime_envelope(table, th, Regime::LevyTail, "levy_tail");
  e.slots = {{"c_low", kNaN}, {"c_high", kNaN}};
  e.lower_slot = "c_low";
  e.upper_slot = "c_high";
  auto f = radial_lebesgue_density(table.measure());
  e.shape = [f](const Envelope&, double t, double x, double) { return t * f(std::abs(x)); };
  return e;
}

Envelope make_gaussian(const SymbolTable& table, const RegimeThresholds& th) {
  Envelope e = regime_envelope(table, th, Regime::Gaussian, "gaussian");
  // one rate for both sides, so c4 = c2 after a fit
  e.slots = {{"c1", kNaN}, {"c2", 1.0 / th.m0}, {"c3", kNaN}};
  e.lower_slot = "c1";
  e.upper_slot = "c3";
  e.rate_slots = {"c2"};
  const int d = table.dim();
  e.shape = [d](const Envelope& s, double t, double x, double h) { return env_main1(h, d, t, x, 1.0, s.slot("c2")); };
  return e;
}

Envelope make_expxlog(const SymbolTable& table, const RegimeThresholds& th) {
  Envelope e = regime_envelope(table, th, Regime::ExpXLog, "expxlog");
  // c7 = c10 = r0/(2 m0) puts c7|x|/t >= e on the whole regime
  e.slots = {{"c5", kNaN}, {"c6", 2.0 / th.r0}, {"c7", th.r0 / (2.0 * th.m0)}, {"c8", kNaN}};
  e.lower_slot = "c5";
  e.upper_slot = "c8";
  e.rate_slots = {"c6"};
  e.shape = [](const Envelope& s, double t, double x, double) { return env_main2(t, x, 1.0, s.slot("c6"), s.slot("c7")); };
  return e;
}

Envelope make_tempered_lower(const SymbolTable& table, double t0) {
  const auto& fam = tempered_family(table);
  Envelope e = base(table, "tempered_lower");
  e.slots = {{"c7", kNaN}, {"c8", 1.0}, {"c9", fam.m}, {"t0", t0}};
  e.lower_slot = "c7";
  e.rate_slots = {"c8", "c9"};
  const int d = table.dim();
  const double beta = fam.beta;
  e.shape = [d, beta](const Envelope& s, double t, double x, double) {
    return env_tempered_lower(d, t, x, beta, 1.0, s.slot("c8"), s.slot("c9"));
  };
  e.valid = [](const Envelope& s, double t, double, double) { return t > s.slot("t0"); };
  return e;
}

Envelope make_tempered_upper(const SymbolTable& table, double t0) {
  const auto& fam = tempered_family(table);
  Envelope e = base(table, "tempered_upper");
  e.slots = {{"c1", kNaN}, {"c2", 1.0}, {"t0", t0}};
  e.upper_slot = "c1";
  e.rate_slots = {"c2"};
  const int d = table.dim();
  const double m = fam.m, beta = fam.beta;
  e.shape = [d, m, beta](const Envelope& s, double t, double x, double) {
    return env_tempered_upper(d, t, x, m, beta, 1.0, s.slot("c2"));
  };
  e.valid = [](const Envelope& s, double t, double, double) { return t > s.slot("t0"); };
  return e;
}

Envelope make_tempered_ball(const SymbolTable& table, double t0, double eta, double c5, double c6) {
  tempered_family(table);
  Envelope e = base(table, "tempered_ball");
  e.slots = {{"c3", kNaN}, {"c4", 1.0}, {"c5", c5}, {"c6", c6}, {"eta", eta}, {"t0", t0}};
  e.lower_slot = "c3";
  e.rate_slots = {"c4"};
  const LevyMeasure* nu = &table.measure();
  e.shape = [nu](const Envelope& s, double t, double x, double) {
    return env_tempered_ball(*nu, t, x, 1.0, s.slot("c4"), s.slot("c5"));
  };
  e.valid = [](const Envelope& s, double t, double x, double) {
    const double ax = std::abs(x);
    return t > s.slot("t0") && ax >= s.slot("eta") * std::sqrt(t) && ax <= s.slot("c6") * t;
  };
  return e;
}

Envelope make_high_intensity_lower(const SymbolTable& table) {
  const double beta = high_family(table).beta;
  Envelope e = base(table, "high_intensity_lower");
  e.slots = {{"c8", kNaN}, {"c7", 1.0}};
  e.lower_slot = "c8";
  e.rate_slots = {"c7"};
  const int d = table.dim();
  e.shape = [d, beta](const Envelope& s, double t, double x, double h) {
    return env_high_intensity_lower(d, beta, h, t, x, 1.0, s.slot("c7"));
  };
  e.valid = [](const Envelope&, double t, double x, double) { return t < 1.0 && std::abs(x) < 1.0; };
  return e;
}

Envelope make_high_intensity_upper(const SymbolTable& table) {
  const double beta = high_family(table).beta;
  Envelope e = base(table, "high_intensity_upper");
  e.slots = {{"c8", kNaN}, {"c9", 1.0}, {"c10", 1.0}};
  e.upper_slot = "c8";
  e.rate_slots = {"c9"};
  const int d = table.dim();
  e.shape = [d, beta](const Envelope& s, double t, double x, double h) {
    return env_high_intensity_upper(d, beta, h, t, x, 1.0, s.slot("c9"), s.slot("c10"));
  };
  e.valid = [](const Envelope&, double t, double x, double) { return t < 1.0 && std::abs(x) < 1.0; };
  return e;
}

std::function<double(double)> radial_lebesgue_density(const LevyMeasure& nu) {
  const double R = nu.support_radius();
  return [&nu, R](double s) {
    if (std::isfinite(R) && s >= R) s = R * (1.0 - 1e-12);
    return nu.lebesgue_density(Point(s, 0.0));
  };
}

Bounds env_truncated(const SymbolTable& table, const RegimeThresholds& th, const TruncatedConstants& c, double t,
                     double x) {
  const int d = table.dim();
  const double h = table.h(t);
  Bounds b;
  b.regime = classify(th, t, x, h);
  switch (b.regime) {
    case Regime::NearDiagonal:
      b.lower = c.nd_low * std::pow(h, -d);
      b.upper = c.nd_high * std::pow(h, -d);
      break;
    case Regime::LevyTail: {
      const double f = radial_lebesgue_density(table.measure())(std::abs(x));
      b.lower = c.lt_low * t * f;
      b.upper = c.lt_high * t * f;
      break;
    }
    case Regime::Gaussian:
      b.lower = env_main1(h, d, t, x, c.c1, c.c2);
      b.upper = env_main1(h, d, t, x, c.c3, c.c4);
      break;
    case Regime::ExpXLog:
      b.lower = env_main2(t, x, c.c5, c.c6, c.c7);
      b.upper = env_main2(t, x, c.c8, c.c9, c.c10);
      break;
  }
  return b;
}

TemperedBounds env_tempered(const LevyMeasure& nu, const TemperedConstants& c, double t, double x) {
  if (!(t > c.t0)) throw std::domain_error("tempered envelope: t must exceed t0");
  TemperedBounds b;
  b.lower = env_tempered_lower(nu.dim(), t, x, c.beta, c.c7, c.c8, c.c9);
  // the ball-mass form needs B(x, c5 sqrt t) clear of the origin
  b.lower_ball = std::abs(x) > c.c5 * std::sqrt(t) ? env_tempered_ball(nu, t, x, c.c3, c.c4, c.c5) : kNaN;
  b.upper = env_tempered_upper(nu.dim(), t, x, c.m, c.beta, c.c1, c.c2);
  return b;
}

Sandwich env_high_intensity(const SymbolTable& table, const HighIntensityConstants& c, double t, double x) {
  if (!(t < 1.0) || !(std::abs(x) < 1.0)) throw std::domain_error("high-intensity envelope needs t < 1 and |x| < 1");
  const double h = table.h(t);
  const int d = table.dim();
  return {env_high_intensity_lower(d, c.beta, h, t, x, c.low, c.c7),
          env_high_intensity_upper(d, c.beta, h, t, x, c.high, c.c9, c.c10)};
}

double tempered_crossover(double t, double c, double m, double beta) {
  if (!(beta < 2.0)) throw std::invalid_argument("crossover needs beta < 2");
  const double k = m / (2.0 * std::pow(4.0, beta));
  return std::pow(k * t / c, 1.0 / (2.0 - beta));
}

}  // namespace levykernel
