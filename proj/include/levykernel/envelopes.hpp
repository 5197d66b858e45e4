#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "levykernel/levy_measure.hpp"
#include "levykernel/symbol.hpp"

namespace levykernel {

enum class Regime { NearDiagonal, LevyTail, Gaussian, ExpXLog };

const char* regime_name(Regime r);

/// Regime boundaries of the truncated two-sided estimate.
struct RegimeThresholds {
  double eta_star = 0.0;
  double C_star_lower = 0.0;  // C_*
  double C_star_upper = 0.0;  // C^*
  double t0 = 0.0;
  double t1 = 0.0;
  double r0 = 0.0;
  double m0 = 0.0;
  double kappa0 = 0.0;
  double theta = 0.0;
  double L0 = 0.0;
  double eta0 = 0.0;

  /// C^* = 2e m0/r0, t1 = r0/C^*, eta0 = theta ^ L0/216 ^ 1,
  /// C_* = eta0 L0 m0/(4 r0), t0 = 4 r0^2/(eta0 L0 m0).
  static RegimeThresholds compute(double r0, double m0, double kappa0, double theta, double L0,
                                  double eta_star);
};

/// Thresholds for a truncated measure, with theta and L0 supplied by fits.
RegimeThresholds thresholds_for(const LevyMeasure& nu, double theta, double L0, double eta_star);

/// The exp-xlog predicate is tested first (the paper's cases 3 and 4 overlap
/// near t1); boundary points go to the smaller-|x| regime.
Regime classify(const RegimeThresholds& th, double t, double x, double h_t);
inline Regime classify(const RegimeThresholds& th, const SymbolTable& table, double t, double x) {
  return classify(th, t, x, table.h(t));
}

// Closed forms. Every constant is an argument; nothing is hardcoded.

double env_main1(double h_t, int d, double t, double x, double c1, double c2);
double env_main2(double t, double x, double c1, double c2, double c3);
double env_levy_lower(const LevyMeasure& nu, double h_t, double t, double x, double L1, double L2);
double env_prop1_upper(double h_t, int d, double t, double x, double gamma,
                       const std::function<double(double)>& f, double c1, double c2, double c3);
/// Lower density form c7 t^{-d/2}(e^{-c8 x^2/t} + e^{-c9 |x|^beta}).
double env_tempered_lower(int d, double t, double x, double beta, double c7, double c8, double c9);
/// Upper form c1 t^{-d/2}(e^{-c2 x^2/t} + e^{-m |x|^beta / (2 4^beta)}).
double env_tempered_upper(int d, double t, double x, double m, double beta, double c1, double c2);
/// Ball-mass lower form c3 t^{-d/2}(e^{-c4 x^2/t} + t nu(B(x, c5 sqrt t))).
double env_tempered_ball(const LevyMeasure& nu, double t, double x, double c3, double c4, double c5);
/// min{t^{-d/2} log(2/t)^{d(beta-1)/2}, t/(|x|^{d+2} log(2/|x|)^beta) + tail}, with
/// tail = h^{-d} e^{-c (|x|/h)^2} (lower) or h^{-d} e^{-c |x|/h log(1 + c' |x|/h)} (upper).
double env_high_intensity_lower(int d, double beta, double h_t, double t, double x, double c8,
                                double c7);
double env_high_intensity_upper(int d, double beta, double h_t, double t, double x, double c8,
                                double c9, double c10);

/// Named bound with constant slots. `lower_slot` / `upper_slot` name the
/// multiplicative constants of the sides the bound claims; `rate_slots` are
/// shape parameters the fitter searches over.
struct Envelope {
  std::string name;
  std::map<std::string, double> slots;
  std::string lower_slot;
  std::string upper_slot;
  std::vector<std::string> rate_slots;
  std::function<double(double)> h;  // space scale h(t)
  // (envelope, t, x, h(t)); the shape is the formula with the scale constant at 1
  std::function<double(const Envelope&, double, double, double)> shape;
  std::function<bool(const Envelope&, double, double, double)> valid;

  [[nodiscard]] double slot(const std::string& key) const;
  [[nodiscard]] bool contains(double t, double x, double h_t) const { return !valid || valid(*this, t, x, h_t); }
  [[nodiscard]] bool contains(double t, double x) const { return contains(t, x, h(t)); }
  /// NaN outside the validity region.
  [[nodiscard]] double lower(double t, double x) const;
  [[nodiscard]] double upper(double t, double x) const;
};

Envelope make_main1(const SymbolTable& table, double c3, double c4);
Envelope make_main2(double r0, double c3, double c4);
Envelope make_levy_lower(const SymbolTable& table, double eta, double L2);
/// f is the radial Lebesgue-density majorant and gamma its diameter exponent.
Envelope make_prop1_upper(const SymbolTable& table, double gamma, std::function<double(double)> f,
                          double c3);

/// The four two-sided regime envelopes of a truncated measure.
Envelope make_near_diagonal(const SymbolTable& table, const RegimeThresholds& th);
Envelope make_levy_tail(const SymbolTable& table, const RegimeThresholds& th);
Envelope make_gaussian(const SymbolTable& table, const RegimeThresholds& th);
Envelope make_expxlog(const SymbolTable& table, const RegimeThresholds& th);

Envelope make_tempered_lower(const SymbolTable& table, double t0);
Envelope make_tempered_upper(const SymbolTable& table, double t0);
Envelope make_tempered_ball(const SymbolTable& table, double t0, double eta, double c5, double c6);
Envelope make_high_intensity_lower(const SymbolTable& table);
Envelope make_high_intensity_upper(const SymbolTable& table);

/// Radial Lebesgue density f with f(r0) read as the left limit.
std::function<double(double)> radial_lebesgue_density(const LevyMeasure& nu);

struct TruncatedConstants {
  double nd_low = 0, nd_high = 0;  // near diagonal
  double lt_low = 0, lt_high = 0;  // t f(|x|)
  double c1 = 0, c2 = 0, c3 = 0, c4 = 0;
  double c5 = 0, c6 = 0, c7 = 0, c8 = 0, c9 = 0, c10 = 0;
};

struct Bounds {
  double lower = 0.0;
  double upper = 0.0;
  Regime regime = Regime::NearDiagonal;
};

Bounds env_truncated(const SymbolTable& table, const RegimeThresholds& th, const TruncatedConstants& c,
                     double t, double x);

struct TemperedConstants {
  double m = 1.0, beta = 1.0;
  double c1 = 0, c2 = 0;          // upper
  double c3 = 0, c4 = 0, c5 = 0;  // ball-mass lower
  double c7 = 0, c8 = 0, c9 = 0;  // density lower
  double t0 = 0;
};

struct TemperedBounds {
  double lower = 0.0;       // density form
  double lower_ball = 0.0;  // ball-mass form; NaN where the ball reaches the origin
  double upper = 0.0;
};

TemperedBounds env_tempered(const LevyMeasure& nu, const TemperedConstants& c, double t, double x);

struct HighIntensityConstants {
  double beta = 2.0;
  double low = 0, c7 = 0;             // lower scale and Gaussian rate
  double high = 0, c9 = 0, c10 = 0;   // upper scale and x-log rates
};

struct Sandwich {
  double lower = 0.0;
  double upper = 0.0;
};

Sandwich env_high_intensity(const SymbolTable& table, const HighIntensityConstants& c, double t, double x);

/// |x| where c|x|^2/t = m|x|^beta/(2 4^beta), beta < 2.
double tempered_crossover(double t, double c, double m, double beta);

}  // namespace levykernel
