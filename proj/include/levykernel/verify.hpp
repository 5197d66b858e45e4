#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "levykernel/density.hpp"
#include "levykernel/envelopes.hpp"

namespace levykernel {

/// One density value on the (t, x) probe grid.
struct Sample {
  double t = 0.0;
  double x = 0.0;
  double p = 0.0;
  double p0 = 0.0;   // p_t(0)
  double h = 0.0;    // h(t)
  double err = 0.0;  // grid error bound
};

struct FitOptions {
  double ceiling = 100.0;    // allowed ratio spread
  double floor_rel = 1e-11;  // points with p below floor_rel * p_t(0) are excluded
  int sweeps = 3;            // coordinate sweeps over the rate slots
};

struct FitReport {
  std::string envelope;
  std::string regime;
  std::string side;  // "two-sided", "lower", "upper" or "diagnostic"
  std::string grid;
  double ratio_inf = 0.0, ratio_sup = 0.0;
  double inf_t = 0.0, inf_x = 0.0, sup_t = 0.0, sup_x = 0.0;
  std::map<std::string, double> constants;
  double spread = 0.0;  // ratio_sup / ratio_inf
  // ratio spread per decade of t: spread^(1/decades) for two-sided fits, the
  // drift of the fitted constant across t for one-sided ones
  double stability = 0.0;
  std::size_t points = 0;
  std::size_t excluded = 0;
  bool pass = false;
  std::string diagnostic;
};

/// Density grids for each t, sampled at xs(t, h(t)). Points outside the
/// resolved window are dropped.
std::vector<Sample> sample_densities(const SymbolTable& table, const std::vector<double>& ts,
                                     const std::function<std::vector<double>(double, double)>& xs,
                                     const GridSpec& base = {});

/// Fit the envelope's rate slots and scale constants to the samples inside
/// its validity region (and `region`, when given). The fitted constants are
/// written back into `env`. Throws std::invalid_argument if no sample qualifies.
FitReport fit_sandwich(Envelope& env, const std::vector<Sample>& samples, const FitOptions& opt = {},
                       const std::function<bool(const Sample&)>& region = {});

struct NearDiagonalFit {
  double theta = 0.0;
  double c_low = 0.0;
  double c_high = 0.0;
  double spread = 0.0;
  bool pass = false;
  FitReport report;
};

/// Largest trial theta (1, 1/sqrt 2, 1/2, ...) for which p_t(x) h(t)^d over
/// |x| < theta h(t) has spread within the ceiling.
NearDiagonalFit fit_near_diagonal(const std::vector<Sample>& samples, int d, const FitOptions& opt = {});

struct Violation {
  double t = 0.0;
  double x = 0.0;
  double p = 0.0;
  double bound = 0.0;
  std::string kind;  // "lower" or "upper"
};

struct CertifiedReport {
  std::size_t points = 0;
  std::size_t lower_violations = 0;
  std::size_t upper_violations = 0;
  std::size_t vacuous_chains = 0;
  std::vector<Violation> violations;
  bool pass = false;
};

/// chaining_lower <= p_t(x) <= e^{-D^2} p_t(0) on the grid, up to tol p_t(0).
/// `corrupt` multiplies the density being checked (negative control).
CertifiedReport check_certified(const SymbolTable& table, const std::vector<double>& ts,
                                const std::function<std::vector<double>(double, double)>& xs,
                                double theta, double tol = 1e-9, double corrupt = 1.0);

struct VerifyOptions {
  FitOptions fit;
  double tol = 1e-9;
  bool certified = true;  // run the chaining / concentration grid (d = 1)
  int certified_n = 50;
};

struct VerifyResult {
  std::string family;
  std::map<std::string, double> summary;  // fitted scalars (theta, L0, thresholds, ...)
  std::vector<FitReport> reports;
  bool pass = false;
};

/// Full pipeline for a measure; the checks depend on its family.
VerifyResult verify_measure(const SymbolTable& table, const VerifyOptions& opt = {});

VerifyResult verify_truncated(const SymbolTable& table, const VerifyOptions& opt = {});
VerifyResult verify_tempered(const SymbolTable& table, const VerifyOptions& opt = {});
VerifyResult verify_high_intensity(const SymbolTable& table, const VerifyOptions& opt = {});

FitReport doubling_report(const DoublingReport& rep, std::string name);
FitReport psi_h_report(const SymbolTable& table, double lo = 1e-3, double hi = 1e4);
FitReport certified_report(const CertifiedReport& rep, std::string grid);

std::string report_json(const std::vector<VerifyResult>& results);
std::vector<VerifyResult> parse_report_json(const std::string& text);
std::string report_csv(const std::vector<VerifyResult>& results);
/// Writes <dir>/report.json and <dir>/report.csv.
void emit_report(const std::vector<VerifyResult>& results, const std::filesystem::path& dir);

std::vector<double> logspace(double a, double b, int n);
std::vector<double> linspace(double a, double b, int n);

/// Tolerance from LEVYKERNEL_TOL, or `fallback`.
double tolerance_from_env(double fallback);

}  // namespace levykernel
