// levykernel command line: symbol, density, envelope, verify, mc, report.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "levykernel/config.hpp"
#include "levykernel/density.hpp"
#include "levykernel/envelopes.hpp"
#include "levykernel/mc_oracle.hpp"
#include "levykernel/verify.hpp"

namespace fs = std::filesystem;
using namespace levykernel;
using ordered_json = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::string family;
  std::map<std::string, double> params;  // --alpha, --r0, ... for --family
  std::string out = ".";
  std::vector<double> t;
  double x_max = 0.0;
  int grid = 0;
  std::uint64_t seed = 1;
  std::optional<double> tol;
  std::size_t n = 1'000'000;
  std::string input;  // report
};

LevyMeasure measure_from(const Options& o) {
  if (!o.config.empty() && !o.family.empty()) throw UsageError("--config and --family are exclusive");
  if (!o.config.empty()) {
    if (!o.params.empty()) throw UsageError("family parameters need --family, not --config");
    return load_measure(o.config);
  }
  if (o.family.empty()) throw UsageError("a measure is required: --config FILE or --family NAME");
  nlohmann::json doc;
  try {
    doc = measure_to_json(builtin_measure(o.family));
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  auto& radial = doc["radial"];
  for (const auto& [k, v] : o.params) {
    if (!radial.contains(k)) throw UsageError("--" + k + " does not apply to family " + o.family);
    radial[k] = v;
  }
  return measure_from_json(doc);
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string num(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

ordered_json jnum(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

int grid_or(const Options& o, int fallback) {
  if (o.grid < 0) throw UsageError("--grid must be positive");
  return o.grid > 0 ? o.grid : fallback;
}

// ------------------------------------------------------------------ symbol

int cmd_symbol(const Options& o) {
  SymbolTable table(measure_from(o));
  const LevyMeasure& nu = table.measure();
  const auto& dirs = table.probe_directions();
  std::ostringstream csv;
  csv.precision(12);
  csv << "r";
  for (std::size_t k = 0; k < dirs.size(); ++k) csv << ",phi_ray" << k + 1;
  csv << ",psi,H,2H,psi_over_H\n";
  for (double r : logspace(1e-3, 1e4, grid_or(o, 200))) {
    csv << r;
    for (const auto& e : dirs) csv << ',' << table.phi(Point(r * e));
    const double psi = table.psi(r), h = H(nu, r);
    csv << ',' << psi << ',' << h << ',' << 2.0 * h << ',' << psi / h << '\n';
  }
  write_file(fs::path(o.out) / "symbol.csv", csv.str());

  std::vector<double> ts = o.t;
  if (ts.empty()) {
    // start where e^{-t Psi} has died out by the top of the frequency grid
    const double hi = std::isfinite(table.t_p()) ? 0.5 * table.t_p() : 10.0;
    ts = logspace(std::max(hi * 1e-4, 40.0 / table.psi(table.grid().r_max)), hi, 41);
  }
  const A1Report a1 = table.check_A1(ts);
  std::ostringstream scale;
  scale.precision(12);
  scale << "t,h,A1_scaled\n";
  for (std::size_t i = 0; i < a1.t.size(); ++i)
    scale << a1.t[i] << ',' << table.h(a1.t[i]) << ',' << a1.scaled_integral[i] << '\n';
  write_file(fs::path(o.out) / "scale.csv", scale.str());
  std::printf("L0 = %.6g, sup psi/H = %.6g, A1 %s %s\n", table.L0_fit(), table.upper_ratio(),
              a1.pass ? "holds" : "fails", a1.diagnostic.c_str());
  return 0;
}

// ----------------------------------------------------------------- density

int cmd_density(const Options& o) {
  SymbolTable table(measure_from(o));
  const LevyMeasure& nu = table.measure();
  const std::vector<double> ts = o.t.empty() ? std::vector<double>{1.0} : o.t;
  for (double t : ts) {
    if (!(t > 0)) throw UsageError("--t values must be positive");
    if (!(t < table.t_p())) throw UsageError("t beyond validity horizon (t_p = " + num(table.t_p()) + ")");
  }
  const int npts = grid_or(o, 201);
  std::ostringstream csv;
  csv.precision(12);
  csv << "t,x,p,upper_bound,lower_bound\n";
  ordered_json meta = ordered_json::array();
  GridSpec base;
  DensityCache cache(table, base);
  for (double t : ts) {
    const double h = table.h(t);
    const double x_max = o.x_max > 0 ? o.x_max : 10.0 * h;
    GridSpec spec;
    spec.x_max = x_max;
    const auto xs = linspace(-x_max, x_max, npts);
    ordered_json m;
    m["t"] = t;
    m["h"] = h;
    if (nu.dim() == 1) {
      const DensityGrid g = density_fourier(table, t, spec);
      const double p0 = g.values[0];
      // heavy tails can make the link grids of long chains too large; such k are skipped
      std::set<long> skipped;
      for (double x : xs) {
        const double upper = std::exp(-table.concentration_exponent(t, x)) * p0;
        double lower = 0.0;
        for (long k : {1L, 2L, 4L, 8L, 16L}) {
          if (skipped.count(k)) continue;
          const double rho = table.h(t / double(k)) / 4.0;
          try {
            const auto c = chaining_lower(table, t, x, k, rho, &cache);
            if (!c.vacuous) lower = std::max(lower, c.value);
          } catch (const std::runtime_error&) {
            skipped.insert(k);
          }
        }
        csv << t << ',' << x << ',' << g.at(x) << ',' << upper << ',' << lower << '\n';
      }
      m["chain_lengths_skipped"] = skipped;
      m["method"] = g.method;
      m["p0"] = p0;
      m["dx"] = g.dx;
      m["period"] = g.X;
      m["cutoff"] = g.cutoff;
      m["eps_trunc"] = g.eps_trunc;
      m["eps_alias"] = g.eps_alias;
      m["eps_series"] = g.eps_series;
      m["eps_interp"] = g.eps_interp;
      m["error_bound"] = g.error_bound();
      m["mass"] = g.mass();
    } else {
      // two dimensions: the section along the first axis, no chaining bound
      const DensityGrid2D g = density_fourier_2d(table, t, spec);
      const double p0 = g.at_node(0, 0);
      for (double x : xs) {
        const long i = std::lround(x / g.dx);
        if (std::labs(i) >= static_cast<long>(g.N())) continue;
        const double upper = std::exp(-table.concentration_exponent(t, x)) * p0;
        csv << t << ',' << double(i) * g.dx << ',' << g.at_node(i, 0) << ',' << upper << ",\n";
      }
      m["method"] = "fourier_2d";
      m["p0"] = p0;
      m["dx"] = g.dx;
      m["period"] = g.X;
      m["cutoff"] = g.cutoff;
      m["eps_trunc"] = g.eps_trunc;
      m["eps_alias"] = g.eps_alias;
      m["mass"] = g.mass();
    }
    const auto c = concentration_upper(nu, t, x_max);
    m["x_max"] = x_max;
    m["D2_at_x_max"] = jnum(c.D2);
    m["minimizer_s_at_x_max"] = jnum(c.s_star);
    m["concentration_vacuous"] = c.vacuous;
    meta.push_back(m);
  }
  write_file(fs::path(o.out) / "density.csv", csv.str());
  ordered_json doc;
  doc["measure"] = ordered_json::parse(measure_to_json(nu).dump());
  doc["grids"] = meta;
  write_file(fs::path(o.out) / "density.json", doc.dump(2) + "\n");
  std::printf("wrote %zu density grids to %s\n", ts.size(), o.out.c_str());
  return 0;
}

// ---------------------------------------------------------------- envelope

double constant(const VerifyResult& res, const std::string& envelope, const std::string& key) {
  for (const auto& r : res.reports)
    if (r.envelope == envelope) {
      const auto it = r.constants.find(key);
      if (it != r.constants.end()) return it->second;
    }
  throw std::runtime_error("fit of " + envelope + " produced no " + key);
}

int cmd_envelope(const Options& o) {
  SymbolTable table(measure_from(o));
  const LevyMeasure& nu = table.measure();
  const auto& fam = nu.radial().family();
  if (std::holds_alternative<CustomProfile>(fam))
    throw UsageError("envelopes exist for the truncated, tempered and high_intensity families only");
  VerifyOptions vo;
  vo.certified = false;
  const VerifyResult res = verify_measure(table, vo);
  const int npts = grid_or(o, 101);

  std::ostringstream csv;
  csv.precision(12);
  csv << "t,x,regime,lower,upper\n";
  auto emit = [&](double t, double x, const std::string& regime, double lo, double up) {
    csv << t << ',' << x << ',' << regime << ',' << num(lo) << ',' << num(up) << '\n';
  };

  if (std::holds_alternative<TruncatedStable>(fam)) {
    const auto& s = res.summary;
    if (!s.count("truncated.c1")) throw std::runtime_error("envelope fit failed; run verify for details");
    const RegimeThresholds th = thresholds_for(nu, s.at("theta"), s.at("L0"), s.at("eta_star"));
    TruncatedConstants c;
    c.nd_low = s.at("truncated.nd_low");
    c.nd_high = s.at("truncated.nd_high");
    c.lt_low = s.at("truncated.lt_low");
    c.lt_high = s.at("truncated.lt_high");
    c.c1 = s.at("truncated.c1");
    c.c2 = c.c4 = s.at("truncated.c2");
    c.c3 = s.at("truncated.c3");
    c.c5 = s.at("truncated.c5");
    c.c6 = c.c9 = s.at("truncated.c6");
    c.c7 = c.c10 = s.at("truncated.c7");
    c.c8 = s.at("truncated.c8");
    const std::vector<double> ts = o.t.empty() ? std::vector<double>{0.01, 0.1, 1.0, 10.0} : o.t;
    for (double t : ts) {
      const double x_max = o.x_max > 0 ? o.x_max : std::max(10.0 * table.h(t), 2.0 * th.C_star_upper * t);
      for (double x : linspace(0.0, x_max, npts)) {
        const Bounds b = env_truncated(table, th, c, t, x);
        emit(t, x, regime_name(b.regime), b.lower, b.upper);
      }
    }
  } else if (const auto* p = std::get_if<TemperedStable>(&fam)) {
    TemperedConstants c;
    c.m = p->m;
    c.beta = p->beta;
    c.c1 = res.summary.at("tempered.c1");
    c.c2 = res.summary.at("tempered.c2");
    c.c7 = res.summary.at("tempered.c7");
    c.c8 = res.summary.at("tempered.c8");
    c.c9 = res.summary.at("tempered.c9");
    c.c3 = constant(res, "tempered_ball", "c3");
    c.c4 = constant(res, "tempered_ball", "c4");
    c.c5 = constant(res, "tempered_ball", "c5");
    c.t0 = constant(res, "tempered_lower", "t0");
    const std::vector<double> ts = o.t.empty() ? std::vector<double>{5.0, 10.0, 20.0} : o.t;
    for (double t : ts) {
      for (double x : linspace(0.0, o.x_max > 0 ? o.x_max : 40.0, npts)) {
        if (!(t > c.t0)) {
          emit(t, x, "", NAN, NAN);
          continue;
        }
        const TemperedBounds b = env_tempered(nu, c, t, x);
        emit(t, x, "tempered", b.lower, b.upper);
      }
    }
  } else {
    HighIntensityConstants c;
    c.beta = std::get<HighIntensity>(fam).beta;
    c.low = res.summary.at("high_intensity.low");
    c.c7 = res.summary.at("high_intensity.c7");
    c.high = res.summary.at("high_intensity.high");
    c.c9 = res.summary.at("high_intensity.c9");
    c.c10 = 1.0;
    const std::vector<double> ts = o.t.empty() ? std::vector<double>{1e-3, 1e-2, 0.1, 0.5} : o.t;
    for (double t : ts) {
      for (double x : linspace(0.0, o.x_max > 0 ? o.x_max : 0.99, npts)) {
        if (!(t < 1.0) || !(x < 1.0)) {
          emit(t, x, "", NAN, NAN);
          continue;
        }
        const Sandwich b = env_high_intensity(table, c, t, x);
        emit(t, x, "high_intensity", b.lower, b.upper);
      }
    }
  }
  write_file(fs::path(o.out) / "envelope.csv", csv.str());
  std::printf("envelope constants fitted (%s); wrote %s\n", res.pass ? "all fits pass" : "some fits fail",
              (fs::path(o.out) / "envelope.csv").string().c_str());
  return 0;
}

// ------------------------------------------------------------------ verify

void print_results(const std::vector<VerifyResult>& results) {
  for (const auto& res : results) {
    std::printf("%s: %s\n", res.family.c_str(), res.pass ? "PASS" : "FAIL");
    for (const auto& r : res.reports) {
      std::printf("  %-4s %-30s %-14s %-9s spread %-10.4g stability %-8.4g %s\n", r.pass ? "ok" : "FAIL",
                  r.envelope.c_str(), r.regime.c_str(), r.side.c_str(), r.spread, r.stability, r.diagnostic.c_str());
    }
  }
}

int cmd_verify(const Options& o) {
  SymbolTable table(measure_from(o));
  VerifyOptions vo;
  vo.tol = o.tol ? *o.tol : tolerance_from_env(vo.tol);
  const std::vector<VerifyResult> results{verify_measure(table, vo)};
  emit_report(results, o.out);
  print_results(results);
  return results.front().pass ? 0 : 1;
}

// ---------------------------------------------------------------------- mc

int cmd_mc(const Options& o) {
  SymbolTable table(measure_from(o));
  if (table.dim() != 1) throw UsageError("mc supports d = 1 measures");
  if (o.t.size() > 1) throw UsageError("mc takes a single --t");
  const double t = o.t.empty() ? 1.0 : o.t.front();
  if (!(t > 0) || !(t < table.t_p())) throw UsageError("t beyond validity horizon");
  if (o.n < 100'000) throw UsageError("mc needs --n of at least 1e5");
  SamplerConfig cfg;
  cfg.n = o.n;
  cfg.seed = o.seed;
  const McSummary s = mc_check(table, t, cfg);
  const double limit = o.tol ? *o.tol : 0.1;
  write_file(fs::path(o.out) / "mc_summary.json", mc_summary_json(s));
  write_file(fs::path(o.out) / "mc_discrepancy.csv", mc_discrepancy_csv(s.kde));
  const bool pass = s.kde.sup_rel <= limit && s.ks_radii < 0.01;
  std::printf("relative sup discrepancy %.4g on |x| <= %.4g (limit %.4g), radius KS %.4g: %s\n", s.kde.sup_rel,
              s.kde.x_max, limit, s.ks_radii, pass ? "PASS" : "FAIL");
  return pass ? 0 : 1;
}

// ------------------------------------------------------------------ report

int cmd_report(const Options& o) {
  fs::path in = o.input;
  if (fs::is_directory(in)) in /= "report.json";
  std::ifstream f(in);
  if (!f) throw UsageError("cannot read " + in.string());
  std::stringstream buf;
  buf << f.rdbuf();
  std::vector<VerifyResult> results;
  try {
    results = parse_report_json(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(in.string() + ": " + e.what());
  }
  write_file(fs::path(o.out) / "report.csv", report_csv(results));
  print_results(results);
  // a family passes only if each of its reports does, whatever its own flag says
  const bool pass = std::all_of(results.begin(), results.end(), [](const VerifyResult& r) {
    return r.pass && std::all_of(r.reports.begin(), r.reports.end(), [](const FitReport& f) { return f.pass; });
  });
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transition densities of symmetric jump Levy processes"};
  app.require_subcommand(1);
  Options o;

  auto add_measure = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "measure config (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--family", o.family, "built-in family: truncated, tempered, high_intensity, cauchy");
    for (const char* k : {"alpha", "r0", "m", "beta", "kappa", "scale"}) {
      sub->add_option_function<double>(std::string("--") + k, [&o, k](double v) { o.params[k] = v; },
                                       std::string(k) + " of the built-in family");
    }
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_option("--t", o.t, "time(s), comma separated")->delimiter(',');
    sub->add_option("--x-max", o.x_max, "half-width of the x window");
    sub->add_option("--grid", o.grid, "number of output points");
    sub->add_option("--seed", o.seed, "random seed")->capture_default_str();
    sub->add_option_function<double>("--tol", [&o](double v) { o.tol = v; }, "tolerance override");
  };

  auto* symbol = app.add_subcommand("symbol", "characteristic exponent, Psi, H and h(t)");
  auto* density = app.add_subcommand("density", "transition density with certified bounds");
  auto* envelope = app.add_subcommand("envelope", "fitted two-sided envelopes on a (t, x) grid");
  auto* verify = app.add_subcommand("verify", "run all checks for the measure; exit 1 if any fails");
  auto* mc = app.add_subcommand("mc", "Monte Carlo cross-check of the density");
  auto* report = app.add_subcommand("report", "summarize a verify report.json");
  for (auto* sub : {symbol, density, envelope, verify, mc}) {
    add_measure(sub);
    add_common(sub);
  }
  mc->add_option("--n", o.n, "sample count")->capture_default_str();
  report->add_option("input", o.input, "report.json or the directory holding it")->required();
  report->add_option("--out", o.out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*symbol) return cmd_symbol(o);
    if (*density) return cmd_density(o);
    if (*envelope) return cmd_envelope(o);
    if (*verify) return cmd_verify(o);
    if (*mc) return cmd_mc(o);
    if (*report) return cmd_report(o);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    // bad parameter values surface here (domain, range, grid size)
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
