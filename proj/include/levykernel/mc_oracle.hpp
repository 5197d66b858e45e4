#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "levykernel/density.hpp"
#include "levykernel/levy_measure.hpp"

namespace levykernel {

struct SamplerConfig {
  double epsilon = 0.0;    // small-jump cutoff; 0 means h(t)/10
  std::size_t n = 1'000'000;
  std::uint64_t seed = 1;
  double bandwidth = 0.0;  // KDE bandwidth; 0 means Silverman on the central region
};

/// Increments of the process over time t with jumps below epsilon replaced by
/// a Gaussian of the same covariance. Large jumps: Poisson(t nu(|y| > eps))
/// many, radii by inverse CDF from a tabulated radial tail, directions from mu.
class IncrementSampler {
 public:
  /// Throws std::domain_error if the tail above epsilon is not finite.
  IncrementSampler(const LevyMeasure& nu, double t, double epsilon);

  [[nodiscard]] Point draw(std::mt19937_64& rng) const;
  /// One jump radius from the normalized tail.
  [[nodiscard]] double draw_radius(std::mt19937_64& rng) const;
  [[nodiscard]] double radius_quantile(double u) const;
  /// Normalized tail CDF P(R <= s) computed by quadrature, not from the table.
  [[nodiscard]] double radius_cdf(double s) const;

  [[nodiscard]] int dim() const { return d_; }
  [[nodiscard]] double epsilon() const { return eps_; }
  [[nodiscard]] double jump_rate() const { return rate_; }  // t nu(|y| > eps)
  [[nodiscard]] double small_variance() const { return sigma2_; }  // t int_{|y|<=eps} |y|^2 nu(dy)
  /// t int_{|y|<=eps}|y|^3 nu(dy) / (t sigma^2)^{3/2}: size of the Gaussian substitution error.
  [[nodiscard]] double lyapunov_ratio() const { return lyapunov_; }

 private:
  LevyMeasure nu_;
  int d_;
  double t_, eps_, rate_ = 0.0, sigma2_ = 0.0, lyapunov_ = 0.0;
  double tail_total_ = 0.0;  // radial mass on [eps, inf)
  Eigen::Matrix2d chol_ = Eigen::Matrix2d::Zero();
  std::vector<double> log_s_;  // table nodes
  std::vector<double> cdf_;
  std::vector<double> atom_cdf_;
};

/// A single increment; builds a sampler per call.
Point sample_increment(const LevyMeasure& nu, double t, const SamplerConfig& config, std::mt19937_64& rng);

/// n increments drawn in chunks of 2^16, chunk c seeded by seed_seq{seed, c};
/// the result does not depend on the thread count.
std::vector<Point> sample_increments(const LevyMeasure& nu, double t, const SamplerConfig& config,
                                     double h_t);

/// Kolmogorov-Smirnov distance between n table-drawn jump radii and the
/// quadrature CDF.
double radius_ks_distance(const IncrementSampler& sampler, std::size_t n, std::uint64_t seed);

/// Silverman's rule 0.9 min(sd, IQR/1.34) n^{-1/5}, with sd and IQR taken
/// over the samples in |x| <= x_max.
double silverman_bandwidth(const std::vector<double>& sorted, double x_max);

/// Gaussian KDE of sorted samples at xs, summing within 6 bandwidths.
std::vector<double> kde_evaluate(const std::vector<double>& sorted, const std::vector<double>& xs, double bw);

struct KdeComparison {
  std::size_t n = 0;
  double bandwidth = 0.0;
  double x_max = 0.0;
  double sup_abs = 0.0;  // sup |kde - p| on |x| <= x_max
  double sup_rel = 0.0;  // sup_abs / sup p on the same region
  double worst_x = 0.0;
  std::vector<double> x, kde, p;
};

/// KDE of one-dimensional samples against a density grid on |x| <= 3 h(t).
/// bandwidth 0 selects Silverman. Throws std::invalid_argument when the
/// central region holds no grid node or no sample.
KdeComparison kde_compare(std::vector<double> samples, const DensityGrid& grid, double h_t,
                          double bandwidth = 0.0);

struct McSummary {
  double t = 0.0;
  double epsilon = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double jump_rate = 0.0;
  double small_variance = 0.0;
  double lyapunov_ratio = 0.0;
  double mean = 0.0;
  double second_moment = 0.0;
  double second_moment_se = 0.0;
  double ks_radii = 0.0;
  KdeComparison kde;
};

/// Sampling plus KDE comparison against density_fourier at time t (d = 1).
McSummary mc_check(const SymbolTable& table, double t, const SamplerConfig& config);

std::string mc_summary_json(const McSummary& s);
std::string mc_discrepancy_csv(const KdeComparison& k);

}  // namespace levykernel
