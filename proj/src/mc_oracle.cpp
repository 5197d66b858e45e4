#include "levykernel/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "levykernel/parallel.hpp"

namespace levykernel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kChunk = std::size_t{1} << 16;

std::mt19937_64 chunk_rng(std::uint64_t seed, std::size_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

// Radius beyond which the radial mass is below rel * total.
double effective_top(const RadialProfile& q, double eps, double total, double rel) {
  const double R = q.support_radius();
  if (std::isfinite(R)) return R;
  double s = std::max(2.0 * eps, 1.0);
  for (int i = 0; i < 200; ++i, s *= 2.0)
    if (q.moment(0, s, kInf) <= rel * total) return s;
  throw std::domain_error("jump radius tail does not decay");
}

}  // namespace

IncrementSampler::IncrementSampler(const LevyMeasure& nu, double t, double epsilon)
    : nu_(nu), d_(nu.dim()), t_(t), eps_(epsilon) {
  if (!(t > 0)) throw std::invalid_argument("sampler: t must be positive");
  if (!(epsilon > 0)) throw std::invalid_argument("sampler: epsilon must be positive");
  const RadialProfile& q = nu.radial();
  const AngularMeasure& mu = nu.angular();

  const double m2 = q.moment(2, 0.0, epsilon);
  const double m3 = q.moment(3, 0.0, epsilon);
  if (!std::isfinite(m2)) throw std::domain_error("sampler: small-jump variance is infinite");
  sigma2_ = t * mu.total_mass() * m2;
  lyapunov_ = sigma2_ > 0 ? t * mu.total_mass() * m3 / std::pow(sigma2_, 1.5) : 0.0;

  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  if (mu.is_uniform()) {
    cov.topLeftCorner(d_, d_) = Eigen::MatrixXd::Identity(d_, d_) * (mu.total_mass() * m2 / d_);
  } else {
    for (const auto& a : mu.atom_list()) cov += a.weight * m2 * a.direction * a.direction.transpose();
  }
  cov *= t;
  if (d_ == 1) {
    chol_(0, 0) = std::sqrt(cov(0, 0));
  } else {
    // atoms can leave cov singular, so take the symmetric square root
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
    chol_ = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }

  double acc = 0.0;
  for (const auto& a : mu.atom_list()) atom_cdf_.push_back(acc += a.weight);
  for (double& c : atom_cdf_) c /= acc;

  if (epsilon >= nu.support_radius()) return;
  tail_total_ = q.moment(0, epsilon, kInf);
  if (!std::isfinite(tail_total_)) throw std::domain_error("sampler: jump tail above epsilon is infinite");
  rate_ = t * mu.total_mass() * tail_total_;
  if (!std::isfinite(rate_)) throw std::domain_error("sampler: jump rate not representable");

  const double top = effective_top(q, epsilon, tail_total_, 1e-13);
  const double decades = std::log10(top / epsilon);
  const std::size_t nodes = std::clamp<std::size_t>(static_cast<std::size_t>(400 * decades), 2000, 8000);
  log_s_.resize(nodes + 1);
  for (std::size_t i = 0; i <= nodes; ++i)
    log_s_[i] = std::log(epsilon) + (std::log(top) - std::log(epsilon)) * double(i) / double(nodes);
  log_s_.back() = std::log(top);
  std::vector<double> piece(nodes);
  parallel_for(nodes, [&](std::size_t i) {
    const double a = i == 0 ? epsilon : std::exp(log_s_[i]);
    const double b = i + 1 == nodes ? top : std::exp(log_s_[i + 1]);
    piece[i] = q.moment(0, a, b);
  });
  cdf_.assign(nodes + 1, 0.0);
  for (std::size_t i = 0; i < nodes; ++i) cdf_[i + 1] = cdf_[i] + piece[i];
  const double total = cdf_.back();
  if (!(total > 0) || !std::isfinite(total)) throw std::domain_error("sampler: inverse-CDF table unbuildable");
  for (double& c : cdf_) c /= total;
}

double IncrementSampler::radius_quantile(double u) const {
  if (cdf_.empty()) throw std::logic_error("sampler has no jumps above epsilon");
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.begin()) return eps_;
  if (it == cdf_.end()) return std::exp(log_s_.back());
  const std::size_t i = static_cast<std::size_t>(it - cdf_.begin()) - 1;
  const double w = (u - cdf_[i]) / (cdf_[i + 1] - cdf_[i]);
  return std::exp(log_s_[i] + w * (log_s_[i + 1] - log_s_[i]));
}

double IncrementSampler::radius_cdf(double s) const {
  if (s <= eps_) return 0.0;
  return std::min(1.0, nu_.radial().moment(0, eps_, s) / tail_total_);
}

double IncrementSampler::draw_radius(std::mt19937_64& rng) const {
  return radius_quantile(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
}

Point IncrementSampler::draw(std::mt19937_64& rng) const {
  std::normal_distribution<double> gauss;
  Point z(gauss(rng), d_ == 2 ? gauss(rng) : 0.0);
  Point x = chol_ * z;
  if (rate_ <= 0) return x;
  const long jumps = std::poisson_distribution<long>(rate_)(rng);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const bool round = d_ == 2 && nu_.angular().is_uniform();
  const auto& atoms = nu_.angular().atom_list();
  for (long j = 0; j < jumps; ++j) {
    const double r = radius_quantile(unif(rng));
    if (round) {
      const double a = 2.0 * std::numbers::pi * unif(rng);
      x += r * Point(std::cos(a), std::sin(a));
    } else {
      const double u = unif(rng);
      const auto k = std::min<std::size_t>(std::upper_bound(atom_cdf_.begin(), atom_cdf_.end(), u) - atom_cdf_.begin(),
                                           atoms.size() - 1);
      x += r * atoms[k].direction;
    }
  }
  return x;
}

Point sample_increment(const LevyMeasure& nu, double t, const SamplerConfig& config, std::mt19937_64& rng) {
  if (!(config.epsilon > 0)) throw std::invalid_argument("sample_increment needs an explicit epsilon");
  return IncrementSampler(nu, t, config.epsilon).draw(rng);
}

std::vector<Point> sample_increments(const LevyMeasure& nu, double t, const SamplerConfig& config, double h_t) {
  const double eps = config.epsilon > 0 ? config.epsilon : h_t / 10.0;
  const IncrementSampler sampler(nu, t, eps);
  std::vector<Point> out(config.n);
  const std::size_t chunks = (config.n + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t c) {
    auto rng = chunk_rng(config.seed, c);
    const std::size_t end = std::min(config.n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) out[i] = sampler.draw(rng);
  });
  return out;
}

double radius_ks_distance(const IncrementSampler& sampler, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("KS distance needs samples");
  std::vector<double> r(n);
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t c) {
    auto rng = chunk_rng(seed, c);
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) r[i] = sampler.draw_radius(rng);
  });
  std::sort(r.begin(), r.end());
  std::vector<double> F(n);
  parallel_for(n, [&](std::size_t i) { F[i] = sampler.radius_cdf(r[i]); });
  double D = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    D = std::max({D, double(i + 1) / double(n) - F[i], F[i] - double(i) / double(n)});
  return D;
}

double silverman_bandwidth(const std::vector<double>& sorted, double x_max) {
  const auto lo = std::lower_bound(sorted.begin(), sorted.end(), -x_max);
  const auto hi = std::upper_bound(sorted.begin(), sorted.end(), x_max);
  const auto m = static_cast<std::size_t>(hi - lo);
  if (m < 2) throw std::invalid_argument("bandwidth: fewer than two samples in the central region");
  double mean = 0.0;
  for (auto it = lo; it != hi; ++it) mean += *it;
  mean /= double(m);
  double var = 0.0;
  for (auto it = lo; it != hi; ++it) var += (*it - mean) * (*it - mean);
  const double sd = std::sqrt(var / double(m - 1));
  const double iqr = *(lo + static_cast<long>(0.75 * double(m - 1))) - *(lo + static_cast<long>(0.25 * double(m - 1)));
  const double spread = iqr > 0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * spread * std::pow(double(sorted.size()), -0.2);
}

std::vector<double> kde_evaluate(const std::vector<double>& sorted, const std::vector<double>& xs, double bw) {
  if (!(bw > 0)) throw std::invalid_argument("kde: bandwidth must be positive");
  const double norm = 1.0 / (double(sorted.size()) * bw * std::sqrt(2.0 * std::numbers::pi));
  std::vector<double> out(xs.size());
  parallel_for(xs.size(), [&](std::size_t j) {
    const double x = xs[j];
    double sum = 0.0;
    for (auto it = std::lower_bound(sorted.begin(), sorted.end(), x - 6.0 * bw);
         it != sorted.end() && *it <= x + 6.0 * bw; ++it) {
      const double z = (*it - x) / bw;
      sum += std::exp(-0.5 * z * z);
    }
    out[j] = sum * norm;
  });
  return out;
}

KdeComparison kde_compare(std::vector<double> samples, const DensityGrid& grid, double h_t, double bandwidth) {
  if (samples.empty()) throw std::invalid_argument("kde_compare: no samples");
  std::sort(samples.begin(), samples.end());
  KdeComparison k;
  k.n = samples.size();
  k.x_max = std::min(3.0 * h_t, grid.X);
  const long kmax = static_cast<long>(std::floor(k.x_max / grid.dx));
  if (kmax < 1) throw std::invalid_argument("kde_compare: central region holds no grid node");
  const long stride = std::max(1L, kmax / 1000);
  for (long i = -(kmax / stride) * stride; i <= kmax; i += stride) {
    k.x.push_back(double(i) * grid.dx);
    k.p.push_back(grid.values(std::labs(i)));
  }
  k.bandwidth = bandwidth > 0 ? bandwidth : silverman_bandwidth(samples, k.x_max);
  k.kde = kde_evaluate(samples, k.x, k.bandwidth);
  double pmax = 0.0;
  for (std::size_t j = 0; j < k.x.size(); ++j) {
    pmax = std::max(pmax, k.p[j]);
    const double diff = std::abs(k.kde[j] - k.p[j]);
    if (diff > k.sup_abs) {
      k.sup_abs = diff;
      k.worst_x = k.x[j];
    }
  }
  k.sup_rel = pmax > 0 ? k.sup_abs / pmax : kInf;
  return k;
}

McSummary mc_check(const SymbolTable& table, double t, const SamplerConfig& config) {
  const LevyMeasure& nu = table.measure();
  if (nu.dim() != 1) throw std::invalid_argument("mc_check: d = 1 only");
  const double h = table.h(t);
  McSummary s;
  s.t = t;
  s.n = config.n;
  s.seed = config.seed;
  s.epsilon = config.epsilon > 0 ? config.epsilon : h / 10.0;
  const IncrementSampler sampler(nu, t, s.epsilon);
  s.jump_rate = sampler.jump_rate();
  s.small_variance = sampler.small_variance();
  s.lyapunov_ratio = sampler.lyapunov_ratio();

  SamplerConfig cfg = config;
  cfg.epsilon = s.epsilon;
  const auto pts = sample_increments(nu, t, cfg, h);
  std::vector<double> xs(pts.size());
  double sum = 0.0, sum2 = 0.0, sum4 = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double x = xs[i] = pts[i][0];
    sum += x;
    sum2 += x * x;
    sum4 += x * x * x * x;
  }
  const double n = double(pts.size());
  s.mean = sum / n;
  s.second_moment = sum2 / n;
  s.second_moment_se = std::sqrt(std::max(0.0, sum4 / n - s.second_moment * s.second_moment) / n);
  s.ks_radii = sampler.jump_rate() > 0 ? radius_ks_distance(sampler, 100'000, config.seed) : 0.0;
  s.kde = kde_compare(std::move(xs), density_fourier(table, t), h, config.bandwidth);
  return s;
}

std::string mc_summary_json(const McSummary& s) {
  nlohmann::ordered_json j;
  j["t"] = s.t;
  j["n"] = s.n;
  j["seed"] = s.seed;
  j["epsilon"] = s.epsilon;
  j["jump_rate"] = s.jump_rate;
  j["small_variance"] = s.small_variance;
  j["lyapunov_ratio"] = s.lyapunov_ratio;
  j["mean"] = s.mean;
  j["second_moment"] = s.second_moment;
  j["second_moment_se"] = s.second_moment_se;
  j["ks_radii"] = s.ks_radii;
  j["bandwidth"] = s.kde.bandwidth;
  j["x_max"] = s.kde.x_max;
  j["sup_abs"] = s.kde.sup_abs;
  j["sup_rel"] = s.kde.sup_rel;
  j["worst_x"] = s.kde.worst_x;
  return j.dump(2) + "\n";
}

std::string mc_discrepancy_csv(const KdeComparison& k) {
  std::ostringstream os;
  os.precision(10);
  os << "x,kde,p,abs_diff\n";
  for (std::size_t j = 0; j < k.x.size(); ++j)
    os << k.x[j] << ',' << k.kde[j] << ',' << k.p[j] << ',' << std::abs(k.kde[j] - k.p[j]) << '\n';
  return os.str();
}

}  // namespace levykernel
