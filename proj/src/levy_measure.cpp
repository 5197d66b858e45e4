#include "levykernel/levy_measure.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "levykernel/quadrature.hpp"

namespace levykernel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNearZero = 1e-8;  // below this the smooth families use their leading-order expansion

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// int_a^b coef * s^{k+p} ds, +inf when divergent
double power_moment(double coef, double p, int k, double a, double b) {
  if (!(b > a)) return 0.0;
  const double e = k + p + 1.0;
  if (std::abs(e) < 1e-13) {
    if (a == 0.0 || std::isinf(b)) return kInf;
    return coef * std::log(b / a);
  }
  if (a == 0.0 && e < 0.0) return kInf;
  if (std::isinf(b) && e > 0.0) return kInf;
  const double hb = std::isinf(b) ? 0.0 : std::pow(b, e);
  const double ha = a == 0.0 ? 0.0 : std::pow(a, e);
  return coef * (hb - ha) / e;
}

// 2 sin^2(x/2) and 2 sinh^2(x/2), cancellation-free forms of 1 - cos and cosh - 1
double one_minus_cos_of(double x) {
  const double s = std::sin(0.5 * x);
  return 2.0 * s * s;
}
double cosh_minus_one_of(double x) {
  const double s = std::sinh(0.5 * x);
  return 2.0 * s * s;
}

}  // namespace

// ---------------------------------------------------------------- RadialProfile

RadialProfile::RadialProfile(Family family) : family_(std::move(family)) {
  std::visit(Overloaded{
                 [](const TruncatedStable& p) {
                   if (!(p.alpha > 0 && p.alpha < 2)) throw std::invalid_argument("truncated: alpha must lie in (0,2)");
                   if (!(p.r0 > 0)) throw std::invalid_argument("truncated: r0 must be positive");
                   if (!(p.scale > 0)) throw std::invalid_argument("truncated: scale must be positive");
                 },
                 [](const TemperedStable& p) {
                   if (!(p.alpha > 0 && p.alpha < 2)) throw std::invalid_argument("tempered: alpha must lie in (0,2)");
                   if (!(p.kappa <= 1 + p.alpha)) throw std::invalid_argument("tempered: kappa must not exceed 1+alpha");
                   if (!(p.m > 0)) throw std::invalid_argument("tempered: m must be positive");
                   if (!(p.beta > 0 && p.beta <= 1)) throw std::invalid_argument("tempered: beta must lie in (0,1]");
                   if (!(p.scale > 0)) throw std::invalid_argument("tempered: scale must be positive");
                 },
                 [](const HighIntensity& p) {
                   if (!(p.beta > 1)) throw std::invalid_argument("high_intensity: beta must exceed 1");
                   if (!(p.scale > 0)) throw std::invalid_argument("high_intensity: scale must be positive");
                 },
                 [](const CustomProfile& p) {
                   if (p.s.size() < 2 || p.s.size() != p.q.size())
                     throw std::invalid_argument("custom: need at least two (s, q) knots");
                   for (std::size_t i = 0; i < p.s.size(); ++i) {
                     if (!(p.s[i] > 0) || !(p.q[i] > 0) || !std::isfinite(p.q[i]))
                       throw std::invalid_argument("custom: knots need s > 0 and finite q > 0");
                     if (i > 0 && !(p.s[i] > p.s[i - 1]))
                       throw std::invalid_argument("custom: abscissae must be strictly increasing");
                   }
                 },
             },
             family_);
  build_pieces();
  const double near = moment(2, 0.0, 1.0);
  const double far = moment(0, 1.0, kInf);
  if (!std::isfinite(near) || !std::isfinite(far))
    throw std::domain_error("radial profile violates the integrability condition int (1 ^ s^2) q(s) ds < inf");
}

void RadialProfile::build_pieces() {
  std::vector<ProfilePiece> raw;
  std::visit(Overloaded{
                 [&](const TruncatedStable& p) {
                   raw.push_back({0.0, p.r0, true, p.scale, -1.0 - p.alpha, kInf});
                 },
                 [&](const TemperedStable& p) {
                   ProfilePiece piece{0.0, kInf, false, 0.0, 0.0, 4.0 / p.m};
                   raw.push_back(piece);
                 },
                 [&](const HighIntensity& p) {
                   raw.push_back({0.0, 1.0, false, 0.0, 0.0, kInf});
                   if (p.continuation == Continuation::Exponential)
                     raw.push_back({1.0, kInf, false, 0.0, 0.0, 4.0});
                 },
                 [&](const CustomProfile& p) {
                   const std::size_t n = p.s.size();
                   std::vector<ProfilePiece> segs;
                   for (std::size_t i = 0; i + 1 < n; ++i) {
                     const double e = std::log(p.q[i + 1] / p.q[i]) / std::log(p.s[i + 1] / p.s[i]);
                     segs.push_back({p.s[i], p.s[i + 1], true, p.q[i] / std::pow(p.s[i], e), e, kInf});
                   }
                   if (p.extend_below) raw.push_back({0.0, p.s[0], true, segs.front().coef, segs.front().exponent, kInf});
                   raw.insert(raw.end(), segs.begin(), segs.end());
                   if (p.extend_above) raw.push_back({p.s[n - 1], kInf, true, segs.back().coef, segs.back().exponent, kInf});
                 },
             },
             family_);
  pieces_.clear();
  for (auto piece : raw) {
    piece.lo = std::max(piece.lo, lower_cut_);
    piece.hi = std::min(piece.hi, upper_cut_);
    if (!(piece.hi > piece.lo)) continue;
    piece.coef *= factor_;
    pieces_.push_back(piece);
  }
}

std::string RadialProfile::family_name() const {
  return std::visit(Overloaded{
                        [](const TruncatedStable&) { return std::string("truncated"); },
                        [](const TemperedStable&) { return std::string("tempered"); },
                        [](const HighIntensity&) { return std::string("high_intensity"); },
                        [](const CustomProfile&) { return std::string("custom"); },
                    },
                    family_);
}

double RadialProfile::family_density(double s) const {
  return std::visit(Overloaded{
                        [&](const TruncatedStable& p) { return s < p.r0 ? p.scale * std::pow(s, -1.0 - p.alpha) : 0.0; },
                        [&](const TemperedStable& p) {
                          return p.scale * std::pow(s, -1.0 - p.alpha) * std::pow(1.0 + s, p.kappa) *
                                 std::exp(-p.m * std::pow(s, p.beta));
                        },
                        [&](const HighIntensity& p) {
                          if (s < 1.0) return p.scale / (s * s * s * std::pow(std::log(2.0 / s), p.beta));
                          if (p.continuation == Continuation::Zero) return 0.0;
                          return p.scale * std::pow(std::log(2.0), -p.beta) * std::exp(1.0 - s);
                        },
                        [&](const CustomProfile&) { return 0.0; },  // custom pieces are all power laws
                    },
                    family_);
}

double RadialProfile::family_log_density(double s) const {
  return std::visit(Overloaded{
                        [&](const TemperedStable& p) {
                          return std::log(p.scale) - (1.0 + p.alpha) * std::log(s) + p.kappa * std::log1p(s) -
                                 p.m * std::pow(s, p.beta);
                        },
                        [&](const HighIntensity& p) {
                          if (s < 1.0) return std::log(p.scale) - 3.0 * std::log(s) - p.beta * std::log(std::log(2.0 / s));
                          if (p.continuation == Continuation::Zero) return -kInf;
                          return std::log(p.scale) - p.beta * std::log(std::log(2.0)) + 1.0 - s;
                        },
                        [&](const auto&) { return std::log(family_density(s)); },
                    },
                    family_);
}

double RadialProfile::density(double s) const {
  if (!(s > 0.0)) return 0.0;
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), s,
                             [](double v, const ProfilePiece& p) { return v < p.hi; });
  if (it == pieces_.end() || s < it->lo) return 0.0;
  if (it->power_law) return it->coef * std::pow(s, it->exponent);
  return factor_ * family_density(s);
}

double RadialProfile::near_zero_moment(int k, double eps) const {
  return factor_ * std::visit(Overloaded{
                                  [&](const TemperedStable& p) {
                                    const double e = k - p.alpha;
                                    if (e <= 0) return kInf;
                                    return p.scale * (std::pow(eps, e) / e + p.kappa * std::pow(eps, e + 1) / (e + 1) -
                                                      p.m * std::pow(eps, e + p.beta) / (e + p.beta));
                                  },
                                  [&](const HighIntensity& p) {
                                    const double L = std::log(2.0 / eps);
                                    if (k < 2) return kInf;
                                    if (k == 2) return p.scale * std::pow(L, 1.0 - p.beta) / (p.beta - 1.0);
                                    return p.scale * std::pow(eps, k - 2) / (k - 2) * std::pow(L, -p.beta);
                                  },
                                  [&](const auto&) -> double {
                                    throw std::logic_error("near_zero_moment on a power-law piece");
                                  },
                              },
                              family_);
}

double RadialProfile::piece_moment(const ProfilePiece& p, int k, double a, double b,
                                   double rel_tol) const {
  const double lo = std::max(a, p.lo);
  const double hi = std::min(b, p.hi);
  if (!(hi > lo)) return 0.0;
  if (p.power_law) return power_moment(p.coef, p.exponent, k, lo, hi);
  auto integrand = [&](double s) { return std::pow(s, k) * factor_ * family_density(s); };
  if (lo == 0.0) {
    const double eps = std::min(kNearZero, 0.5 * hi);
    const double head = near_zero_moment(k, eps);
    if (std::isinf(head)) return kInf;
    return head + quad::log_panels(integrand, eps, hi, rel_tol, p.max_panel);
  }
  return quad::log_panels(integrand, lo, hi, rel_tol, p.max_panel);
}

double RadialProfile::moment(int k, double a, double b, double rel_tol) const {
  if (a < 0.0) throw std::invalid_argument("moment: negative lower limit");
  double sum = 0.0;
  for (const auto& p : pieces_) {
    if (p.lo >= b) break;
    sum += piece_moment(p, k, a, b, rel_tol);
    if (std::isinf(sum)) return kInf;
  }
  return sum;
}

double RadialProfile::exp_moment_radius() const {
  if (pieces_.empty() || std::isfinite(pieces_.back().hi)) return kInf;
  const auto& last = pieces_.back();
  if (last.power_law) return 0.0;
  return std::visit(Overloaded{
                        [](const TemperedStable& p) { return p.beta == 1.0 ? p.m : 0.0; },
                        [](const HighIntensity&) { return 1.0; },
                        [](const auto&) { return 0.0; },
                    },
                    family_);
}

double RadialProfile::even_weight_integral(const std::function<double(double)>& log_weight, double c2,
                                           double c4, double eps_scale, double lo, double hi,
                                           double rel_tol) const {
  // Sum over pieces of int_lo^hi w(s) q(s) ds; near s = 0 the weight is
  // replaced by c2 s^2 + c4 s^4 with moments from the piece's own expansion.
  // The product is formed in log space so growing weights meet decaying
  // tails without underflow.
  double sum = 0.0;
  for (const auto& p : pieces_) {
    const double a = std::max(lo, p.lo);
    const double b = std::min(hi, p.hi);
    if (!(b > a)) continue;
    const double log_factor = std::log(factor_);
    auto integrand = [&](double s) {
      const double lq = p.power_law ? std::log(p.coef) + p.exponent * std::log(s) : log_factor + family_log_density(s);
      return std::exp(lq + log_weight(s));
    };
    double start = a;
    if (a == 0.0) {
      double eps = std::min(eps_scale, 0.5 * b);
      if (!p.power_law) eps = std::min(eps, kNearZero);
      const double m2 = p.power_law ? power_moment(p.coef, p.exponent, 2, 0.0, eps) : near_zero_moment(2, eps);
      const double m4 = p.power_law ? power_moment(p.coef, p.exponent, 4, 0.0, eps) : near_zero_moment(4, eps);
      sum += c2 * m2 + c4 * m4;
      start = eps;
    }
    sum += quad::log_panels(integrand, start, b, rel_tol, p.max_panel);
  }
  return sum;
}

double RadialProfile::one_minus_cos(double omega, double rel_tol) const {
  omega = std::abs(omega);
  if (omega == 0.0 || pieces_.empty()) return 0.0;
  const double s_star = std::numbers::pi / omega;
  auto weight = [omega](double s) { return std::log(one_minus_cos_of(omega * s)); };
  const double inner = even_weight_integral(weight, 0.5 * omega * omega,
                                            -std::pow(omega, 4) / 24.0, 1e-3 / omega, 0.0,
                                            s_star, rel_tol);
  if (support_radius() <= s_star) return inner;

  double mass = 0.0;
  for (const auto& p : pieces_) mass += piece_moment(p, 0, s_star, kInf, rel_tol);
  const double abs_tol = 1e-15 * (inner + mass);
  double oscillatory = 0.0;
  for (const auto& p : pieces_) {
    const double a = std::max(s_star, p.lo);
    const double b = p.hi;
    if (!(b > a)) continue;
    auto q = [&](double s) {
      return p.power_law ? p.coef * std::pow(s, p.exponent) : factor_ * family_density(s);
    };
    auto tail = [&](double s) { return 2.0 * q(s) / omega; };
    oscillatory += quad::filon_cos(q, a, b, omega, p.max_panel, tail, abs_tol);
  }
  return inner + mass - oscillatory;
}

double RadialProfile::cos_transform(double omega, double rel_tol) const {
  omega = std::abs(omega);
  double mass = 0.0;
  for (const auto& p : pieces_) mass += piece_moment(p, 0, 0.0, kInf, rel_tol);
  if (!std::isfinite(mass)) throw std::domain_error("cos_transform: profile has infinite mass");
  if (omega == 0.0 || mass == 0.0) return mass;
  // below a quarter period the cosine is nonoscillatory
  const double s_quarter = 0.5 * std::numbers::pi / omega;
  double sum = 0.0;
  for (const auto& p : pieces_) {
    auto q = [&](double s) {
      return p.power_law ? p.coef * std::pow(s, p.exponent) : factor_ * family_density(s);
    };
    const double a = p.lo;
    const double split_at = std::min(p.hi, std::max(a, s_quarter));
    if (split_at > a)
      sum += quad::log_panels([&](double s) { return std::cos(omega * s) * q(s); }, a, split_at, rel_tol);
    if (p.hi > split_at) {
      auto tail = [&](double s) { return 2.0 * q(s) / omega; };
      sum += quad::filon_cos(q, split_at, p.hi, omega, p.max_panel, tail, 1e-15 * mass);
    }
  }
  return sum;
}

double RadialProfile::cosh_minus_one(double sigma, double rel_tol) const {
  sigma = std::abs(sigma);
  if (sigma == 0.0 || pieces_.empty()) return 0.0;
  const double radius = exp_moment_radius();
  if (sigma >= radius) return kInf;
  // log(2 sinh^2(x/2)), switching to the asymptotic form before sinh overflows
  auto weight = [sigma](double s) {
    const double x = 0.5 * sigma * s;
    if (x > 20.0) return 2.0 * x - std::log(2.0) + std::log1p(-std::exp(-2.0 * x)) * 2.0;
    return std::log(cosh_minus_one_of(sigma * s));
  };
  if (std::isinf(radius)) {
    return even_weight_integral(weight, 0.5 * sigma * sigma, std::pow(sigma, 4) / 24.0,
                                1e-3 / sigma, 0.0, kInf, rel_tol);
  }
  // Exponentially tempered tail: narrow the panels so the slow net decay is resolved.
  RadialProfile narrowed = *this;
  for (auto& p : narrowed.pieces_)
    if (std::isinf(p.hi) && !p.power_law) p.max_panel = std::min(p.max_panel, 4.0 / (radius - sigma));
  return narrowed.even_weight_integral(weight, 0.5 * sigma * sigma, std::pow(sigma, 4) / 24.0,
                                       1e-3 / sigma, 0.0, kInf, rel_tol);
}

RadialProfile RadialProfile::scaled(double factor) const {
  if (!(factor > 0)) throw std::invalid_argument("scale factor must be positive");
  RadialProfile out = *this;
  out.factor_ *= factor;
  out.build_pieces();
  return out;
}

RadialProfile RadialProfile::restricted(double lower, double upper) const {
  RadialProfile out = *this;
  out.lower_cut_ = std::max(lower_cut_, lower);
  out.upper_cut_ = std::min(upper_cut_, upper);
  out.build_pieces();
  return out;
}

// --------------------------------------------------------------- AngularMeasure

AngularMeasure AngularMeasure::uniform(int d, double mass) {
  if (d != 1 && d != 2) throw std::invalid_argument("dimension must be 1 or 2");
  if (!(mass > 0)) throw std::invalid_argument("angular mass must be positive");
  AngularMeasure mu;
  mu.d_ = d;
  mu.uniform_ = true;
  mu.mass_ = mass;
  if (d == 1) mu.atoms_ = {{Point(1.0, 0.0), 0.5 * mass}, {Point(-1.0, 0.0), 0.5 * mass}};
  return mu;
}

AngularMeasure AngularMeasure::atoms(int d, std::vector<Atom> list) {
  if (d != 1 && d != 2) throw std::invalid_argument("dimension must be 1 or 2");
  if (list.empty()) throw std::invalid_argument("atomic angular measure needs at least one atom");
  AngularMeasure mu;
  mu.d_ = d;
  mu.uniform_ = false;
  for (auto& a : list) {
    if (d == 1) a.direction[1] = 0.0;
    const double n = a.direction.norm();
    if (!(n > 0) || !(a.weight > 0)) throw std::invalid_argument("atoms need a nonzero direction and positive weight");
    if (std::abs(n - 1.0) > 1e-9) throw std::invalid_argument("atom directions must lie on the unit sphere");
    a.direction /= n;
    mu.mass_ += a.weight;
  }
  for (const auto& a : list) {
    const bool mirrored = std::any_of(list.begin(), list.end(), [&](const Atom& b) {
      return (a.direction + b.direction).norm() < 1e-9 &&
             std::abs(a.weight - b.weight) <= 1e-12 * a.weight;
    });
    if (!mirrored) throw std::invalid_argument("angular measure must be symmetric: missing antipodal atom");
  }
  mu.atoms_ = std::move(list);
  return mu;
}

AngularMeasure AngularMeasure::scaled(double factor) const {
  AngularMeasure out = *this;
  out.mass_ *= factor;
  for (auto& a : out.atoms_) a.weight *= factor;
  return out;
}

// ------------------------------------------------------------------ LevyMeasure

LevyMeasure::LevyMeasure(int d, RadialProfile radial, AngularMeasure angular)
    : d_(d), radial_(std::move(radial)), angular_(std::move(angular)) {
  if (d != 1 && d != 2) throw std::invalid_argument("dimension must be 1 or 2");
  if (angular_.dim() != d) throw std::invalid_argument("angular measure dimension mismatch");
}

LevyMeasure LevyMeasure::scaled(double factor) const {
  return LevyMeasure(d_, radial_, angular_.scaled(factor));
}

double LevyMeasure::angular_average(const Point& unit, const std::function<double(double)>& g) const {
  if (d_ == 2 && angular_.is_uniform()) {
    // g is even here, so a quarter turn suffices
    auto f = [&](double phi) { return g(std::cos(phi)); };
    return 2.0 * angular_.total_mass() / std::numbers::pi *
           quad::gauss_kronrod(f, 0.0, 0.5 * std::numbers::pi, 1e-10);
  }
  double sum = 0.0;
  for (const auto& a : angular_.atom_list()) sum += a.weight * g(unit.dot(a.direction));
  return sum;
}

double LevyMeasure::phi(const Point& xi) const {
  const double r = d_ == 1 ? std::abs(xi[0]) : xi.norm();
  if (r == 0.0) return 0.0;
  const Point unit = d_ == 1 ? Point(1.0, 0.0) : Point(xi / r);
  return angular_average(unit, [&](double c) { return radial_.one_minus_cos(r * c); });
}

double LevyMeasure::laplace_exponent(const Point& xi) const {
  const double r = d_ == 1 ? std::abs(xi[0]) : xi.norm();
  if (r == 0.0) return 0.0;
  const Point unit = d_ == 1 ? Point(1.0, 0.0) : Point(xi / r);
  return angular_average(unit, [&](double c) { return radial_.cosh_minus_one(r * c); });
}

double LevyMeasure::lebesgue_density(const Point& y) const {
  if (d_ == 1) {
    const double s = std::abs(y[0]);
    if (s == 0.0) return kInf;
    double w = 0.0;
    for (const auto& a : angular_.atom_list())
      if (a.direction[0] * y[0] > 0) w += a.weight;
    return w * radial_.density(s);
  }
  if (!angular_.is_uniform()) throw std::domain_error("atomic measures in d = 2 have no Lebesgue density");
  const double s = y.norm();
  if (s == 0.0) return kInf;
  return angular_.total_mass() / (2.0 * std::numbers::pi) * radial_.density(s) / s;
}

// ------------------------------------------------------------------- functionals

double tail_mass(const LevyMeasure& nu, double r) {
  if (!(r > 0)) throw std::invalid_argument("tail_mass: r must be positive");
  if (r >= nu.support_radius()) return 0.0;
  const double m = nu.radial().moment(0, r, kInf);
  if (!std::isfinite(m)) throw std::domain_error("tail not integrable");
  return nu.angular().total_mass() * m;
}

double H(const LevyMeasure& nu, double r) {
  if (!(r > 0)) throw std::invalid_argument("H: r must be positive");
  const double near = nu.radial().moment(2, 0.0, 1.0 / r);
  const double far = nu.radial().moment(0, 1.0 / r, kInf);
  if (!std::isfinite(near) || !std::isfinite(far)) throw std::domain_error("tail not integrable");
  return nu.angular().total_mass() * (r * r * near + far);
}

double second_moment(const LevyMeasure& nu) {
  const double m = nu.radial().moment(2, 0.0, kInf);
  if (!std::isfinite(m)) throw std::domain_error("infinite second moment");
  return nu.angular().total_mass() * m;
}

namespace {

double checked_mass(const RadialProfile& q, double lo, double hi) {
  const double m = q.moment(0, std::max(0.0, lo), hi);
  if (!std::isfinite(m)) throw std::domain_error("infinite ball mass");
  return m;
}

// (M / 2 pi) int over directions of the radial mass of the chord through B(x, rho)
double uniform_disc_mass(const LevyMeasure& nu, double R, double rho) {
  const RadialProfile& q = nu.radial();
  const double density = nu.angular().total_mass() / (2.0 * std::numbers::pi);
  auto chord = [&](double u) {
    const double c = R * std::cos(u);
    const double D = rho * rho - R * R * std::sin(u) * std::sin(u);
    if (D <= 0.0) return 0.0;
    const double root = std::sqrt(D);
    if (c + root <= 0.0) return 0.0;
    return checked_mass(q, c - root, c + root);
  };
  std::function<double(double)> g;
  double lo, hi;
  if (R > rho) {
    // u = a sin v smooths the square-root endpoints of the angular range
    const double a = std::asin(rho / R);
    g = [&, a](double v) { return chord(a * std::sin(v)) * a * std::cos(v); };
    lo = -0.5 * std::numbers::pi;
    hi = 0.5 * std::numbers::pi;
  } else {
    g = chord;
    lo = -std::numbers::pi;
    hi = std::numbers::pi;
  }
  double previous = 0.0;
  for (int panels = 4; panels <= 4096; panels *= 2) {
    double sum = 0.0;
    const double w = (hi - lo) / panels;
    for (int i = 0; i < panels; ++i)
      sum += boost::math::quadrature::gauss<double, 10>::integrate(g, lo + i * w, lo + (i + 1) * w);
    if (panels > 4 && std::abs(sum - previous) <= 1e-7 * std::abs(sum)) return density * sum;
    previous = sum;
  }
  return density * previous;
}

}  // namespace

double ball_mass(const LevyMeasure& nu, const Point& x, double rho) {
  if (!(rho > 0)) throw std::invalid_argument("ball_mass: rho must be positive");
  const int d = nu.dim();
  const double R = d == 1 ? std::abs(x[0]) : x.norm();
  if (R - rho >= nu.support_radius()) return 0.0;
  if (d == 2 && nu.angular().is_uniform()) return uniform_disc_mass(nu, R, rho);
  const Point xx = d == 1 ? Point(x[0], 0.0) : x;
  double sum = 0.0;
  for (const auto& a : nu.angular().atom_list()) {
    const double c = a.direction.dot(xx);
    const double D = rho * rho - (R * R - c * c);
    if (D <= 0.0) continue;
    const double root = std::sqrt(D);
    if (c + root <= 0.0) continue;
    sum += a.weight * checked_mass(nu.radial(), c - root, c + root);
  }
  return sum;
}

SplitMeasure split(const LevyMeasure& nu, double r) {
  if (!(r > 0)) throw std::invalid_argument("split: r must be positive");
  LevyMeasure small(nu.dim(), nu.radial().restricted(0.0, r), nu.angular());
  LevyMeasure big(nu.dim(), nu.radial().restricted(r, kInf), nu.angular());
  return {std::move(small), FiniteMeasure{std::move(big), tail_mass(nu, r)}};
}

// ---------------------------------------------------------------------- doubling

DoublingReport doubling_check(const std::function<double(double)>& f, int d,
                              const std::vector<double>& r_grid) {
  std::vector<std::pair<double, double>> pts;
  for (double r : r_grid) {
    const double v = f(r);
    if (r > 0 && v > 0 && std::isfinite(v)) pts.emplace_back(r, v);
  }
  std::sort(pts.begin(), pts.end());
  if (pts.size() < 2) throw std::invalid_argument("doubling_check: fewer than two usable grid points");

  DoublingReport rep;
  rep.beta1_est = kInf;
  rep.beta2_est = -kInf;
  std::pair<double, double> w1, w2;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (!(pts[j].first > pts[i].first)) continue;
      const double slope = std::log(pts[i].second / pts[j].second) / std::log(pts[j].first / pts[i].first);
      if (slope < rep.beta1_est) { rep.beta1_est = slope; w1 = {pts[i].first, pts[j].first}; }
      if (slope > rep.beta2_est) { rep.beta2_est = slope; w2 = {pts[i].first, pts[j].first}; }
    }
  rep.M1_est = kInf;
  rep.M2_est = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double ratio = pts[i].second / pts[j].second;
      const double scale = pts[j].first / pts[i].first;
      rep.M1_est = std::min(rep.M1_est, ratio / std::pow(scale, rep.beta1_est));
      rep.M2_est = std::max(rep.M2_est, ratio / std::pow(scale, rep.beta2_est));
    }
  rep.witnesses = {w1, w2};
  rep.pass = d < rep.beta1_est && rep.beta1_est <= rep.beta2_est && rep.beta2_est < d + 2 &&
             std::isfinite(rep.M1_est) && std::isfinite(rep.M2_est) && rep.M1_est > 0;
  return rep;
}

DoublingReport doubling_check(const RadialProfile& profile, int d, const std::vector<double>& r_grid) {
  if (const auto* c = std::get_if<CustomProfile>(&profile.family()); c && c->monotone) {
    for (std::size_t i = 1; i < c->q.size(); ++i)
      if (c->q[i] > c->q[i - 1]) throw std::domain_error("custom profile flagged monotone is not nonincreasing");
  }
  auto f = [&](double s) { return profile.density(s) * std::pow(s, 1.0 - d); };
  return doubling_check(f, d, r_grid);
}

std::function<double(double)> staircase_density(int d) {
  return [d](double s) {
    if (!(s > 0.0) || s > 1.0) return 0.0;
    const int k = static_cast<int>(std::floor(std::sqrt(-std::log2(s))));
    return std::ldexp(1.0, (2 + d) * k * k) / (k * k + 1.0);
  };
}

}  // namespace levykernel
