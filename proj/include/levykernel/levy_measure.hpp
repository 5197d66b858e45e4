#pragma once

#include <Eigen/Core>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace levykernel {

using Point = Eigen::Vector2d;  // d = 1 uses the first component only

/// scale * s^{-1-alpha} on (0, r0), zero beyond.
struct TruncatedStable {
  double alpha = 1.5;
  double r0 = 1.0;
  double scale = 1.0;
};

/// scale * s^{-1-alpha} (1+s)^kappa exp(-m s^beta).
struct TemperedStable {
  double alpha = 0.5;
  double kappa = 0.0;
  double m = 1.0;
  double beta = 1.0;
  double scale = 1.0;
};

enum class Continuation { Zero, Exponential };

/// scale * s^{-3} [log(2/s)]^{-beta} on (0, 1). Beyond s = 1 either zero or
/// scale * (log 2)^{-beta} * e^{1-s}, which is continuous at s = 1.
struct HighIntensity {
  double beta = 2.0;
  double scale = 1.0;
  Continuation continuation = Continuation::Zero;
};

/// Tabulated profile, interpolated as a power law between knots. Outside the
/// table the profile is zero unless the end segment's power law is
/// explicitly continued.
struct CustomProfile {
  std::vector<double> s;
  std::vector<double> q;
  bool monotone = true;
  bool extend_below = false;
  bool extend_above = false;
};

/// One smooth stretch of a radial profile.
struct ProfilePiece {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  bool power_law = false;  // q(s) = coef * s^exponent on the piece
  double coef = 0.0;
  double exponent = 0.0;
  double max_panel = std::numeric_limits<double>::infinity();
};

/// Radial density q(s) of a Lévy measure in polar form
/// nu(A) = int int 1_A(s theta) q(s) ds mu(d theta), optionally restricted
/// to a window [lower_cut, upper_cut).
class RadialProfile {
 public:
  using Family = std::variant<TruncatedStable, TemperedStable, HighIntensity, CustomProfile>;

  explicit RadialProfile(Family family);

  [[nodiscard]] double density(double s) const;
  [[nodiscard]] double support_radius() const { return pieces_.empty() ? 0.0 : pieces_.back().hi; }
  [[nodiscard]] double lower_cut() const { return lower_cut_; }
  [[nodiscard]] const std::vector<ProfilePiece>& pieces() const { return pieces_; }
  [[nodiscard]] const Family& family() const { return family_; }
  [[nodiscard]] std::string family_name() const;

  /// int_a^b s^k q(s) ds; +inf when divergent.
  [[nodiscard]] double moment(int k, double a, double b, double rel_tol = 1e-11) const;

  /// sup of sigma with int e^{sigma s} q(s) ds finite away from the origin.
  [[nodiscard]] double exp_moment_radius() const;

  /// int (1 - cos(omega s)) q(s) ds.
  [[nodiscard]] double one_minus_cos(double omega, double rel_tol = 1e-11) const;

  /// int cos(omega s) q(s) ds for a profile of finite total mass.
  [[nodiscard]] double cos_transform(double omega, double rel_tol = 1e-11) const;

  /// int (cosh(sigma s) - 1) q(s) ds; +inf beyond the exponential-moment radius.
  [[nodiscard]] double cosh_minus_one(double sigma, double rel_tol = 1e-11) const;

  [[nodiscard]] RadialProfile scaled(double factor) const;
  [[nodiscard]] RadialProfile restricted(double lower, double upper) const;

 private:
  [[nodiscard]] double family_density(double s) const;
  [[nodiscard]] double family_log_density(double s) const;
  // int_0^eps s^k q(s) ds for eps inside the first piece (which starts at 0)
  [[nodiscard]] double near_zero_moment(int k, double eps) const;
  [[nodiscard]] double piece_moment(const ProfilePiece& p, int k, double a, double b,
                                    double rel_tol) const;
  // int_lo^hi w(s) q(s) ds with w(s) ~ c2 s^2 + c4 s^4 near zero, w given as log w
  [[nodiscard]] double even_weight_integral(const std::function<double(double)>& log_weight,
                                            double c2, double c4, double eps, double lo,
                                            double hi, double rel_tol) const;
  void build_pieces();

  Family family_;
  double factor_ = 1.0;
  double lower_cut_ = 0.0;
  double upper_cut_ = std::numeric_limits<double>::infinity();
  std::vector<ProfilePiece> pieces_;
};

struct Atom {
  Point direction;
  double weight;
};

/// Angular part mu on the unit sphere of R^d (d in {1, 2}).
class AngularMeasure {
 public:
  static AngularMeasure uniform(int d, double mass);
  static AngularMeasure atoms(int d, std::vector<Atom> atoms);

  [[nodiscard]] int dim() const { return d_; }
  [[nodiscard]] bool is_uniform() const { return uniform_; }
  [[nodiscard]] double total_mass() const { return mass_; }
  /// Atom list; for d = 1 the uniform measure is the pair {-1, +1}.
  [[nodiscard]] const std::vector<Atom>& atom_list() const { return atoms_; }
  [[nodiscard]] AngularMeasure scaled(double factor) const;

 private:
  int d_ = 1;
  bool uniform_ = true;
  double mass_ = 0.0;
  std::vector<Atom> atoms_;
};

/// Symmetric Lévy measure nu = radial profile x angular measure.
class LevyMeasure {
 public:
  LevyMeasure(int d, RadialProfile radial, AngularMeasure angular);

  [[nodiscard]] int dim() const { return d_; }
  [[nodiscard]] const RadialProfile& radial() const { return radial_; }
  [[nodiscard]] const AngularMeasure& angular() const { return angular_; }
  [[nodiscard]] double support_radius() const { return radial_.support_radius(); }
  [[nodiscard]] LevyMeasure scaled(double factor) const;

  /// int (1 - cos <xi, y>) nu(dy) by direct quadrature.
  [[nodiscard]] double phi(const Point& xi) const;
  /// int (cosh <xi, y> - 1) nu(dy).
  [[nodiscard]] double laplace_exponent(const Point& xi) const;

  /// Lebesgue density of nu at a point (d = 1 or 2, uniform or axis atoms in d = 1).
  [[nodiscard]] double lebesgue_density(const Point& y) const;

 private:
  // integral over directions of g(<e, theta>) mu(d theta) for unit e
  [[nodiscard]] double angular_average(const Point& unit,
                                       const std::function<double(double)>& g) const;

  int d_;
  RadialProfile radial_;
  AngularMeasure angular_;
};

/// Finite measure carrying the big jumps after a split.
struct FiniteMeasure {
  LevyMeasure measure;
  double total_mass;
};

struct SplitMeasure {
  LevyMeasure small;
  FiniteMeasure big;
};

struct DoublingReport {
  double beta1_est = 0.0;
  double beta2_est = 0.0;
  double M1_est = 0.0;
  double M2_est = 0.0;
  bool pass = false;
  std::vector<std::pair<double, double>> witnesses;  // (r, R) attaining beta1, beta2
};

double tail_mass(const LevyMeasure& nu, double r);
double H(const LevyMeasure& nu, double r);
double second_moment(const LevyMeasure& nu);
double ball_mass(const LevyMeasure& nu, const Point& x, double rho);
inline double ball_mass(const LevyMeasure& nu, double x, double rho) {
  return ball_mass(nu, Point(x, 0.0), rho);
}
SplitMeasure split(const LevyMeasure& nu, double r);

/// Doubling diagnostic for the Lebesgue-density profile f(s) = q(s) s^{1-d}.
DoublingReport doubling_check(const RadialProfile& profile, int d, const std::vector<double>& r_grid);
DoublingReport doubling_check(const std::function<double(double)>& f, int d,
                              const std::vector<double>& r_grid);

/// Density that is constant on the shells 2^{-(k+1)^2} < s <= 2^{-k^2} with
/// value 2^{(2+d) k^2} / (k^2 + 1); the standard profile violating doubling.
std::function<double(double)> staircase_density(int d);

}  // namespace levykernel
