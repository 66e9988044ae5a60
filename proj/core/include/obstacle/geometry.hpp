#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace obstacle {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Radially symmetric obstacle psi(|x|) in dimension N.
///
/// Three families are built in:
///   cap       psi(r) = h - k r^2
///   plateau   psi(r) = h for r <= r0, h - k (r - r0)^2 beyond
///   constant  psi(r) = c (only meaningful for c <= 0; used to switch the
///             obstacle off in grid runs)
/// Every family carries exact first and second radial derivatives.
class Obstacle {
 public:
  enum class Kind { cap, plateau, constant };

  static Obstacle cap(int dimension, double height, double curvature);
  static Obstacle plateau(int dimension, double height, double curvature, double plateau_radius);
  static Obstacle constant(int dimension, double value);

  Kind kind() const noexcept { return kind_; }
  int dimension() const noexcept { return dimension_; }
  double height() const noexcept { return height_; }
  double curvature() const noexcept { return curvature_; }
  double plateau_radius() const noexcept { return plateau_radius_; }

  double value(double r) const;
  double slope(double r) const;
  double second_derivative(double r) const;
  double operator()(Vec2 p) const { return value(norm(p)); }

  double max_value() const noexcept { return height_; }
  /// Radius of the closed support of max(psi, 0); zero when psi <= 0 everywhere.
  double support_radius() const;
  /// Largest radius on which psi attains its maximum.
  double summit_radius() const noexcept { return kind_ == Kind::plateau ? plateau_radius_ : 0.0; }

  std::string name() const;
  std::string params() const;

 private:
  Obstacle(Kind kind, int dimension, double height, double curvature, double plateau_radius);

  Kind kind_;
  int dimension_;
  double height_;
  double curvature_;
  double plateau_radius_;
};

/// A bounded planar domain described by an exact signed distance function
/// (negative inside) and a 2*pi-periodic boundary parametrisation.
class DomainSpec {
 public:
  enum class Kind { ball, ellipse, shifted_ball, perturbed_ball };

  static DomainSpec ball(double radius);
  /// Semi-axis `a` along x and `b` along y, centred at the origin.
  static DomainSpec ellipse(double a, double b);
  static DomainSpec shifted_ball(double radius, Vec2 center);
  /// Star-shaped boundary r(theta) = radius * (1 + amplitude * cos(mode * theta)).
  static DomainSpec perturbed_ball(double radius, double amplitude, int mode);

  Kind kind() const noexcept { return kind_; }
  std::string name() const;
  /// Parameters joined by ';' (CSV-safe).
  std::string params() const;

  double signed_distance(Vec2 p) const;
  /// Cheap function with the same sign and zero set as signed_distance; used
  /// for node classification and boundary intersection searches.
  double level(Vec2 p) const;
  bool contains(Vec2 p) const { return level(p) < 0.0; }

  Vec2 boundary_point(double t) const;
  /// |boundary_point(t)|, exact for the polar families.
  double boundary_radius(double t) const;
  /// Upper bound for |x| over the closed domain.
  double bounding_radius() const;

 private:
  DomainSpec(Kind kind, double p0, double p1, double p2, double p3);

  double perturbed_radius(double theta) const;
  double perturbed_distance(Vec2 p) const;
  double ellipse_distance(Vec2 p) const;

  Kind kind_;
  double p0_, p1_, p2_, p3_;
};

struct BoundarySample {
  Vec2 point;
  Vec2 outward_normal;
  /// Arc length measured from boundary_point(0).
  double arc_parameter = 0.0;
  double curve_parameter = 0.0;
};

/// Radii of the largest origin-centred ball inside the domain and the
/// smallest one containing it.
struct BallRadii {
  double inner = 0.0;
  double outer = 0.0;
};

BallRadii ball_radii(const DomainSpec& domain);
double diameter(const DomainSpec& domain);
/// Largest pairwise distance between the given samples.
double diameter(const std::vector<BoundarySample>& samples);
std::vector<BoundarySample> sample_boundary(const DomainSpec& domain, int n);

/// Unit outward normal from central differences of the signed distance.
Vec2 sdf_normal(const DomainSpec& domain, Vec2 p);

/// Golden-section maximisation of a unimodal function on [lo, hi].
template <typename F>
std::pair<double, double> golden_maximize(F&& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > tol) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  const double x = 0.5 * (lo + hi);
  return {x, f(x)};
}

}  // namespace obstacle
