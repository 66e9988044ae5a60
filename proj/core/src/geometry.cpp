#include "obstacle/geometry.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include "obstacle/errors.hpp"

namespace obstacle {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Shortest round-trip representation, ';'-separated.
std::string join_params(std::initializer_list<double> values) {
  std::string out;
  for (double v : values) {
    if (!out.empty()) out += ';';
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.append(buf.data(), res.ptr);
  }
  return out;
}

// Eberly's robust bisection for the root of the nearest-point equation of an
// ellipse with semi-axes e0 >= e1, evaluated in the first quadrant.
double ellipse_root(double r0, double z0, double z1, double g) {
  const double n0 = r0 * z0;
  double s0 = z1 - 1.0;
  double s1 = (g < 0.0 ? 0.0 : std::hypot(n0, z1) - 1.0);
  double s = 0.0;
  for (int i = 0; i < 1100; ++i) {
    s = 0.5 * (s0 + s1);
    if (s == s0 || s == s1) break;
    const double ratio0 = n0 / (s + r0);
    const double ratio1 = z1 / (s + 1.0);
    g = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
    if (g > 0.0) {
      s0 = s;
    } else if (g < 0.0) {
      s1 = s;
    } else {
      break;
    }
  }
  return s;
}

double ellipse_quadrant_distance(double e0, double e1, double y0, double y1) {
  if (y1 > 0.0) {
    if (y0 > 0.0) {
      const double z0 = y0 / e0;
      const double z1 = y1 / e1;
      const double g = z0 * z0 + z1 * z1 - 1.0;
      if (g == 0.0) return 0.0;
      const double r0 = (e0 / e1) * (e0 / e1);
      const double sbar = ellipse_root(r0, z0, z1, g);
      const double x0 = r0 * y0 / (sbar + r0);
      const double x1 = y1 / (sbar + 1.0);
      return std::hypot(x0 - y0, x1 - y1);
    }
    return std::abs(y1 - e1);
  }
  const double numer0 = e0 * y0;
  const double denom0 = e0 * e0 - e1 * e1;
  if (numer0 < denom0) {
    const double xde0 = numer0 / denom0;
    const double x0 = e0 * xde0;
    const double x1 = e1 * std::sqrt(std::max(0.0, 1.0 - xde0 * xde0));
    return std::hypot(x0 - y0, x1);
  }
  return std::abs(y0 - e0);
}

}  // namespace

// ---------------------------------------------------------------- Obstacle

Obstacle::Obstacle(Kind kind, int dimension, double height, double curvature, double plateau_radius)
    : kind_(kind), dimension_(dimension), height_(height), curvature_(curvature),
      plateau_radius_(plateau_radius) {
  if (dimension_ < 2) throw PreconditionError("obstacle dimension must be >= 2");
}

Obstacle Obstacle::cap(int dimension, double height, double curvature) {
  if (!(curvature > 0.0)) throw PreconditionError("cap obstacle needs curvature > 0");
  return Obstacle(Kind::cap, dimension, height, curvature, 0.0);
}

Obstacle Obstacle::plateau(int dimension, double height, double curvature, double plateau_radius) {
  if (!(curvature > 0.0)) throw PreconditionError("plateau obstacle needs curvature > 0");
  if (!(plateau_radius > 0.0)) throw PreconditionError("plateau obstacle needs plateau_radius > 0");
  return Obstacle(Kind::plateau, dimension, height, curvature, plateau_radius);
}

Obstacle Obstacle::constant(int dimension, double value) {
  if (value > 0.0) {
    throw PreconditionError("a positive constant obstacle has unbounded support");
  }
  return Obstacle(Kind::constant, dimension, value, 0.0, 0.0);
}

double Obstacle::value(double r) const {
  switch (kind_) {
    case Kind::cap:
      return height_ - curvature_ * r * r;
    case Kind::plateau: {
      if (r <= plateau_radius_) return height_;
      const double s = r - plateau_radius_;
      return height_ - curvature_ * s * s;
    }
    case Kind::constant:
      return height_;
  }
  return 0.0;
}

double Obstacle::slope(double r) const {
  switch (kind_) {
    case Kind::cap:
      return -2.0 * curvature_ * r;
    case Kind::plateau:
      return r <= plateau_radius_ ? 0.0 : -2.0 * curvature_ * (r - plateau_radius_);
    case Kind::constant:
      return 0.0;
  }
  return 0.0;
}

double Obstacle::second_derivative(double r) const {
  switch (kind_) {
    case Kind::cap:
      return -2.0 * curvature_;
    case Kind::plateau:
      return r <= plateau_radius_ ? 0.0 : -2.0 * curvature_;
    case Kind::constant:
      return 0.0;
  }
  return 0.0;
}

double Obstacle::support_radius() const {
  if (height_ <= 0.0) return 0.0;
  switch (kind_) {
    case Kind::cap:
      return std::sqrt(height_ / curvature_);
    case Kind::plateau:
      return plateau_radius_ + std::sqrt(height_ / curvature_);
    case Kind::constant:
      return 0.0;
  }
  return 0.0;
}

std::string Obstacle::name() const {
  switch (kind_) {
    case Kind::cap:
      return "cap";
    case Kind::plateau:
      return "plateau";
    case Kind::constant:
      return "constant";
  }
  return "?";
}

std::string Obstacle::params() const {
  switch (kind_) {
    case Kind::cap:
      return join_params({height_, curvature_});
    case Kind::plateau:
      return join_params({height_, curvature_, plateau_radius_});
    case Kind::constant:
      return join_params({height_});
  }
  return {};
}

// ---------------------------------------------------------------- DomainSpec

DomainSpec::DomainSpec(Kind kind, double p0, double p1, double p2, double p3)
    : kind_(kind), p0_(p0), p1_(p1), p2_(p2), p3_(p3) {}

DomainSpec DomainSpec::ball(double radius) {
  if (!(radius > 0.0)) throw InvalidDomainError("ball radius must be positive");
  return DomainSpec(Kind::ball, radius, 0.0, 0.0, 0.0);
}

DomainSpec DomainSpec::ellipse(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidDomainError("ellipse semi-axes must be positive");
  return DomainSpec(Kind::ellipse, a, b, 0.0, 0.0);
}

DomainSpec DomainSpec::shifted_ball(double radius, Vec2 center) {
  if (!(radius > 0.0)) throw InvalidDomainError("ball radius must be positive");
  return DomainSpec(Kind::shifted_ball, radius, center.x, center.y, 0.0);
}

DomainSpec DomainSpec::perturbed_ball(double radius, double amplitude, int mode) {
  if (!(radius > 0.0)) throw InvalidDomainError("ball radius must be positive");
  if (!(amplitude >= 0.0 && amplitude < 0.5)) {
    throw InvalidDomainError("perturbation amplitude must lie in [0, 0.5)");
  }
  if (mode < 1) throw InvalidDomainError("perturbation mode must be >= 1");
  return DomainSpec(Kind::perturbed_ball, radius, amplitude, static_cast<double>(mode), 0.0);
}

std::string DomainSpec::name() const {
  switch (kind_) {
    case Kind::ball:
      return "ball";
    case Kind::ellipse:
      return "ellipse";
    case Kind::shifted_ball:
      return "shifted-ball";
    case Kind::perturbed_ball:
      return "perturbed-ball";
  }
  return "?";
}

std::string DomainSpec::params() const {
  switch (kind_) {
    case Kind::ball:
      return join_params({p0_});
    case Kind::ellipse:
      return join_params({p0_, p1_});
    case Kind::shifted_ball:
      return join_params({p0_, p1_, p2_});
    case Kind::perturbed_ball:
      return join_params({p0_, p1_, p2_});
  }
  return {};
}

double DomainSpec::perturbed_radius(double theta) const {
  return p0_ * (1.0 + p1_ * std::cos(p2_ * theta));
}

double DomainSpec::perturbed_distance(Vec2 p) const {
  // Nearest point on the parametrised curve: coarse scan, then golden-section
  // refinement of the three best local minima.
  constexpr int kCoarse = 720;
  const double dt = kTwoPi / kCoarse;
  auto dist2 = [&](double t) {
    const Vec2 c = boundary_point(t);
    const double dx = c.x - p.x;
    const double dy = c.y - p.y;
    return dx * dx + dy * dy;
  };
  std::array<double, kCoarse> d{};
  for (int i = 0; i < kCoarse; ++i) d[i] = dist2(i * dt);
  std::array<std::pair<double, int>, 3> best{};
  best.fill({std::numeric_limits<double>::infinity(), 0});
  for (int i = 0; i < kCoarse; ++i) {
    const double prev = d[(i + kCoarse - 1) % kCoarse];
    const double next = d[(i + 1) % kCoarse];
    if (d[i] <= prev && d[i] <= next) {
      auto worst = std::max_element(best.begin(), best.end());
      if (d[i] < worst->first) *worst = {d[i], i};
    }
  }
  double result = std::numeric_limits<double>::infinity();
  for (const auto& [value, idx] : best) {
    if (!std::isfinite(value)) continue;
    const double t0 = idx * dt;
    auto [t, neg] = golden_maximize([&](double t) { return -dist2(t); }, t0 - dt, t0 + dt, 1e-13);
    (void)t;
    result = std::min({result, -neg, value});
  }
  return std::sqrt(result);
}

double DomainSpec::ellipse_distance(Vec2 p) const {
  double e0 = p0_;
  double e1 = p1_;
  double y0 = std::abs(p.x);
  double y1 = std::abs(p.y);
  if (e0 < e1) {
    std::swap(e0, e1);
    std::swap(y0, y1);
  }
  return ellipse_quadrant_distance(e0, e1, y0, y1);
}

double DomainSpec::signed_distance(Vec2 p) const {
  switch (kind_) {
    case Kind::ball:
      return norm(p) - p0_;
    case Kind::shifted_ball:
      return norm(p - Vec2{p1_, p2_}) - p0_;
    case Kind::ellipse: {
      const double dist = ellipse_distance(p);
      return level(p) < 0.0 ? -dist : dist;
    }
    case Kind::perturbed_ball: {
      const double dist = perturbed_distance(p);
      return level(p) < 0.0 ? -dist : dist;
    }
  }
  return 0.0;
}

double DomainSpec::level(Vec2 p) const {
  switch (kind_) {
    case Kind::ball:
      return norm(p) - p0_;
    case Kind::shifted_ball:
      return norm(p - Vec2{p1_, p2_}) - p0_;
    case Kind::ellipse: {
      const double sx = p.x / p0_;
      const double sy = p.y / p1_;
      return std::sqrt(sx * sx + sy * sy) - 1.0;
    }
    case Kind::perturbed_ball: {
      const double r = norm(p);
      const double theta = std::atan2(p.y, p.x);
      return r - perturbed_radius(theta);
    }
  }
  return 0.0;
}

Vec2 DomainSpec::boundary_point(double t) const {
  switch (kind_) {
    case Kind::ball:
      return {p0_ * std::cos(t), p0_ * std::sin(t)};
    case Kind::ellipse:
      return {p0_ * std::cos(t), p1_ * std::sin(t)};
    case Kind::shifted_ball:
      return {p1_ + p0_ * std::cos(t), p2_ + p0_ * std::sin(t)};
    case Kind::perturbed_ball: {
      const double r = perturbed_radius(t);
      return {r * std::cos(t), r * std::sin(t)};
    }
  }
  return {};
}

double DomainSpec::boundary_radius(double t) const {
  switch (kind_) {
    case Kind::ball:
      return p0_;
    case Kind::perturbed_ball:
      return perturbed_radius(t);
    default:
      return norm(boundary_point(t));
  }
}

double DomainSpec::bounding_radius() const {
  switch (kind_) {
    case Kind::ball:
      return p0_;
    case Kind::ellipse:
      return std::max(p0_, p1_);
    case Kind::shifted_ball:
      return p0_ + std::hypot(p1_, p2_);
    case Kind::perturbed_ball:
      return p0_ * (1.0 + p1_);
  }
  return 0.0;
}

// ---------------------------------------------------------------- operations

Vec2 sdf_normal(const DomainSpec& domain, Vec2 p) {
  const double step = 1e-6 * domain.bounding_radius();
  const double gx = (domain.signed_distance({p.x + step, p.y}) -
                     domain.signed_distance({p.x - step, p.y})) / (2.0 * step);
  const double gy = (domain.signed_distance({p.x, p.y + step}) -
                     domain.signed_distance({p.x, p.y - step})) / (2.0 * step);
  const double g = std::hypot(gx, gy);
  if (g < 1e-8) throw DegenerateNormalError("signed distance gradient vanishes at a boundary sample");
  return {gx / g, gy / g};
}

BallRadii ball_radii(const DomainSpec& domain) {
  const double at_origin = domain.signed_distance({0.0, 0.0});
  if (!(at_origin < 0.0)) throw InvalidDomainError("the origin must lie inside the domain");

  constexpr int kSamples = 1024;
  const double dt = kTwoPi / kSamples;
  int best = 0;
  double best_r = -1.0;
  for (int i = 0; i < kSamples; ++i) {
    const double r = domain.boundary_radius(i * dt);
    if (r > best_r) {
      best_r = r;
      best = i;
    }
  }
  const auto [t, refined] = golden_maximize([&](double s) { return domain.boundary_radius(s); },
                                            (best - 1) * dt, (best + 1) * dt, 1e-10);
  (void)t;
  return {-at_origin, std::max(best_r, refined)};
}

double diameter(const DomainSpec& domain) {
  constexpr int kSamples = 1024;
  const double dt = kTwoPi / kSamples;
  std::vector<Vec2> pts(kSamples);
  for (int i = 0; i < kSamples; ++i) pts[i] = domain.boundary_point(i * dt);
  int bi = 0;
  int bj = 0;
  double best = -1.0;
  for (int i = 0; i < kSamples; ++i) {
    for (int j = i + 1; j < kSamples; ++j) {
      const double d = norm(pts[i] - pts[j]);
      if (d > best) {
        best = d;
        bi = i;
        bj = j;
      }
    }
  }
  // Alternating 1-D refinement of the two endpoints.
  double ti = bi * dt;
  double tj = bj * dt;
  for (int round = 0; round < 8; ++round) {
    const Vec2 pj = domain.boundary_point(tj);
    auto ri = golden_maximize([&](double s) { return norm(domain.boundary_point(s) - pj); },
                              ti - dt, ti + dt, 1e-10);
    ti = ri.first;
    const Vec2 pi = domain.boundary_point(ti);
    auto rj = golden_maximize([&](double s) { return norm(domain.boundary_point(s) - pi); },
                              tj - dt, tj + dt, 1e-10);
    tj = rj.first;
    best = std::max(best, rj.second);
  }
  return best;
}

double diameter(const std::vector<BoundarySample>& samples) {
  if (samples.size() < 2) throw SamplingError("diameter needs at least two boundary samples");
  double best = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      best = std::max(best, norm(samples[i].point - samples[j].point));
    }
  }
  return best;
}

std::vector<BoundarySample> sample_boundary(const DomainSpec& domain, int n) {
  if (n < 4) throw SamplingError("boundary sampling needs at least 4 points");

  const int table = std::max(8192, 64 * n);
  const double dt = kTwoPi / table;
  std::vector<double> arc(table + 1, 0.0);
  Vec2 prev = domain.boundary_point(0.0);
  for (int k = 1; k <= table; ++k) {
    const Vec2 cur = domain.boundary_point(k * dt);
    arc[k] = arc[k - 1] + norm(cur - prev);
    prev = cur;
  }
  const double length = arc[table];

  std::vector<BoundarySample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double s = length * k / n;
    const auto it = std::upper_bound(arc.begin(), arc.end(), s);
    const std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - arc.begin()), table);
    const std::size_t lo = hi - 1;
    const double span = arc[hi] - arc[lo];
    const double frac = span > 0.0 ? (s - arc[lo]) / span : 0.0;
    const double t = (static_cast<double>(lo) + frac) * dt;
    BoundarySample sample;
    sample.curve_parameter = t;
    sample.point = domain.boundary_point(t);
    sample.outward_normal = sdf_normal(domain, sample.point);
    sample.arc_parameter = s;
    out.push_back(sample);
  }
  return out;
}

}  // namespace obstacle
