#include <doctest.h>

#include <cmath>
#include <numbers>

#include "obstacle/errors.hpp"
#include "obstacle/geometry.hpp"

using namespace obstacle;

TEST_CASE("obstacle families carry exact derivatives") {
  const Obstacle cap = Obstacle::cap(2, 1.0, 8.0);
  CHECK(cap.value(0.25) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(cap.slope(0.25) == doctest::Approx(-4.0));
  CHECK(cap.support_radius() == doctest::Approx(1.0 / std::sqrt(8.0)).epsilon(1e-15));

  const Obstacle plateau = Obstacle::plateau(2, 1.0, 8.0, 0.1);
  CHECK(plateau.value(0.05) == 1.0);
  CHECK(plateau.value(0.2) == doctest::Approx(0.92));
  CHECK(plateau.summit_radius() == 0.1);

  for (const Obstacle& psi : {cap, plateau}) {
    for (double r : {0.03, 0.17, 0.31, 0.6}) {
      const double step = 1e-5;
      const double d1 = (psi.value(r + step) - psi.value(r - step)) / (2 * step);
      const double d2 = (psi.slope(r + step) - psi.slope(r - step)) / (2 * step);
      CHECK(psi.slope(r) == doctest::Approx(d1).epsilon(1e-7));
      CHECK(psi.second_derivative(r) == doctest::Approx(d2).epsilon(1e-7));
    }
  }
}

TEST_CASE("obstacle preconditions") {
  CHECK_THROWS_AS(Obstacle::cap(1, 1.0, 8.0), PreconditionError);
  CHECK_THROWS_AS(Obstacle::cap(2, 1.0, 0.0), PreconditionError);
  CHECK_THROWS_AS(Obstacle::plateau(2, 1.0, 8.0, 0.0), PreconditionError);
  CHECK_THROWS_AS(Obstacle::constant(2, 0.5), PreconditionError);
  CHECK(Obstacle::constant(2, -1.0).support_radius() == 0.0);
}

TEST_CASE("domain constructors reject invalid parameters") {
  CHECK_THROWS_AS(DomainSpec::ball(0.0), InvalidDomainError);
  CHECK_THROWS_AS(DomainSpec::ellipse(1.0, -1.0), InvalidDomainError);
  CHECK_THROWS_AS(DomainSpec::perturbed_ball(1.0, 0.5, 4), InvalidDomainError);
  CHECK_THROWS_AS(DomainSpec::perturbed_ball(1.0, 0.1, 0), InvalidDomainError);
  CHECK_THROWS_AS(ball_radii(DomainSpec::shifted_ball(1.0, {1.5, 0.0})), InvalidDomainError);
}

TEST_CASE("centred inradius and circumradius") {
  struct Case {
    DomainSpec domain;
    double inner, outer;
  };
  const Case cases[] = {
      {DomainSpec::ball(1.0), 1.0, 1.0},
      {DomainSpec::ellipse(1.0, 1.3), 1.0, 1.3},
      {DomainSpec::shifted_ball(1.0, {0.2, 0.0}), 0.8, 1.2},
      {DomainSpec::perturbed_ball(1.0, 0.1, 4), 0.9, 1.1},
  };
  for (const auto& c : cases) {
    CAPTURE(c.domain.name());
    const BallRadii r = ball_radii(c.domain);
    CHECK(r.inner == doctest::Approx(c.inner).epsilon(1e-9));
    CHECK(r.outer == doctest::Approx(c.outer).epsilon(1e-9));
    CHECK(r.inner <= r.outer);
  }
}

TEST_CASE("signed distance: sign, zero set and exact values") {
  const DomainSpec e = DomainSpec::ellipse(1.0, 1.3);
  CHECK(e.signed_distance({0.0, 0.0}) == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(e.signed_distance({2.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(e.signed_distance({0.0, 2.0}) == doctest::Approx(0.7).epsilon(1e-10));
  for (const DomainSpec& d : {e, DomainSpec::perturbed_ball(1.0, 0.05, 4),
                              DomainSpec::shifted_ball(1.0, {0.2, 0.1})}) {
    for (int k = 0; k < 16; ++k) {
      const Vec2 p = d.boundary_point(2 * std::numbers::pi * k / 16);
      CHECK(std::abs(d.signed_distance(p)) < 1e-9);
      CHECK(d.contains(0.99 * p));
      CHECK_FALSE(d.contains(1.01 * p));
    }
  }
}

TEST_CASE("boundary samples are equispaced in arc length with outward unit normals") {
  const DomainSpec d = DomainSpec::ellipse(1.0, 1.3);
  const auto s = sample_boundary(d, 512);
  REQUIRE(s.size() == 512);
  const double ds = s[1].arc_parameter - s[0].arc_parameter;
  for (std::size_t k = 1; k < s.size(); ++k) {
    CHECK(s[k].arc_parameter - s[k - 1].arc_parameter == doctest::Approx(ds).epsilon(1e-9));
    CHECK(norm(s[k].outward_normal) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dot(s[k].outward_normal, s[k].point) > 0.0);
    CHECK(norm(s[k].point - s[k - 1].point) == doctest::Approx(ds).epsilon(1e-4));
  }
  CHECK_THROWS_AS(sample_boundary(d, 3), SamplingError);
}

TEST_CASE("diameter") {
  CHECK(diameter(DomainSpec::ball(1.0)) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(diameter(DomainSpec::ellipse(1.0, 1.3)) == doctest::Approx(2.6).epsilon(1e-9));
  CHECK(diameter(sample_boundary(DomainSpec::ball(1.0), 64)) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_THROWS_AS(diameter(std::vector<BoundarySample>(1)), SamplingError);
}

TEST_CASE("parameters print in shortest round-trip form") {
  CHECK(DomainSpec::shifted_ball(1.0, {0.2, 0.0}).params() == "1;0.2;0");
  CHECK(Obstacle::cap(2, 1.0, 8.0).params() == "1;8");
}
