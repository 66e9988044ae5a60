#include <doctest.h>

#include <cmath>

#include "obstacle/errors.hpp"
#include "obstacle/radial_solver.hpp"

using namespace obstacle;

namespace {
const Obstacle kCap = Obstacle::cap(2, 1.0, 8.0);
}

TEST_CASE("one-phase contact radius and flux against high-precision values") {
  const RadialSolution s = solve_radial_one_phase(kCap, 1.0);
  CHECK(s.contact_radius == doctest::Approx(0.164719414920130881877578783082).epsilon(1e-13));
  CHECK(s.boundary_flux == doctest::Approx(-0.434119770426083778863949336974).epsilon(1e-13));
  CHECK(eval_radial(s, 1.0) == doctest::Approx(0.0).epsilon(1e-14));
  // C^1 fit at the contact radius.
  const double a = s.contact_radius;
  CHECK(eval_radial(s, a) == doctest::Approx(kCap.value(a)).epsilon(1e-14));
  CHECK(eval_radial_derivative(s, a) == doctest::Approx(kCap.slope(a)).epsilon(1e-12));
  CHECK_THROWS_AS(eval_radial(s, 1.5), DomainError);
}

TEST_CASE("solution stays above the obstacle and is radially nonincreasing") {
  const RadialSolution s = solve_radial_one_phase(kCap, 1.0);
  double prev = eval_radial(s, 0.0);
  for (int k = 1; k <= 400; ++k) {
    const double r = k / 400.0;
    const double u = eval_radial(s, r);
    CHECK(u >= kCap.value(r) - 1e-15);
    CHECK(u <= prev + 1e-15);
    prev = u;
  }
}

TEST_CASE("boundary flux strictly decreases with the radius") {
  const std::vector<double> radii{0.5, 0.75, 1.0, 1.5, 2.0, 2.4, 2.6};
  const double oracle[] = {1.493458470806696, 0.692118504867984, 0.434119770426084,
                           0.237417345146058, 0.158542156638785, 0.123673595681853,
                           0.111068961530708};
  const auto f = boundary_flux_monotonicity(kCap, radii);
  REQUIRE(f.size() == radii.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    CHECK(f[k].first == radii[k]);
    CHECK(f[k].second == doctest::Approx(oracle[k]).epsilon(1e-12));
    if (k > 0) CHECK(f[k].second < f[k - 1].second);
  }
  CHECK_THROWS_AS(boundary_flux_monotonicity(kCap, {0.2}), PreconditionError);
}

TEST_CASE("positive Dirichlet data shrinks the contact set") {
  const RadialSolution zero = solve_radial_one_phase(kCap, 1.0, 0.0);
  const RadialSolution lifted = solve_radial_one_phase(kCap, 1.0, 0.3);
  CHECK(lifted.contact_radius < zero.contact_radius);
  CHECK(eval_radial(lifted, 1.0) == doctest::Approx(0.3));
  CHECK_THROWS_AS(solve_radial_one_phase(kCap, 1.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(solve_radial_one_phase(kCap, 1.0, -0.1), PreconditionError);
}

TEST_CASE("radial errors") {
  CHECK_THROWS_AS(solve_radial_one_phase(Obstacle::constant(2, -1.0), 1.0), NoDetachmentError);
  CHECK_THROWS_AS(solve_radial_one_phase(kCap, 0.3), PreconditionError);
  CHECK_THROWS_AS(solve_radial_one_phase(kCap, kInfiniteRadius), NonexistenceError);
  CHECK_THROWS_AS(radial_kernel(2, 1.0, kInfiniteRadius), NonexistenceError);
  CHECK(radial_kernel(3, 1.0, kInfiniteRadius) == doctest::Approx(1.0));
  CHECK(radial_kernel(2, 1.0, std::exp(1.0)) == doctest::Approx(1.0));
}

TEST_CASE("plateau obstacle: contact set contains the plateau") {
  const Obstacle p = Obstacle::plateau(2, 1.0, 8.0, 0.1);
  const RadialSolution s = solve_radial_one_phase(p, 1.0);
  CHECK(s.contact_radius > 0.1);
  CHECK(s.summit_radius == doctest::Approx(0.1));
}

TEST_CASE("three-dimensional two-phase matching has the closed form") {
  const TwoPhaseRadialSolution s =
      solve_radial_two_phase(Obstacle::cap(3, 1.0, 4.0), 1.0, 2.0, 2.0, 1.0);
  CHECK(s.inner.contact_radius == doctest::Approx(1.0 / (2.0 * std::sqrt(3.0))).epsilon(1e-12));
  CHECK(s.interface_value == doctest::Approx(std::sqrt(3.0) / 9.0).epsilon(1e-12));
  // Transmission of sigma * flux across the interface.
  CHECK(2.0 * s.derivative(1.0 - 1e-12) ==
        doctest::Approx(1.0 * s.derivative(1.0 + 1e-12)).epsilon(1e-8));
  CHECK(s.eval(2.0) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("exterior problem: exact in three dimensions, absent in two") {
  const TwoPhaseRadialSolution ext =
      solve_radial_two_phase(Obstacle::cap(3, 1.0, 4.0), 1.0, kInfiniteRadius, 2.0, 1.0);
  CHECK(ext.inner.contact_radius == doctest::Approx(0.266044443118978035).epsilon(1e-12));
  CHECK(ext.interface_value == doctest::Approx(0.301288502852308658).epsilon(1e-12));
  CHECK_THROWS_AS(
      solve_radial_two_phase(Obstacle::cap(2, 1.0, 4.0), 1.0, kInfiniteRadius, 2.0, 1.0),
      NonexistenceError);

  const auto p2 = exterior_nonexistence_probe(Obstacle::cap(2, 1.0, 4.0), 1.0, 2.0, 1.0,
                                              {2.0, 4.0, 8.0, 16.0});
  const double oracle[] = {0.389294617365618, 0.540481709612449, 0.625811921832479,
                           0.681824279848647};
  for (std::size_t k = 0; k < p2.size(); ++k) {
    CHECK(p2[k].second == doctest::Approx(oracle[k]).epsilon(1e-12));
  }
  const auto p3 = exterior_nonexistence_probe(Obstacle::cap(3, 1.0, 4.0), 1.0, 2.0, 1.0,
                                              {8.0, 64.0, 4096.0});
  CHECK(p3[0].second < p3[1].second);
  CHECK(p3[1].second < p3[2].second);
  CHECK(p3[2].second == doctest::Approx(0.301288502852308658).epsilon(1e-3));
  CHECK_THROWS_AS(exterior_nonexistence_probe(Obstacle::cap(2, 1.0, 4.0), 1.0, 2.0, 1.0, {4.0, 2.0}),
                  PreconditionError);
  CHECK(exterior_nonexistence_probe(Obstacle::cap(2, 1.0, 4.0), 1.0, 2.0, 1.0, {}).empty());
}

TEST_CASE("two-phase preconditions") {
  const Obstacle psi = Obstacle::cap(2, 1.0, 4.0);
  CHECK_THROWS_AS(solve_radial_two_phase(psi, 1.0, 2.0, 1.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(solve_radial_two_phase(psi, 1.0, 2.0, -1.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(solve_radial_two_phase(psi, 0.4, 2.0, 2.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(solve_radial_two_phase(psi, 1.0, 0.9, 2.0, 1.0), PreconditionError);
}
