#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "obstacle/errors.hpp"
#include "obstacle/radial_solver.hpp"
#include "obstacle/two_phase.hpp"

using namespace obstacle;

namespace {

const Obstacle kPsi = Obstacle::cap(2, 1.0, 4.0);
constexpr double kH = 1.0 / 64.0;

const TwoPhaseSolution& centred() {
  static const TwoPhaseSolution sol =
      solve_two_phase_grid(Conductivity(DomainSpec::ball(1.0), 2.0, 1.0), 2.0, kPsi, kH);
  return sol;
}

const TwoPhaseSolution& shifted() {
  static const TwoPhaseSolution sol = solve_two_phase_grid(
      Conductivity(DomainSpec::shifted_ball(1.0, {0.2, 0.0}), 2.0, 1.0), 2.0, kPsi, kH);
  return sol;
}

std::vector<Vec2> directions(int n, double offset) {
  std::vector<Vec2> out;
  for (int k = 0; k < n; ++k) {
    const double t = offset + 2.0 * std::numbers::pi * k / n;
    out.push_back({std::cos(t), std::sin(t)});
  }
  return out;
}

}  // namespace

TEST_CASE("conductivity and hypotheses") {
  CHECK_THROWS_AS(Conductivity(DomainSpec::ball(1.0), 1.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(Conductivity(DomainSpec::ball(1.0), 0.0, 1.0), PreconditionError);
  const Conductivity c(DomainSpec::ball(1.0), 2.0, 1.0);
  CHECK(c({0.5, 0.0}) == 2.0);
  CHECK(c({1.5, 0.0}) == 1.0);
  CHECK_THROWS_AS(solve_two_phase_grid(c, 1.0, kPsi, kH), HypothesisError);
  CHECK_THROWS_AS(solve_two_phase_grid(c, 2.0, Obstacle::cap(2, 1.0, 0.5), kH), HypothesisError);
  CHECK_THROWS_AS(solve_two_phase_grid(c, 2.0, Obstacle::constant(2, -1.0), kH), HypothesisError);
}

TEST_CASE("centred inclusion reproduces the radial interface value") {
  const TwoPhaseSolution& s = centred();
  const double d = solve_radial_two_phase(kPsi, 1.0, 2.0, 2.0, 1.0).interface_value;
  CHECK(s.field.log.converged);
  CHECK(s.consistent);
  CHECK(std::abs(s.d_best - d) < 2e-2);
  CHECK(s.deviation < 5e-3);
  const DirichletDeviation dev = dirichlet_deviation(s);
  CHECK(dev.d_best == s.d_best);
  CHECK(dev.deviation == s.deviation);
  const TransmissionResidual tr = transmission_residual(s);
  CHECK(tr.flux_scale > 0.0);
  CHECK(tr.residual < 0.3 * tr.flux_scale);
}

TEST_CASE("mean estimator gives a nearby interface value") {
  TwoPhaseSolution s = centred();
  s.estimator = InterfaceEstimator::mean;
  extract_interface(s, 256);
  CHECK(s.interface.size() == 256);
  CHECK(std::abs(s.d_best - centred().d_best) < 1e-3);
}

TEST_CASE("outer phase is connected and bounded by the interface value") {
  const ConnectednessResult c = connectedness_check(centred());
  CHECK(c.connected);
  CHECK(c.components == 1);
  CHECK(c.min_u_minus > 0.0);
  CHECK(c.bounds_hold);
  CHECK(c.outer_boundary_value == 0.0);
}

TEST_CASE("shifted inclusion: non-constant trace and a tangency event at the shift") {
  CHECK(shifted().deviation > 10.0 * centred().deviation);
  const MovingPlaneReport r = moving_plane_scan(shifted(), {1.0, 0.0}, kH);
  CHECK(r.event == PlaneEvent::internal_tangency);
  CHECK(std::abs(r.lambda_star - 0.2) <= kH);
  CHECK(r.sigma_nodes > 0);
  CHECK(to_string(r.event) == "internal-tangency");
}

TEST_CASE("centred inclusion: every scan reaches the origin with small reflected differences") {
  for (const MovingPlaneReport& r : moving_plane_scans(centred(), directions(8, 0.1), kH)) {
    CHECK(r.event == PlaneEvent::origin_reached);
    CHECK(r.lambda_star <= kH);
    CHECK(r.max_abs_w_minus <= 5e-3);
    CHECK(r.max_abs_w_plus <= 5e-3);
  }
}

TEST_CASE("ellipse: symmetry axes reach the origin, the diagonal meets dD orthogonally") {
  const TwoPhaseSolution s = solve_two_phase_grid(
      Conductivity(DomainSpec::ellipse(1.0, 1.3), 2.0, 1.0), 2.0, kPsi, kH);
  const auto r = moving_plane_scans(s, {{1.0, 0.0}, {0.0, 1.0}, {M_SQRT1_2, M_SQRT1_2}}, kH);
  CHECK(r[0].event == PlaneEvent::origin_reached);
  CHECK(r[1].event == PlaneEvent::origin_reached);
  CHECK(r[2].event == PlaneEvent::orthogonality);
  CHECK(r[2].lambda_star > kH);
  CHECK_THROWS_AS(moving_plane_scan(s, {0.0, 0.0}, kH), PreconditionError);
}

TEST_CASE("scans are independent of the thread count") {
  const auto g = directions(6, 0.3);
  const auto one = moving_plane_scans(shifted(), g, kH, 1);
  const auto many = moving_plane_scans(shifted(), g, kH, 8);
  REQUIRE(one.size() == many.size());
  for (std::size_t k = 0; k < one.size(); ++k) {
    CHECK(one[k].lambda_star == many[k].lambda_star);
    CHECK(one[k].event == many[k].event);
    CHECK(one[k].min_w_minus == many[k].min_w_minus);
    CHECK(one[k].min_w_plus == many[k].min_w_plus);
  }
}

TEST_CASE("penalized inner problem approaches the inner phase") {
  const PenalizedRecord p = penalized_two_phase(centred(), {0.1, 0.05, 0.025});
  REQUIRE(p.sup_difference.size() == 3);
  CHECK(p.sup_difference[1] < p.sup_difference[0]);
  CHECK(p.sup_difference[2] < p.sup_difference[1]);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(p.converged[k]);
    CHECK(p.min_excess[k] > 0.0);
  }
  CHECK(std::isnan(p.obstacle_swap_difference));
}

TEST_CASE("CSV writers") {
  std::ostringstream os;
  write_moving_plane_csv_header(os);
  CHECK(os.str() == "gamma_x,gamma_y,lambda_star,event,px,py,min_w_minus,min_w_plus\n");
  std::ostringstream field;
  write_two_phase_field_csv(field, centred());
  CHECK(field.str().rfind("x,y,u,psi,coincidence,phase\n", 0) == 0);
}
