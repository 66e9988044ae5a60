#include <doctest.h>

#include <sstream>

#include "obstacle/errors.hpp"
#include "obstacle/radial_solver.hpp"
#include "obstacle/serrin_overdet.hpp"

using namespace obstacle;

namespace {
const Obstacle kCap = Obstacle::cap(2, 1.0, 8.0);
}

TEST_CASE("hypotheses of the stability theorem are enforced") {
  const DomainSpec ball = DomainSpec::ball(1.0);
  CHECK_THROWS_AS(check_obstacle_hypotheses(ball, Obstacle::cap(3, 1.0, 8.0)), PreconditionError);
  CHECK_THROWS_AS(check_obstacle_hypotheses(ball, Obstacle::constant(2, -1.0)), HypothesisError);
  CHECK_THROWS_AS(check_obstacle_hypotheses(ball, Obstacle::cap(2, 1.0, 0.5)), HypothesisError);
  CHECK_THROWS_AS(check_obstacle_hypotheses(DomainSpec::shifted_ball(1.0, {0.7, 0.0}), kCap),
                  HypothesisError);
  CHECK_NOTHROW(check_obstacle_hypotheses(DomainSpec::ellipse(1.0, 1.3), kCap));
  StabilityOptions few;
  few.flux_samples = 128;
  CHECK_THROWS_AS(stability_report(ball, kCap, 1.0 / 32.0, few), PreconditionError);
}

TEST_CASE("ball: constant flux, zero asymmetry, K from the radial flux at R*") {
  const StabilityReport r = stability_report(DomainSpec::ball(1.0), kCap, 1.0 / 64.0, {});
  CHECK(r.converged);
  CHECK(r.valid);
  CHECK(r.warnings.empty());
  CHECK(r.rho == doctest::Approx(1.0));
  CHECK(r.R == doctest::Approx(1.0));
  CHECK(r.lhs == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.satisfied);
  CHECK(r.Rstar == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(r.flux_at_Rstar == doctest::Approx(0.158542156638785).epsilon(1e-9));
  CHECK(r.K == doctest::Approx(4.0 / 0.158542156638785).epsilon(1e-8));
  CHECK(r.c == doctest::Approx(-0.434119770426084).epsilon(1e-2));
  CHECK(r.eps < 5e-3);
}

TEST_CASE("non-negative fitted constant invalidates the report") {
  StabilityOptions o;
  o.c_override = 0.1;
  const StabilityReport r = stability_report(DomainSpec::ball(1.0), kCap, 1.0 / 32.0, o);
  CHECK_FALSE(r.valid);
  CHECK_FALSE(r.warnings.empty());
  CHECK(r.c == 0.1);
  CHECK(r.eps > 0.5);
}

TEST_CASE("non-convergence is reported, not thrown") {
  StabilityOptions o;
  o.solver.max_sweeps = 5;
  const StabilityReport r = stability_report(DomainSpec::ball(1.0), kCap, 1.0 / 32.0, o);
  CHECK_FALSE(r.converged);
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("asymmetric domain: inequality, sandwich and inclusions") {
  const DomainSpec d = DomainSpec::ellipse(1.0, 1.3);
  const GridSolution sol = solve_one_phase_grid(d, kCap, 1.0 / 64.0);
  const StabilityReport r = stability_report(d, kCap, sol, {});
  CHECK(r.lhs == doctest::Approx(0.3));
  CHECK(r.eps > 0.0);
  CHECK(r.satisfied);
  const SandwichViolations sw = sandwich_check(d, kCap, sol);
  CHECK(sw.below_inner <= 1e-3);
  CHECK(sw.above_outer <= 1e-3);
  const InclusionResult inc = inclusion_check(d, kCap, sol);
  CHECK(inc.inner_contains_solution);
  CHECK(inc.solution_contains_outer);
  CHECK(inc.inner_contains_outer);
  CHECK(inc.outer_contact <= inc.inner_contact);
}

TEST_CASE("flux budget records the torsion flux error at the same spacing") {
  StabilityOptions o;
  o.flux_budget = true;
  const StabilityReport r = stability_report(DomainSpec::ball(1.0), kCap, 1.0 / 32.0, o);
  CHECK(r.flux_budget >= 0.0);
  CHECK(r.flux_budget < 1e-2);
}

TEST_CASE("torsion calibration") {
  const TorsionCalibration t = torsion_calibration(1.0, 1.0 / 32.0);
  CHECK(t.converged);
  CHECK(t.flux_error < 1e-2);
  CHECK(t.field_error < 5e-4);
}

TEST_CASE("report CSV") {
  std::ostringstream os;
  write_report_csv_header(os);
  CHECK(os.str() == "N,domain,params,h,rho,R,Rstar,c,eps,K,lhs,rhs,satisfied,warnings\n");
  StabilityReport r;
  r.warnings = {"a, b", "c"};
  write_report_csv_row(os, r);
  const std::string row = os.str().substr(os.str().find('\n') + 1);
  CHECK(std::count(row.begin(), row.end(), ',') == 13);
}
