#include "obstacle/serrin_overdet.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "obstacle/errors.hpp"
#include "obstacle/radial_solver.hpp"

namespace obstacle {

namespace {

std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

double radial_at(const RadialSolution& sol, Vec2 p) {
  return eval_radial(sol, std::min(norm(p), sol.domain_radius));
}

std::vector<std::uint8_t> radial_mask(const Grid& grid, double radius) {
  std::vector<std::uint8_t> mask(grid.node_count(), 0);
  for (std::size_t n : grid.unknowns()) {
    if (norm(grid.position(n)) <= radius) mask[n] = 1;
  }
  return mask;
}

}  // namespace

void check_obstacle_hypotheses(const DomainSpec& domain, const Obstacle& psi) {
  if (psi.dimension() != 2) throw PreconditionError("grid runs are two-dimensional");
  if (!(psi.max_value() > 0.0)) throw HypothesisError("obstacle is never positive");
  const BallRadii radii = ball_radii(domain);
  if (!(psi.support_radius() < radii.inner)) {
    throw HypothesisError("obstacle support radius " + std::to_string(psi.support_radius()) +
                          " is not inside the inscribed ball (rho = " +
                          std::to_string(radii.inner) + ")");
  }
}

GridSolution solve_one_phase_grid(const DomainSpec& domain, const Obstacle& psi, double h,
                                  const PsorOptions& solver) {
  check_obstacle_hypotheses(domain, psi);
  return psor_solve(make_problem(assemble(domain, h), psi), solver);
}

StabilityReport stability_report(const DomainSpec& domain, const Obstacle& psi, double h,
                                 const StabilityOptions& options) {
  const GridSolution sol = solve_one_phase_grid(domain, psi, h, options.solver);
  return stability_report(domain, psi, sol, options);
}

StabilityReport stability_report(const DomainSpec& domain, const Obstacle& psi,
                                 const GridSolution& sol, const StabilityOptions& options) {
  check_obstacle_hypotheses(domain, psi);
  if (options.flux_samples < 256) throw PreconditionError("need at least 256 flux samples");

  StabilityReport rep;
  rep.dimension = psi.dimension();
  rep.domain = domain.name();
  rep.params = domain.params();
  rep.h = sol.grid->spacing();
  rep.solver_tol = options.solver.tol;
  rep.sweeps = sol.log.sweeps;
  rep.converged = sol.log.converged;
  if (!sol.log.converged) {
    rep.warnings.push_back("solver stopped after " + std::to_string(sol.log.sweeps) +
                           " sweeps without reaching tol");
  }

  const BallRadii radii = ball_radii(domain);
  rep.rho = radii.inner;
  rep.R = radii.outer;
  rep.Rstar = diameter(domain);

  const auto samples = sample_boundary(domain, options.flux_samples);
  const NormalDerivatives nd = normal_derivative(sol, samples);
  for (const auto& w : nd.warnings) rep.warnings.push_back(w);
  const auto [lo, hi] = std::minmax_element(nd.flux.begin(), nd.flux.end());
  if (options.c_override) {
    rep.c = *options.c_override;
    rep.eps = 0.0;
    for (double f : nd.flux) rep.eps = std::max(rep.eps, std::abs(f - rep.c));
  } else {
    rep.c = 0.5 * (*hi + *lo);
    rep.eps = 0.5 * (*hi - *lo);
  }

  const RadialSolution outer = solve_radial_one_phase(psi, rep.Rstar);
  rep.flux_at_Rstar = -outer.boundary_flux;
  rep.K = 2.0 * rep.Rstar / ((rep.dimension - 1) * rep.flux_at_Rstar);
  rep.lhs = rep.R - rep.rho;
  rep.rhs = rep.K * rep.eps;
  rep.satisfied = rep.lhs <= rep.rhs;
  if (!(rep.c < 0.0)) {
    rep.valid = false;
    rep.warnings.push_back("fitted c is not negative; stability bound not applicable");
  }
  if (options.flux_budget) {
    rep.flux_budget = torsion_calibration(1.0, rep.h, options.solver).flux_error;
  }
  return rep;
}

SandwichViolations sandwich_check(const DomainSpec& domain, const Obstacle& psi, double h) {
  return sandwich_check(domain, psi, solve_one_phase_grid(domain, psi, h));
}

SandwichViolations sandwich_check(const DomainSpec& domain, const Obstacle& psi,
                                  const GridSolution& sol) {
  check_obstacle_hypotheses(domain, psi);
  const BallRadii radii = ball_radii(domain);
  const RadialSolution inner = solve_radial_one_phase(psi, radii.inner);
  const RadialSolution outer = solve_radial_one_phase(psi, radii.outer);
  const Grid& g = *sol.grid;
  SandwichViolations v;
  for (std::size_t n : g.unknowns()) {
    const Vec2 p = g.position(n);
    if (norm(p) < radii.inner) {
      v.below_inner = std::max(v.below_inner, radial_at(inner, p) - sol.u[n]);
    }
    v.above_outer = std::max(v.above_outer, sol.u[n] - radial_at(outer, p));
  }
  return v;
}

bool contains_with_slack(const Grid& grid, const std::vector<std::uint8_t>& outer,
                         const std::vector<std::uint8_t>& inner) {
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    if (!inner[n]) continue;
    const int i = grid.column(n);
    const int j = grid.row(n);
    bool found = false;
    for (int dj = -1; dj <= 1 && !found; ++dj) {
      for (int di = -1; di <= 1 && !found; ++di) {
        if (grid.in_box(i + di, j + dj) && outer[grid.node(i + di, j + dj)]) found = true;
      }
    }
    if (!found) return false;
  }
  return true;
}

InclusionResult inclusion_check(const DomainSpec& domain, const Obstacle& psi, double h,
                                double ctol) {
  return inclusion_check(domain, psi, solve_one_phase_grid(domain, psi, h), ctol);
}

InclusionResult inclusion_check(const DomainSpec& domain, const Obstacle& psi,
                                const GridSolution& sol, double ctol) {
  check_obstacle_hypotheses(domain, psi);
  const BallRadii radii = ball_radii(domain);
  const Grid& g = *sol.grid;
  InclusionResult out;
  out.inner_contact = solve_radial_one_phase(psi, radii.inner).contact_radius;
  out.outer_contact = solve_radial_one_phase(psi, radii.outer).contact_radius;
  const auto inner = radial_mask(g, out.inner_contact);
  const auto outer = radial_mask(g, out.outer_contact);
  const CoincidenceMask mid =
      coincidence_mask(sol, ctol > 0.0 ? ctol : default_coincidence_tolerance(sol));
  out.discrete_radius = mid.circumscribing_radius;
  out.inner_contains_solution = contains_with_slack(g, inner, mid.mask);
  out.solution_contains_outer = contains_with_slack(g, mid.mask, outer);
  out.inner_contains_outer = contains_with_slack(g, inner, outer);
  return out;
}

TorsionCalibration torsion_calibration(double R, double h, const PsorOptions& solver) {
  const DomainSpec ball = DomainSpec::ball(R);
  GridProblem problem;
  problem.grid = assemble(ball, h);
  problem.obstacle.assign(problem.grid->node_count(), -std::numeric_limits<double>::infinity());
  problem.dirichlet = constant_field(0.0);
  problem.source = constant_field(1.0);
  const GridSolution sol = psor_solve(problem, solver);

  constexpr int kDim = 2;
  TorsionCalibration out;
  out.R = R;
  out.h = h;
  out.sweeps = sol.log.sweeps;
  out.converged = sol.log.converged;
  const Grid& g = *sol.grid;
  for (std::size_t n : g.unknowns()) {
    const Vec2 p = g.position(n);
    const double exact = (R * R - dot(p, p)) / (2.0 * kDim);
    out.field_error = std::max(out.field_error, std::abs(sol.u[n] - exact));
  }
  const auto samples = sample_boundary(ball, 256);
  const NormalDerivatives nd = normal_derivative(sol, samples);
  for (double f : nd.flux) out.flux_error = std::max(out.flux_error, std::abs(f + R / kDim));
  return out;
}

void write_report_csv_header(std::ostream& os) {
  os << "N,domain,params,h,rho,R,Rstar,c,eps,K,lhs,rhs,satisfied,warnings\n";
}

void write_report_csv_row(std::ostream& os, const StabilityReport& r) {
  std::string warnings;
  for (const auto& w : r.warnings) {
    if (!warnings.empty()) warnings += " | ";
    warnings += w;
  }
  os << std::setprecision(17) << r.dimension << ',' << csv_safe(r.domain) << ','
     << csv_safe(r.params) << ',' << r.h << ',' << r.rho << ',' << r.R << ',' << r.Rstar << ','
     << r.c << ',' << r.eps << ',' << r.K << ',' << r.lhs << ',' << r.rhs << ','
     << (r.satisfied ? "true" : "false") << ',' << csv_safe(warnings) << '\n';
}

}  // namespace obstacle
