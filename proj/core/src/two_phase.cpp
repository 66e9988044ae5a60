#include "obstacle/two_phase.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

#include "obstacle/errors.hpp"
#include "obstacle/radial_solver.hpp"

namespace obstacle {

namespace {

struct OneSided {
  double near = 0.0;
  double far = 0.0;
};

// Values at p + s*step*nu and p + 2 s*step*nu from nodes of one phase only.
std::optional<OneSided> phase_values(const TwoPhaseSolution& sol, Vec2 p, Vec2 nu, double step,
                                     int side) {
  const Grid& g = *sol.field.grid;
  auto usable = [&](std::size_t n) { return sol.phase[n] == side; };
  const double s = side > 0 ? -step : step;
  const auto a = biquadratic_interpolate(g, sol.field.u, p + s * nu, usable);
  const auto b = biquadratic_interpolate(g, sol.field.u, p + (2.0 * s) * nu, usable);
  if (!a || !b) return std::nullopt;
  return OneSided{*a, *b};
}

InterfaceSample interface_sample(const TwoPhaseSolution& sol, const BoundarySample& where,
                                 std::size_t index, std::vector<std::string>& warnings) {
  const double h = sol.field.grid->spacing();
  InterfaceSample out;
  out.where = where;
  double step = h;
  auto plus = phase_values(sol, where.point, where.outward_normal, step, +1);
  auto minus = phase_values(sol, where.point, where.outward_normal, step, -1);
  if (!plus || !minus) {
    step = 0.5 * h;
    plus = phase_values(sol, where.point, where.outward_normal, step, +1);
    minus = phase_values(sol, where.point, where.outward_normal, step, -1);
    if (!plus || !minus) {
      throw SamplingError("no one-sided interpolation stencil at interface sample " +
                          std::to_string(index));
    }
    warnings.push_back("interface sample " + std::to_string(index) +
                       ": offsets shrunk to h/2, h");
  }
  out.value_plus = 2.0 * plus->near - plus->far;
  out.value_minus = 2.0 * minus->near - minus->far;
  out.value = 0.5 * (out.value_plus + out.value_minus);
  // d/dnu with nu pointing out of D: the + side lies at negative offsets.
  out.flux_plus = (3.0 * out.value - 4.0 * plus->near + plus->far) / (2.0 * step);
  out.flux_minus = (-3.0 * out.value + 4.0 * minus->near - minus->far) / (2.0 * step);
  return out;
}

void estimate_d(TwoPhaseSolution& sol) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  for (const auto& s : sol.interface) {
    lo = std::min(lo, s.value);
    hi = std::max(hi, s.value);
    sum += s.value;
  }
  if (sol.estimator == InterfaceEstimator::minimax) {
    sol.d_best = 0.5 * (hi + lo);
    sol.deviation = 0.5 * (hi - lo);
  } else {
    sol.d_best = sum / static_cast<double>(sol.interface.size());
    sol.deviation = std::max(hi - sol.d_best, sol.d_best - lo);
  }
  sol.consistent = sol.d_best > 0.0 && sol.d_best < sol.obstacle.max_value();
  if (!sol.consistent) {
    sol.warnings.push_back("interface value outside (0, max psi); report inconsistent");
  }
}

void check_two_phase_hypotheses(const Conductivity& cond, double L, const Obstacle& psi) {
  if (psi.dimension() != 2) throw PreconditionError("grid runs are two-dimensional");
  if (!(psi.max_value() > 0.0)) throw HypothesisError("obstacle is never positive");
  const BallRadii radii = ball_radii(cond.inner());
  if (!(radii.outer < L)) {
    throw HypothesisError("inner domain is not contained in B_L(0) (R_D = " +
                          std::to_string(radii.outer) + ")");
  }
  if (!(psi.support_radius() < radii.inner)) {
    throw HypothesisError("obstacle support is not inside the inner domain");
  }
}

}  // namespace

Conductivity::Conductivity(DomainSpec inner, double sigma_plus, double sigma_minus)
    : inner_(std::move(inner)), sigma_plus_(sigma_plus), sigma_minus_(sigma_minus) {
  if (!(sigma_plus > 0.0 && sigma_minus > 0.0)) {
    throw PreconditionError("conductivities must be positive");
  }
  if (sigma_plus == sigma_minus) throw PreconditionError("equal conductivities: not two-phase");
}

TwoPhaseSolution solve_two_phase_grid(const Conductivity& cond, double L, const Obstacle& psi,
                                      double h, const TwoPhaseOptions& options) {
  check_two_phase_hypotheses(cond, L, psi);
  GridProblem problem = make_problem(assemble(DomainSpec::ball(L), h), psi);
  problem.conductivity = [cond](Vec2 x) { return cond(x); };

  TwoPhaseSolution sol{cond, psi, L, psor_solve(problem, options.solver), {}, {},
                       options.estimator, 0.0, 0.0, true, {}};
  const Grid& g = *sol.field.grid;
  sol.phase.assign(g.node_count(), 0);
  for (std::size_t n : g.unknowns()) sol.phase[n] = cond.inside(g.position(n)) ? 1 : -1;
  if (!sol.field.log.converged) {
    sol.warnings.push_back("solver stopped after " + std::to_string(sol.field.log.sweeps) +
                           " sweeps without reaching tol");
  }

  extract_interface(sol, options.interface_samples);
  return sol;
}

void extract_interface(TwoPhaseSolution& sol, int samples) {
  const auto where = sample_boundary(sol.conductivity.inner(), samples);
  sol.interface.clear();
  sol.interface.reserve(where.size());
  for (std::size_t k = 0; k < where.size(); ++k) {
    sol.interface.push_back(interface_sample(sol, where[k], k, sol.warnings));
  }
  estimate_d(sol);
}

DirichletDeviation dirichlet_deviation(const TwoPhaseSolution& sol) {
  return {sol.d_best, sol.deviation, sol.consistent};
}

TransmissionResidual transmission_residual(const TwoPhaseSolution& sol) {
  const double sp = sol.conductivity.sigma_plus();
  const double sm = sol.conductivity.sigma_minus();
  TransmissionResidual r;
  for (const auto& s : sol.interface) {
    r.residual = std::max(r.residual, std::abs(sp * s.flux_plus - sm * s.flux_minus));
    r.flux_scale = std::max(r.flux_scale, std::abs(sp * s.flux_plus));
  }
  return r;
}

ConnectednessResult connectedness_check(const TwoPhaseSolution& sol, double tol) {
  const Grid& g = *sol.field.grid;
  ConnectednessResult out;
  out.min_u_minus = std::numeric_limits<double>::infinity();
  out.max_u_minus = -out.min_u_minus;
  for (std::size_t n : g.unknowns()) {
    if (sol.phase[n] != -1) continue;
    out.min_u_minus = std::min(out.min_u_minus, sol.field.u[n]);
    out.max_u_minus = std::max(out.max_u_minus, sol.field.u[n]);
  }
  out.components = label_components(g, [&sol](std::size_t n) { return sol.phase[n] == -1; }).count;
  // Boundary intersections on the outer circle carry the imposed data.
  const double L = sol.outer_radius;
  for (int k = 0; k < 64; ++k) {
    const double t = 2.0 * std::numbers::pi * k / 64.0;
    out.outer_boundary_value =
        std::max(out.outer_boundary_value, std::abs(sol.field.dirichlet({L * std::cos(t), L * std::sin(t)})));
  }
  out.connected = out.components == 1;
  out.bounds_hold = out.min_u_minus > 0.0 && out.max_u_minus < sol.d_best + tol;
  return out;
}

PenalizedRecord penalized_two_phase(const TwoPhaseSolution& sol,
                                    const std::vector<double>& epsilons, bool compare_obstacles) {
  const DomainSpec& D = sol.conductivity.inner();
  const double h = sol.field.grid->spacing();
  PenalizedRecord rec;
  rec.rho = ball_radii(D).inner;
  const RadialSolution u_rho = solve_radial_one_phase(sol.obstacle, rec.rho);
  auto radial_obstacle = [&u_rho](Vec2 x) {
    const double r = norm(x);
    return r < u_rho.domain_radius ? eval_radial(u_rho, r) : 0.0;
  };

  GridProblem problem;
  problem.grid = assemble(D, h);
  problem.obstacle = sample_obstacle(*problem.grid, radial_obstacle);
  problem.dirichlet = constant_field(sol.d_best);

  const Grid& inner = *problem.grid;
  const Grid& outer = *sol.field.grid;
  std::vector<std::size_t> matched(inner.node_count(), outer.node_count());
  for (std::size_t n : inner.unknowns()) {
    if (auto m = outer.node_at(inner.position(n))) matched[n] = *m;
  }

  PenaltyOptions options;
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    options.continuation = k == 0;
    GridSolution v = penalty_solve(problem, epsilons[k], options);
    double diff = 0.0;
    double excess = std::numeric_limits<double>::infinity();
    for (std::size_t n : inner.unknowns()) {
      excess = std::min(excess, v.u[n] - sol.d_best);
      if (matched[n] < outer.node_count() && sol.phase[matched[n]] == 1) {
        diff = std::max(diff, std::abs(v.u[n] - sol.field.u[matched[n]]));
      }
    }
    rec.epsilons.push_back(epsilons[k]);
    rec.sup_difference.push_back(diff);
    rec.min_excess.push_back(excess);
    rec.converged.push_back(v.log.converged);
    options.initial = v.u;
    rec.last = std::move(v);
  }

  rec.obstacle_swap_difference = std::numeric_limits<double>::quiet_NaN();
  if (compare_obstacles) {
    GridProblem swapped;
    swapped.grid = sol.field.grid;
    swapped.obstacle = sample_obstacle(outer, radial_obstacle);
    swapped.conductivity = [cond = sol.conductivity](Vec2 x) { return cond(x); };
    const GridSolution alt = psor_solve(swapped);
    double diff = 0.0;
    for (std::size_t n : outer.unknowns()) diff = std::max(diff, std::abs(alt.u[n] - sol.field.u[n]));
    rec.obstacle_swap_difference = diff;
  }
  return rec;
}

void write_two_phase_field_csv(std::ostream& os, const TwoPhaseSolution& sol) {
  write_field_csv(os, sol.field, [&sol](std::size_t n) { return static_cast<int>(sol.phase[n]); });
}

}  // namespace obstacle
