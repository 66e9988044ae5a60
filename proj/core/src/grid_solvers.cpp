#include <algorithm>
#include <cmath>
#include <limits>

#include "obstacle/errors.hpp"
#include "obstacle/grid_vi.hpp"

namespace obstacle {

namespace {

// Node array with one trailing zero slot addressed by boundary arms.
std::vector<double> padded_start(const GridProblem& problem, const std::vector<double>& initial) {
  const Grid& g = *problem.grid;
  std::vector<double> u(g.node_count() + 1, 0.0);
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    if (g.is_interior(n)) {
      double start = initial.empty() ? 0.0 : initial[n];
      if (initial.empty() && std::isfinite(problem.obstacle[n])) {
        start = std::max(problem.obstacle[n], 0.0);
      }
      u[n] = std::max(start, problem.obstacle[n]);
    } else {
      u[n] = problem.dirichlet(g.position(n));
    }
  }
  return u;
}

std::vector<double> sampled_source(const GridProblem& problem) {
  const Grid& g = *problem.grid;
  std::vector<double> f(g.node_count(), 0.0);
  if (problem.source) {
    for (std::size_t n : g.unknowns()) f[n] = problem.source(g.position(n));
  }
  return f;
}

GridSolution start_solution(const GridProblem& problem) {
  if (!problem.grid) throw PreconditionError("grid problem has no grid");
  if (problem.obstacle.size() != problem.grid->node_count()) {
    throw PreconditionError("obstacle samples do not match the grid");
  }
  GridSolution sol;
  sol.grid = problem.grid;
  sol.op = std::make_shared<EllipticOperator>(problem.grid, problem.dirichlet, problem.conductivity);
  sol.dirichlet = problem.dirichlet;
  sol.obstacle = problem.obstacle;
  sol.source = sampled_source(problem);
  return sol;
}

void finish_solution(GridSolution& sol, std::vector<double>&& padded) {
  padded.pop_back();
  sol.u = std::move(padded);
  sol.coincidence = coincidence_mask(sol, default_coincidence_tolerance(sol)).mask;
}

double resolve_omega(const Grid& grid, double omega) {
  if (omega == 0.0) return auto_relaxation(grid);
  if (!(omega > 0.0 && omega < 2.0)) throw PreconditionError("relaxation must lie in (0, 2)");
  return omega;
}

// Root of diag v - s - beta((psi - v) / eps) = 0. The left side is increasing
// and concave in v, so Newton started at the linear solution s / diag climbs
// monotonically to the root.
double penalty_node_solve(double diag, double s, double psi, double eps) {
  const double v0 = s / diag;
  if (!(psi > v0)) return v0;
  double v = v0;
  for (int it = 0; it < 60; ++it) {
    const PenaltyValue b = penalty_beta((psi - v) / eps);
    const double phi = diag * v - s - b.value;
    const double dphi = diag + b.first / eps;
    const double step = phi / dphi;
    v -= step;
    if (!std::isfinite(v)) break;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(v))) return v;
  }
  double lo = v0;
  double hi = psi;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double phi = diag * mid - s - penalty_beta((psi - mid) / eps).value;
    if (phi < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

PenaltyValue penalty_beta(double t) {
  if (t <= 0.0) return {0.0, 0.0, 0.0};
  if (t >= 1.0) return {t - 0.5, 1.0, 0.0};
  const double t2 = t * t;
  return {t2 * t - 0.5 * t2 * t2, 3.0 * t2 - 2.0 * t2 * t, 6.0 * t * (1.0 - t)};
}

GridSolution psor_solve(const GridProblem& problem, const PsorOptions& options) {
  GridSolution sol = start_solution(problem);
  const Grid& g = *problem.grid;
  const double omega = resolve_omega(g, options.omega);
  std::vector<double> u = padded_start(problem, options.initial);
  const auto& rows = sol.op->rows();
  const auto& unknowns = g.unknowns();
  const auto& psi = sol.obstacle;
  const auto& f = sol.source;

  sol.log.omega = omega;
  sol.method = SolveMethod::projected_relaxation;
  for (long sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    double max_update = 0.0;
    for (std::size_t k = 0; k < unknowns.size(); ++k) {
      const StencilRow& r = rows[k];
      const std::size_t n = unknowns[k];
      const double s = r.boundary_rhs + f[n] + r.coef[0] * u[r.neighbor[0]] +
                       r.coef[1] * u[r.neighbor[1]] + r.coef[2] * u[r.neighbor[2]] +
                       r.coef[3] * u[r.neighbor[3]];
      const double relaxed = u[n] + omega * (s / r.diag - u[n]);
      const double next = std::max(relaxed, psi[n]);
      max_update = std::max(max_update, std::abs(next - u[n]));
      u[n] = next;
    }
    sol.log.sweeps = sweep;
    sol.log.final_update = max_update;
    if (options.record_energy) {
      sol.log.energy.push_back(dirichlet_energy(g, std::span<const double>(u.data(), g.node_count())));
    }
    if (max_update < options.tol) {
      sol.log.converged = true;
      break;
    }
  }
  finish_solution(sol, std::move(u));
  return sol;
}

GridSolution penalty_solve(const GridProblem& problem, double epsilon,
                           const PenaltyOptions& options) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw PreconditionError("penalty epsilon must lie in (0, 1)");
  GridSolution sol = start_solution(problem);
  const Grid& g = *problem.grid;
  const double omega = resolve_omega(g, options.omega);

  std::vector<double> schedule;
  if (options.continuation) {
    for (double e = 0.1; e > epsilon * (1.0 + 1e-12); e *= 0.5) schedule.push_back(e);
  }
  schedule.push_back(epsilon);

  std::vector<double> u = padded_start(problem, options.initial);
  const auto& rows = sol.op->rows();
  const auto& unknowns = g.unknowns();
  const auto& psi = sol.obstacle;
  const auto& f = sol.source;

  sol.log.omega = omega;
  sol.log.converged = true;
  for (double eps : schedule) {
    bool converged = false;
    for (long sweep = 1; sweep <= options.max_sweeps; ++sweep) {
      double max_update = 0.0;
      for (std::size_t k = 0; k < unknowns.size(); ++k) {
        const StencilRow& r = rows[k];
        const std::size_t n = unknowns[k];
        const double s = r.boundary_rhs + f[n] + r.coef[0] * u[r.neighbor[0]] +
                         r.coef[1] * u[r.neighbor[1]] + r.coef[2] * u[r.neighbor[2]] +
                         r.coef[3] * u[r.neighbor[3]];
        const double target = penalty_node_solve(r.diag, s, psi[n], eps);
        const double next = u[n] + omega * (target - u[n]);
        max_update = std::max(max_update, std::abs(next - u[n]));
        u[n] = next;
      }
      sol.log.sweeps += 1;
      sol.log.final_update = max_update;
      if (max_update < options.tol) {
        converged = true;
        break;
      }
    }
    sol.log.converged = sol.log.converged && converged;
  }

  sol.method = SolveMethod::penalty;
  sol.epsilon = epsilon;
  double violation = 0.0;
  for (std::size_t n : unknowns) violation = std::max(violation, psi[n] - u[n]);
  sol.violation_constant = violation / epsilon;
  finish_solution(sol, std::move(u));
  return sol;
}

}  // namespace obstacle
