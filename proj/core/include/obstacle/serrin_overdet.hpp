#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "obstacle/geometry.hpp"
#include "obstacle/grid_vi.hpp"

namespace obstacle {

struct StabilityOptions {
  int flux_samples = 512;
  /// When set, c is taken as given and eps = max |flux - c|.
  std::optional<double> c_override;
  PsorOptions solver;
  /// Also run the torsion calibration at the same h and record its flux error.
  bool flux_budget = false;
};

/// Overdetermination audit of one grid run against the stability bound
/// R - rho <= K eps.
struct StabilityReport {
  int dimension = 2;
  std::string domain;
  std::string params;
  double h = 0.0;
  double rho = 0.0;
  double R = 0.0;
  double Rstar = 0.0;
  /// Minimax fit of the boundary flux: c = (max + min) / 2, eps = (max - min) / 2.
  double c = 0.0;
  double eps = 0.0;
  /// -u'_{R*}(R*) of the radial solution on the ball of radius R*.
  double flux_at_Rstar = 0.0;
  double K = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
  /// False when the fitted c is not negative; the bound is then not interpreted.
  bool valid = true;
  bool converged = true;
  double solver_tol = 0.0;
  long sweeps = 0;
  double flux_budget = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> warnings;
};

/// Throws HypothesisError unless max psi > 0 and supp(psi^+) lies strictly
/// inside the inscribed ball B_rho(0).
void check_obstacle_hypotheses(const DomainSpec& domain, const Obstacle& psi);

/// Zero-Dirichlet PSOR solve of the one-phase problem on the domain.
GridSolution solve_one_phase_grid(const DomainSpec& domain, const Obstacle& psi, double h,
                                  const PsorOptions& solver = {});

StabilityReport stability_report(const DomainSpec& domain, const Obstacle& psi, double h,
                                 const StabilityOptions& options = {});
StabilityReport stability_report(const DomainSpec& domain, const Obstacle& psi,
                                 const GridSolution& sol, const StabilityOptions& options = {});

struct SandwichViolations {
  /// max(0, max over nodes in B_rho of u_rho - u)
  double below_inner = 0.0;
  /// max(0, max over domain nodes of u - u_R)
  double above_outer = 0.0;
};

SandwichViolations sandwich_check(const DomainSpec& domain, const Obstacle& psi, double h);
SandwichViolations sandwich_check(const DomainSpec& domain, const Obstacle& psi,
                                  const GridSolution& sol);

struct InclusionResult {
  bool inner_contains_solution = false;
  bool solution_contains_outer = false;
  bool inner_contains_outer = false;
  /// Contact radii of u_rho and u_R, and the circumscribing radius of the
  /// discrete coincidence set.
  double inner_contact = 0.0;
  double outer_contact = 0.0;
  double discrete_radius = 0.0;
};

/// Tests I_rho >= I >= I_R with one cell of slack; ctol <= 0 selects the
/// default coincidence tolerance.
InclusionResult inclusion_check(const DomainSpec& domain, const Obstacle& psi, double h,
                                double ctol = 0.0);
InclusionResult inclusion_check(const DomainSpec& domain, const Obstacle& psi,
                                const GridSolution& sol, double ctol = 0.0);

/// True when every node of `inner` lies within one cell (8-neighbourhood) of
/// a node of `outer`.
bool contains_with_slack(const Grid& grid, const std::vector<std::uint8_t>& outer,
                         const std::vector<std::uint8_t>& inner);

struct TorsionCalibration {
  double R = 0.0;
  double h = 0.0;
  /// max over boundary samples of |du/dnu + R/N|
  double flux_error = 0.0;
  /// max over nodes of |u - (R^2 - |x|^2) / (2N)|
  double field_error = 0.0;
  long sweeps = 0;
  bool converged = false;
};

/// Solves -Lap_h u = 1 on B_R(0) with zero data through the obstacle
/// machinery (psi = -inf) and compares against the closed form.
TorsionCalibration torsion_calibration(double R, double h, const PsorOptions& solver = {});

/// N,domain,params,h,rho,R,Rstar,c,eps,K,lhs,rhs,satisfied,warnings
void write_report_csv_header(std::ostream& os);
void write_report_csv_row(std::ostream& os, const StabilityReport& report);

}  // namespace obstacle
