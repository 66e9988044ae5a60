#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "obstacle/geometry.hpp"
#include "obstacle/grid_vi.hpp"

namespace obstacle {

/// Piecewise-constant conductivity: sigma_plus inside D, sigma_minus outside.
class Conductivity {
 public:
  Conductivity(DomainSpec inner, double sigma_plus, double sigma_minus);

  const DomainSpec& inner() const noexcept { return inner_; }
  double sigma_plus() const noexcept { return sigma_plus_; }
  double sigma_minus() const noexcept { return sigma_minus_; }
  bool inside(Vec2 x) const { return inner_.level(x) < 0.0; }
  double operator()(Vec2 x) const { return inside(x) ? sigma_plus_ : sigma_minus_; }

 private:
  DomainSpec inner_;
  double sigma_plus_;
  double sigma_minus_;
};

enum class InterfaceEstimator { minimax, mean };

/// Interface data at one sample of dD. Each phase is interpolated only from
/// its own nodes at p -/+ h nu and p -/+ 2h nu; the one-sided values at p are
/// linear extrapolations, and both derivatives use their average as u(p).
struct InterfaceSample {
  BoundarySample where;
  double value_plus = 0.0;
  double value_minus = 0.0;
  /// Average of the two one-sided values; the measured u on dD.
  double value = 0.0;
  double flux_plus = 0.0;
  double flux_minus = 0.0;
};

struct TwoPhaseSolution {
  Conductivity conductivity;
  Obstacle obstacle;
  double outer_radius = 0.0;
  GridSolution field;
  /// +1 for nodes of D, -1 for nodes of B_L \ D, 0 outside B_L.
  std::vector<std::int8_t> phase;
  std::vector<InterfaceSample> interface;
  InterfaceEstimator estimator = InterfaceEstimator::minimax;
  double d_best = 0.0;
  double deviation = 0.0;
  /// 0 < d_best < max psi.
  bool consistent = true;
  std::vector<std::string> warnings;
};

struct TwoPhaseOptions {
  int interface_samples = 512;
  InterfaceEstimator estimator = InterfaceEstimator::minimax;
  PsorOptions solver;
};

/// PSOR solve of min{-div(sigma grad u), u - psi} = 0 on B_L(0) with u = 0 on
/// the outer circle. Throws HypothesisError unless D lies inside B_L(0) and
/// the positive support of psi lies inside D.
TwoPhaseSolution solve_two_phase_grid(const Conductivity& cond, double L, const Obstacle& psi,
                                      double h, const TwoPhaseOptions& options = {});

/// Recomputes interface samples, d_best and the deviation from the current
/// field (used after solving, or on a field replaced by the caller).
void extract_interface(TwoPhaseSolution& sol, int samples);

struct DirichletDeviation {
  double d_best = 0.0;
  double deviation = 0.0;
  bool consistent = true;
};

DirichletDeviation dirichlet_deviation(const TwoPhaseSolution& sol);

struct TransmissionResidual {
  /// max |sigma+ d_nu u+ - sigma- d_nu u-| over interface samples
  double residual = 0.0;
  /// max |sigma+ d_nu u+|, for normalization
  double flux_scale = 0.0;
};

TransmissionResidual transmission_residual(const TwoPhaseSolution& sol);

enum class PlaneEvent { origin_reached, internal_tangency, orthogonality };

std::string_view to_string(PlaneEvent event);

struct MovingPlaneReport {
  Vec2 gamma;
  double lambda_star = 0.0;
  PlaneEvent event = PlaneEvent::origin_reached;
  /// Tangency point p or orthogonality point q (the origin for event (i)).
  Vec2 point;
  double min_w_minus = 0.0;
  double min_w_plus = 0.0;
  double max_abs_w_minus = 0.0;
  double max_abs_w_plus = 0.0;
  std::size_t sigma_nodes = 0;
  std::size_t reflected_cap_nodes = 0;
  /// Component label of Sigma among the candidate components, and their count.
  int sigma_component = 0;
  int candidate_components = 0;
  double tangency_tol = 0.0;
  double orthogonality_tol = 0.0;
  /// Sampled check that gamma is not tangential to dD on the whole cap.
  bool gamma_nontangential = true;
  /// h^2/8 (|u_xx| + |u_yy|) over the grid: a bound on bilinear interpolation
  /// error in w.
  double interpolation_bound = 0.0;
};

/// Lowers the plane x . gamma = lambda from the top of D until the reflected
/// cap becomes internally tangent to dD, the plane meets dD orthogonally, or
/// lambda reaches 0; then evaluates the reflected differences
/// w(x) = u(x) - u(x^lambda) over Sigma and the reflected cap.
MovingPlaneReport moving_plane_scan(const TwoPhaseSolution& sol, Vec2 gamma, double h);

/// Independent scans over several directions, run concurrently.
std::vector<MovingPlaneReport> moving_plane_scans(const TwoPhaseSolution& sol,
                                                  const std::vector<Vec2>& gammas, double h,
                                                  unsigned threads = 0);

struct ConnectednessResult {
  bool connected = false;
  int components = 0;
  double min_u_minus = 0.0;
  double max_u_minus = 0.0;
  /// max |u| over boundary intersections with the outer circle (imposed 0).
  double outer_boundary_value = 0.0;
  bool bounds_hold = false;
};

/// Counts 4-connected components of the nodes of B_L \ D and checks
/// 0 < u- < d_best + tol.
ConnectednessResult connectedness_check(const TwoPhaseSolution& sol, double tol = 1e-8);

struct PenalizedRecord {
  std::vector<double> epsilons;
  /// sup |v_eps - u+| over nodes of D, one entry per epsilon.
  std::vector<double> sup_difference;
  /// min (v_eps - d_best) over nodes of D.
  std::vector<double> min_excess;
  std::vector<bool> converged;
  /// Radius of the inscribed ball of D used for the radial obstacle.
  double rho = 0.0;
  /// sup |u_psi - u_{u_rho}| between two-phase solves with the two obstacles
  /// (NaN when the comparison was not requested).
  double obstacle_swap_difference = 0.0;
  GridSolution last;
};

/// Solves -Lap v = beta((u_rho - v) / eps) in D with v = d_best on dD for each
/// epsilon in turn (warm-started), where u_rho is the radial one-phase
/// solution on the inscribed ball, extended by zero.
PenalizedRecord penalized_two_phase(const TwoPhaseSolution& sol,
                                    const std::vector<double>& epsilons,
                                    bool compare_obstacles = false);

/// gamma_x,gamma_y,lambda_star,event,px,py,min_w_minus,min_w_plus
void write_moving_plane_csv_header(std::ostream& os);
void write_moving_plane_csv_row(std::ostream& os, const MovingPlaneReport& report);
/// Field dump with a phase column (+1 in D, -1 outside).
void write_two_phase_field_csv(std::ostream& os, const TwoPhaseSolution& sol);

}  // namespace obstacle
