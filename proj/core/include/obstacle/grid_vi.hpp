#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "obstacle/geometry.hpp"

namespace obstacle {

using ScalarField = std::function<double(Vec2)>;

inline ScalarField constant_field(double value) {
  return [value](Vec2) { return value; };
}

enum Arm : int { kEast = 0, kWest = 1, kNorth = 2, kSouth = 3 };

/// Uniform Cartesian grid over a box around a domain, nodes at integer
/// multiples of the spacing. Nodes inside the domain are unknowns; each
/// carries Shortley-Weller arm fractions toward the boundary (1 when the
/// neighbour is itself an unknown).
class Grid {
 public:
  Grid(DomainSpec domain, double spacing, int half_width);

  const DomainSpec& domain() const noexcept { return domain_; }
  double spacing() const noexcept { return h_; }
  int nx() const noexcept { return n_; }
  int ny() const noexcept { return n_; }
  std::size_t node_count() const noexcept { return static_cast<std::size_t>(n_) * n_; }

  std::size_t node(int i, int j) const { return static_cast<std::size_t>(j) * n_ + i; }
  int column(std::size_t node) const { return static_cast<int>(node % n_); }
  int row(std::size_t node) const { return static_cast<int>(node / n_); }
  Vec2 position(std::size_t node) const {
    return {(column(node) - half_) * h_, (row(node) - half_) * h_};
  }
  Vec2 position(int i, int j) const { return {(i - half_) * h_, (j - half_) * h_}; }
  /// Continuous grid coordinates of a point (node (i, j) sits at (i, j)).
  Vec2 grid_coordinates(Vec2 p) const { return {p.x / h_ + half_, p.y / h_ + half_}; }
  bool in_box(int i, int j) const { return i >= 0 && j >= 0 && i < n_ && j < n_; }

  bool is_interior(std::size_t node) const { return interior_[node] != 0; }
  const std::array<double, 4>& arms(std::size_t node) const { return arms_[node]; }
  bool boundary_adjacent(std::size_t node) const;

  /// Interior nodes in lexicographic (row-major) order.
  const std::vector<std::size_t>& unknowns() const noexcept { return unknowns_; }
  std::size_t interior_count() const noexcept { return unknowns_.size(); }

  /// Node at the given spatial position, when it coincides with a grid node.
  std::optional<std::size_t> node_at(Vec2 p) const;

 private:
  friend std::shared_ptr<const Grid> assemble(const DomainSpec&, double);

  DomainSpec domain_;
  double h_;
  int half_;
  int n_;
  std::vector<std::uint8_t> interior_;
  std::vector<std::array<double, 4>> arms_;
  std::vector<std::size_t> unknowns_;
};

/// Classifies nodes of a grid with spacing h and computes Shortley-Weller arm
/// fractions. Requires h <= rho / 8 with rho the inradius about the origin.
std::shared_ptr<const Grid> assemble(const DomainSpec& domain, double h);

/// One row of the discrete operator -div(sigma grad u) at an unknown:
///   diag * u_i - sum_k coef[k] * u[neighbor[k]] = boundary_rhs (+ source)
/// Boundary intersections are folded into boundary_rhs; their neighbour slot
/// points at a sentinel node whose value is always zero.
struct StencilRow {
  double diag = 0.0;
  std::array<double, 4> coef{};
  std::array<std::size_t, 4> neighbor{};
  double boundary_rhs = 0.0;
};

class EllipticOperator {
 public:
  EllipticOperator(std::shared_ptr<const Grid> grid, const ScalarField& dirichlet,
                   const ScalarField& conductivity);

  const Grid& grid() const noexcept { return *grid_; }
  const std::vector<StencilRow>& rows() const noexcept { return rows_; }
  /// Index of the zero-valued sentinel slot in padded node arrays.
  std::size_t sentinel() const noexcept { return grid_->node_count(); }
  /// (A u)_k for unknown k, where u is a padded node array.
  double apply(std::size_t unknown, std::span<const double> padded) const;

 private:
  std::shared_ptr<const Grid> grid_;
  std::vector<StencilRow> rows_;
};

/// Everything a grid solve needs: grid, per-node obstacle samples, Dirichlet
/// data, and the optional source term and conductivity.
struct GridProblem {
  std::shared_ptr<const Grid> grid;
  std::vector<double> obstacle;
  ScalarField dirichlet = constant_field(0.0);
  ScalarField source;
  ScalarField conductivity;
};

GridProblem make_problem(std::shared_ptr<const Grid> grid, const Obstacle& psi,
                         double dirichlet_value = 0.0);
std::vector<double> sample_obstacle(const Grid& grid, const ScalarField& psi);

enum class SolveMethod { projected_relaxation, penalty };

struct IterationLog {
  long sweeps = 0;
  double final_update = 0.0;
  bool converged = false;
  double omega = 1.0;
  /// Dirichlet energy after each sweep (only when requested).
  std::vector<double> energy;
};

struct GridSolution {
  std::shared_ptr<const Grid> grid;
  std::shared_ptr<const EllipticOperator> op;
  ScalarField dirichlet;
  /// Nodal values on every node of the box; exterior nodes hold the
  /// Dirichlet data evaluated at the node.
  std::vector<double> u;
  std::vector<double> obstacle;
  /// Per-node source term f (all zero unless a source was supplied).
  std::vector<double> source;
  std::vector<std::uint8_t> coincidence;
  IterationLog log;
  SolveMethod method = SolveMethod::projected_relaxation;
  double epsilon = 0.0;
  /// max(psi - v) / epsilon for penalty solutions.
  double violation_constant = 0.0;
};

/// Relaxation used when the caller passes omega = 0: the optimal SOR
/// parameter of the bounding box, 2 / (1 + sin(pi h / W)).
double auto_relaxation(const Grid& grid);

struct PsorOptions {
  /// 0 selects auto_relaxation(grid).
  double omega = 0.0;
  double tol = 1e-10;
  long max_sweeps = 200000;
  bool record_energy = false;
  /// Optional warm start (node array); clipped to the obstacle.
  std::vector<double> initial;
};

/// Projected SOR: lexicographic sweeps, nodewise relaxation then clipping
/// from below at the obstacle; stops once the sup-norm update drops below
/// tol. Non-convergence is reported in the log, never thrown.
GridSolution psor_solve(const GridProblem& problem, const PsorOptions& options = {});

struct PenaltyValue {
  double value = 0.0;
  double first = 0.0;
  double second = 0.0;
};

/// C^2 convex penalty: 0 for t <= 0, t^3 - t^4/2 on [0, 1], t - 1/2 beyond.
PenaltyValue penalty_beta(double t);

struct PenaltyOptions {
  double omega = 0.0;
  double tol = 1e-10;
  long max_sweeps = 200000;
  /// Solve at 0.1 first and warm-start each halving down to the target.
  bool continuation = true;
  std::vector<double> initial;
};

/// Solves -Lap_h v = beta((psi - v) / eps) by nonlinear SOR with a scalar
/// Newton solve per node (bisection fallback).
GridSolution penalty_solve(const GridProblem& problem, double epsilon,
                           const PenaltyOptions& options = {});

struct CoincidenceMask {
  std::vector<std::uint8_t> mask;
  std::size_t count = 0;
  /// max |x| over masked nodes (0 when empty).
  double circumscribing_radius = 0.0;
};

/// Default coincidence tolerance h^2 * max|psi| over interior nodes.
double default_coincidence_tolerance(const GridSolution& sol);
CoincidenceMask coincidence_mask(const GridSolution& sol, double ctol);

/// Tensor-product quadratic interpolation from a 3x3 block of nodes that all
/// satisfy `usable`; the block closest to q is chosen, allowing at most one
/// cell of extrapolation.
std::optional<double> biquadratic_interpolate(const Grid& grid, std::span<const double> u, Vec2 q,
                                              const std::function<bool(std::size_t)>& usable);
double bilinear_interpolate(const Grid& grid, std::span<const double> u, Vec2 q);

struct NormalDerivatives {
  std::vector<double> flux;
  std::vector<std::string> warnings;
};

/// Second-order one-sided normal derivative at boundary samples using the
/// Dirichlet value at p and interpolated values at p - h nu, p - 2h nu.
NormalDerivatives normal_derivative(const GridSolution& sol,
                                    const std::vector<BoundarySample>& samples);

/// Sum of squared forward differences over grid edges, i.e. sum h^2 |grad_h u|^2.
/// With `masked`, only edges joining two interior nodes count.
double dirichlet_energy(const Grid& grid, std::span<const double> u, bool masked = true);
double dirichlet_energy(const GridSolution& sol);

struct ComplementarityResidual {
  double superharmonicity = 0.0;
  double admissibility = 0.0;
  double complementarity = 0.0;
};

ComplementarityResidual complementarity_residual(const GridSolution& sol);

/// sum_k h^2 (A u - f)_k (v_k - u_k): the discrete form of int grad u . grad(v - u).
double variational_form(const GridSolution& sol, std::span<const double> v);

/// Most negative value of variational_form over random admissible
/// v = max(psi, u + bump) with Gaussian bumps drawn from `seed`.
double variational_inequality_check(const GridSolution& sol, int trials, std::uint64_t seed);

struct ComponentLabels {
  /// Component index per node, -1 for nodes outside the selected set.
  std::vector<int> label;
  int count = 0;
};

/// 4-connected components of the nodes selected by `member`, labelled in
/// lexicographic order of their first node.
ComponentLabels label_components(const Grid& grid, const std::function<bool(std::size_t)>& member);

/// x,y,u,psi,coincidence[,phase] for every interior node.
void write_field_csv(std::ostream& os, const GridSolution& sol,
                     const std::function<int(std::size_t)>& phase = {});
/// arc_parameter,x,y,nu_x,nu_y,flux
void write_flux_csv(std::ostream& os, const std::vector<BoundarySample>& samples,
                    const std::vector<double>& flux);

}  // namespace obstacle
