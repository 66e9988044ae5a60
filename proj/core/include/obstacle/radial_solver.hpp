#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "obstacle/geometry.hpp"

namespace obstacle {

inline constexpr double kInfiniteRadius = std::numeric_limits<double>::infinity();

/// Radial Green kernel integral G(s, t) = int_s^t r^{1-N} dr, with t = inf
/// allowed for N >= 3.
double radial_kernel(int dimension, double s, double t);

/// Radial solution of the one-phase obstacle problem on B_R(0) with constant
/// Dirichlet data: u = psi on [0, a], radial-harmonic on (a, R].
///
/// On the annulus the scaled flux r^{N-1} u'(r) is the constant
/// a^{N-1} psi'(a), so u(r) = psi(a) + a^{N-1} psi'(a) * G(a, r).
struct RadialSolution {
  Obstacle obstacle;
  int dimension = 2;
  double domain_radius = 0.0;
  double dirichlet_value = 0.0;
  double contact_radius = 0.0;
  double summit_radius = 0.0;
  /// a^{N-1} psi'(a): constant value of r^{N-1} u'(r) on the harmonic annulus.
  double scaled_flux = 0.0;
  /// u'(domain_radius); zero for an infinite domain.
  double boundary_flux = 0.0;
};

double eval_radial(const RadialSolution& sol, double r);
double eval_radial_derivative(const RadialSolution& sol, double r);

RadialSolution solve_radial_one_phase(const Obstacle& psi, double domain_radius,
                                      double dirichlet_value = 0.0);

/// (radius, -u_radius'(radius)) for each radius, in input order.
std::vector<std::pair<double, double>> boundary_flux_monotonicity(const Obstacle& psi,
                                                                  const std::vector<double>& radii);

/// Radial two-phase solution: obstacle problem for div(sigma grad u) on
/// B_L(0) (or R^N when outer_radius is infinite) with sigma = sigma_plus on
/// B_{r_D}(0) and sigma_minus outside.
struct TwoPhaseRadialSolution {
  /// The phase inside the inclusion: a one-phase solution on B_{r_D} with
  /// Dirichlet value d.
  RadialSolution inner;
  double interface_radius = 0.0;
  double outer_radius = 0.0;
  double interface_value = 0.0;
  double sigma_plus = 1.0;
  double sigma_minus = 1.0;
  /// Constant r^{N-1} u'(r) on the outer annulus.
  double outer_scaled_flux = 0.0;

  double eval(double r) const;
  double derivative(double r) const;
};

TwoPhaseRadialSolution solve_radial_two_phase(const Obstacle& psi, double interface_radius,
                                              double outer_radius, double sigma_plus,
                                              double sigma_minus);

/// Interface value d(L) of the truncated two-phase problem for each L.
std::vector<std::pair<double, double>> exterior_nonexistence_probe(
    const Obstacle& psi, double interface_radius, double sigma_plus, double sigma_minus,
    const std::vector<double>& truncation_radii);

}  // namespace obstacle
