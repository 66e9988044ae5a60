#include "obstacle/radial_solver.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "obstacle/errors.hpp"

namespace obstacle {

namespace {

constexpr int kScanPoints = 1000;

// Contact radius from the matching function m on (left, right]. m must be
// positive at the left end and negative at the right end; the bracket is
// scanned first so that several roots are reported rather than guessed.
double solve_contact_radius(const std::function<double(double)>& m, double left, double right) {
  const double lo = left + 1e-12;
  std::vector<double> xs(kScanPoints + 1);
  std::vector<double> ms(kScanPoints + 1);
  for (int i = 0; i <= kScanPoints; ++i) {
    xs[i] = lo + (right - lo) * i / kScanPoints;
    ms[i] = m(xs[i]);
  }
  int changes = 0;
  int bracket = -1;
  for (int i = 0; i < kScanPoints; ++i) {
    if (ms[i] > 0.0 && ms[i + 1] <= 0.0) {
      ++changes;
      bracket = i;
    } else if (ms[i] <= 0.0 && ms[i + 1] > 0.0) {
      ++changes;
    }
  }
  if (changes == 0 || bracket < 0) {
    throw NoDetachmentError("matching function has no sign change on the contact bracket");
  }
  if (changes > 1) {
    throw AmbiguousMatchingError("matching function has " + std::to_string(changes) +
                                 " sign changes; contact radius is not unique");
  }
  double a = xs[bracket];
  double b = xs[bracket + 1];
  if (ms[bracket + 1] == 0.0) return b;
  while (b - a > 1e-15 * std::max(1.0, b)) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if (m(mid) > 0.0) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

double scaled_obstacle_flux(const Obstacle& psi, double a) {
  return std::pow(a, psi.dimension() - 1) * psi.slope(a);
}

void require_positive_obstacle(const Obstacle& psi) {
  if (!(psi.max_value() > 0.0)) {
    throw NoDetachmentError("obstacle is never positive (max psi <= 0)");
  }
}

}  // namespace

double radial_kernel(int dimension, double s, double t) {
  if (dimension == 2) {
    if (std::isinf(t)) throw NonexistenceError("log kernel does not decay in two dimensions");
    return std::log(t) - std::log(s);
  }
  const double p = 2.0 - dimension;
  const double tail = std::isinf(t) ? 0.0 : std::pow(t, p);
  return (std::pow(s, p) - tail) / (dimension - 2.0);
}

double eval_radial(const RadialSolution& sol, double r) {
  if (!(r >= 0.0) || r > sol.domain_radius) {
    throw DomainError("radius " + std::to_string(r) + " outside [0, domain_radius]");
  }
  if (r <= sol.contact_radius) return sol.obstacle.value(r);
  return sol.obstacle.value(sol.contact_radius) +
         sol.scaled_flux * radial_kernel(sol.dimension, sol.contact_radius, r);
}

double eval_radial_derivative(const RadialSolution& sol, double r) {
  if (!(r >= 0.0) || r > sol.domain_radius) {
    throw DomainError("radius " + std::to_string(r) + " outside [0, domain_radius]");
  }
  if (r <= sol.contact_radius) return sol.obstacle.slope(r);
  return sol.scaled_flux * std::pow(r, 1 - sol.dimension);
}

RadialSolution solve_radial_one_phase(const Obstacle& psi, double domain_radius,
                                      double dirichlet_value) {
  require_positive_obstacle(psi);
  const int n = psi.dimension();
  if (!(psi.support_radius() < domain_radius)) {
    throw PreconditionError("obstacle support must lie strictly inside the ball");
  }
  if (std::isinf(domain_radius) && n == 2) {
    throw NonexistenceError("no decaying radial solution on R^2");
  }
  if (dirichlet_value < 0.0) throw PreconditionError("dirichlet value must be >= 0");
  if (dirichlet_value >= psi.max_value()) {
    throw PreconditionError("dirichlet value >= max psi: obstacle inactive, solution constant");
  }

  auto matching = [&](double a) {
    return psi.value(a) + scaled_obstacle_flux(psi, a) * radial_kernel(n, a, domain_radius) -
           dirichlet_value;
  };
  const double a = solve_contact_radius(matching, psi.summit_radius(), psi.support_radius());
  if (!(psi.slope(a) < 0.0)) {
    throw InvalidMatchingError("obstacle slope at the contact radius is not negative");
  }

  RadialSolution sol{psi};
  sol.dimension = n;
  sol.domain_radius = domain_radius;
  sol.dirichlet_value = dirichlet_value;
  sol.contact_radius = a;
  sol.summit_radius = psi.summit_radius();
  sol.scaled_flux = scaled_obstacle_flux(psi, a);
  sol.boundary_flux =
      std::isinf(domain_radius) ? 0.0 : sol.scaled_flux * std::pow(domain_radius, 1 - n);
  return sol;
}

std::vector<std::pair<double, double>> boundary_flux_monotonicity(const Obstacle& psi,
                                                                  const std::vector<double>& radii) {
  for (double r : radii) {
    if (!(r > psi.support_radius())) {
      throw PreconditionError("every radius must exceed the obstacle support radius");
    }
  }
  std::vector<std::pair<double, double>> out;
  out.reserve(radii.size());
  for (double r : radii) {
    out.emplace_back(r, -solve_radial_one_phase(psi, r).boundary_flux);
  }
  return out;
}

double TwoPhaseRadialSolution::eval(double r) const {
  if (r <= interface_radius) return eval_radial(inner, r);
  if (r > outer_radius) throw DomainError("radius beyond the outer boundary");
  return interface_value + outer_scaled_flux * radial_kernel(inner.dimension, interface_radius, r);
}

double TwoPhaseRadialSolution::derivative(double r) const {
  if (r <= interface_radius) return eval_radial_derivative(inner, r);
  if (r > outer_radius) throw DomainError("radius beyond the outer boundary");
  return outer_scaled_flux * std::pow(r, 1 - inner.dimension);
}

TwoPhaseRadialSolution solve_radial_two_phase(const Obstacle& psi, double interface_radius,
                                              double outer_radius, double sigma_plus,
                                              double sigma_minus) {
  const int n = psi.dimension();
  if (std::isinf(outer_radius) && n == 2) {
    throw NonexistenceError("the exterior two-phase problem has no solution in two dimensions");
  }
  if (!(sigma_plus > 0.0) || !(sigma_minus > 0.0)) {
    throw PreconditionError("conductivities must be positive");
  }
  if (sigma_plus == sigma_minus) throw PreconditionError("two-phase problem needs sigma+ != sigma-");
  require_positive_obstacle(psi);
  if (!(psi.support_radius() < interface_radius && interface_radius < outer_radius)) {
    throw PreconditionError("need support radius < interface radius < outer radius");
  }

  // Flux continuity sigma+ u'(r_D-) = sigma- u'(r_D+) scales the outer scaled
  // flux by sigma+/sigma-; u(L) = 0 (or decay) closes the system.
  const double ratio = sigma_plus / sigma_minus;
  const double outer_kernel = radial_kernel(n, interface_radius, outer_radius);
  auto matching = [&](double a) {
    const double f = scaled_obstacle_flux(psi, a);
    return psi.value(a) + f * (radial_kernel(n, a, interface_radius) + ratio * outer_kernel);
  };
  const double a = solve_contact_radius(matching, psi.summit_radius(), psi.support_radius());
  if (!(psi.slope(a) < 0.0)) {
    throw InvalidMatchingError("obstacle slope at the contact radius is not negative");
  }

  TwoPhaseRadialSolution sol{RadialSolution{psi}};
  const double f = scaled_obstacle_flux(psi, a);
  sol.interface_radius = interface_radius;
  sol.outer_radius = outer_radius;
  sol.sigma_plus = sigma_plus;
  sol.sigma_minus = sigma_minus;
  sol.outer_scaled_flux = ratio * f;
  sol.interface_value = -ratio * f * outer_kernel;

  RadialSolution& in = sol.inner;
  in.dimension = n;
  in.domain_radius = interface_radius;
  in.dirichlet_value = sol.interface_value;
  in.contact_radius = a;
  in.summit_radius = psi.summit_radius();
  in.scaled_flux = f;
  in.boundary_flux = f * std::pow(interface_radius, 1 - n);
  return sol;
}

std::vector<std::pair<double, double>> exterior_nonexistence_probe(
    const Obstacle& psi, double interface_radius, double sigma_plus, double sigma_minus,
    const std::vector<double>& truncation_radii) {
  for (std::size_t i = 0; i < truncation_radii.size(); ++i) {
    if (i == 0 ? !(truncation_radii[i] > interface_radius)
               : !(truncation_radii[i] > truncation_radii[i - 1])) {
      throw PreconditionError("truncation radii must increase and exceed the interface radius");
    }
  }
  std::vector<std::pair<double, double>> out;
  out.reserve(truncation_radii.size());
  for (double L : truncation_radii) {
    out.emplace_back(
        L, solve_radial_two_phase(psi, interface_radius, L, sigma_plus, sigma_minus).interface_value);
  }
  return out;
}

}  // namespace obstacle
