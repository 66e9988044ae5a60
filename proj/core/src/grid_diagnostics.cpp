#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>

#include "obstacle/errors.hpp"
#include "obstacle/grid_vi.hpp"

namespace obstacle {

namespace {

std::vector<double> padded_copy(const GridSolution& sol) {
  std::vector<double> u(sol.u);
  u.push_back(0.0);
  return u;
}

// Second-order one-sided derivative along nu from the boundary value at p and
// interpolated values at p - s nu, p - 2 s nu.
std::optional<double> one_sided_flux(const GridSolution& sol, const BoundarySample& sample,
                                     double step) {
  const Grid& g = *sol.grid;
  auto usable = [&g](std::size_t n) { return g.is_interior(n); };
  const Vec2 p = sample.point;
  const Vec2 nu = sample.outward_normal;
  const auto u1 = biquadratic_interpolate(g, sol.u, p - step * nu, usable);
  const auto u2 = biquadratic_interpolate(g, sol.u, p - (2.0 * step) * nu, usable);
  if (!u1 || !u2) return std::nullopt;
  const double u0 = sol.dirichlet(p);
  return (-3.0 * u0 + 4.0 * *u1 - *u2) / (-2.0 * step);
}

}  // namespace

double default_coincidence_tolerance(const GridSolution& sol) {
  const Grid& g = *sol.grid;
  double sup = 0.0;
  for (std::size_t n : g.unknowns()) {
    if (std::isfinite(sol.obstacle[n])) sup = std::max(sup, std::abs(sol.obstacle[n]));
  }
  return g.spacing() * g.spacing() * sup;
}

CoincidenceMask coincidence_mask(const GridSolution& sol, double ctol) {
  const Grid& g = *sol.grid;
  CoincidenceMask out;
  out.mask.assign(g.node_count(), 0);
  for (std::size_t n : g.unknowns()) {
    if (sol.u[n] - sol.obstacle[n] <= ctol) {
      out.mask[n] = 1;
      ++out.count;
      out.circumscribing_radius = std::max(out.circumscribing_radius, norm(g.position(n)));
    }
  }
  return out;
}

NormalDerivatives normal_derivative(const GridSolution& sol,
                                    const std::vector<BoundarySample>& samples) {
  const double h = sol.grid->spacing();
  NormalDerivatives out;
  out.flux.reserve(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (auto v = one_sided_flux(sol, samples[k], h)) {
      out.flux.push_back(*v);
      continue;
    }
    if (auto v = one_sided_flux(sol, samples[k], 0.5 * h)) {
      out.warnings.push_back("sample " + std::to_string(k) +
                             ": interpolation stencil left the domain; offsets shrunk to h/2, h");
      out.flux.push_back(*v);
      continue;
    }
    throw SamplingError("no interior interpolation stencil near boundary sample " +
                        std::to_string(k));
  }
  return out;
}

double dirichlet_energy(const Grid& grid, std::span<const double> u, bool masked) {
  double energy = 0.0;
  const int n = grid.nx();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t a = grid.node(i, j);
      if (masked && !grid.is_interior(a)) continue;
      if (i + 1 < n) {
        const std::size_t b = grid.node(i + 1, j);
        if (!masked || grid.is_interior(b)) energy += (u[b] - u[a]) * (u[b] - u[a]);
      }
      if (j + 1 < n) {
        const std::size_t b = grid.node(i, j + 1);
        if (!masked || grid.is_interior(b)) energy += (u[b] - u[a]) * (u[b] - u[a]);
      }
    }
  }
  return energy;
}

double dirichlet_energy(const GridSolution& sol) { return dirichlet_energy(*sol.grid, sol.u, true); }

ComplementarityResidual complementarity_residual(const GridSolution& sol) {
  const Grid& g = *sol.grid;
  const auto u = padded_copy(sol);
  ComplementarityResidual r;
  const auto& unknowns = g.unknowns();
  for (std::size_t k = 0; k < unknowns.size(); ++k) {
    const std::size_t n = unknowns[k];
    // Lap_h u + f; the obstacle problem requires it to be <= 0.
    const double lap = -sol.op->apply(k, u) + sol.source[n];
    r.superharmonicity = std::max(r.superharmonicity, lap);
    r.admissibility = std::max(r.admissibility, sol.obstacle[n] - sol.u[n]);
    if (std::isfinite(sol.obstacle[n])) {
      r.complementarity = std::max(r.complementarity, std::abs((sol.u[n] - sol.obstacle[n]) * lap));
    }
  }
  return r;
}

double variational_form(const GridSolution& sol, std::span<const double> v) {
  const Grid& g = *sol.grid;
  const auto u = padded_copy(sol);
  const double area = g.spacing() * g.spacing();
  const auto& unknowns = g.unknowns();
  double total = 0.0;
  for (std::size_t k = 0; k < unknowns.size(); ++k) {
    const std::size_t n = unknowns[k];
    total += area * (sol.op->apply(k, u) - sol.source[n]) * (v[n] - sol.u[n]);
  }
  return total;
}

double variational_inequality_check(const GridSolution& sol, int trials, std::uint64_t seed) {
  const Grid& g = *sol.grid;
  const auto& unknowns = g.unknowns();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  double scale = 0.0;
  for (std::size_t n : unknowns) scale = std::max(scale, std::abs(sol.u[n]));
  if (scale == 0.0) scale = 1.0;
  const double reach = g.domain().bounding_radius();

  double worst = std::numeric_limits<double>::infinity();
  std::vector<double> v(sol.u);
  for (int t = 0; t < trials; ++t) {
    const double amplitude = scale * (2.0 * unit(rng) - 1.0);
    const Vec2 center{reach * (2.0 * unit(rng) - 1.0), reach * (2.0 * unit(rng) - 1.0)};
    const double width = 2.0 * g.spacing() + 0.5 * reach * unit(rng);
    for (std::size_t n : unknowns) {
      const Vec2 d = g.position(n) - center;
      const double bump = amplitude * std::exp(-dot(d, d) / (width * width));
      v[n] = std::max(sol.obstacle[n], sol.u[n] + bump);
    }
    worst = std::min(worst, variational_form(sol, v));
  }
  return trials > 0 ? worst : 0.0;
}

ComponentLabels label_components(const Grid& grid,
                                 const std::function<bool(std::size_t)>& member) {
  ComponentLabels out;
  out.label.assign(grid.node_count(), -1);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < grid.node_count(); ++start) {
    if (out.label[start] >= 0 || !member(start)) continue;
    const int id = out.count++;
    out.label[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t n = stack.back();
      stack.pop_back();
      const int i = grid.column(n);
      const int j = grid.row(n);
      const int di[4] = {1, -1, 0, 0};
      const int dj[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        if (!grid.in_box(i + di[k], j + dj[k])) continue;
        const std::size_t m = grid.node(i + di[k], j + dj[k]);
        if (out.label[m] < 0 && member(m)) {
          out.label[m] = id;
          stack.push_back(m);
        }
      }
    }
  }
  return out;
}

void write_field_csv(std::ostream& os, const GridSolution& sol,
                     const std::function<int(std::size_t)>& phase) {
  const Grid& g = *sol.grid;
  os << "x,y,u,psi,coincidence" << (phase ? ",phase" : "") << '\n';
  os << std::setprecision(17);
  for (std::size_t n : g.unknowns()) {
    const Vec2 p = g.position(n);
    os << p.x << ',' << p.y << ',' << sol.u[n] << ',' << sol.obstacle[n] << ','
       << static_cast<int>(sol.coincidence.empty() ? 0 : sol.coincidence[n]);
    if (phase) os << ',' << phase(n);
    os << '\n';
  }
}

void write_flux_csv(std::ostream& os, const std::vector<BoundarySample>& samples,
                    const std::vector<double>& flux) {
  os << "arc_parameter,x,y,nu_x,nu_y,flux\n";
  os << std::setprecision(17);
  for (std::size_t k = 0; k < samples.size() && k < flux.size(); ++k) {
    const auto& s = samples[k];
    os << s.arc_parameter << ',' << s.point.x << ',' << s.point.y << ',' << s.outward_normal.x
       << ',' << s.outward_normal.y << ',' << flux[k] << '\n';
  }
}

}  // namespace obstacle
