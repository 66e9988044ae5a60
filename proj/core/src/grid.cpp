#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "obstacle/errors.hpp"
#include "obstacle/grid_vi.hpp"

namespace obstacle {

namespace {

constexpr std::array<int, 4> kDi{1, -1, 0, 0};
constexpr std::array<int, 4> kDj{0, 0, 1, -1};

// Fraction theta in (0, 1] at which the segment from an inside point p toward
// q = p + h e crosses the boundary.
double arm_fraction(const DomainSpec& domain, Vec2 p, Vec2 q) {
  if (domain.level(q) == 0.0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (domain.level(p + mid * (q - p)) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::max(hi, 1e-12);
}

}  // namespace

Grid::Grid(DomainSpec domain, double spacing, int half_width)
    : domain_(std::move(domain)), h_(spacing), half_(half_width), n_(2 * half_width + 1) {}

bool Grid::boundary_adjacent(std::size_t node) const {
  if (!is_interior(node)) return false;
  const auto& a = arms_[node];
  return a[0] < 1.0 || a[1] < 1.0 || a[2] < 1.0 || a[3] < 1.0;
}

std::optional<std::size_t> Grid::node_at(Vec2 p) const {
  const Vec2 g = grid_coordinates(p);
  const double ri = std::round(g.x);
  const double rj = std::round(g.y);
  if (std::abs(g.x - ri) > 1e-6 || std::abs(g.y - rj) > 1e-6) return std::nullopt;
  const int i = static_cast<int>(ri);
  const int j = static_cast<int>(rj);
  if (!in_box(i, j)) return std::nullopt;
  return node(i, j);
}

std::shared_ptr<const Grid> assemble(const DomainSpec& domain, double h) {
  const BallRadii radii = ball_radii(domain);
  if (!(h > 0.0) || h > radii.inner / 8.0) {
    throw ResolutionError("grid spacing must satisfy 0 < h <= rho/8 (rho = " +
                          std::to_string(radii.inner) + ")");
  }
  const int half = static_cast<int>(std::ceil(domain.bounding_radius() / h)) + 2;
  auto grid = std::shared_ptr<Grid>(new Grid(domain, h, half));
  const std::size_t count = grid->node_count();
  grid->interior_.assign(count, 0);
  grid->arms_.assign(count, {1.0, 1.0, 1.0, 1.0});

  for (std::size_t n = 0; n < count; ++n) {
    grid->interior_[n] = domain.level(grid->position(n)) < 0.0 ? 1 : 0;
  }
  for (std::size_t n = 0; n < count; ++n) {
    if (!grid->interior_[n]) continue;
    const int i = grid->column(n);
    const int j = grid->row(n);
    const Vec2 p = grid->position(n);
    for (int k = 0; k < 4; ++k) {
      const int ni = i + kDi[k];
      const int nj = j + kDj[k];
      if (grid->interior_[grid->node(ni, nj)]) continue;
      grid->arms_[n][k] = arm_fraction(domain, p, grid->position(ni, nj));
    }
    grid->unknowns_.push_back(n);
  }
  if (grid->unknowns_.empty()) throw ResolutionError("grid has no interior nodes");
  return grid;
}

EllipticOperator::EllipticOperator(std::shared_ptr<const Grid> grid, const ScalarField& dirichlet,
                                   const ScalarField& conductivity)
    : grid_(std::move(grid)) {
  const Grid& g = *grid_;
  const double h = g.spacing();
  const auto& unknowns = g.unknowns();
  std::vector<double> sigma;
  if (conductivity) {
    sigma.resize(g.node_count());
    for (std::size_t n = 0; n < g.node_count(); ++n) sigma[n] = conductivity(g.position(n));
  }
  auto face = [&](std::size_t a, std::size_t b, bool boundary) {
    if (sigma.empty()) return 1.0;
    if (boundary) return sigma[a];
    return 2.0 * sigma[a] * sigma[b] / (sigma[a] + sigma[b]);
  };

  rows_.resize(unknowns.size());
  for (std::size_t k = 0; k < unknowns.size(); ++k) {
    const std::size_t n = unknowns[k];
    const int i = g.column(n);
    const int j = g.row(n);
    const Vec2 p = g.position(n);
    const auto& arm = g.arms(n);
    StencilRow row;
    for (int d = 0; d < 4; ++d) {
      const int opposite = d ^ 1;
      const double theta = arm[d];
      const double theta_opp = arm[opposite];
      const std::size_t nb = g.node(i + kDi[d], j + kDj[d]);
      const bool boundary = theta < 1.0 || !g.is_interior(nb);
      // Shortley-Weller: 2 sigma / (theta (theta + theta_opp) h^2)
      const double c = 2.0 * face(n, nb, boundary) / (theta * (theta + theta_opp) * h * h);
      row.diag += c;
      if (boundary) {
        const Vec2 e{static_cast<double>(kDi[d]), static_cast<double>(kDj[d])};
        row.boundary_rhs += c * dirichlet(p + (theta * h) * e);
        row.coef[d] = 0.0;
        row.neighbor[d] = sentinel();
      } else {
        row.coef[d] = c;
        row.neighbor[d] = nb;
      }
    }
    rows_[k] = row;
  }
}

double EllipticOperator::apply(std::size_t unknown, std::span<const double> padded) const {
  const StencilRow& r = rows_[unknown];
  const std::size_t n = grid_->unknowns()[unknown];
  double s = r.diag * padded[n] - r.boundary_rhs;
  for (int d = 0; d < 4; ++d) s -= r.coef[d] * padded[r.neighbor[d]];
  return s;
}

std::vector<double> sample_obstacle(const Grid& grid, const ScalarField& psi) {
  std::vector<double> out(grid.node_count());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = psi(grid.position(n));
  return out;
}

GridProblem make_problem(std::shared_ptr<const Grid> grid, const Obstacle& psi,
                         double dirichlet_value) {
  GridProblem problem;
  problem.obstacle = sample_obstacle(*grid, [&psi](Vec2 p) { return psi(p); });
  problem.grid = std::move(grid);
  problem.dirichlet = constant_field(dirichlet_value);
  return problem;
}

double auto_relaxation(const Grid& grid) {
  const double width = (grid.nx() - 1) * grid.spacing();
  return 2.0 / (1.0 + std::sin(std::numbers::pi * grid.spacing() / width));
}

std::optional<double> biquadratic_interpolate(const Grid& grid, std::span<const double> u, Vec2 q,
                                              const std::function<bool(std::size_t)>& usable) {
  const Vec2 g = grid.grid_coordinates(q);
  const int ci = static_cast<int>(std::floor(g.x));
  const int cj = static_cast<int>(std::floor(g.y));
  int best_i = 0;
  int best_j = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (int j0 = cj - 3; j0 <= cj + 2; ++j0) {
    for (int i0 = ci - 3; i0 <= ci + 2; ++i0) {
      const double score = std::max(std::abs(g.x - (i0 + 1)), std::abs(g.y - (j0 + 1)));
      if (score > 2.0 || score >= best_score) continue;
      if (!grid.in_box(i0, j0) || !grid.in_box(i0 + 2, j0 + 2)) continue;
      bool ok = true;
      for (int b = 0; b < 3 && ok; ++b) {
        for (int a = 0; a < 3 && ok; ++a) ok = usable(grid.node(i0 + a, j0 + b));
      }
      if (!ok) continue;
      best_score = score;
      best_i = i0;
      best_j = j0;
    }
  }
  if (!std::isfinite(best_score)) return std::nullopt;
  auto weights = [](double s) {
    return std::array<double, 3>{0.5 * s * (s - 1.0), 1.0 - s * s, 0.5 * s * (s + 1.0)};
  };
  const auto wx = weights(g.x - (best_i + 1));
  const auto wy = weights(g.y - (best_j + 1));
  double value = 0.0;
  for (int b = 0; b < 3; ++b) {
    double rowsum = 0.0;
    for (int a = 0; a < 3; ++a) rowsum += wx[a] * u[grid.node(best_i + a, best_j + b)];
    value += wy[b] * rowsum;
  }
  return value;
}

double bilinear_interpolate(const Grid& grid, std::span<const double> u, Vec2 q) {
  const Vec2 g = grid.grid_coordinates(q);
  int i = static_cast<int>(std::floor(g.x));
  int j = static_cast<int>(std::floor(g.y));
  i = std::clamp(i, 0, grid.nx() - 2);
  j = std::clamp(j, 0, grid.ny() - 2);
  const double sx = g.x - i;
  const double sy = g.y - j;
  return (1 - sx) * (1 - sy) * u[grid.node(i, j)] + sx * (1 - sy) * u[grid.node(i + 1, j)] +
         (1 - sx) * sy * u[grid.node(i, j + 1)] + sx * sy * u[grid.node(i + 1, j + 1)];
}

}  // namespace obstacle
