#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "obstacle/errors.hpp"
#include "obstacle/two_phase.hpp"
#include "parallel.hpp"

namespace obstacle {

namespace {

constexpr int kBoundarySamples = 2048;
constexpr int kBisections = 80;
constexpr double kTieTolerance = 1e-9;

Vec2 reflect(Vec2 x, Vec2 gamma, double lambda) {
  return x - (2.0 * (dot(x, gamma) - lambda)) * gamma;
}

// Event functions along the sweep. Both are evaluated on a fixed boundary
// sampling of D; their first zero below the top of D locates events (ii) and
// (iii).
class PlaneEvents {
 public:
  PlaneEvents(const DomainSpec& D, Vec2 gamma, double h)
      : D_(D), gamma_(gamma), h_(h), samples_(sample_boundary(D, kBoundarySamples)) {
    top_ = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples_) top_ = std::max(top_, dot(s.point, gamma_));
  }

  double top() const { return top_; }

  // max over reflected cap samples (at least h above the plane) of level_D;
  // positive once the reflected cap leaves D.
  double tangency(double lambda, Vec2* where = nullptr) const {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples_) {
      if (dot(s.point, gamma_) - lambda <= h_) continue;
      const Vec2 r = reflect(s.point, gamma_, lambda);
      const double v = D_.level(r);
      if (v > worst) {
        worst = v;
        if (where) *where = r;
      }
    }
    return worst;
  }

  // min of nu . gamma over the points where the plane crosses dD; negative once
  // the plane has passed an orthogonal crossing.
  double orthogonality(double lambda, Vec2* where = nullptr) const {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = samples_.size();
    for (std::size_t k = 0; k < n; ++k) {
      const auto& a = samples_[k];
      const auto& b = samples_[(k + 1) % n];
      const double fa = dot(a.point, gamma_) - lambda;
      const double fb = dot(b.point, gamma_) - lambda;
      if ((fa > 0.0) == (fb > 0.0)) continue;
      const double t = fa / (fa - fb);
      Vec2 nu = a.outward_normal + t * (b.outward_normal - a.outward_normal);
      nu = (1.0 / norm(nu)) * nu;
      const double c = dot(nu, gamma_);
      if (c < best) {
        best = c;
        if (where) *where = a.point + t * (b.point - a.point);
      }
    }
    return best;
  }

  bool nontangential_on_cap(double lambda, double tol) const {
    for (const auto& s : samples_) {
      if (dot(s.point, gamma_) > lambda && std::abs(dot(s.outward_normal, gamma_)) > tol) {
        return true;
      }
    }
    return false;
  }

 private:
  const DomainSpec& D_;
  Vec2 gamma_;
  double h_;
  std::vector<BoundarySample> samples_;
  double top_;
};

// Largest lambda in [lo, hi] with f(lambda) on the triggered side, where f is
// untriggered at hi and triggered at lo.
template <class Triggered>
double bisect_event(double lo, double hi, Triggered&& triggered) {
  for (int it = 0; it < kBisections; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (triggered(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double interpolation_bound(const TwoPhaseSolution& sol) {
  const Grid& g = *sol.field.grid;
  const auto& u = sol.field.u;
  double worst = 0.0;
  for (std::size_t n : g.unknowns()) {
    const int i = g.column(n);
    const int j = g.row(n);
    const double uxx = u[g.node(i + 1, j)] - 2.0 * u[n] + u[g.node(i - 1, j)];
    const double uyy = u[g.node(i, j + 1)] - 2.0 * u[n] + u[g.node(i, j - 1)];
    worst = std::max(worst, (std::abs(uxx) + std::abs(uyy)) / 8.0);
  }
  return worst;
}

}  // namespace

std::string_view to_string(PlaneEvent event) {
  switch (event) {
    case PlaneEvent::origin_reached:
      return "origin-reached";
    case PlaneEvent::internal_tangency:
      return "internal-tangency";
    case PlaneEvent::orthogonality:
      return "orthogonality";
  }
  return "unknown";
}

MovingPlaneReport moving_plane_scan(const TwoPhaseSolution& sol, Vec2 gamma, double h) {
  const double len = norm(gamma);
  if (!(len > 0.0)) throw PreconditionError("direction must be nonzero");
  gamma = (1.0 / len) * gamma;
  if (!(h > 0.0)) throw PreconditionError("scan tolerance h must be positive");

  const DomainSpec& D = sol.conductivity.inner();
  const double rho_D = ball_radii(D).inner;
  MovingPlaneReport rep;
  rep.gamma = gamma;
  rep.tangency_tol = h;
  rep.orthogonality_tol = h / rho_D;

  const PlaneEvents events(D, gamma, h);
  auto tangent = [&](double l) { return events.tangency(l) > 0.0; };
  auto orthogonal = [&](double l) { return events.orthogonality(l) < 0.0; };

  // Coarse sweep from the top of D down to 0, then bisection in the bracket.
  const double step = 0.25 * h;
  double lambda_star = 0.0;
  PlaneEvent event = PlaneEvent::origin_reached;
  double prev = events.top();
  for (double l = events.top() - step;; l -= step) {
    l = std::max(l, 0.0);
    const bool t = tangent(l);
    const bool o = orthogonal(l);
    if (t || o) {
      const double lt = t ? bisect_event(l, prev, tangent) : -1.0;
      const double lo = o ? bisect_event(l, prev, orthogonal) : -1.0;
      // Orthogonality wins only when strictly first; exact coincidence (a
      // reflected cap that fills the opposite half) is reported as tangency.
      if (t && (!o || lt >= lo - kTieTolerance)) {
        event = PlaneEvent::internal_tangency;
        lambda_star = lt;
      } else {
        event = PlaneEvent::orthogonality;
        lambda_star = lo;
      }
      break;
    }
    if (l <= 0.0) break;
    prev = l;
  }
  if (lambda_star <= h) event = PlaneEvent::origin_reached;
  rep.lambda_star = lambda_star;
  rep.event = event;
  if (event == PlaneEvent::internal_tangency) events.tangency(lambda_star, &rep.point);
  if (event == PlaneEvent::orthogonality) {
    events.orthogonality(lambda_star, &rep.point);
    rep.gamma_nontangential = events.nontangential_on_cap(lambda_star, rep.orthogonality_tol);
  }

  // Reflected differences at lambda_star.
  const Grid& g = *sol.field.grid;
  const auto& u = sol.field.u;
  const double L = sol.outer_radius;
  auto candidate = [&](std::size_t n) {
    if (sol.phase[n] != -1) return false;
    const Vec2 x = g.position(n);
    return dot(x, gamma) < lambda_star && norm(reflect(x, gamma, lambda_star)) < L;
  };
  const ComponentLabels comps = label_components(g, candidate);
  rep.candidate_components = comps.count;
  int chosen = -1;
  if (event != PlaneEvent::origin_reached) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t n : g.unknowns()) {
      if (comps.label[n] < 0) continue;
      const Vec2 d = g.position(n) - rep.point;
      if (dot(d, d) < best) {
        best = dot(d, d);
        chosen = comps.label[n];
      }
    }
  }
  rep.sigma_component = chosen;

  const double inf = std::numeric_limits<double>::infinity();
  rep.min_w_minus = inf;
  rep.min_w_plus = inf;
  for (std::size_t n : g.unknowns()) {
    const Vec2 x = g.position(n);
    if (dot(x, gamma) >= lambda_star) continue;
    const Vec2 r = reflect(x, gamma, lambda_star);
    if (sol.phase[n] == 1) {
      if (!(D.level(r) < 0.0)) continue;
      const double w = u[n] - bilinear_interpolate(g, u, r);
      rep.min_w_plus = std::min(rep.min_w_plus, w);
      rep.max_abs_w_plus = std::max(rep.max_abs_w_plus, std::abs(w));
      ++rep.reflected_cap_nodes;
    } else if (comps.label[n] >= 0 && (chosen < 0 || comps.label[n] == chosen)) {
      const double w = u[n] - bilinear_interpolate(g, u, r);
      rep.min_w_minus = std::min(rep.min_w_minus, w);
      rep.max_abs_w_minus = std::max(rep.max_abs_w_minus, std::abs(w));
      ++rep.sigma_nodes;
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (rep.sigma_nodes == 0) rep.min_w_minus = nan;
  if (rep.reflected_cap_nodes == 0) rep.min_w_plus = nan;
  rep.interpolation_bound = interpolation_bound(sol);
  return rep;
}

std::vector<MovingPlaneReport> moving_plane_scans(const TwoPhaseSolution& sol,
                                                  const std::vector<Vec2>& gammas, double h,
                                                  unsigned threads) {
  std::vector<MovingPlaneReport> out(gammas.size());
  detail::parallel_for(gammas.size(), threads,
                       [&](std::size_t k) { out[k] = moving_plane_scan(sol, gammas[k], h); });
  return out;
}

void write_moving_plane_csv_header(std::ostream& os) {
  os << "gamma_x,gamma_y,lambda_star,event,px,py,min_w_minus,min_w_plus\n";
}

void write_moving_plane_csv_row(std::ostream& os, const MovingPlaneReport& r) {
  os << std::setprecision(17) << r.gamma.x << ',' << r.gamma.y << ',' << r.lambda_star << ','
     << to_string(r.event) << ',' << r.point.x << ',' << r.point.y << ',' << r.min_w_minus << ','
     << r.min_w_plus << '\n';
}

}  // namespace obstacle
