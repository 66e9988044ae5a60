#include "obstacle/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <span>

#include "obstacle/errors.hpp"
#include "obstacle/radial_solver.hpp"
#include "obstacle/serrin_overdet.hpp"
#include "obstacle/two_phase.hpp"
#include "parallel.hpp"

namespace obstacle {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

class Digest {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < n; ++k) {
      value_ ^= p[k];
      value_ *= 1099511628211ull;
    }
  }
  void add(double v) { bytes(&v, sizeof v); }
  void add(std::span<const double> v) { bytes(v.data(), v.size() * sizeof(double)); }
  void add(long long v) { bytes(&v, sizeof v); }
  std::uint64_t value() const { return value_; }

 private:
  std::uint64_t value_ = 1469598103934665603ull;
};

// Collects threshold checks; every checked number also feeds the digest.
class Checks {
 public:
  explicit Checks(Digest& digest) : digest_(digest) {}

  void at_most(const std::string& name, double value, double bound) {
    record(name, value, "<=", bound, value <= bound);
  }
  void at_least(const std::string& name, double value, double bound) {
    record(name, value, ">=", bound, value >= bound);
  }
  void below(const std::string& name, double value, double bound) {
    record(name, value, "<", bound, value < bound);
  }
  void within(const std::string& name, double value, double lo, double hi) {
    const bool ok = value >= lo && value <= hi;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s=%.4g in [%g, %g]%s", name.c_str(), value, lo, hi,
                  ok ? "" : " FAIL");
    push(buf, ok);
    digest_.add(value);
  }
  void flag(const std::string& name, bool ok) {
    push(name + (ok ? "" : " FAIL"), ok);
    digest_.add(static_cast<long long>(ok));
  }
  // Wall-clock limits are checked but kept out of the digest.
  void runtime(double seconds, double limit) {
    char buf[96];
    const bool ok = seconds < limit;
    std::snprintf(buf, sizeof buf, "runtime=%.1fs < %gs%s", seconds, limit, ok ? "" : " FAIL");
    push(buf, ok);
  }

  bool passed() const { return passed_; }
  const std::string& detail() const { return detail_; }

 private:
  void record(const std::string& name, double value, const char* op, double bound, bool ok) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s=%.4g %s %g%s", name.c_str(), value, op, bound,
                  ok ? "" : " FAIL");
    push(buf, ok);
    digest_.add(value);
  }
  void push(const std::string& text, bool ok) {
    if (!detail_.empty()) detail_ += "; ";
    detail_ += text;
    passed_ = passed_ && ok;
  }

  Digest& digest_;
  bool passed_ = true;
  std::string detail_;
};

template <class F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  for (int k = 0; k < 200 && hi - lo > 0.0; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double sup_difference(const Grid& g, std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t n : g.unknowns()) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

const Obstacle kCap = Obstacle::cap(2, 1.0, 8.0);

std::vector<DomainSpec> stability_domains() {
  return {DomainSpec::ellipse(1.0, 1.3), DomainSpec::shifted_ball(1.0, {0.2, 0.0}),
          DomainSpec::perturbed_ball(1.0, 0.02, 4), DomainSpec::perturbed_ball(1.0, 0.05, 4),
          DomainSpec::perturbed_ball(1.0, 0.1, 4)};
}

std::string tag(const DomainSpec& d) { return d.name() + "(" + d.params() + ")"; }

// 1: torsion problem through the obstacle machinery.
void torsion(Checks& c, Digest& d) {
  const auto t0 = Clock::now();
  const TorsionCalibration coarse = torsion_calibration(1.0, 1.0 / 128.0);
  const TorsionCalibration fine = torsion_calibration(1.0, 1.0 / 256.0);
  d.add(static_cast<long long>(coarse.sweeps));
  d.add(static_cast<long long>(fine.sweeps));
  c.flag("converged", coarse.converged && fine.converged);
  c.at_most("flux_err(1/128)", coarse.flux_error, 1e-2);
  c.at_most("field_err(1/128)", coarse.field_error, 5e-4);
  c.at_least("flux_err_drop", coarse.flux_error / fine.flux_error, 3.0);
  c.at_least("field_err_drop", coarse.field_error / fine.field_error, 3.0);
  c.runtime(seconds_since(t0), 30.0);
}

// 2: radial contact radius, grid agreement, flux identity.
void radial_oracle(Checks& c, Digest& d) {
  const double a_root =
      bisect([](double a) { return 1.0 - 8.0 * a * a + 16.0 * a * a * std::log(a); }, 0.16, 0.17);
  const RadialSolution sol = solve_radial_one_phase(kCap, 1.0);
  c.within("a", sol.contact_radius, 0.16, 0.17);
  c.at_most("|a-a_bisect|", std::abs(sol.contact_radius - a_root), 1e-12);

  const GridSolution grid = solve_one_phase_grid(DomainSpec::ball(1.0), kCap, 1.0 / 256.0, {});
  double err = 0.0;
  for (std::size_t n : grid.grid->unknowns()) {
    const double r = norm(grid.grid->position(n));
    err = std::max(err, std::abs(grid.u[n] - eval_radial(sol, r)));
  }
  d.add(grid.u);
  c.flag("converged", grid.log.converged);
  c.at_most("grid_sup_err(1/256)", err, 5e-3);

  const double a = sol.contact_radius;
  const double identity = std::abs(1.0 * eval_radial_derivative(sol, 1.0) - a * kCap.slope(a));
  c.at_most("flux_identity", identity, 1e-10);
}

// 3: -u_R'(R) strictly decreasing in R.
void flux_monotonicity(Checks& c, Digest&) {
  const std::vector<double> radii{0.5, 0.75, 1.0, 1.5, 2.0};
  const auto flux = boundary_flux_monotonicity(kCap, radii);
  double margin = std::numeric_limits<double>::infinity();
  double oracle_err = 0.0;
  for (std::size_t k = 0; k < flux.size(); ++k) {
    margin = std::min(margin, flux[k].second);
    if (k > 0) margin = std::min(margin, flux[k - 1].second - flux[k].second);
    const double R = radii[k];
    // Contact radius from u(R) = 0, then -u'(R) = -a psi'(a) / R.
    const double a = bisect(
        [R](double s) { return 1.0 - 8.0 * s * s + 16.0 * s * s * std::log(s / R); }, 1e-9,
        std::min(R, 1.0 / std::sqrt(8.0)));
    oracle_err = std::max(oracle_err, std::abs(flux[k].second - 16.0 * a * a / R));
  }
  c.at_least("min_margin", margin, 1e-6);
  c.at_most("oracle_err", oracle_err, 1e-9);
}

// 4: the ball gives eps at discretisation scale and R - rho = 0.
void ball_stability(Checks& c, Digest& d) {
  const StabilityReport r = stability_report(DomainSpec::ball(1.0), kCap, 1.0 / 256.0, {});
  d.add(r.c);
  d.add(r.K);
  c.flag("converged", r.converged);
  c.at_most("eps(1/256)", r.eps, 5e-3);
  c.at_most("R-rho", r.R - r.rho, 0.0);
  c.flag("satisfied", r.satisfied);
}

// 5: R - rho <= K eps on perturbed domains.
void stability_inequality(Checks& c, Digest& d) {
  const auto t0 = Clock::now();
  int converged = 0;
  for (const DomainSpec& D : stability_domains()) {
    const StabilityReport r = stability_report(D, kCap, 1.0 / 128.0, {});
    d.add(r.eps);
    d.add(r.K);
    if (!r.converged) continue;
    ++converged;
    char buf[64];
    std::snprintf(buf, sizeof buf, " lhs=%.3g rhs=%.3g", r.lhs, r.rhs);
    c.flag(tag(D) + buf, r.satisfied);
  }
  c.at_least("converged_runs", converged, 1);
  c.runtime(seconds_since(t0), 300.0);
}

// 6: sandwich bounds and coincidence-set inclusions.
void proof_structure(Checks& c, Digest& d) {
  for (const DomainSpec& D : stability_domains()) {
    const GridSolution sol = solve_one_phase_grid(D, kCap, 1.0 / 128.0, {});
    d.add(sol.u);
    const SandwichViolations sw = sandwich_check(D, kCap, sol);
    const InclusionResult inc = inclusion_check(D, kCap, sol);
    c.at_most(tag(D) + " v1", sw.below_inner, 1e-3);
    c.at_most("v2", sw.above_outer, 1e-3);
    c.flag("inclusions", inc.inner_contains_solution && inc.solution_contains_outer &&
                             inc.inner_contains_outer);
  }
}

// 7: projected Gauss-Seidel never increases the Dirichlet energy.
void energy_descent(Checks& c, Digest& d) {
  PsorOptions o;
  o.omega = 1.0;
  o.tol = 1e-12;
  o.record_energy = true;
  const GridSolution sol = psor_solve(make_problem(assemble(DomainSpec::ball(1.0), 1.0 / 32.0), kCap), o);
  const auto& e = sol.log.energy;
  d.add(e);
  long increases = 0;
  double worst = 0.0;
  for (std::size_t k = 1; k < e.size(); ++k) {
    if (e[k] > e[k - 1]) {
      ++increases;
      worst = std::max(worst, e[k] - e[k - 1]);
    }
  }
  c.flag("converged", sol.log.converged);
  c.at_least("sweeps", static_cast<double>(e.size()), 2.0);
  c.at_most("increases", static_cast<double>(increases), 0.0);
  c.at_most("max_increase", worst, 0.0);
}

// 8: penalty solutions approach the PSOR solution; shape of beta.
void penalty_convergence(Checks& c, Digest& d) {
  const GridProblem problem = make_problem(assemble(DomainSpec::ball(1.0), 1.0 / 64.0), kCap);
  PsorOptions po;
  po.tol = 1e-13;
  const GridSolution ref = psor_solve(problem, po);
  PenaltyOptions pen;
  pen.tol = 1e-12;
  std::vector<double> diff;
  bool converged = ref.log.converged;
  for (double eps : {0.1, 0.05, 0.025}) {
    const GridSolution v = penalty_solve(problem, eps, pen);
    converged = converged && v.log.converged;
    diff.push_back(sup_difference(*problem.grid, v.u, ref.u));
    d.add(v.u);
  }
  c.flag("converged", converged);
  c.within("ratio(0.1/0.05)", diff[0] / diff[1], 1.5, 3.0);
  c.within("ratio(0.05/0.025)", diff[1] / diff[2], 1.5, 3.0);

  bool dead = true, convex = true, linear = true;
  for (int k = 0; k < 1000; ++k) {
    const double t = -2.0 + 5.0 * k / 999.0;
    const PenaltyValue b = penalty_beta(t);
    convex = convex && b.second >= 0.0;
    if (t <= 0.0) dead = dead && b.value == 0.0 && b.first == 0.0 && b.second == 0.0;
    if (t >= 1.0) linear = linear && b.value == t - 0.5 && b.first == 1.0 && b.second == 0.0;
  }
  c.flag("beta_dead_zone", dead);
  c.flag("beta_convex", convex);
  c.flag("beta_linear_branch", linear);
}

// 9: radial two-phase matching and its grid analogue.
void two_phase_closed_form(Checks& c, Digest& d) {
  const Obstacle psi3 = Obstacle::cap(3, 1.0, 4.0);
  const double L = 2.0, sp = 2.0, sm = 1.0;
  const TwoPhaseRadialSolution rad = solve_radial_two_phase(psi3, 1.0, L, sp, sm);
  const double a_exact = 1.0 / (2.0 * std::sqrt(3.0));
  const double d_exact = std::sqrt(3.0) / 9.0;
  c.at_most("|a-1/(2sqrt3)|", std::abs(rad.inner.contact_radius - a_exact), 1e-10);
  c.at_most("|d-sqrt3/9|", std::abs(rad.interface_value - d_exact), 1e-10);

  // Inner value at r_D = 1 versus the value forced by flux transmission.
  auto residual = [&](double a) {
    const double flux = a * a * psi3.slope(a);
    const double inner = psi3.value(a) + flux * (1.0 / a - 1.0);
    const double outer = -sp * flux * (1.0 - 1.0 / L) / sm;
    return inner - outer;
  };
  const double a_bisect = bisect(residual, 1e-6, 0.5);
  c.at_most("|a_bisect-a|", std::abs(a_bisect - rad.inner.contact_radius), 1e-10);

  const Obstacle psi2 = Obstacle::cap(2, 1.0, 4.0);
  const double d_radial = solve_radial_two_phase(psi2, 1.0, L, sp, sm).interface_value;
  const TwoPhaseSolution grid =
      solve_two_phase_grid(Conductivity(DomainSpec::ball(1.0), sp, sm), L, psi2, 1.0 / 128.0);
  d.add(grid.field.u);
  c.flag("converged", grid.field.log.converged);
  c.at_most("|d_grid-d_radial|(N=2)", std::abs(grid.d_best - d_radial), 2e-2);
}

// 10: moving-plane diagnostics on a centred and a shifted inclusion.
void moving_plane_diagnostics(Checks& c, Digest& d) {
  const double h = 1.0 / 128.0;
  const Obstacle psi = Obstacle::cap(2, 1.0, 4.0);
  const TwoPhaseSolution centred =
      solve_two_phase_grid(Conductivity(DomainSpec::ball(1.0), 2.0, 1.0), 2.0, psi, h);
  d.add(centred.field.u);
  c.flag("converged", centred.field.log.converged);
  c.at_most("deviation(centred)", centred.deviation, 5e-3);

  std::vector<Vec2> gammas;
  for (int k = 0; k < 8; ++k) {
    const double t = 2.0 * std::numbers::pi * k / 8.0;
    gammas.push_back({std::cos(t), std::sin(t)});
  }
  bool origin = true;
  double lambda = 0.0, w = 0.0;
  for (const MovingPlaneReport& r : moving_plane_scans(centred, gammas, h, 1)) {
    origin = origin && r.event == PlaneEvent::origin_reached;
    lambda = std::max(lambda, r.lambda_star);
    w = std::max({w, r.max_abs_w_minus, r.max_abs_w_plus});
  }
  c.flag("all_scans_reach_origin", origin);
  c.at_most("max_lambda_star", lambda, h);
  c.at_most("max|w|", w, 5e-3);

  const TwoPhaseSolution shifted = solve_two_phase_grid(
      Conductivity(DomainSpec::shifted_ball(1.0, {0.2, 0.0}), 2.0, 1.0), 2.0, psi, h);
  d.add(shifted.field.u);
  c.flag("converged(shifted)", shifted.field.log.converged);
  c.at_least("deviation_ratio", shifted.deviation / centred.deviation, 10.0);
  const MovingPlaneReport r = moving_plane_scan(shifted, {1.0, 0.0}, h);
  c.flag("tangency_event", r.event == PlaneEvent::internal_tangency);
  c.at_most("|lambda_star-0.2|", std::abs(r.lambda_star - 0.2), h);
}

// 11: exterior problem in N = 3 and the divergent N = 2 probe.
void exterior_probe(Checks& c, Digest&) {
  const Obstacle psi3 = Obstacle::cap(3, 1.0, 4.0);
  const auto p3 = exterior_nonexistence_probe(psi3, 1.0, 2.0, 1.0, {8.0, 16.0});
  c.below("rel_change(N=3,L=8->16)", std::abs(p3[1].second - p3[0].second) / p3[0].second, 1e-2);

  const TwoPhaseRadialSolution ext = solve_radial_two_phase(psi3, 1.0, kInfiniteRadius, 2.0, 1.0);
  const double a_root = bisect([](double a) { return 1.0 - 12.0 * a * a - 8.0 * a * a * a; }, 0.26, 0.27);
  c.within("a(L=inf)", ext.inner.contact_radius, 0.26, 0.27);
  c.at_most("|a-root|", std::abs(ext.inner.contact_radius - a_root), 1e-10);

  const auto p2 = exterior_nonexistence_probe(kCap, 1.0, 2.0, 1.0, {4.0, 8.0, 16.0});
  for (std::size_t k = 1; k < p2.size(); ++k) {
    char name[64];
    std::snprintf(name, sizeof name, "drift(N=2,L=%g->%g)", p2[k - 1].first, p2[k].first);
    c.at_least(name, (p2[k].second - p2[k - 1].second) / p2[k - 1].second, 0.1);
  }
}

struct Criterion {
  int id;
  const char* title;
  void (*body)(Checks&, Digest&);
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {1, "Torsion calibration", torsion},
      {2, "Radial oracle agreement", radial_oracle},
      {3, "Flux monotonicity", flux_monotonicity},
      {4, "Ball: eps at discretization scale", ball_stability},
      {5, "Stability inequality R-rho <= K eps", stability_inequality},
      {6, "Sandwich bounds and coincidence inclusions", proof_structure},
      {7, "Energy descent", energy_descent},
      {8, "Penalty convergence", penalty_convergence},
      {9, "Two-phase closed form", two_phase_closed_form},
      {10, "Moving-plane diagnostics", moving_plane_diagnostics},
      {11, "Exterior problem and N=2 exclusion", exterior_probe},
  };
  return list;
}

constexpr int kDeterminismId = 12;
constexpr const char* kDeterminismTitle = "Determinism";

CriterionResult run_single(int id) {
  const auto& list = criteria();
  const auto it = std::find_if(list.begin(), list.end(), [id](const Criterion& c) { return c.id == id; });
  if (it == list.end()) throw PreconditionError("unknown criterion " + std::to_string(id));
  CriterionResult result;
  result.id = id;
  result.title = it->title;
  const auto t0 = Clock::now();
  Digest digest;
  Checks checks(digest);
  try {
    it->body(checks, digest);
    result.passed = checks.passed();
    result.detail = checks.detail();
  } catch (const std::exception& e) {
    result.passed = false;
    result.detail = checks.detail() + (checks.detail().empty() ? "" : "; ") + "error: " + e.what();
  }
  result.digest = digest.value();
  result.seconds = seconds_since(t0);
  return result;
}

std::vector<CriterionResult> run_many(const std::vector<int>& ids, unsigned threads) {
  std::vector<CriterionResult> out(ids.size());
  detail::parallel_for(ids.size(), threads, [&](std::size_t k) { out[k] = run_single(ids[k]); });
  return out;
}

CriterionResult determinism(const std::vector<CriterionResult>& first, unsigned threads) {
  const auto t0 = Clock::now();
  std::vector<int> ids;
  for (const auto& r : first) ids.push_back(r.id);
  const auto second = run_many(ids, threads);
  CriterionResult result;
  result.id = kDeterminismId;
  result.title = kDeterminismTitle;
  Digest digest;
  int same = 0;
  std::string differing;
  for (std::size_t k = 0; k < first.size(); ++k) {
    digest.add(static_cast<long long>(first[k].digest));
    if (first[k].digest == second[k].digest) {
      ++same;
    } else {
      differing += " " + std::to_string(first[k].id);
    }
  }
  result.passed = same == static_cast<int>(first.size());
  result.detail = std::to_string(same) + "/" + std::to_string(first.size()) +
                  " criteria bitwise identical across two runs";
  if (!differing.empty()) result.detail += "; differing:" + differing + " FAIL";
  result.digest = digest.value();
  result.seconds = seconds_since(t0);
  return result;
}

}  // namespace

std::vector<int> criterion_ids() {
  std::vector<int> ids;
  for (const auto& c : criteria()) ids.push_back(c.id);
  ids.push_back(kDeterminismId);
  return ids;
}

CriterionResult run_criterion(int id) {
  if (id == kDeterminismId) return run_acceptance({kDeterminismId}, 0).front();
  return run_single(id);
}

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids, unsigned threads) {
  std::vector<int> wanted = ids.empty() ? criterion_ids() : ids;
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
  const auto valid = criterion_ids();
  for (int id : wanted) {
    if (std::find(valid.begin(), valid.end(), id) == valid.end()) {
      throw PreconditionError("unknown criterion " + std::to_string(id));
    }
  }
  const bool with_determinism = wanted.back() == kDeterminismId;

  // The determinism check needs a first pass over every other criterion.
  std::vector<int> first_ids;
  if (with_determinism) {
    for (const auto& c : criteria()) first_ids.push_back(c.id);
  } else {
    first_ids = wanted;
  }
  const auto first = run_many(first_ids, threads);

  std::vector<CriterionResult> out;
  for (const auto& r : first) {
    if (std::find(wanted.begin(), wanted.end(), r.id) != wanted.end()) out.push_back(r);
  }
  if (with_determinism) out.push_back(determinism(first, threads));
  return out;
}

std::string format_result(const CriterionResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "%s %2d  ", r.passed ? "PASS" : "FAIL", r.id);
  char tail[48];
  std::snprintf(tail, sizeof tail, "  (%.1f s)", r.seconds);
  return head + r.title + "  [" + r.detail + "]" + tail;
}

}  // namespace obstacle
