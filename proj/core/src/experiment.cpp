#include "obstacle/experiment.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "obstacle/errors.hpp"
#include "obstacle/radial_solver.hpp"
#include "obstacle/serrin_overdet.hpp"
#include "obstacle/two_phase.hpp"
#include "parallel.hpp"

#ifndef OBSTACLE_VERSION
#define OBSTACLE_VERSION "0.0.0"
#endif

namespace obstacle {

namespace {

namespace fs = std::filesystem;

std::string cell(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string cell(bool v) { return v ? "true" : "false"; }
std::string cell(long v) { return std::to_string(v); }
std::string cell(int v) { return std::to_string(v); }
std::string cell(std::size_t v) { return std::to_string(v); }

std::string sanitize(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n') ch = ';';
  }
  return s;
}

std::string joined(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& w : items) {
    if (!out.empty()) out += " | ";
    out += w;
  }
  return sanitize(out);
}

struct Artifact {
  std::string filename;
  std::string content;
};

struct Outcome {
  std::vector<Artifact> files;
  Table summary;
  bool converged = true;
  std::vector<std::string> warnings;
};

PsorOptions solver_options(const ExperimentConfig& c) {
  PsorOptions o;
  o.omega = c.omega;
  o.tol = c.tol;
  o.max_sweeps = c.max_sweeps;
  return o;
}

double param_at(const std::vector<double>& p, std::size_t k, const char* what) {
  if (k >= p.size()) throw PreconditionError(std::string("missing parameter: ") + what);
  return p[k];
}

template <class Writer>
std::string render(Writer&& writer) {
  std::ostringstream os;
  writer(os);
  return os.str();
}

std::vector<std::string> report_cells(const StabilityReport& r) {
  return {cell(r.dimension), sanitize(r.domain), sanitize(r.params), cell(r.h),   cell(r.rho),
          cell(r.R),         cell(r.Rstar),      cell(r.c),          cell(r.eps), cell(r.K),
          cell(r.lhs),       cell(r.rhs),        cell(r.satisfied),  joined(r.warnings)};
}

// ---------------------------------------------------------------- radial

Outcome run_radial(const ExperimentConfig& c) {
  const Obstacle psi = make_obstacle(c);
  const RadialSolution sol = solve_radial_one_phase(psi, c.radial_radius, c.dirichlet_value);
  const int N = sol.dimension;
  const double identity =
      std::isfinite(sol.domain_radius)
          ? std::abs(std::pow(sol.domain_radius, N - 1) * sol.boundary_flux - sol.scaled_flux)
          : 0.0;
  Outcome out;
  out.summary.header = summary_header("radial");
  out.summary.rows.push_back({cell(N), cell(sol.domain_radius), cell(sol.dirichlet_value),
                              cell(sol.contact_radius), cell(sol.summit_radius),
                              cell(sol.boundary_flux), cell(identity)});

  Table profile{{"r", "u", "psi", "du_dr"}, {}};
  const double top = std::isfinite(sol.domain_radius) ? sol.domain_radius
                                                      : 4.0 * psi.support_radius();
  for (int k = 0; k <= 1000; ++k) {
    const double r = top * k / 1000.0;
    profile.rows.push_back({cell(r), cell(eval_radial(sol, r)), cell(psi.value(r)),
                            cell(eval_radial_derivative(sol, r))});
  }
  out.files.push_back({"summary.csv", to_csv(out.summary)});
  out.files.push_back({"profile.csv", to_csv(profile)});
  if (!c.radial_radii.empty()) {
    Table mono{{"radius", "neg_flux"}, {}};
    for (const auto& [r, f] : boundary_flux_monotonicity(psi, c.radial_radii)) {
      mono.rows.push_back({cell(r), cell(f)});
    }
    out.files.push_back({"monotonicity.csv", to_csv(mono)});
  }
  return out;
}

// ---------------------------------------------------------------- serrin

StabilityOptions stability_options(const ExperimentConfig& c) {
  StabilityOptions so;
  so.flux_samples = c.flux_samples;
  so.c_override = c.c_override;
  so.solver = solver_options(c);
  so.flux_budget = c.flux_budget;
  return so;
}

Outcome run_serrin(const ExperimentConfig& c) {
  const DomainSpec D = make_domain(c);
  const Obstacle psi = make_obstacle(c);
  const StabilityOptions so = stability_options(c);
  const GridSolution sol = solve_one_phase_grid(D, psi, c.h, so.solver);
  const StabilityReport rep = stability_report(D, psi, sol, so);
  const SandwichViolations sw = sandwich_check(D, psi, sol);
  const InclusionResult inc = inclusion_check(D, psi, sol, c.ctol);
  const ComplementarityResidual res = complementarity_residual(sol);
  const double vi = variational_inequality_check(sol, c.vi_trials, c.seed);

  Outcome out;
  out.converged = sol.log.converged;
  out.warnings = rep.warnings;
  out.summary.header = summary_header("serrin");
  out.summary.rows.push_back(report_cells(rep));

  const auto samples = sample_boundary(D, c.flux_samples);
  const NormalDerivatives nd = normal_derivative(sol, samples);
  Table checks{{"quantity", "value"}, {}};
  auto add = [&checks](const std::string& k, const std::string& v) { checks.rows.push_back({k, v}); };
  add("sweeps", cell(sol.log.sweeps));
  add("final_update", cell(sol.log.final_update));
  add("omega", cell(sol.log.omega));
  add("converged", cell(sol.log.converged));
  add("flux_at_Rstar", cell(rep.flux_at_Rstar));
  add("valid", cell(rep.valid));
  add("flux_budget", cell(rep.flux_budget));
  add("sandwich_below_inner", cell(sw.below_inner));
  add("sandwich_above_outer", cell(sw.above_outer));
  add("inner_contains_solution", cell(inc.inner_contains_solution));
  add("solution_contains_outer", cell(inc.solution_contains_outer));
  add("inner_contains_outer", cell(inc.inner_contains_outer));
  add("inner_contact_radius", cell(inc.inner_contact));
  add("discrete_contact_radius", cell(inc.discrete_radius));
  add("outer_contact_radius", cell(inc.outer_contact));
  add("superharmonicity_residual", cell(res.superharmonicity));
  add("admissibility_residual", cell(res.admissibility));
  add("complementarity_residual", cell(res.complementarity));
  add("vi_trials", cell(c.vi_trials));
  add("vi_min_form", cell(vi));

  out.files.push_back({"report.csv", to_csv(out.summary)});
  out.files.push_back({"checks.csv", to_csv(checks)});
  out.files.push_back({"field.csv", render([&](std::ostream& os) { write_field_csv(os, sol); })});
  out.files.push_back(
      {"flux.csv", render([&](std::ostream& os) { write_flux_csv(os, samples, nd.flux); })});
  return out;
}

Outcome run_stability_sweep(const ExperimentConfig& c) {
  const double radius = c.domain_params.empty() ? 1.0 : c.domain_params[0];
  const int mode = c.domain_kind == "perturbed-ball" && c.domain_params.size() >= 3
                       ? static_cast<int>(c.domain_params[2])
                       : 4;
  const Obstacle psi = make_obstacle(c);
  const StabilityOptions so = stability_options(c);
  std::vector<StabilityReport> reports(c.amplitudes.size());
  detail::parallel_for(reports.size(), c.threads, [&](std::size_t k) {
    reports[k] = stability_report(DomainSpec::perturbed_ball(radius, c.amplitudes[k], mode), psi,
                                  c.h, so);
  });
  Outcome out;
  out.summary.header = summary_header("stability-sweep");
  for (const auto& r : reports) {
    out.summary.rows.push_back(report_cells(r));
    out.converged = out.converged && r.converged;
    for (const auto& w : r.warnings) out.warnings.push_back(r.params + ": " + w);
  }
  out.files.push_back({"report.csv", to_csv(out.summary)});
  return out;
}

// ---------------------------------------------------------------- two-phase

TwoPhaseSolution two_phase_solve(const ExperimentConfig& c) {
  const Conductivity cond(make_domain(c), c.sigma_plus, c.sigma_minus);
  TwoPhaseOptions opts;
  opts.interface_samples = c.interface_samples;
  opts.estimator = c.d_mode == "mean" ? InterfaceEstimator::mean : InterfaceEstimator::minimax;
  opts.solver = solver_options(c);
  return solve_two_phase_grid(cond, c.outer_radius, make_obstacle(c), c.h, opts);
}

Table two_phase_summary(const ExperimentConfig& c, const TwoPhaseSolution& sol,
                        double swap_difference) {
  const TransmissionResidual tr = transmission_residual(sol);
  const ConnectednessResult cc = connectedness_check(sol);
  const DomainSpec& D = sol.conductivity.inner();
  Table t;
  t.header = summary_header("two-phase");
  t.rows.push_back({sanitize(D.name()), sanitize(D.params()), cell(sol.outer_radius),
                    cell(sol.conductivity.sigma_plus()), cell(sol.conductivity.sigma_minus()),
                    cell(c.h), cell(sol.d_best), cell(sol.deviation), cell(sol.consistent),
                    cell(tr.residual), cell(tr.flux_scale), cell(cc.components),
                    cell(cc.min_u_minus), cell(cc.max_u_minus), cell(swap_difference),
                    cell(sol.field.log.converged)});
  return t;
}

std::string interface_csv(const TwoPhaseSolution& sol) {
  Table t{{"arc_parameter", "x", "y", "value", "value_plus", "value_minus", "flux_plus",
           "flux_minus"},
          {}};
  for (const auto& s : sol.interface) {
    t.rows.push_back({cell(s.where.arc_parameter), cell(s.where.point.x), cell(s.where.point.y),
                      cell(s.value), cell(s.value_plus), cell(s.value_minus), cell(s.flux_plus),
                      cell(s.flux_minus)});
  }
  return to_csv(t);
}

Outcome run_two_phase(const ExperimentConfig& c) {
  const TwoPhaseSolution sol = two_phase_solve(c);
  Outcome out;
  out.converged = sol.field.log.converged;
  out.warnings = sol.warnings;
  double swap = std::numeric_limits<double>::quiet_NaN();
  if (c.penalize) {
    const PenalizedRecord rec = penalized_two_phase(sol, c.epsilons, true);
    swap = rec.obstacle_swap_difference;
    Table pen{{"epsilon", "sup_difference", "min_excess", "converged"}, {}};
    for (std::size_t k = 0; k < rec.epsilons.size(); ++k) {
      pen.rows.push_back({cell(rec.epsilons[k]), cell(rec.sup_difference[k]),
                          cell(rec.min_excess[k]), cell(static_cast<bool>(rec.converged[k]))});
      out.converged = out.converged && rec.converged[k];
    }
    out.files.push_back({"penalized.csv", to_csv(pen)});
  }
  out.summary = two_phase_summary(c, sol, swap);
  out.files.insert(out.files.begin(), {"summary.csv", to_csv(out.summary)});
  out.files.push_back({"interface.csv", interface_csv(sol)});
  out.files.push_back(
      {"field.csv", render([&](std::ostream& os) { write_two_phase_field_csv(os, sol); })});
  return out;
}

Outcome run_moving_plane(const ExperimentConfig& c) {
  const TwoPhaseSolution sol = two_phase_solve(c);
  std::vector<Vec2> gammas;
  for (int k = 0; k < c.directions; ++k) {
    const double t = c.direction_offset + 2.0 * std::numbers::pi * k / c.directions;
    gammas.push_back({std::cos(t), std::sin(t)});
  }
  const auto reports = moving_plane_scans(sol, gammas, c.h, c.threads);
  Outcome out;
  out.converged = sol.field.log.converged;
  out.warnings = sol.warnings;
  out.summary.header = summary_header("moving-plane");
  Table detail{{"gamma_x", "gamma_y", "lambda_star", "event", "px", "py", "min_w_minus",
                "min_w_plus", "max_abs_w_minus", "max_abs_w_plus", "sigma_nodes",
                "reflected_cap_nodes", "sigma_component", "candidate_components", "tangency_tol",
                "orthogonality_tol", "gamma_nontangential", "interpolation_bound"},
               {}};
  for (const auto& r : reports) {
    std::vector<std::string> row{cell(r.gamma.x),     cell(r.gamma.y),
                                 cell(r.lambda_star), std::string(to_string(r.event)),
                                 cell(r.point.x),     cell(r.point.y),
                                 cell(r.min_w_minus), cell(r.min_w_plus)};
    out.summary.rows.push_back(row);
    row.insert(row.end(), {cell(r.max_abs_w_minus), cell(r.max_abs_w_plus), cell(r.sigma_nodes),
                           cell(r.reflected_cap_nodes), cell(r.sigma_component),
                           cell(r.candidate_components), cell(r.tangency_tol),
                           cell(r.orthogonality_tol), cell(r.gamma_nontangential),
                           cell(r.interpolation_bound)});
    detail.rows.push_back(std::move(row));
  }
  out.files.push_back({"moving_plane.csv", to_csv(out.summary)});
  out.files.push_back({"moving_plane_detail.csv", to_csv(detail)});
  out.files.push_back({"two_phase.csv", to_csv(two_phase_summary(c, sol, std::nan("")))});
  return out;
}

// ---------------------------------------------------------------- exterior

Outcome run_exterior(const ExperimentConfig& c) {
  const Obstacle psi = make_obstacle(c);
  const auto probe =
      exterior_nonexistence_probe(psi, c.interface_radius, c.sigma_plus, c.sigma_minus, c.schedule);
  Outcome out;
  out.summary.header = summary_header("exterior-probe");
  double prev = std::nan("");
  for (const auto& [L, d] : probe) {
    out.summary.rows.push_back({cell(psi.dimension()), cell(L), cell(d),
                                std::isnan(prev) ? std::string() : cell((d - prev) / prev)});
    prev = d;
  }
  if (psi.dimension() >= 3) {
    const auto exact = solve_radial_two_phase(psi, c.interface_radius, kInfiniteRadius,
                                              c.sigma_plus, c.sigma_minus);
    out.summary.rows.push_back({cell(psi.dimension()), cell(kInfiniteRadius),
                                cell(exact.interface_value),
                                std::isnan(prev) ? std::string()
                                                 : cell((exact.interface_value - prev) / prev)});
  }
  out.files.push_back({"exterior.csv", to_csv(out.summary)});
  return out;
}

// ---------------------------------------------------------------- calibrate

Outcome run_calibrate(const ExperimentConfig& c) {
  const TorsionCalibration t = torsion_calibration(c.calibrate_radius, c.h, solver_options(c));
  Outcome out;
  out.converged = t.converged;
  out.summary.header = summary_header("calibrate");
  out.summary.rows.push_back({cell(t.R), cell(t.h), cell(t.flux_error), cell(t.field_error),
                              cell(t.sweeps), cell(t.converged)});
  out.files.push_back({"torsion.csv", to_csv(out.summary)});
  return out;
}

Outcome execute(const ExperimentConfig& c) {
  if (c.kind == "radial") return run_radial(c);
  if (c.kind == "serrin") return run_serrin(c);
  if (c.kind == "stability-sweep") return run_stability_sweep(c);
  if (c.kind == "two-phase") return run_two_phase(c);
  if (c.kind == "moving-plane") return run_moving_plane(c);
  if (c.kind == "exterior-probe") return run_exterior(c);
  if (c.kind == "calibrate") return run_calibrate(c);
  throw ParseError("unknown experiment kind '" + c.kind + "'", 0);
}

int exit_code_for(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const HypothesisError&) {
    return kExitHypothesis;
  } catch (const NoDetachmentError&) {
    return kExitHypothesis;
  } catch (const NonexistenceError&) {
    return kExitHypothesis;
  } catch (...) {
    return kExitError;
  }
}

std::string message_of(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const std::exception& e) {
    return e.what();
  } catch (...) {
    return "unknown error";
  }
}

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write '" + path.string() + "'");
  os << text;
}

}  // namespace

std::string_view version() { return OBSTACLE_VERSION; }

std::string to_csv(const Table& table) {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      out += cells[k];
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
  return out;
}

DomainSpec make_domain(const ExperimentConfig& c) {
  const auto& p = c.domain_params;
  if (c.domain_kind == "ball") return DomainSpec::ball(param_at(p, 0, "ball radius"));
  if (c.domain_kind == "ellipse") {
    return DomainSpec::ellipse(param_at(p, 0, "ellipse semi-axis a"),
                               param_at(p, 1, "ellipse semi-axis b"));
  }
  if (c.domain_kind == "shifted-ball") {
    return DomainSpec::shifted_ball(param_at(p, 0, "radius"),
                                    {param_at(p, 1, "center x"), p.size() > 2 ? p[2] : 0.0});
  }
  if (c.domain_kind == "perturbed-ball") {
    return DomainSpec::perturbed_ball(param_at(p, 0, "radius"), param_at(p, 1, "amplitude"),
                                      static_cast<int>(param_at(p, 2, "mode")));
  }
  throw PreconditionError("unknown domain kind '" + c.domain_kind + "'");
}

Obstacle make_obstacle(const ExperimentConfig& c) {
  const auto& p = c.obstacle_params;
  if (c.obstacle_kind == "cap") {
    return Obstacle::cap(c.dimension, param_at(p, 0, "cap height"), param_at(p, 1, "cap curvature"));
  }
  if (c.obstacle_kind == "plateau") {
    return Obstacle::plateau(c.dimension, param_at(p, 0, "height"), param_at(p, 1, "curvature"),
                             param_at(p, 2, "plateau radius"));
  }
  if (c.obstacle_kind == "constant") {
    return Obstacle::constant(c.dimension, param_at(p, 0, "constant value"));
  }
  throw PreconditionError("unknown obstacle kind '" + c.obstacle_kind + "'");
}

fs::path output_directory(const ExperimentConfig& config) {
  fs::path dir(config.output_dir);
  if (dir.is_relative()) {
    if (const char* root = std::getenv(kOutputRootVariable); root && *root) dir = fs::path(root) / dir;
  }
  return dir;
}

std::vector<std::string> summary_header(const std::string& kind) {
  if (kind == "radial") {
    return {"N", "domain_radius", "dirichlet_value", "contact_radius", "summit_radius",
            "boundary_flux", "flux_identity_residual"};
  }
  if (kind == "serrin" || kind == "stability-sweep") {
    return {"N", "domain", "params", "h",   "rho", "R",         "Rstar",
            "c", "eps",    "K",      "lhs", "rhs", "satisfied", "warnings"};
  }
  if (kind == "two-phase") {
    return {"domain",      "params",     "L",           "sigma_plus",
            "sigma_minus", "h",          "d_best",      "deviation",
            "consistent",  "transmission_residual",     "flux_scale",
            "components",  "min_u_minus", "max_u_minus", "obstacle_swap_difference",
            "converged"};
  }
  if (kind == "moving-plane") {
    return {"gamma_x", "gamma_y", "lambda_star", "event", "px", "py", "min_w_minus", "min_w_plus"};
  }
  if (kind == "exterior-probe") return {"N", "L", "d", "relative_change"};
  if (kind == "calibrate") return {"R", "h", "flux_error", "field_error", "sweeps", "converged"};
  throw ParseError("unknown experiment kind '" + kind + "'", 0);
}

Table summarize(const ExperimentConfig& config, bool* converged) {
  Outcome out = execute(config);
  if (converged) *converged = out.converged;
  return std::move(out.summary);
}

RunResult run(const ExperimentConfig& config) {
  const auto started = std::chrono::system_clock::now();
  const auto t0 = std::chrono::steady_clock::now();
  RunResult result;
  result.directory = output_directory(config);

  Outcome outcome;
  try {
    outcome = execute(config);
    result.exit_code = outcome.converged ? kExitOk : kExitNotConverged;
    result.message = outcome.converged ? "ok" : "solver did not converge (flagged)";
  } catch (...) {
    const auto error = std::current_exception();
    result.exit_code = exit_code_for(error);
    result.message = message_of(error);
  }
  result.summary = outcome.summary;
  result.warnings = outcome.warnings;

  try {
    fs::create_directories(result.directory);
    for (const auto& f : outcome.files) {
      write_text(result.directory / f.filename, f.content);
      result.files.push_back(result.directory / f.filename);
    }
    nlohmann::ordered_json manifest;
    manifest["tool"] = "obstacle-bench";
    manifest["version"] = std::string(version());
    manifest["name"] = config.name;
    manifest["kind"] = config.kind;
    manifest["seed"] = config.seed;
    auto& echo = manifest["config"] = nlohmann::ordered_json::array();
    for (const auto& [k, v] : config.entries) echo.push_back({k, v});
    auto& files = manifest["files"] = nlohmann::ordered_json::array();
    for (const auto& f : outcome.files) files.push_back(f.filename);
    manifest["exit_code"] = result.exit_code;
    manifest["message"] = result.message;
    manifest["warnings"] = result.warnings;
    manifest["started_utc"] = utc_timestamp(started);
    manifest["elapsed_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_text(result.directory / "manifest.json", manifest.dump(2) + "\n");
    result.files.push_back(result.directory / "manifest.json");
  } catch (const std::exception& e) {
    result.exit_code = kExitError;
    result.message = e.what();
  }
  return result;
}

SweepResult sweep(const ExperimentConfig& config, const std::string& parameter,
                  const std::vector<std::string>& values) {
  if (!is_numeric_key(parameter)) {
    throw ParseError("sweep parameter '" + parameter + "' is not a numeric key", 0);
  }
  std::vector<ExperimentConfig> configs;
  for (const auto& v : values) {
    ExperimentConfig copy = config;
    set_config_value(copy, parameter, v);
    copy.threads = 1;
    configs.push_back(std::move(copy));
  }

  struct Row {
    Table table;
    bool converged = true;
    std::exception_ptr error;
  };
  std::vector<Row> rows(configs.size());
  detail::parallel_for(configs.size(), config.threads, [&](std::size_t k) {
    try {
      rows[k].table = summarize(configs[k], &rows[k].converged);
    } catch (...) {
      rows[k].error = std::current_exception();
    }
  });

  Table combined;
  combined.header = summary_header(config.kind);
  combined.header.insert(combined.header.begin(), parameter);
  SweepResult result;
  result.message = "ok";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].error) {
      if (result.exit_code == kExitOk || result.exit_code == kExitNotConverged) {
        result.exit_code = exit_code_for(rows[k].error);
        result.message = values[k] + ": " + message_of(rows[k].error);
      }
      continue;
    }
    if (!rows[k].converged && result.exit_code == kExitOk) {
      result.exit_code = kExitNotConverged;
      result.message = values[k] + ": solver did not converge (flagged)";
    }
    for (auto& r : rows[k].table.rows) {
      r.insert(r.begin(), values[k]);
      combined.rows.push_back(std::move(r));
    }
  }
  result.csv = to_csv(combined);

  std::string stem = parameter;
  for (char& ch : stem) {
    if (ch == '.') ch = '_';
  }
  const fs::path dir = output_directory(config);
  try {
    fs::create_directories(dir);
    result.file = dir / ("sweep_" + stem + ".csv");
    write_text(result.file, result.csv);
  } catch (const std::exception& e) {
    result.exit_code = kExitError;
    result.message = e.what();
  }
  return result;
}

}  // namespace obstacle
