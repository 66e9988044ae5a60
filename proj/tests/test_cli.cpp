#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "obstacle/config.hpp"
#include "obstacle/errors.hpp"
#include "obstacle/experiment.hpp"

using namespace obstacle;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("obstacle-test-" + name);
  fs::remove_all(p);
  return p;
}

ExperimentConfig with_output(const std::string& text, const fs::path& dir) {
  ExperimentConfig c = parse(text);
  set_config_value(c, "output.dir", dir.string());
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::vector<double> column(const std::string& csv, std::size_t index) {
  std::vector<double> out;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream cells(line);
    std::string cell;
    for (std::size_t k = 0; k <= index; ++k) std::getline(cells, cell, ',');
    out.push_back(std::stod(cell));
  }
  return out;
}

}  // namespace

TEST_CASE("config grammar: comments, fractions, lists") {
  const ExperimentConfig c = parse(
      "# comment\n"
      "experiment.kind = serrin\n"
      "\n"
      "domain.kind = ellipse\n"
      "domain.params = 1, 1.3\n"
      "numeric.h = 1/64\n"
      "numeric.epsilons = 0.1,0.05\n"
      "serrin.c = -0.4\n");
  CHECK(c.kind == "serrin");
  CHECK(c.domain_kind == "ellipse");
  CHECK(c.domain_params == std::vector<double>{1.0, 1.3});
  CHECK(c.h == 1.0 / 64.0);
  CHECK(c.epsilons.size() == 2);
  CHECK(c.c_override.value() == -0.4);
  CHECK(c.entries.size() == 6);
  CHECK(is_numeric_key("numeric.h"));
  CHECK_FALSE(is_numeric_key("domain.kind"));
  CHECK_FALSE(is_numeric_key("no.such"));
}

TEST_CASE("config errors name the offending line") {
  try {
    parse("experiment.kind = radial\n# ok\nradial.bogus = 3\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("radial.bogus") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("experiment.kind radial\n"), ParseError);
  CHECK_THROWS_AS(parse("kind = radial\n"), ParseError);
  CHECK_THROWS_AS(parse("domain.kind = ball\n"), ParseError);
  CHECK_THROWS_AS(parse("experiment.kind = magic\n"), ParseError);
  CHECK_THROWS_AS(parse("experiment.kind = serrin\nnumeric.h = 2\n"), ParseError);
  CHECK_THROWS_AS(parse("experiment.kind = serrin\nnumeric.h = 1/0\n"), ParseError);
  CHECK_THROWS_AS(parse("experiment.kind = serrin\nnumeric.omega = 0.5\n"), ParseError);
  CHECK_THROWS_AS(parse("experiment.kind = serrin\nnumeric.flux_samples = 100\n"), ParseError);
  CHECK_THROWS_AS(parse("experiment.kind = serrin\ndomain.params = 1, x\n"), ParseError);
  CHECK_THROWS_AS(parse_config_file("/nonexistent/config.cfg"), ParseError);
}

TEST_CASE("calibrate run writes the torsion row and a manifest") {
  const fs::path dir = scratch("calibrate");
  const RunResult r = run(with_output("experiment.kind = calibrate\nnumeric.h = 1/32\n", dir));
  CHECK(r.exit_code == kExitOk);
  REQUIRE(fs::exists(dir / "torsion.csv"));
  const std::string csv = slurp(dir / "torsion.csv");
  CHECK(csv.rfind("R,h,flux_error,field_error,sweeps,converged\n", 0) == 0);
  CHECK(lines(csv) == 2);
  const std::string manifest = slurp(dir / "manifest.json");
  CHECK(manifest.find("\"kind\": \"calibrate\"") != std::string::npos);
  CHECK(manifest.find("\"exit_code\": 0") != std::string::npos);
  CHECK(manifest.find("started_utc") != std::string::npos);
}

TEST_CASE("exit codes: hypothesis violation and flagged non-convergence") {
  const RunResult bad = run(with_output(
      "experiment.kind = serrin\nobstacle.params = 1, 0.5\nnumeric.h = 1/32\n", scratch("hyp")));
  CHECK(bad.exit_code == kExitHypothesis);
  CHECK(fs::exists(bad.directory / "manifest.json"));

  const RunResult slow = run(with_output(
      "experiment.kind = serrin\nnumeric.h = 1/32\nnumeric.max_sweeps = 5\n", scratch("slow")));
  CHECK(slow.exit_code == kExitNotConverged);
  CHECK(fs::exists(slow.directory / "report.csv"));

  const RunResult ext = run(with_output(
      "experiment.kind = exterior-probe\nexterior.schedule = 8\nobstacle.dimension = 3\n"
      "obstacle.params = 1, 4\n",
      scratch("ext")));
  CHECK(ext.exit_code == kExitOk);
  REQUIRE(ext.summary.rows.size() == 2);
  CHECK(ext.summary.rows[1][1] == "inf");
  CHECK(std::stod(ext.summary.rows[1][2]) == doctest::Approx(0.301288502852308658).epsilon(1e-12));
}

TEST_CASE("re-running a config reproduces every file except manifest timestamps") {
  const std::string text =
      "experiment.kind = serrin\ndomain.kind = ellipse\ndomain.params = 1, 1.3\n"
      "numeric.h = 1/32\nnumeric.vi_trials = 20\n";
  const fs::path a = scratch("repro-a"), b = scratch("repro-b");
  const RunResult ra = run(with_output(text, a));
  const RunResult rb = run(with_output(text, b));
  REQUIRE(ra.exit_code == kExitOk);
  REQUIRE(ra.files.size() == rb.files.size());
  for (const auto& f : ra.files) {
    if (f.filename() == "manifest.json") continue;
    CHECK(slurp(f) == slurp(b / f.filename()));
  }
}

TEST_CASE("radial run: profile and monotonicity tables") {
  const fs::path dir = scratch("radial");
  const RunResult r = run(with_output(
      "experiment.kind = radial\nradial.radii = 0.5, 1, 2\n", dir));
  CHECK(r.exit_code == kExitOk);
  CHECK(lines(slurp(dir / "profile.csv")) == 1002);
  const auto flux = column(slurp(dir / "monotonicity.csv"), 1);
  REQUIRE(flux.size() == 3);
  CHECK(flux[0] > flux[1]);
  CHECK(flux[1] > flux[2]);
}

TEST_CASE("stability sweep over amplitudes gives one satisfied row each") {
  const fs::path dir = scratch("stability");
  const RunResult r = run(with_output(
      "experiment.kind = stability-sweep\nnumeric.h = 1/64\nserrin.amplitudes = 0.02, 0.05, 0.1\n",
      dir));
  CHECK(r.exit_code == kExitOk);
  REQUIRE(r.summary.rows.size() == 3);
  for (const auto& row : r.summary.rows) CHECK(row[12] == "true");
}

TEST_CASE("sweep: header-only for no values, error for non-numeric keys") {
  const ExperimentConfig c = with_output("experiment.kind = calibrate\n", scratch("sweep-empty"));
  const SweepResult empty = sweep(c, "numeric.h", {});
  CHECK(empty.exit_code == kExitOk);
  CHECK(empty.csv == "numeric.h,R,h,flux_error,field_error,sweeps,converged\n");
  CHECK(fs::exists(empty.file));
  CHECK_THROWS_AS(sweep(c, "domain.kind", {"ball"}), ParseError);
  CHECK_THROWS_AS(sweep(c, "no.such", {"1"}), ParseError);
}

TEST_CASE("sweep over h: the flux oscillation shrinks under refinement") {
  ExperimentConfig c = with_output("experiment.kind = serrin\nnumeric.vi_trials = 0\n", scratch("sweep-h"));
  const SweepResult s = sweep(c, "numeric.h", {"1/32", "1/64", "1/128"});
  CHECK(s.exit_code == kExitOk);
  const auto eps = column(s.csv, 9);
  REQUIRE(eps.size() == 3);
  CHECK(eps[1] < eps[0]);
  CHECK(eps[2] < eps[1]);
}

TEST_CASE("sweep over L: the planar interface value keeps drifting") {
  ExperimentConfig c = with_output("experiment.kind = exterior-probe\n", scratch("sweep-L"));
  const SweepResult s = sweep(c, "exterior.schedule", {"4", "8", "16"});
  CHECK(s.exit_code == kExitOk);
  const auto d = column(s.csv, 3);
  REQUIRE(d.size() == 3);
  CHECK((d[1] - d[0]) / d[0] > 0.1);
  CHECK((d[2] - d[1]) / d[1] > 0.1);
}

TEST_CASE("sweep rows are identical for any thread count") {
  ExperimentConfig c = with_output("experiment.kind = radial\n", scratch("sweep-threads"));
  set_config_value(c, "experiment.threads", "1");
  const SweepResult one = sweep(c, "radial.radius", {"0.5", "1", "1.5", "2"});
  set_config_value(c, "experiment.threads", "4");
  const SweepResult four = sweep(c, "radial.radius", {"0.5", "1", "1.5", "2"});
  CHECK(one.csv == four.csv);
  CHECK(lines(one.csv) == 5);
}

TEST_CASE("a failing sweep row sets the exit code and keeps the others") {
  ExperimentConfig c = with_output("experiment.kind = radial\n", scratch("sweep-bad"));
  const SweepResult s = sweep(c, "radial.radius", {"1", "0.2"});
  CHECK(s.exit_code == kExitError);
  CHECK(lines(s.csv) == 2);
}
