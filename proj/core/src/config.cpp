#include "obstacle/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>

#include "obstacle/errors.hpp"

namespace obstacle {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_scalar(const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(t.data(), end, value);
  if (ec != std::errc{} || ptr == t.data()) throw std::invalid_argument("not a number: '" + t + "'");
  return value;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

struct Context {
  const std::string& key;
  const std::string& value;
  int line;

  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError(key + ": " + why + " (got '" + value + "')", line);
  }

  double number() const {
    try {
      return parse_number(value);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }

  double number_in(double lo, double hi, bool open_lo = false, bool open_hi = false) const {
    const double v = number();
    const bool ok = (open_lo ? v > lo : v >= lo) && (open_hi ? v < hi : v <= hi);
    if (!ok) fail("out of range");
    return v;
  }

  long integer_in(long lo, long hi) const {
    const double v = number_in(static_cast<double>(lo), static_cast<double>(hi));
    if (v != std::floor(v)) fail("expected an integer");
    return static_cast<long>(v);
  }

  std::vector<double> list() const {
    std::vector<double> out;
    if (trim(value).empty()) return out;
    for (const auto& item : split(value, ',')) {
      try {
        out.push_back(parse_number(item));
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
    }
    return out;
  }

  bool boolean() const {
    const std::string v = trim(value);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail("expected true or false");
  }

  std::string word(const std::vector<std::string>& allowed) const {
    const std::string v = trim(value);
    if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) fail("unknown value");
    return v;
  }
};

struct KeySpec {
  bool numeric;
  std::function<void(ExperimentConfig&, const Context&)> assign;
};

const std::map<std::string, KeySpec>& key_table() {
  using C = ExperimentConfig;
  using X = const Context&;
  static const std::map<std::string, KeySpec> table{
      {"experiment.kind", {false, [](C& c, X x) { c.kind = x.word(experiment_kinds()); }}},
      {"experiment.name", {false, [](C& c, X x) { c.name = trim(x.value); }}},
      {"experiment.seed",
       {true, [](C& c, X x) { c.seed = static_cast<std::uint64_t>(x.integer_in(0, 1L << 52)); }}},
      {"experiment.threads",
       {true, [](C& c, X x) { c.threads = static_cast<unsigned>(x.integer_in(0, 1024)); }}},
      {"output.dir",
       {false,
        [](C& c, X x) {
          c.output_dir = trim(x.value);
          if (c.output_dir.empty()) x.fail("empty directory");
        }}},

      {"domain.kind",
       {false,
        [](C& c, X x) {
          c.domain_kind = x.word({"ball", "ellipse", "shifted-ball", "perturbed-ball"});
        }}},
      {"domain.params", {true, [](C& c, X x) { c.domain_params = x.list(); }}},
      {"obstacle.kind",
       {false, [](C& c, X x) { c.obstacle_kind = x.word({"cap", "plateau", "constant"}); }}},
      {"obstacle.params", {true, [](C& c, X x) { c.obstacle_params = x.list(); }}},
      {"obstacle.dimension",
       {true, [](C& c, X x) { c.dimension = static_cast<int>(x.integer_in(2, 16)); }}},

      {"numeric.h", {true, [](C& c, X x) { c.h = x.number_in(0.0, 1.0, true); }}},
      {"numeric.tol", {true, [](C& c, X x) { c.tol = x.number_in(0.0, 1.0, true); }}},
      {"numeric.omega",
       {true,
        [](C& c, X x) {
          c.omega = x.number_in(0.0, 2.0, false, true);
          if (c.omega != 0.0 && c.omega < 1.0) x.fail("relaxation must be 0 (auto) or in [1, 2)");
        }}},
      {"numeric.max_sweeps", {true, [](C& c, X x) { c.max_sweeps = x.integer_in(1, 100000000); }}},
      {"numeric.ctol", {true, [](C& c, X x) { c.ctol = x.number_in(0.0, HUGE_VAL); }}},
      {"numeric.epsilons",
       {true,
        [](C& c, X x) {
          c.epsilons = x.list();
          for (double e : c.epsilons) {
            if (!(e > 0.0 && e < 1.0)) x.fail("penalty epsilons must lie in (0, 1)");
          }
        }}},
      {"numeric.flux_samples",
       {true, [](C& c, X x) { c.flux_samples = static_cast<int>(x.integer_in(256, 1 << 20)); }}},
      {"numeric.vi_trials",
       {true, [](C& c, X x) { c.vi_trials = static_cast<int>(x.integer_in(0, 1 << 20)); }}},

      {"radial.radius", {true, [](C& c, X x) { c.radial_radius = x.number_in(0.0, HUGE_VAL, true); }}},
      {"radial.dirichlet_value",
       {true, [](C& c, X x) { c.dirichlet_value = x.number_in(0.0, HUGE_VAL); }}},
      {"radial.radii", {true, [](C& c, X x) { c.radial_radii = x.list(); }}},

      {"serrin.c", {true, [](C& c, X x) { c.c_override = x.number(); }}},
      {"serrin.flux_budget", {false, [](C& c, X x) { c.flux_budget = x.boolean(); }}},
      {"serrin.amplitudes",
       {true,
        [](C& c, X x) {
          c.amplitudes = x.list();
          for (double a : c.amplitudes) {
            if (!(a >= 0.0 && a < 0.5)) x.fail("amplitudes must lie in [0, 0.5)");
          }
        }}},

      {"conductivity.sigma_plus",
       {true, [](C& c, X x) { c.sigma_plus = x.number_in(0.0, HUGE_VAL, true); }}},
      {"conductivity.sigma_minus",
       {true, [](C& c, X x) { c.sigma_minus = x.number_in(0.0, HUGE_VAL, true); }}},
      {"two_phase.outer_radius",
       {true, [](C& c, X x) { c.outer_radius = x.number_in(0.0, HUGE_VAL, true); }}},
      {"two_phase.d_mode", {false, [](C& c, X x) { c.d_mode = x.word({"minimax", "mean"}); }}},
      {"two_phase.interface_samples",
       {true,
        [](C& c, X x) { c.interface_samples = static_cast<int>(x.integer_in(8, 1 << 20)); }}},
      {"two_phase.penalize", {false, [](C& c, X x) { c.penalize = x.boolean(); }}},

      {"moving_plane.directions",
       {true, [](C& c, X x) { c.directions = static_cast<int>(x.integer_in(1, 4096)); }}},
      {"moving_plane.offset", {true, [](C& c, X x) { c.direction_offset = x.number(); }}},

      {"exterior.interface_radius",
       {true, [](C& c, X x) { c.interface_radius = x.number_in(0.0, HUGE_VAL, true); }}},
      {"exterior.schedule", {true, [](C& c, X x) { c.schedule = x.list(); }}},

      {"calibrate.radius",
       {true, [](C& c, X x) { c.calibrate_radius = x.number_in(0.0, HUGE_VAL, true); }}},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"radial",       "serrin",          "stability-sweep",
                                              "two-phase",    "moving-plane",    "exterior-probe",
                                              "calibrate"};
  return kinds;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [key, spec] : key_table()) keys.push_back(key);
  return keys;
}

bool is_numeric_key(const std::string& key) {
  const auto it = key_table().find(key);
  return it != key_table().end() && it->second.numeric;
}

double parse_number(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_scalar(text);
  const double num = parse_scalar(text.substr(0, slash));
  const double den = parse_scalar(text.substr(slash + 1));
  if (den == 0.0) throw std::invalid_argument("zero denominator");
  return num / den;
}

void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value,
                      int line) {
  const auto it = key_table().find(key);
  if (it == key_table().end()) throw ParseError("unknown key '" + key + "'", line);
  it->second.assign(config, Context{key, value, line});
  config.entries.emplace_back(key, trim(value));
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'section.key = value'", line);
    const std::string key = trim(text.substr(0, eq));
    if (key.find('.') == std::string::npos) {
      throw ParseError("key '" + key + "' has no section", line);
    }
    set_config_value(config, key, text.substr(eq + 1), line);
  }
  if (config.kind.empty()) throw ParseError("missing experiment.kind", 0);
  return config;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config '" + path.string() + "'", 0);
  return parse_config(in);
}

}  // namespace obstacle
