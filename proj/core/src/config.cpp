#include "ptbranch/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "ptbranch/format.hpp"

namespace ptbranch {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw ConfigError(key, "expected a finite number, got '" + text + "'");
  }
  return value;
}

int parse_int(const std::string& key, const std::string& text) {
  int value = 0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(key, "expected an integer, got '" + text + "'");
  }
  return value;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw ConfigError(key, "expected a comma-separated list of numbers");
  return out;
}

std::string format_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += sci(values[i]);
  }
  return out;
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define PTB_DOUBLE(name, member)                                                          \
  Field {                                                                                 \
    name, [](RunConfig& c, const std::string& v) { c.member = parse_double(name, v); },   \
        [](const RunConfig& c) { return sci(c.member); }                                  \
  }
#define PTB_INT(name, member)                                                             \
  Field {                                                                                 \
    name, [](RunConfig& c, const std::string& v) { c.member = parse_int(name, v); },      \
        [](const RunConfig& c) { return std::to_string(c.member); }                       \
  }
#define PTB_LIST(name, member)                                                            \
  Field {                                                                                 \
    name, [](RunConfig& c, const std::string& v) { c.member = parse_list(name, v); },     \
        [](const RunConfig& c) { return format_list(c.member); }                          \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table{
      PTB_DOUBLE("geometry.n0", geometry.n0),
      PTB_DOUBLE("geometry.delta_n", geometry.delta_n),
      PTB_DOUBLE("geometry.half_width_a", geometry.half_width_a),
      PTB_DOUBLE("geometry.vacuum_wavelength", geometry.vacuum_wavelength),
      PTB_DOUBLE("geometry.delta_alpha", geometry.delta_alpha),
      Field{"geometry.gain_convention",
            [](RunConfig& c, const std::string& v) {
              try {
                c.geometry.gain_convention = gain_convention_from_string(v);
              } catch (const std::invalid_argument& e) {
                throw ConfigError("geometry.gain_convention", e.what());
              }
            },
            [](const RunConfig& c) { return to_string(c.geometry.gain_convention); }},
      PTB_DOUBLE("basis.box_length", basis.box_length),
      PTB_INT("basis.n_funcs", basis.n_funcs),
      PTB_DOUBLE("sweep.alpha_min", sweep.alpha_min),
      PTB_DOUBLE("sweep.alpha_max", sweep.alpha_max),
      PTB_INT("sweep.n_points", sweep.n_points),
      PTB_DOUBLE("ep.bracket_lo", ep.bracket_lo),
      PTB_DOUBLE("ep.bracket_hi", ep.bracket_hi),
      PTB_DOUBLE("ep.tol", ep.tol),
      PTB_INT("ep.fit_points", ep.fit_points),
      PTB_INT("perturbation.target_mode", perturbation.target_mode),
      PTB_INT("perturbation.max_order", perturbation.max_order),
      PTB_LIST("perturbation.lambda_fractions", perturbation.lambda_fractions),
      PTB_LIST("propagation.alpha_fractions", propagation.alpha_fractions),
      PTB_DOUBLE("propagation.x_min", propagation.x_min),
      PTB_DOUBLE("propagation.x_max", propagation.x_max),
      PTB_INT("propagation.x_points", propagation.x_points),
      PTB_INT("propagation.z_points", propagation.z_points),
      PTB_DOUBLE("propagation.z_beats", propagation.z_beats),
      Field{"propagation.mode_weights",
            [](RunConfig& c, const std::string& v) {
              const auto w = parse_list("propagation.mode_weights", v);
              if (w.size() != 2) {
                throw ConfigError("propagation.mode_weights", "expected exactly two weights");
              }
              c.propagation.mode_weights = {w[0], w[1]};
            },
            [](const RunConfig& c) {
              return format_list({c.propagation.mode_weights[0], c.propagation.mode_weights[1]});
            }},
      Field{"output.dir",
            [](RunConfig& c, const std::string& v) {
              if (v.empty()) throw ConfigError("output.dir", "empty path");
              c.output_dir = v;
            },
            [](const RunConfig& c) { return c.output_dir.string(); }},
      PTB_INT("run.threads", threads),
  };
  return table;
}

#undef PTB_DOUBLE
#undef PTB_INT
#undef PTB_LIST

void assign(RunConfig& config, const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (f.key == key) {
      f.set(config, value);
      return;
    }
  }
  throw ConfigError(key, "unknown key");
}

}  // namespace

ConfigError::ConfigError(std::string field, std::string reason)
    : std::runtime_error(field + ": " + reason), field_(std::move(field)), reason_(std::move(reason)) {}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    }
    assign(base, trim(std::string_view(stripped).substr(0, eq)),
           trim(std::string_view(stripped).substr(eq + 1)));
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

void apply_override(RunConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError(std::string(assignment), "override must look like key=value");
  }
  assign(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const auto& f : fields()) out += f.key + " = " + f.get(config) + "\n";
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& f : fields()) out.push_back(f.key);
  return out;
}

void validate_config(const RunConfig& c) {
  try {
    c.geometry.validate();
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    throw ConfigError(what.substr(0, what.find(' ')), what);
  }
  try {
    c.basis.validate(c.geometry.structure_half_extent());
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    throw ConfigError(what.substr(0, what.find(' ')), what);
  }
  if (c.sweep.n_points < 1) throw ConfigError("sweep.n_points", "must be >= 1");
  if (c.sweep.n_points > 1 && !(c.sweep.alpha_max > c.sweep.alpha_min)) {
    throw ConfigError("sweep.alpha_max", "non-increasing sweep (alpha_max must exceed alpha_min)");
  }
  if (c.sweep.alpha_min < 0.0) throw ConfigError("sweep.alpha_min", "must be >= 0");
  if (!(c.ep.bracket_hi > c.ep.bracket_lo) || c.ep.bracket_lo < 0.0) {
    throw ConfigError("ep.bracket_hi", "bracket must satisfy 0 <= lo < hi");
  }
  if (!(c.ep.tol > 0.0)) throw ConfigError("ep.tol", "must be positive");
  if (c.ep.fit_points < 5) throw ConfigError("ep.fit_points", "must be >= 5");
  if (c.perturbation.target_mode < 1 || c.perturbation.target_mode > c.basis.n_funcs) {
    throw ConfigError("perturbation.target_mode", "must lie in 1..basis.n_funcs");
  }
  if (c.perturbation.max_order < 12 || c.perturbation.max_order > 60) {
    throw ConfigError("perturbation.max_order", "must lie in 12..60");
  }
  for (double f : c.perturbation.lambda_fractions) {
    if (!(f >= 0.0)) throw ConfigError("perturbation.lambda_fractions", "must be >= 0");
  }
  for (double f : c.propagation.alpha_fractions) {
    if (!(f >= 0.0 && f < 1.0)) {
      throw ConfigError("propagation.alpha_fractions", "fractions of delta_alpha_c must lie in [0, 1)");
    }
  }
  if (!(c.propagation.x_max > c.propagation.x_min)) {
    throw ConfigError("propagation.x_max", "must exceed propagation.x_min");
  }
  if (c.propagation.x_points < 2) throw ConfigError("propagation.x_points", "must be >= 2");
  if (c.propagation.z_points < 2) throw ConfigError("propagation.z_points", "must be >= 2");
  if (!(c.propagation.z_beats > 0.0)) throw ConfigError("propagation.z_beats", "must be positive");
  if (c.threads < 0) throw ConfigError("run.threads", "must be >= 0");
}

}  // namespace ptbranch
