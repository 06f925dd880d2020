#pragma once

#include <array>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ptbranch/spectral.hpp"
#include "ptbranch/waveguide.hpp"

namespace ptbranch {

struct SweepSettings {
  double alpha_min = 0.0;   // 1/cm
  double alpha_max = 12.0;  // 1/cm
  int n_points = 25;
};

struct EpSettings {
  double bracket_lo = 6.0;   // 1/cm
  double bracket_hi = 10.0;  // 1/cm
  double tol = 1e-4;         // 1/cm
  int fit_points = 12;       // near-critical sweep used by the square-root fit
};

struct PerturbationSettings {
  int target_mode = 1;  // 1-based level of the Hermitian coupler
  int max_order = 60;
  std::vector<double> lambda_fractions{0.2, 0.5, 0.8};  // of the estimated radius
};

struct PropagationSettings {
  std::vector<double> alpha_fractions{0.0, 0.6, 0.95};  // of delta_alpha_c
  double x_min = -15.0;
  double x_max = 15.0;
  int x_points = 301;
  int z_points = 801;
  double z_beats = 4.0;  // z extent in beat lengths of the Hermitian coupler
  std::array<double, 2> mode_weights{1.0, 1.0};
};

struct RunConfig {
  CouplerGeometry geometry;
  SineBasis basis;
  SweepSettings sweep;
  EpSettings ep;
  PerturbationSettings perturbation;
  PropagationSettings propagation;
  std::filesystem::path output_dir = "ptbranch_out";
  int threads = 1;  // 0 = hardware concurrency
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, std::string reason);
  const std::string& field() const noexcept { return field_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string field_;
  std::string reason_;
};

/// Flat `section.key = value` text; '#' starts a comment. Lists are
/// comma-separated. Unknown keys and malformed values raise ConfigError.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Applies one `key=value` override.
void apply_override(RunConfig& config, std::string_view assignment);

/// Every key with its effective value; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

std::vector<std::string> config_keys();

/// Throws ConfigError naming the first invalid field.
void validate_config(const RunConfig& config);

}  // namespace ptbranch
