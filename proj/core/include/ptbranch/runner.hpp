#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "ptbranch/config.hpp"
#include "ptbranch/ep_finder.hpp"

namespace ptbranch {

enum class Subcommand { baseline, sweep, ep, propagate, perturb, all };

std::string to_string(Subcommand s);
/// Throws std::invalid_argument for unknown names.
Subcommand subcommand_from_string(const std::string& name);

/// "ptbranch <version>".
std::string version_string();

/// Validates the config, creates output_dir and writes effective_config.cfg
/// and version.txt, then the files of the requested experiment(s):
///   baseline  baseline.txt
///   sweep     sweep.csv
///   ep        ep_report.txt, ep_sweep.csv
///   propagate power_<alpha>.csv/.pgm, propagation_report.txt
///   perturb   rs_coefficients.csv, radius_report.txt
/// Progress lines go to `log`. Solver errors propagate unchanged.
void run(Subcommand command, const RunConfig& config, std::ostream& log);

}  // namespace ptbranch
