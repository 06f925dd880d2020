#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ptbranch/config.hpp"
#include "ptbranch/ep_finder.hpp"
#include "ptbranch/perturbation.hpp"
#include "ptbranch/propagation.hpp"
#include "ptbranch/runner.hpp"

namespace {

std::string one_line(std::string text) {
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

int fail(const std::string& kind, const std::string& message) {
  std::cerr << "error: kind=" << kind << " message=" << one_line(message) << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PT-symmetric coupler mode solver and perturbation toolkit"};
  app.set_version_flag("--version", ptbranch::version_string());
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  bool quiet = false;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"baseline", "Guided modes of the Hermitian coupler"},
      {"sweep", "Propagation constants versus gain/loss"},
      {"ep", "Bisection for the exceptional point and square-root fit"},
      {"propagate", "Sum-field power maps below the exceptional point"},
      {"perturb", "Perturbation series, radius of convergence and parity checks"},
      {"all", "Every experiment in sequence"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Key-value config file")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    sub->add_option("--set", overrides, "Override one key, e.g. geometry.delta_alpha=8.0")
        ->allow_extra_args(false);
    sub->add_flag("--quiet", quiet, "Suppress progress lines");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: kind=usage message=" << one_line(e.what()) << '\n';
    return 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    ptbranch::RunConfig config;
    if (!config_path.empty()) config = ptbranch::load_config(config_path);
    for (const auto& o : overrides) ptbranch::apply_override(config, o);
    if (!out_dir.empty()) config.output_dir = out_dir;
    std::ostream null_stream(nullptr);
    ptbranch::run(ptbranch::subcommand_from_string(name), config, quiet ? null_stream : std::cerr);
  } catch (const ptbranch::ConfigError& e) {
    std::cerr << "error: kind=config field=" << e.field() << " reason=" << one_line(e.reason())
              << '\n';
    return 2;
  } catch (const ptbranch::IoError& e) {
    return fail("io", e.what());
  } catch (const ptbranch::EpSearchError& e) {
    return fail("ep_search", e.what());
  } catch (const ptbranch::SweepError& e) {
    return fail("sweep", e.what());
  } catch (const ptbranch::NoGuidedModeError& e) {
    return fail("no_guided_mode", e.what());
  } catch (const ptbranch::SelfOrthogonalError& e) {
    return fail("self_orthogonal", e.what());
  } catch (const ptbranch::ConvergenceError& e) {
    return fail("convergence", e.what());
  } catch (const ptbranch::DegenerateStateError& e) {
    return fail("degenerate_state", e.what());
  } catch (const ptbranch::RadiusError& e) {
    return fail("radius", e.what());
  } catch (const std::invalid_argument& e) {
    return fail("invalid_argument", e.what());
  } catch (const std::exception& e) {
    return fail("runtime", e.what());
  }
  return 0;
}
