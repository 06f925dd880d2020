#include "ptbranch/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ptbranch/format.hpp"
#include "ptbranch/perturbation.hpp"
#include "ptbranch/propagation.hpp"

#ifndef PTBRANCH_VERSION
#define PTBRANCH_VERSION "0.0.0"
#endif

namespace ptbranch {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string alpha_tag(double alpha) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", alpha);
  return buf;
}

class Session {
 public:
  Session(const RunConfig& config, std::ostream& log)
      : config_(config), log_(log), dir_(config.output_dir) {}

  void baseline();
  void sweep_table();
  void exceptional_point();
  void propagate();
  void perturb();

 private:
  const EpReport& critical();
  CouplerGeometry hermitian() const {
    CouplerGeometry g = config_.geometry;
    g.delta_alpha = 0.0;
    return g;
  }

  const RunConfig& config_;
  std::ostream& log_;
  std::filesystem::path dir_;
  std::optional<EpReport> ep_;
};

void Session::baseline() {
  log_ << "baseline: solving the Hermitian coupler\n";
  const CouplerGeometry g = hermitian();
  const ModeSet modes = solve_coupler(g, config_.basis);
  std::ostringstream os;
  os << "wavenumber = " << sci(g.wavenumber()) << '\n';
  os << "guided_modes = " << modes.size() << '\n';
  for (const auto& m : modes.modes) {
    const std::string p = "mode_" + std::to_string(m.label) + "_";
    os << p << "parity = " << to_string(m.parity) << '\n';
    os << p << "beta_re = " << sci(m.beta.real()) << '\n';
    os << p << "beta_im = " << sci(m.beta.imag()) << '\n';
    os << p << "n_eff = " << sci(m.n_eff.real()) << '\n';
    os << p << "self_orthogonality = " << sci(m.self_orthogonality) << '\n';
  }
  if (modes.size() == 2) {
    if (const auto l = beat_length(modes)) os << "beat_length_um = " << sci(*l) << '\n';
  }
  write_text(dir_ / "baseline.txt", os.str());
}

void Session::sweep_table() {
  const auto& s = config_.sweep;
  log_ << "sweep: " << s.n_points << " points in [" << s.alpha_min << ", " << s.alpha_max << "]\n";
  const auto alphas = linspace(s.alpha_min, s.alpha_max, s.n_points);
  const SweepResult result = sweep_alpha(config_.geometry, config_.basis, alphas, config_.threads);
  std::ostringstream os;
  write_sweep_csv(os, result);
  write_text(dir_ / "sweep.csv", os.str());
}

const EpReport& Session::critical() {
  if (!ep_) {
    const auto& e = config_.ep;
    log_ << "ep: bisection on [" << e.bracket_lo << ", " << e.bracket_hi << "]\n";
    ep_ = find_critical_alpha(config_.geometry, config_.basis, e.bracket_lo, e.bracket_hi, e.tol);
  }
  return *ep_;
}

void Session::exceptional_point() {
  const EpReport& ep = critical();
  log_ << "ep: square-root fit on " << config_.ep.fit_points << " points\n";
  const auto params = near_critical_parameters(ep.delta_alpha_c, config_.ep.fit_points);
  const SweepResult near = sweep_alpha(config_.geometry, config_.basis, params, config_.threads);
  const EpReport fitted = fit_square_root(near, ep);
  write_text(dir_ / "ep_report.txt", format_ep_report(fitted, config_.geometry));
  std::ostringstream os;
  write_sweep_csv(os, near);
  write_text(dir_ / "ep_sweep.csv", os.str());
}

void Session::propagate() {
  const auto& p = config_.propagation;
  const double alpha_c = critical().delta_alpha_c;
  const CouplerFamily family(config_.geometry, config_.basis);
  const auto l0 = beat_length(family.modes(0.0));
  if (!l0) throw std::runtime_error("propagate: no beat length for the Hermitian coupler");
  const auto xs = linspace(p.x_min, p.x_max, p.x_points);
  const auto zs = linspace(0.0, p.z_beats * *l0, p.z_points);
  const double a = config_.geometry.half_width_a;

  std::ostringstream report;
  report << "delta_alpha_c = " << sci(alpha_c) << '\n';
  report << "z_max_um = " << sci(zs.back()) << '\n';
  for (std::size_t i = 0; i < p.alpha_fractions.size(); ++i) {
    const double alpha = p.alpha_fractions[i] * alpha_c;
    log_ << "propagate: delta_alpha = " << alpha << '\n';
    const ModeSet modes = family.modes(alpha);
    const PowerMap map = sum_field_power(modes, config_.basis, xs, zs, alpha, p.mode_weights);
    export_power_map(map, dir_ / ("power_" + alpha_tag(alpha)));

    const auto left = band_power(map, -3.0 * a, -a);
    double p_min = total_power(map, 0), p_max = p_min;
    for (std::size_t j = 1; j < zs.size(); ++j) {
      const double t = total_power(map, j);
      p_min = std::min(p_min, t);
      p_max = std::max(p_max, t);
    }
    const std::string key = "case_" + std::to_string(i) + "_";
    report << key << "fraction = " << sci(p.alpha_fractions[i]) << '\n';
    report << key << "delta_alpha = " << sci(alpha) << '\n';
    report << key << "beat_length_um = " << (map.beat_length ? sci(*map.beat_length) : "none")
           << '\n';
    report << key << "measured_period_um = " << sci(dominant_period(zs, left)) << '\n';
    report << key << "total_power_variation = " << sci((p_max - p_min) / p_max) << '\n';
  }
  write_text(dir_ / "propagation_report.txt", report.str());
}

void Session::perturb() {
  const auto& cfg = config_.perturbation;
  log_ << "perturb: expansion of level " << cfg.target_mode << " to order " << cfg.max_order
       << '\n';
  const HermitianSplit split = split_coupler_hamiltonian(hermitian(), config_.basis);
  const PerturbationExpansion pe = rs_expand(split, cfg.target_mode, cfg.max_order);
  {
    std::ostringstream os;
    write_coefficients_csv(os, pe);
    write_text(dir_ / "rs_coefficients.csv", os.str());
  }
  const RadiusEstimate radius = estimate_radius(pe);
  const ParityReport parity = verify_parity_and_oddness(pe, split);
  const double kappa_c = critical().lambda_bp_abs;

  std::ostringstream os;
  os << "target_mode = " << cfg.target_mode << '\n';
  os << "max_order = " << pe.max_order() << '\n';
  os << "lambda_scale = " << sci(pe.lambda_scale()) << '\n';
  os << "radius = " << sci(radius.value) << '\n';
  os << "radius_root_test = " << sci(radius.root_test) << '\n';
  os << "radius_ratio_test = " << sci(radius.ratio_test) << '\n';
  os << "radius_orders_used = " << radius.orders_used << '\n';
  os << "kappa_c = " << sci(kappa_c) << '\n';
  os << "radius_relative_difference = " << sci(std::abs(radius.value - kappa_c) / kappa_c) << '\n';
  os << "parity_split_defect_h0 = " << sci(split.parity_defect_h0()) << '\n';
  os << "parity_split_defect_v = " << sci(split.parity_defect_v()) << '\n';
  os << "zeroth_parity_matches = " << (parity.zeroth_parity_matches ? "true" : "false") << '\n';
  os << "max_parity_violation = " << sci(parity.max_parity_violation) << '\n';
  os << "max_odd_ratio = " << sci(parity.max_odd_ratio) << '\n';
  os << "max_odd_abs = " << sci(parity.max_odd_abs) << '\n';
  os << "max_bare_odd_ratio = " << sci(parity.max_bare_odd_ratio) << '\n';
  for (std::size_t i = 0; i < cfg.lambda_fractions.size(); ++i) {
    const double lam = cfg.lambda_fractions[i] * radius.value;
    const SeriesSum s = sum_series(pe, lam);
    const Complex direct = direct_eigenvalue(split, Complex{0.0, lam}, s.value);
    const std::string key = "series_" + std::to_string(i) + "_";
    os << key << "fraction = " << sci(cfg.lambda_fractions[i]) << '\n';
    os << key << "lambda_abs = " << sci(lam) << '\n';
    os << key << "sum = " << sci(s.value) << '\n';
    os << key << "last_term = " << sci(s.last_term) << '\n';
    os << key << "direct_re = " << sci(direct.real()) << '\n';
    os << key << "direct_im = " << sci(direct.imag()) << '\n';
    os << key << "relative_error = " << sci(std::abs(s.value - direct) / std::abs(direct)) << '\n';
  }
  write_text(dir_ / "radius_report.txt", os.str());
}

}  // namespace

std::string to_string(Subcommand s) {
  switch (s) {
    case Subcommand::baseline: return "baseline";
    case Subcommand::sweep: return "sweep";
    case Subcommand::ep: return "ep";
    case Subcommand::propagate: return "propagate";
    case Subcommand::perturb: return "perturb";
    case Subcommand::all: return "all";
  }
  return "unknown";
}

Subcommand subcommand_from_string(const std::string& name) {
  for (auto s : {Subcommand::baseline, Subcommand::sweep, Subcommand::ep, Subcommand::propagate,
                 Subcommand::perturb, Subcommand::all}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown subcommand '" + name + "'");
}

std::string version_string() { return std::string("ptbranch ") + PTBRANCH_VERSION; }

void run(Subcommand command, const RunConfig& config, std::ostream& log) {
  validate_config(config);
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) throw IoError("cannot create " + config.output_dir.string() + ": " + ec.message());
  write_text(config.output_dir / "effective_config.cfg", serialize_config(config));
  write_text(config.output_dir / "version.txt", version_string() + '\n');

  Session session(config, log);
  const bool all = command == Subcommand::all;
  if (all || command == Subcommand::baseline) session.baseline();
  if (all || command == Subcommand::sweep) session.sweep_table();
  if (all || command == Subcommand::ep) session.exceptional_point();
  if (all || command == Subcommand::propagate) session.propagate();
  if (all || command == Subcommand::perturb) session.perturb();
}

}  // namespace ptbranch
