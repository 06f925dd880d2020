#include "ptbranch/ep_finder.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "parallel.hpp"
#include "ptbranch/format.hpp"

namespace ptbranch {

namespace {

double min_self_orthogonality(const ModeSet& modes) {
  double out = 1.0;
  for (const auto& m : modes.modes) out = std::min(out, m.self_orthogonality);
  return out;
}

}  // namespace

CouplerFamily::CouplerFamily(CouplerGeometry geometry, SineBasis basis)
    : geometry_(geometry), basis_(basis) {
  geometry_.validate();
  basis_.validate(geometry_.structure_half_extent());
}

CouplerGeometry CouplerFamily::at(double delta_alpha) const {
  CouplerGeometry g = geometry_;
  g.delta_alpha = delta_alpha;
  return g;
}

double CouplerFamily::lambda(double delta_alpha) const { return at(delta_alpha).kappa(); }

double CouplerFamily::reference_scale() const { return geometry_.wavenumber(); }

std::pair<Complex, Complex> CouplerFamily::lowest_pair(double delta_alpha) const {
  const auto values = eigenvalues_complex_symmetric(coupler_hamiltonian(at(delta_alpha), basis_));
  return {values[0], values[1]};
}

ModeSet CouplerFamily::modes(double delta_alpha) const {
  return solve_coupler(at(delta_alpha), basis_);
}

MatrixFamily::MatrixFamily(std::function<ComplexMatrix(double)> build) : build_(std::move(build)) {}

std::pair<Complex, Complex> MatrixFamily::lowest_pair(double parameter) const {
  const auto values = eigenvalues_complex_symmetric(build_(parameter));
  if (values.size() < 2) throw std::invalid_argument("MatrixFamily: need at least a 2x2 matrix");
  return {values[0], values[1]};
}

ModeSet MatrixFamily::modes(double parameter) const {
  const auto sol = eig_complex_symmetric(build_(parameter));
  if (sol.size() < 2) throw std::invalid_argument("MatrixFamily: need at least a 2x2 matrix");
  ModeSet out;
  for (std::size_t i = 0; i < 2; ++i) {
    GuidedMode m;
    m.energy = sol.eigenvalues[i];
    m.beta = beta_from_energy(m.energy);
    m.n_eff = m.beta;
    m.field = sol.eigenvectors.col(static_cast<Eigen::Index>(i));
    m.self_orthogonality = sol.self_orthogonality[i];
    m.c_normalized = sol.c_normalized[i];
    m.label = static_cast<int>(i);
    out.modes.push_back(std::move(m));
  }
  return out;
}

ComplexMatrix pt_dimer(double gamma, double coupling) {
  CMatrix m(2, 2);
  m << Complex(0.0, gamma), coupling, coupling, Complex(0.0, -gamma);
  return ComplexMatrix(std::move(m));
}

SweepError::SweepError(double parameter, const std::string& what)
    : std::runtime_error("sweep failed at delta_alpha = " + sci(parameter) + ": " + what),
      parameter_(parameter) {}

SweepResult sweep(const PairFamily& family, std::span<const double> parameters, int threads) {
  if (parameters.empty()) throw std::invalid_argument("sweep: no parameter values");
  for (std::size_t i = 1; i < parameters.size(); ++i) {
    if (!(parameters[i] > parameters[i - 1])) {
      throw std::invalid_argument("sweep: non-increasing sweep at index " + std::to_string(i));
    }
  }
  std::vector<ModeSet> solved(parameters.size());
  detail::parallel_for(parameters.size(), threads, [&](std::size_t i) {
    try {
      solved[i] = family.modes(parameters[i]);
    } catch (const std::exception& e) {
      throw SweepError(parameters[i], e.what());
    }
    if (solved[i].size() != 2) {
      throw SweepError(parameters[i], "expected 2 guided modes, found " +
                                          std::to_string(solved[i].size()));
    }
  });

  SweepResult out;
  out.reference_scale = family.reference_scale();
  if (const auto* coupler = dynamic_cast<const CouplerFamily*>(&family)) {
    out.geometry = coupler->geometry();
  }
  double orientation = 1.0;
  for (std::size_t i = 0; i < solved.size(); ++i) {
    if (i > 0) solved[i] = track_modes(solved[i - 1], solved[i]);
    const auto& a = solved[i].by_label(0);
    const auto& b = solved[i].by_label(1);
    SweepPoint p;
    p.delta_alpha = parameters[i];
    p.lambda = family.lambda(parameters[i]);
    p.beta_even = family.observable(a);
    p.beta_odd = family.observable(b);
    p.energy_even = a.energy;
    p.energy_odd = b.energy;
    if (i == 0 && (p.beta_even - p.beta_odd).real() < 0.0) orientation = -1.0;
    p.splitting = orientation * (p.beta_even - p.beta_odd);
    p.self_orthogonality = std::min(a.self_orthogonality, b.self_orthogonality);
    out.points.push_back(p);
  }
  return out;
}

SweepResult sweep_alpha(const CouplerGeometry& g, const SineBasis& basis,
                        std::span<const double> alphas, int threads) {
  return sweep(CouplerFamily(g, basis), alphas, threads);
}

bool pair_is_real(std::pair<Complex, Complex> pair) {
  const Complex d = pair.second - pair.first;
  return std::abs(d.imag()) <= std::abs(d.real());
}

EpReport find_critical(const PairFamily& family, double lo, double hi, double tol) {
  if (!(lo < hi)) throw std::invalid_argument("find_critical: bracket must satisfy lo < hi");
  if (!(tol > 0.0)) throw std::invalid_argument("find_critical: tol must be positive");

  constexpr int kSamples = 7;
  std::vector<double> xs(kSamples);
  std::vector<bool> real(kSamples);
  for (int i = 0; i < kSamples; ++i) {
    xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (kSamples - 1);
    real[static_cast<std::size_t>(i)] = pair_is_real(family.lowest_pair(xs[static_cast<std::size_t>(i)]));
  }
  int transitions = 0;
  for (int i = 1; i < kSamples; ++i) {
    if (real[static_cast<std::size_t>(i)] != real[static_cast<std::size_t>(i - 1)]) ++transitions;
  }
  if (!real.front() || real.back() || transitions != 1) {
    std::ostringstream os;
    if (real.front() == real.back()) {
      os << "no sign change in bracket [" << lo << ", " << hi << "] (pair is "
         << (real.front() ? "real" : "complex") << " at both ends)";
    } else if (!real.front()) {
      os << "pair complex at lo and real at hi in [" << lo << ", " << hi << "]";
    } else {
      os << "predicate not monotone in [" << lo << ", " << hi << "]";
    }
    os << "; sampled real(pair):";
    for (int i = 0; i < kSamples; ++i) {
      os << ' ' << xs[static_cast<std::size_t>(i)] << '=' << (real[static_cast<std::size_t>(i)] ? 'T' : 'F');
    }
    throw EpSearchError(os.str());
  }

  EpReport ep;
  ep.bracket_lo = lo;
  ep.bracket_hi = hi;
  ep.tol = tol;
  for (int i = 1; i < kSamples; ++i) {
    if (!real[static_cast<std::size_t>(i)]) {
      lo = xs[static_cast<std::size_t>(i - 1)];
      hi = xs[static_cast<std::size_t>(i)];
      break;
    }
  }
  while (hi - lo >= tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at floating-point resolution
    if (pair_is_real(family.lowest_pair(mid))) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++ep.iterations;
  }
  const double mid = 0.5 * (lo + hi);
  ep.delta_alpha_c = mid;
  ep.lambda_bp_abs = family.lambda(mid);
  const auto pair = family.lowest_pair(mid);
  ep.energy_bp = 0.5 * (pair.first + pair.second);
  for (double x : {lo, mid, hi}) {
    ep.self_orthogonality_min = std::min(ep.self_orthogonality_min, min_self_orthogonality(family.modes(x)));
  }
  return ep;
}

EpReport find_critical_alpha(const CouplerGeometry& g, const SineBasis& basis, double lo,
                             double hi, double tol) {
  return find_critical(CouplerFamily(g, basis), lo, hi, tol);
}

EpReport fit_square_root(const SweepResult& sweep, const EpReport& ep) {
  const double pc = ep.delta_alpha_c;
  const double lc = ep.lambda_bp_abs;
  if (!(pc > 0.0) || !(lc > 0.0)) {
    throw std::invalid_argument("fit_square_root: critical parameter must be positive");
  }
  std::vector<double> xs, ys, log_x, log_y;
  for (const auto& p : sweep.points) {
    if (!(p.delta_alpha < pc)) continue;
    const double delta = 1.0 - p.delta_alpha / pc;
    const double y = 0.5 * (p.energy_odd - p.energy_even).real();
    const double gap = lc * lc - p.lambda * p.lambda;
    if (delta <= 0.1 + 1e-12) {
      xs.push_back(std::sqrt(gap));
      ys.push_back(y);
    }
    if (delta >= 1e-3 - 1e-12 && delta <= 1e-1 + 1e-12 && y > 0.0 && gap > 0.0) {
      log_x.push_back(std::log(gap));
      log_y.push_back(std::log(y));
    }
  }
  if (xs.size() < 5) {
    throw std::invalid_argument("fit_square_root: insufficient points (" +
                                std::to_string(xs.size()) +
                                " within 10% below the critical value, need 5)");
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  if (!(sxx > 0.0)) throw std::runtime_error("fit_square_root: singular fit");

  EpReport out = ep;
  out.amplitude_d = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - out.amplitude_d * xs[i];
    ss += r * r;
  }
  out.fit_residual = std::sqrt(ss / static_cast<double>(xs.size()));
  out.fit_points = static_cast<int>(xs.size());

  if (log_x.size() < 3) {
    throw std::invalid_argument("fit_square_root: insufficient points for the exponent fit (" +
                                std::to_string(log_x.size()) + ", need 3)");
  }
  const auto n = static_cast<double>(log_x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < log_x.size(); ++i) {
    mx += log_x[i];
    my += log_y[i];
  }
  mx /= n;
  my /= n;
  double cxx = 0.0, cxy = 0.0;
  for (std::size_t i = 0; i < log_x.size(); ++i) {
    cxx += (log_x[i] - mx) * (log_x[i] - mx);
    cxy += (log_x[i] - mx) * (log_y[i] - my);
  }
  if (!(cxx > 0.0)) throw std::runtime_error("fit_square_root: singular exponent fit");
  out.exponent = cxy / cxx;
  out.exponent_points = static_cast<int>(log_x.size());
  return out;
}

std::vector<double> near_critical_parameters(double critical, int n, double delta_min,
                                             double delta_max) {
  if (n < 2) throw std::invalid_argument("near_critical_parameters: n must be >= 2");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  const double l0 = std::log(delta_max);
  const double l1 = std::log(delta_min);
  for (int i = 0; i < n; ++i) {
    const double delta = std::exp(l0 + (l1 - l0) * i / (n - 1));
    out.push_back(critical * (1.0 - delta));
  }
  return out;
}

void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
  os << "delta_alpha,re_beta1,im_beta1,re_beta2,im_beta2,self_orthogonality\n";
  for (const auto& p : sweep.points) {
    os << sci(p.delta_alpha) << ',' << sci(p.beta_even.real()) << ',' << sci(p.beta_even.imag())
       << ',' << sci(p.beta_odd.real()) << ',' << sci(p.beta_odd.imag()) << ','
       << sci(p.self_orthogonality) << '\n';
  }
}

std::string format_ep_report(const EpReport& ep, const std::optional<CouplerGeometry>& g) {
  std::ostringstream os;
  os << "delta_alpha_c = " << sci(ep.delta_alpha_c) << '\n';
  if (g) {
    os << "gain_convention = " << to_string(g->gain_convention) << '\n';
    os << "kappa_c = " << sci(ep.lambda_bp_abs) << '\n';
    os << "delta_alpha_c_amplitude = "
       << sci(delta_alpha_from_kappa(ep.lambda_bp_abs, g->vacuum_wavelength, GainConvention::amplitude))
       << '\n';
    os << "delta_alpha_c_intensity = "
       << sci(delta_alpha_from_kappa(ep.lambda_bp_abs, g->vacuum_wavelength, GainConvention::intensity))
       << '\n';
    const Complex beta = beta_from_energy(ep.energy_bp);
    os << "beta_bp_re = " << sci(beta.real()) << '\n';
    os << "beta_bp_im = " << sci(beta.imag()) << '\n';
    os << "n_eff_bp = " << sci(beta.real() / g->wavenumber()) << '\n';
  }
  os << "lambda_bp_abs = " << sci(ep.lambda_bp_abs) << '\n';
  os << "energy_bp_re = " << sci(ep.energy_bp.real()) << '\n';
  os << "energy_bp_im = " << sci(ep.energy_bp.imag()) << '\n';
  os << "fit_amplitude_d = " << sci(ep.amplitude_d) << '\n';
  os << "fit_exponent = " << sci(ep.exponent) << '\n';
  os << "fit_residual = " << sci(ep.fit_residual) << '\n';
  os << "fit_points = " << ep.fit_points << '\n';
  os << "exponent_points = " << ep.exponent_points << '\n';
  os << "self_orthogonality_min = " << sci(ep.self_orthogonality_min) << '\n';
  os << "bracket_lo = " << sci(ep.bracket_lo) << '\n';
  os << "bracket_hi = " << sci(ep.bracket_hi) << '\n';
  os << "tol = " << sci(ep.tol) << '\n';
  os << "iterations = " << ep.iterations << '\n';
  return os.str();
}

}  // namespace ptbranch
