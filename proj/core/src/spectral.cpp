#include "ptbranch/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ptbranch {

namespace {

// Adds the integral of phi_m phi_n over [x1, x2] (0 <= x1 < x2 <= L/2),
// weighted by `same` for equal-parity pairs and `opposite` otherwise,
// to the upper triangle of h. Both weights already carry the factor 2
// from folding the mirrored interval onto the positive half-axis.
void add_folded_interval(CMatrix& h, const SineBasis& b, double x1, double x2, Complex same,
                         Complex opposite) {
  const int n = b.n_funcs;
  const double length = b.box_length;
  const double xi1 = x1 + 0.5 * length;
  const double xi2 = x2 + 0.5 * length;
  std::vector<double> s1(static_cast<std::size_t>(n)), c1(s1.size()), s2(s1.size()), c2(s1.size());
  for (int m = 1; m <= n; ++m) {
    const double q = b.wavenumber(m);
    const auto i = static_cast<std::size_t>(m - 1);
    s1[i] = std::sin(q * xi1);
    c1[i] = std::cos(q * xi1);
    s2[i] = std::sin(q * xi2);
    c2[i] = std::cos(q * xi2);
  }
  const double norm = 2.0 / length;
  for (int m = 1; m <= n; ++m) {
    const auto im = static_cast<std::size_t>(m - 1);
    const double qm = b.wavenumber(m);
    for (int p = m; p <= n; ++p) {
      const bool same_parity = ((m + p) % 2) == 0;
      const Complex w = same_parity ? same : opposite;
      if (w == Complex{}) continue;
      const auto ip = static_cast<std::size_t>(p - 1);
      const double qp = b.wavenumber(p);
      double integral = 0.0;
      // sin(a xi) sin(b xi) = [cos((a-b) xi) - cos((a+b) xi)] / 2
      const double sum_q = qm + qp;
      const double sin_sum2 = s2[im] * c2[ip] + c2[im] * s2[ip];
      const double sin_sum1 = s1[im] * c1[ip] + c1[im] * s1[ip];
      if (m == p) {
        integral = 0.5 * ((xi2 - xi1) - (sin_sum2 - sin_sum1) / sum_q);
      } else {
        const double diff_q = qm - qp;
        const double sin_diff2 = s2[im] * c2[ip] - c2[im] * s2[ip];
        const double sin_diff1 = s1[im] * c1[ip] - c1[im] * s1[ip];
        integral = 0.5 * ((sin_diff2 - sin_diff1) / diff_q - (sin_sum2 - sin_sum1) / sum_q);
      }
      h(m - 1, p - 1) += w * (norm * integral);
    }
  }
}

}  // namespace

void SineBasis::validate(double structure_half_extent) const {
  if (!(box_length > 2.0 * structure_half_extent) || !std::isfinite(box_length)) {
    std::ostringstream os;
    os << "basis.box_length (" << box_length << " um) must exceed the structure width ("
       << 2.0 * structure_half_extent << " um)";
    throw std::invalid_argument(os.str());
  }
  if (n_funcs < 16) throw std::invalid_argument("basis.n_funcs must be >= 16");
}

double SineBasis::wavenumber(int m) const { return m * std::numbers::pi / box_length; }

double SineBasis::evaluate(int m, double x) const {
  if (std::abs(x) > 0.5 * box_length) return 0.0;
  return std::sqrt(2.0 / box_length) * std::sin(wavenumber(m) * (x + 0.5 * box_length));
}

std::vector<int> SineBasis::parities() const {
  std::vector<int> out(static_cast<std::size_t>(n_funcs));
  for (int m = 1; m <= n_funcs; ++m) out[static_cast<std::size_t>(m - 1)] = is_even(m) ? 1 : -1;
  return out;
}

Complex SineBasis::evaluate_field(const CVector& coeffs, double x) const {
  if (std::abs(x) > 0.5 * box_length) return {};
  const double xi = x + 0.5 * box_length;
  const double step = std::numbers::pi * xi / box_length;
  // sin(m t) by the Chebyshev recurrence sin((m+1)t) = 2 cos t sin(m t) - sin((m-1)t)
  const double two_cos = 2.0 * std::cos(step);
  double prev = 0.0;
  double cur = std::sin(step);
  Complex acc{};
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
    acc += coeffs(i) * cur;
    const double next = two_cos * cur - prev;
    prev = cur;
    cur = next;
  }
  return std::sqrt(2.0 / box_length) * acc;
}

ComplexMatrix assemble_hamiltonian(const PotentialProfile& potential, const SineBasis& basis) {
  double extent = 0.0;
  for (const auto& s : potential.segments()) {
    extent = std::max({extent, std::abs(s.x_lo), std::abs(s.x_hi)});
  }
  if (extent > 0.5 * basis.box_length) {
    std::ostringstream os;
    os << "assemble_hamiltonian: interval outside box (|x| = " << extent
       << " um > L/2 = " << 0.5 * basis.box_length << " um)";
    throw std::invalid_argument(os.str());
  }
  if (basis.n_funcs < 16) throw std::invalid_argument("basis.n_funcs must be >= 16");

  const int n = basis.n_funcs;
  const Complex v0 = potential.background();
  CMatrix h = CMatrix::Zero(n, n);
  for (int m = 1; m <= n; ++m) {
    const double q = basis.wavenumber(m);
    h(m - 1, m - 1) = 0.5 * q * q + v0;
  }

  std::vector<double> breaks{0.0};
  for (const auto& s : potential.segments()) {
    breaks.push_back(std::abs(s.x_lo));
    breaks.push_back(std::abs(s.x_hi));
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double x1 = breaks[i];
    const double x2 = breaks[i + 1];
    const double mid = 0.5 * (x1 + x2);
    const Complex right = potential(mid) - v0;
    const Complex left = potential(-mid) - v0;
    // Folded weights: 2 * even part and 2 * odd part of (V - V0).
    const Complex same = right + left;
    const Complex opposite = right - left;
    if (same == Complex{} && opposite == Complex{}) continue;
    add_folded_interval(h, basis, x1, x2, same, opposite);
  }
  h.triangularView<Eigen::StrictlyLower>() = h.transpose().triangularView<Eigen::StrictlyLower>();
  return ComplexMatrix(std::move(h));
}

std::string to_string(Parity p) {
  switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    case Parity::none: return "none";
  }
  return "none";
}

const GuidedMode& ModeSet::by_label(int label) const {
  for (const auto& m : modes) {
    if (m.label == label) return m;
  }
  throw std::out_of_range("ModeSet: no mode with label " + std::to_string(label));
}

Complex beta_from_energy(Complex energy) {
  Complex beta = std::sqrt(-2.0 * energy);
  if (beta.real() < 0.0) beta = -beta;
  return beta;
}

namespace {

Parity classify_parity(const CVector& field) {
  double even = 0.0;
  double odd = 0.0;
  for (Eigen::Index i = 0; i < field.size(); ++i) {
    const double r = field(i).real();
    (i % 2 == 0 ? even : odd) += r * r;
  }
  const double total = even + odd;
  if (total == 0.0) return Parity::none;
  if (even / total >= 0.99) return Parity::even;
  if (odd / total >= 0.99) return Parity::odd;
  return Parity::none;
}

}  // namespace

ModeSet modes_from_solution(const EigenSolution& sol, const SineBasis& basis,
                            const CouplerGeometry& g) {
  if (!sol.has_vectors()) throw std::invalid_argument("modes_from_solution: eigenvectors required");
  (void)basis;
  const double k = g.wavenumber();
  const double lo = g.n0;
  const double hi = g.core_index();
  ModeSet out;
  std::vector<std::pair<double, Complex>> rejected;
  for (std::size_t i = 0; i < sol.size(); ++i) {
    const Complex energy = sol.eigenvalues[i];
    const Complex beta = beta_from_energy(energy);
    const double n_eff = beta.real() / k;
    if (!(n_eff > lo && n_eff < hi)) {
      rejected.emplace_back(std::min(std::abs(n_eff - lo), std::abs(n_eff - hi)), beta / k);
      continue;
    }
    GuidedMode mode;
    mode.beta = beta;
    mode.energy = energy;
    mode.n_eff = beta / k;
    mode.field = sol.eigenvectors.col(static_cast<Eigen::Index>(i));
    mode.self_orthogonality = sol.self_orthogonality[i];
    mode.c_normalized = sol.c_normalized[i];
    mode.parity = classify_parity(mode.field);
    out.modes.push_back(std::move(mode));
  }
  if (out.modes.empty()) {
    std::sort(rejected.begin(), rejected.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::ostringstream os;
    os.precision(10);
    os << "no guided modes in the window " << lo << " < n_eff < " << hi
       << " (box too small or basis too coarse); nearest candidates n_eff =";
    for (std::size_t i = 0; i < std::min<std::size_t>(3, rejected.size()); ++i) {
      os << ' ' << rejected[i].second;
    }
    throw NoGuidedModeError(os.str());
  }
  // Eigenvalues come sorted by Re E ascending, i.e. Re beta descending.
  for (std::size_t i = 0; i < out.modes.size(); ++i) out.modes[i].label = static_cast<int>(i);
  return out;
}

ModeSet solve_modes(const ComplexMatrix& h, const SineBasis& basis, const CouplerGeometry& g) {
  g.validate();
  basis.validate(g.structure_half_extent());
  if (h.dim() != static_cast<std::size_t>(basis.n_funcs)) {
    throw std::invalid_argument("solve_modes: matrix dimension does not match basis");
  }
  return modes_from_solution(eig_complex_symmetric(h), basis, g);
}

ModeSet track_modes(const ModeSet& prev, const ModeSet& next) {
  ModeSet out = next;
  out.labels_reset = false;
  const std::size_t n = next.size();
  if (prev.size() != n) {
    for (std::size_t i = 0; i < n; ++i) out.modes[i].label = static_cast<int>(i);
    out.labels_reset = true;
    return out;
  }
  if (n == 0) return out;

  std::vector<std::vector<double>> overlap(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto& u = prev.modes[i].field;
      const auto& v = next.modes[j].field;
      overlap[i][j] = std::abs(c_product(u, v)) / (u.norm() * v.norm());
    }
  }
  // Brute force is fine for the handful of guided modes a coupler carries.
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<std::size_t> best = perm;
  double best_score = -1.0;
  if (n <= 8) {
    do {
      double score = 0.0;
      for (std::size_t i = 0; i < n; ++i) score += overlap[i][perm[i]];
      if (score > best_score * (1.0 + 1e-14)) {
        best_score = score;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    std::vector<bool> used(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t pick = n;
      for (std::size_t j = 0; j < n; ++j) {
        if (!used[j] && (pick == n || overlap[i][j] > overlap[i][pick])) pick = j;
      }
      used[pick] = true;
      best[i] = pick;
    }
  }
  std::vector<int> prev_labels(n);
  for (std::size_t i = 0; i < n; ++i) prev_labels[i] = prev.modes[i].label;
  for (std::size_t i = 0; i < n; ++i) out.modes[best[i]].label = prev_labels[i];
  std::stable_sort(out.modes.begin(), out.modes.end(),
                   [](const GuidedMode& a, const GuidedMode& b) { return a.label < b.label; });
  return out;
}

ComplexMatrix coupler_hamiltonian(const CouplerGeometry& g, const SineBasis& basis) {
  g.validate();
  basis.validate(g.structure_half_extent());
  return assemble_hamiltonian(potential_from_index(build_index_profile(g)), basis);
}

ModeSet solve_coupler(const CouplerGeometry& g, const SineBasis& basis) {
  return solve_modes(coupler_hamiltonian(g, basis), basis, g);
}

}  // namespace ptbranch
