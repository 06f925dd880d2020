#include "ptbranch/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "ptbranch/format.hpp"

namespace ptbranch {

namespace {

constexpr int kMaxOrder = 60;

// Polynomial extrapolation of samples y(h) to h = 0 (Neville's scheme).
double extrapolate_to_zero(std::vector<double> h, std::vector<double> y) {
  const std::size_t n = h.size();
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = 0; i + level < n; ++i) {
      y[i] = (h[i + level] * y[i] - h[i] * y[i + 1]) / (h[i + level] - h[i]);
    }
  }
  return y[0];
}

double parity_overlap(const Eigen::VectorXd& psi, const std::vector<int>& parity) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    acc += parity[static_cast<std::size_t>(i)] * psi(i) * psi(i);
  }
  return acc;
}

}  // namespace

HermitianSplit::HermitianSplit(Eigen::MatrixXd h0, Eigen::MatrixXd v, std::vector<int> parity)
    : h0_(std::move(h0)), v_(std::move(v)), parity_(std::move(parity)) {
  if (h0_.rows() == 0 || h0_.rows() != h0_.cols()) {
    throw std::invalid_argument("HermitianSplit: h0 must be square and non-empty");
  }
  if (v_.rows() != h0_.rows() || v_.cols() != h0_.cols()) {
    throw std::invalid_argument("HermitianSplit: v must match h0 in shape");
  }
  if (parity_.size() != static_cast<std::size_t>(h0_.rows())) {
    throw std::invalid_argument("HermitianSplit: parity map length must equal the dimension");
  }
  for (int p : parity_) {
    if (p != 1 && p != -1) throw std::invalid_argument("HermitianSplit: parity entries must be +1 or -1");
  }
  if (!h0_.allFinite() || !v_.allFinite()) {
    throw std::invalid_argument("HermitianSplit: non-finite entries");
  }
  if (h0_ != h0_.transpose()) throw std::invalid_argument("HermitianSplit: h0 is not symmetric");
  if (v_ != v_.transpose()) throw std::invalid_argument("HermitianSplit: v is not symmetric");
}

double HermitianSplit::parity_defect_h0() const {
  double worst = 0.0;
  for (Eigen::Index c = 0; c < h0_.cols(); ++c) {
    for (Eigen::Index r = 0; r < h0_.rows(); ++r) {
      const int s = parity_[static_cast<std::size_t>(r)] * parity_[static_cast<std::size_t>(c)];
      worst = std::max(worst, std::abs(s * h0_(r, c) - h0_(r, c)));
    }
  }
  return worst;
}

double HermitianSplit::parity_defect_v() const {
  double worst = 0.0;
  for (Eigen::Index c = 0; c < v_.cols(); ++c) {
    for (Eigen::Index r = 0; r < v_.rows(); ++r) {
      const int s = parity_[static_cast<std::size_t>(r)] * parity_[static_cast<std::size_t>(c)];
      worst = std::max(worst, std::abs(s * v_(r, c) + v_(r, c)));
    }
  }
  return worst;
}

ComplexMatrix HermitianSplit::hamiltonian(Complex lambda) const {
  CMatrix h = h0_.cast<Complex>() + lambda * v_.cast<Complex>();
  return ComplexMatrix(std::move(h));
}

HermitianSplit split_coupler_hamiltonian(const CouplerGeometry& g, const SineBasis& basis) {
  g.validate();
  basis.validate(g.structure_half_extent());
  const auto h_hermitian =
      assemble_hamiltonian(potential_from_index(build_index_profile_for_kappa(g, 0.0)), basis);
  const auto h_unit =
      assemble_hamiltonian(potential_from_index(build_index_profile_for_kappa(g, 1.0)), basis);
  return HermitianSplit(h_hermitian.entries().real(), h_unit.entries().imag(), basis.parities());
}

HermitianSplit two_level_split(double k) {
  Eigen::MatrixXd h0(2, 2);
  h0 << -k, 0.0, 0.0, k;
  Eigen::MatrixXd v(2, 2);
  v << 0.0, 1.0, 1.0, 0.0;
  return HermitianSplit(std::move(h0), std::move(v), {1, -1});
}

double PerturbationExpansion::energy(int n) const {
  return scaled_energy(n) / std::pow(scale_, n);
}

Eigen::VectorXd PerturbationExpansion::correction(int n) const {
  return scaled_correction(n) / std::pow(scale_, n);
}

PerturbationExpansion rs_expand(const HermitianSplit& split, int j, int max_order) {
  const Eigen::Index dim = split.dim();
  if (j < 1 || j > dim) {
    throw std::invalid_argument("rs_expand: target index " + std::to_string(j) + " outside 1.." +
                                std::to_string(dim));
  }
  if (max_order < 0 || max_order > kMaxOrder) {
    throw std::invalid_argument("rs_expand: max_order must lie in [0, 60]");
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(split.h0());
  if (es.info() != Eigen::Success) throw LinalgError("rs_expand: h0 eigendecomposition failed");
  const Eigen::VectorXd& e = es.eigenvalues();
  const Eigen::MatrixXd& u = es.eigenvectors();
  const Eigen::Index target = j - 1;
  const double e0 = e(target);

  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index q = 0; q < dim; ++q) {
    if (q != target) gap = std::min(gap, std::abs(e0 - e(q)));
  }
  if (gap <= 1e-10 * std::max(1.0, std::abs(e0))) {
    std::ostringstream os;
    os << "rs_expand: unperturbed level " << j << " is degenerate (gap " << gap
       << "); degenerate perturbation theory is not supported";
    throw DegenerateStateError(os.str());
  }

  const Eigen::MatrixXd coupling = u.transpose() * split.v() * u;

  // Two-level estimate of the nearest branch point; sets the lambda scale.
  double scale = std::numeric_limits<double>::infinity();
  for (Eigen::Index q = 0; q < dim; ++q) {
    const double w = std::abs(coupling(q, target));
    if (q != target && w > 0.0) scale = std::min(scale, std::abs(e0 - e(q)) / (2.0 * w));
  }
  if (!std::isfinite(scale) || !(scale > 0.0)) scale = 1.0;
  const Eigen::MatrixXd vs = scale * coupling;

  Eigen::VectorXd resolvent(dim);
  for (Eigen::Index q = 0; q < dim; ++q) resolvent(q) = q == target ? 0.0 : 1.0 / (e0 - e(q));

  PerturbationExpansion pe;
  pe.target_ = j;
  pe.scale_ = scale;

  std::vector<Eigen::VectorXd> c;  // corrections in h0 eigen-coordinates
  c.reserve(static_cast<std::size_t>(max_order) + 1);
  c.push_back(Eigen::VectorXd::Unit(dim, target));
  pe.scaled_energy_.push_back(e0);
  for (int n = 1; n <= max_order; ++n) {
    const Eigen::VectorXd w = vs * c[static_cast<std::size_t>(n - 1)];
    pe.scaled_energy_.push_back(w(target));
    Eigen::VectorXd rhs = w;
    for (int k = 1; k < n; ++k) {
      rhs -= pe.scaled_energy_[static_cast<std::size_t>(k)] * c[static_cast<std::size_t>(n - k)];
    }
    c.push_back(resolvent.cwiseProduct(rhs));
  }

  const auto& parity = split.parity();
  for (int n = 0; n <= max_order; ++n) {
    const auto& cn = c[static_cast<std::size_t>(n)];
    pe.scaled_correction_.push_back(u * cn);
    pe.scaled_bare_odd_.push_back(cn.dot(vs * cn));
    const auto& psi = pe.scaled_correction_.back();
    const double norm2 = psi.squaredNorm();
    const double overlap = parity_overlap(psi, parity);
    pe.measured_parity_.push_back(norm2 == 0.0 ? 0 : (overlap >= 0.0 ? 1 : -1));
  }
  pe.zeroth_parity_ = pe.measured_parity_.front();
  return pe;
}

SeriesSum sum_series(const PerturbationExpansion& pe, double lambda_abs) {
  const double x = lambda_abs / pe.lambda_scale();
  SeriesSum out;
  double power = 1.0;  // x^(2n)
  for (int n = 0; 2 * n <= pe.max_order(); ++n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    const double term = sign * power * pe.scaled_energy(2 * n);
    out.value += term;
    out.last_term = std::abs(term);
    ++out.terms;
    power *= x * x;
  }
  return out;
}

Complex partial_energy(const PerturbationExpansion& pe, int order, Complex lambda) {
  if (order > pe.max_order()) throw std::out_of_range("partial_energy: order beyond expansion");
  const Complex x = lambda / pe.lambda_scale();
  Complex acc{};
  Complex power{1.0, 0.0};
  for (int m = 0; m <= order; ++m) {
    acc += power * pe.scaled_energy(m);
    power *= x;
  }
  return acc;
}

Complex direct_eigenvalue(const HermitianSplit& split, Complex lambda, Complex guess) {
  const auto values = eigenvalues_complex_symmetric(split.hamiltonian(lambda));
  return *std::min_element(values.begin(), values.end(), [&](Complex a, Complex b) {
    return std::abs(a - guess) < std::abs(b - guess);
  });
}

Complex chi_energy(const PerturbationExpansion& pe, const HermitianSplit& split, int n,
                   Complex lambda) {
  if (n > pe.max_order()) throw std::out_of_range("chi_energy: order beyond expansion");
  const Complex x = lambda / pe.lambda_scale();
  CVector chi = CVector::Zero(split.dim());
  Complex power{1.0, 0.0};
  for (int k = 0; k <= n; ++k) {
    chi += power * pe.scaled_correction(k).cast<Complex>();
    power *= x;
  }
  const CVector h_chi = split.h0().cast<Complex>() * chi + lambda * (split.v().cast<Complex>() * chi);
  return c_product(chi, h_chi) / c_product(chi, chi);
}

double wigner_odd_energy(const PerturbationExpansion& pe, int n) {
  if (n < 0 || 2 * n - 1 > pe.max_order() || n > pe.max_order()) {
    throw std::out_of_range("wigner_odd_energy: order beyond expansion");
  }
  double acc = pe.scaled_bare_odd_energy(n);
  for (int k = 1; k <= n; ++k) {
    for (int l = 1; l <= n; ++l) {
      acc -= pe.scaled_energy(2 * n + 1 - k - l) *
             pe.scaled_correction(k).dot(pe.scaled_correction(l));
    }
  }
  return acc / std::pow(pe.lambda_scale(), 2 * n + 1);
}

RadiusEstimate estimate_radius(const PerturbationExpansion& pe) {
  const double scale = pe.lambda_scale();
  std::vector<double> root_h, root_r, ratio_h, ratio_r;
  for (int n = 1; 2 * n <= pe.max_order(); ++n) {
    const double c = std::abs(pe.scaled_energy(2 * n));
    if (c == 0.0) continue;
    root_h.push_back(1.0 / n);
    root_r.push_back(scale * std::pow(c, -1.0 / (2.0 * n)));
    const double prev = std::abs(pe.scaled_energy(2 * n - 2));
    if (n >= 2 && prev != 0.0) {
      ratio_h.push_back(1.0 / n);
      ratio_r.push_back(scale * std::sqrt(prev / c));
    }
  }
  if (root_r.size() < 6) {
    throw RadiusError("estimate_radius: need >= 6 nonzero even-order coefficients, have " +
                      std::to_string(root_r.size()));
  }
  auto last4 = [](const std::vector<double>& v) {
    return std::vector<double>(v.end() - 4, v.end());
  };
  RadiusEstimate out;
  out.root_test = extrapolate_to_zero(last4(root_h), last4(root_r));
  out.value = out.root_test;
  out.orders_used = static_cast<int>(root_r.size());
  if (ratio_r.size() >= 4) {
    out.ratio_test = extrapolate_to_zero(last4(ratio_h), last4(ratio_r));
    // The ratio test converges much faster on a regular sequence; an
    // irregular one shows up as disagreement with the root test.
    if (std::abs(out.ratio_test - out.root_test) < 0.1 * out.root_test) out.value = out.ratio_test;
  } else if (!ratio_r.empty()) {
    out.ratio_test = ratio_r.back();
  }
  return out;
}

ParityReport verify_parity_and_oddness(const PerturbationExpansion& pe,
                                       const HermitianSplit& split) {
  ParityReport report;
  const int j = pe.target_index();
  const auto& parity = split.parity();
  const int expected0 = ((j - 1) % 2 == 0) ? 1 : -1;
  report.zeroth_parity_matches = pe.zeroth_parity() == expected0;
  for (int n = 0; n <= pe.max_order(); ++n) {
    const auto& psi = pe.scaled_correction(n);
    const double norm = psi.norm();
    if (norm == 0.0) continue;
    const double sign = ((j + n - 1) % 2 == 0) ? 1.0 : -1.0;
    double defect = 0.0;
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      const double d = parity[static_cast<std::size_t>(i)] * psi(i) - sign * psi(i);
      defect += d * d;
    }
    report.max_parity_violation = std::max(report.max_parity_violation, std::sqrt(defect) / norm);
  }
  const double scale = pe.lambda_scale();
  auto odd_ratio = [&](double odd_scaled, int n) {
    const double denom = std::max(std::abs(pe.scaled_energy(2 * n)) * scale,
                                  std::abs(pe.scaled_energy(2 * n + 2)) / scale);
    if (odd_scaled == 0.0) return 0.0;
    return denom > 0.0 ? std::abs(odd_scaled) / denom : std::numeric_limits<double>::infinity();
  };
  for (int n = 0; 2 * n + 2 <= pe.max_order(); ++n) {
    const double odd = pe.scaled_energy(2 * n + 1);
    report.max_odd_ratio = std::max(report.max_odd_ratio, odd_ratio(odd, n));
    report.max_odd_abs = std::max(report.max_odd_abs, std::abs(pe.energy(2 * n + 1)));
    report.max_bare_odd_ratio =
        std::max(report.max_bare_odd_ratio, odd_ratio(pe.scaled_bare_odd_energy(n), n));
  }
  return report;
}

void write_coefficients_csv(std::ostream& os, const PerturbationExpansion& pe) {
  os << "order,E_coeff,parity,norm_psi\n";
  for (int n = 0; n <= pe.max_order(); ++n) {
    os << n << ',' << sci(pe.energy(n)) << ',' << pe.measured_parity(n) << ','
       << sci(pe.correction(n).norm()) << '\n';
  }
}

}  // namespace ptbranch
