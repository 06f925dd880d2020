#pragma once

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "ptbranch/linalg.hpp"
#include "ptbranch/spectral.hpp"
#include "ptbranch/waveguide.hpp"

namespace ptbranch {

/// H(lambda) = h0 + lambda v with h0 real symmetric and parity-even, v real
/// symmetric and parity-odd. The physical PT family is lambda = i|lambda|.
class HermitianSplit {
 public:
  /// Checks shapes, finiteness, exact symmetry of h0 and v and that the
  /// parity map holds only +1/-1. Parity structure itself is not enforced
  /// (see parity_defect_*) so deliberately broken splits can be studied.
  HermitianSplit(Eigen::MatrixXd h0, Eigen::MatrixXd v, std::vector<int> parity);

  const Eigen::MatrixXd& h0() const noexcept { return h0_; }
  const Eigen::MatrixXd& v() const noexcept { return v_; }
  const std::vector<int>& parity() const noexcept { return parity_; }
  Eigen::Index dim() const noexcept { return h0_.rows(); }

  double parity_defect_h0() const;  // max |P h0 P - h0|
  double parity_defect_v() const;   // max |P v P + v|

  ComplexMatrix hamiltonian(Complex lambda) const;

 private:
  Eigen::MatrixXd h0_;
  Eigen::MatrixXd v_;
  std::vector<int> parity_;
};

/// h0 = H at delta_alpha = 0; v = coefficient of i kappa in H (exactly
/// Im H at kappa = 1). The O(kappa^2) real shift of the cores is dropped.
HermitianSplit split_coupler_hamiltonian(const CouplerGeometry& g, const SineBasis& basis);

/// h0 = diag(-k, k), v = sigma_x, parity {even, odd}:
/// eigenvalues of H(lambda) are +-sqrt(k^2 + lambda^2).
HermitianSplit two_level_split(double k);

class DegenerateStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rayleigh-Schroedinger coefficients for one unperturbed state j.
///
/// Internally the recurrence runs on v scaled by lambda_scale so that
/// coefficients stay O(1); E^(n) = scaled_energy(n) / lambda_scale^n.
/// All coefficients are real and use intermediate normalization
/// <psi^(0)|psi^(n)> = 0 for n >= 1.
class PerturbationExpansion {
 public:
  int target_index() const noexcept { return target_; }  // 1-based, ascending h0 spectrum
  int max_order() const noexcept { return static_cast<int>(scaled_energy_.size()) - 1; }
  double lambda_scale() const noexcept { return scale_; }
  int zeroth_parity() const noexcept { return zeroth_parity_; }

  double scaled_energy(int n) const { return scaled_energy_.at(static_cast<std::size_t>(n)); }
  double energy(int n) const;
  /// psi^(n) in the original basis, unscaled.
  Eigen::VectorXd correction(int n) const;
  const Eigen::VectorXd& scaled_correction(int n) const {
    return scaled_correction_.at(static_cast<std::size_t>(n));
  }
  /// Bare odd-order form <psi^(n)|V|psi^(n)> (scaled by lambda_scale^(2n+1)).
  double scaled_bare_odd_energy(int n) const {
    return scaled_bare_odd_.at(static_cast<std::size_t>(n));
  }
  /// Sign s with P psi^(n) ~ s psi^(n) as measured (0 if psi^(n) vanishes).
  int measured_parity(int n) const { return measured_parity_.at(static_cast<std::size_t>(n)); }

 private:
  friend PerturbationExpansion rs_expand(const HermitianSplit&, int, int);

  int target_ = 1;
  double scale_ = 1.0;
  int zeroth_parity_ = 1;
  std::vector<double> scaled_energy_;
  std::vector<Eigen::VectorXd> scaled_correction_;
  std::vector<double> scaled_bare_odd_;
  std::vector<int> measured_parity_;
};

/// Runs the recurrence
///   psi^(n) = G0' (V psi^(n-1) - sum_{k=1}^{n-1} E^(k) psi^(n-k)),
///   E^(n)   = <psi^(0)|V|psi^(n-1)>,
/// with G0' the reduced resolvent of h0 at E_j^(0) built from a full
/// eigendecomposition. j is 1-based; max_order <= 60.
PerturbationExpansion rs_expand(const HermitianSplit& split, int j, int max_order);

struct SeriesSum {
  double value = 0.0;
  double last_term = 0.0;  // |(-1)^n |lambda|^2n E^(2n)| of the last included term
  int terms = 0;
};

/// sum_n (-1)^n |lambda|^(2n) E^(2n) over all available even orders.
SeriesSum sum_series(const PerturbationExpansion& pe, double lambda_abs);

/// sum_{m <= order} lambda^m E^(m) for complex lambda.
Complex partial_energy(const PerturbationExpansion& pe, int order, Complex lambda);

/// Eigenvalue of H(lambda) closest to `guess`, by direct diagonalization.
Complex direct_eigenvalue(const HermitianSplit& split, Complex lambda, Complex guess);

/// (chi|H(lambda)|chi) / (chi|chi) with chi = sum_{k<=n} lambda^k psi^(k),
/// using the bilinear product so the result is analytic in lambda.
Complex chi_energy(const PerturbationExpansion& pe, const HermitianSplit& split, int n,
                   Complex lambda);

/// E^(2n+1) from the full 2n+1 expression
///   <psi^(n)|V|psi^(n)> - sum_{k,l=1..n} E^(2n+1-k-l) <psi^(k)|psi^(l)>.
double wigner_odd_energy(const PerturbationExpansion& pe, int n);

/// Both tests are Richardson-extrapolated in 1/n over the last 4 even orders.
/// `value` is the ratio test when it lies within 10% of the root test and
/// the root test otherwise.
struct RadiusEstimate {
  double value = 0.0;
  double root_test = 0.0;   // |E^(2n)|^(-1/2n)
  double ratio_test = 0.0;  // sqrt|E^(2n-2)/E^(2n)|
  int orders_used = 0;
};

class RadiusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Needs >= 6 nonzero even-order coefficients E^(2n), n >= 1.
RadiusEstimate estimate_radius(const PerturbationExpansion& pe);

struct ParityReport {
  double max_parity_violation = 0.0;  // max_n ||P psi^(n) - (-1)^(j+n-1) psi^(n)|| / ||psi^(n)||
  double max_odd_ratio = 0.0;         // max_n |E^(2n+1)| / max(|E^(2n)|, |E^(2n+2)|)
  double max_odd_abs = 0.0;           // max_n |E^(2n+1)|
  double max_bare_odd_ratio = 0.0;    // same ratio for <psi^(n)|V|psi^(n)>
  bool zeroth_parity_matches = true;  // psi^(0) parity equals (-1)^(j-1)

  bool holds(double tol = 1e-8) const {
    return zeroth_parity_matches && max_parity_violation < tol && max_odd_ratio < tol;
  }
};

ParityReport verify_parity_and_oddness(const PerturbationExpansion& pe, const HermitianSplit& split);

/// Columns: order,E_coeff,parity,norm_psi.
void write_coefficients_csv(std::ostream& os, const PerturbationExpansion& pe);

}  // namespace ptbranch
