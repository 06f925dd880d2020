#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ptbranch/linalg.hpp"
#include "ptbranch/spectral.hpp"
#include "ptbranch/waveguide.hpp"

namespace ptbranch {

/// A one-parameter Hamiltonian family whose two lowest eigenvalues form the
/// pair that meets at the exceptional point.
class PairFamily {
 public:
  virtual ~PairFamily() = default;

  /// Perturbation strength lambda used for the square-root fit.
  virtual double lambda(double parameter) const = 0;
  /// Scale for "numerically zero" imaginary parts (k for waveguides).
  virtual double reference_scale() const = 0;
  /// Two lowest eigenvalues, sorted; no eigenvectors.
  virtual std::pair<Complex, Complex> lowest_pair(double parameter) const = 0;
  /// Candidate modes with fields; a valid sweep point has exactly two.
  virtual ModeSet modes(double parameter) const = 0;
  /// Quantity reported in sweep tables (beta for waveguides, E for bare matrices).
  virtual Complex observable(const GuidedMode& mode) const = 0;
};

/// The PT coupler with delta_alpha (1/cm) as the parameter and
/// lambda = kappa(delta_alpha).
class CouplerFamily final : public PairFamily {
 public:
  CouplerFamily(CouplerGeometry geometry, SineBasis basis);

  double lambda(double delta_alpha) const override;
  double reference_scale() const override;
  std::pair<Complex, Complex> lowest_pair(double delta_alpha) const override;
  ModeSet modes(double delta_alpha) const override;
  Complex observable(const GuidedMode& mode) const override { return mode.beta; }

  CouplerGeometry at(double delta_alpha) const;
  const CouplerGeometry& geometry() const noexcept { return geometry_; }
  const SineBasis& basis() const noexcept { return basis_; }

 private:
  CouplerGeometry geometry_;
  SineBasis basis_;
};

/// Arbitrary injected matrix family; the parameter is lambda itself and the
/// two lowest eigenvalues play the role of the guided pair.
class MatrixFamily final : public PairFamily {
 public:
  explicit MatrixFamily(std::function<ComplexMatrix(double)> build);

  double lambda(double parameter) const override { return parameter; }
  double reference_scale() const override { return 1.0; }
  std::pair<Complex, Complex> lowest_pair(double parameter) const override;
  ModeSet modes(double parameter) const override;
  Complex observable(const GuidedMode& mode) const override { return mode.energy; }

 private:
  std::function<ComplexMatrix(double)> build_;
};

/// [[i gamma, k], [k, -i gamma]]: eigenvalues +-sqrt(k^2 - gamma^2).
ComplexMatrix pt_dimer(double gamma, double coupling);

struct SweepPoint {
  double delta_alpha = 0.0;  // family parameter
  double lambda = 0.0;
  Complex beta_even;         // observable of the mode labelled 0 at the first point
  Complex beta_odd;          // observable of the mode labelled 1
  Complex energy_even;
  Complex energy_odd;
  Complex splitting;         // beta_even - beta_odd, oriented so Re >= 0 at the first point
  double self_orthogonality = 1.0;  // min over the pair of |(psi|psi)| / <psi|psi>
};

struct SweepResult {
  std::vector<SweepPoint> points;
  double reference_scale = 1.0;
  std::optional<CouplerGeometry> geometry;
};

class SweepError : public std::runtime_error {
 public:
  SweepError(double parameter, const std::string& what);
  double parameter() const noexcept { return parameter_; }

 private:
  double parameter_;
};

/// One solve per parameter value (run on up to `threads` workers), then
/// labels propagated point to point with track_modes.
SweepResult sweep(const PairFamily& family, std::span<const double> parameters, int threads = 1);
SweepResult sweep_alpha(const CouplerGeometry& g, const SineBasis& basis,
                        std::span<const double> alphas, int threads = 1);

struct EpReport {
  double delta_alpha_c = 0.0;   // family parameter at the branch point
  double lambda_bp_abs = 0.0;   // |lambda_bp| = kappa_c for couplers
  Complex energy_bp;            // coalesced energy
  double amplitude_d = std::numeric_limits<double>::quiet_NaN();
  double exponent = std::numeric_limits<double>::quiet_NaN();
  double fit_residual = std::numeric_limits<double>::quiet_NaN();
  int fit_points = 0;
  int exponent_points = 0;
  double self_orthogonality_min = 1.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double tol = 0.0;
  int iterations = 0;
};

class EpSearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// True while the lowest pair is real: |Im(E2 - E1)| <= |Re(E2 - E1)|.
bool pair_is_real(std::pair<Complex, Complex> pair);

/// Bisection on pair_is_real. Throws EpSearchError if the predicate is not
/// real at lo and complex at hi, or if samples across the bracket show
/// more than one transition.
EpReport find_critical(const PairFamily& family, double lo, double hi, double tol = 1e-4);
EpReport find_critical_alpha(const CouplerGeometry& g, const SineBasis& basis, double lo,
                             double hi, double tol = 1e-4);

/// Fits (E_odd - E_even)/2 = D sqrt(lambda_bp^2 - lambda^2) on sweep points
/// within 10% below the critical parameter (needs >= 5), and a free
/// exponent on points with 1 - p/p_c in [1e-3, 1e-1] (needs >= 3).
EpReport fit_square_root(const SweepResult& sweep, const EpReport& ep);

/// n parameters with 1 - p/p_c log-spaced over [delta_min, delta_max], increasing.
std::vector<double> near_critical_parameters(double critical, int n, double delta_min = 1e-3,
                                             double delta_max = 1e-1);

void write_sweep_csv(std::ostream& os, const SweepResult& sweep);
std::string format_ep_report(const EpReport& ep, const std::optional<CouplerGeometry>& g);

}  // namespace ptbranch
