#pragma once

#include <complex>
#include <vector>

namespace oracle {

/// Coupler described directly by its physical parameters; nothing here
/// touches the library.
struct Coupler {
  double n0 = 3.3;
  double delta_n = 1e-3;
  double a = 2.5;
  double wavelength = 1.55;
  double kappa = 0.0;  // Im n in the gain core
};

/// Second-order finite differences for -psi''/2 + V psi = E psi on
/// [-half_domain, half_domain] with Dirichlet ends; nodes falling on an
/// index step take the mean of both sides.
class FiniteDifference {
 public:
  FiniteDifference(const Coupler& c, double half_domain, int intervals);

  /// Lowest `count` eigenvalues by Sturm bisection (requires kappa == 0).
  std::vector<double> lowest_energies(int count) const;
  /// Rayleigh-quotient iteration on the complex tridiagonal problem,
  /// started from `shift`, using the bilinear quotient.
  std::complex<double> refine(std::complex<double> shift) const;

  static double beta(double energy);
  static std::complex<double> beta(std::complex<double> energy);

 private:
  std::vector<std::complex<double>> diag_;
  double off_ = 0.0;
};

/// beta of the fundamental even mode of one symmetric slab (half width a)
/// from u tan u = w, u^2 + w^2 = V^2, solved by bisection.
double slab_fundamental_beta(double n_core, double n_clad, double a, double wavelength);

}  // namespace oracle
