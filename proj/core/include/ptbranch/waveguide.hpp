#pragma once

#include <complex>
#include <string>
#include <vector>

#include "ptbranch/linalg.hpp"

namespace ptbranch {

/// How a gain/loss coefficient (1/cm) maps to the imaginary index kappa.
///   amplitude: field coefficient,     kappa = delta_alpha * lambda / (2 pi)
///   intensity: power coefficient,     kappa = delta_alpha * lambda / (4 pi)
enum class GainConvention { amplitude, intensity };

std::string to_string(GainConvention c);
GainConvention gain_convention_from_string(const std::string& name);

/// Imaginary index amplitude for a gain/loss coefficient given in 1/cm and
/// a vacuum wavelength in um.
double kappa_from_delta_alpha(double delta_alpha_per_cm, double vacuum_wavelength_um,
                              GainConvention convention);
double delta_alpha_from_kappa(double kappa, double vacuum_wavelength_um,
                              GainConvention convention);

/// Two identical slabs of width 2a separated by a gap 2a; the left slab
/// carries gain and the right one the matching loss.
struct CouplerGeometry {
  double n0 = 3.3;                 // background index
  double delta_n = 1e-3;           // core index step
  double half_width_a = 2.5;       // um
  double vacuum_wavelength = 1.55; // um
  double delta_alpha = 0.0;        // 1/cm
  GainConvention gain_convention = GainConvention::amplitude;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  double wavenumber() const;  // k = 2 pi / vacuum_wavelength, 1/um
  double kappa() const;       // Im n in the gain core
  double core_index() const { return n0 + delta_n; }
  double structure_half_extent() const { return 3.0 * half_width_a; }
};

/// Closed interval [x_lo, x_hi] (um) of constant value.
template <typename T>
struct Segment {
  double x_lo;
  double x_hi;
  T value;
};

using IndexSegment = Segment<Complex>;

/// Piecewise-constant complex refractive index n(x). Segments must not
/// overlap; points outside every segment take the background value.
class IndexProfile {
 public:
  IndexProfile(Complex background, std::vector<IndexSegment> segments, double vacuum_wavelength);

  Complex operator()(double x) const;
  Complex background() const noexcept { return background_; }
  const std::vector<IndexSegment>& segments() const noexcept { return segments_; }
  double vacuum_wavelength() const noexcept { return vacuum_wavelength_; }

 private:
  Complex background_;
  std::vector<IndexSegment> segments_;
  double vacuum_wavelength_;
};

/// Schroedinger-analog potential V(x) = -k^2 n(x)^2 / 2 (1/um^2), with the
/// energy identified as E = -beta^2 / 2.
class PotentialProfile {
 public:
  PotentialProfile(Complex background, std::vector<Segment<Complex>> segments, double wavenumber);

  Complex operator()(double x) const;
  Complex background() const noexcept { return background_; }
  const std::vector<Segment<Complex>>& segments() const noexcept { return segments_; }
  double wavenumber() const noexcept { return wavenumber_; }

  static Complex energy_from_beta(Complex beta) { return -0.5 * beta * beta; }

 private:
  Complex background_;
  std::vector<Segment<Complex>> segments_;
  double wavenumber_;
};

IndexProfile build_index_profile(const CouplerGeometry& g);

/// Same coupler with the imaginary index amplitude given directly.
IndexProfile build_index_profile_for_kappa(const CouplerGeometry& g, double kappa);

/// One slab of width 2a centred on x = 0, no gain or loss.
IndexProfile build_single_slab_profile(const CouplerGeometry& g);

PotentialProfile potential_from_index(const IndexProfile& p);

/// True iff max |n(x) - conj(n(-x))| < 1e-14 over n_samples points spread
/// over the structure, segment edges included.
bool check_pt_symmetry(const IndexProfile& p, int n_samples);

}  // namespace ptbranch
