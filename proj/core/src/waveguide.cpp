#include "ptbranch/waveguide.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ptbranch {

namespace {

constexpr double kUmPerCm = 1e4;

void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(field) + " must be positive and finite");
  }
}

template <typename T>
void check_segments(const std::vector<Segment<T>>& segments) {
  for (const auto& s : segments) {
    if (!(s.x_lo < s.x_hi)) throw std::invalid_argument("segment with x_lo >= x_hi");
  }
  auto sorted = segments;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.x_lo < b.x_lo; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].x_lo < sorted[i - 1].x_hi) throw std::invalid_argument("overlapping segments");
  }
}

template <typename T>
T lookup(const std::vector<Segment<T>>& segments, T background, double x) {
  for (const auto& s : segments) {
    if (x >= s.x_lo && x <= s.x_hi) return s.value;
  }
  return background;
}

}  // namespace

std::string to_string(GainConvention c) {
  return c == GainConvention::amplitude ? "amplitude" : "intensity";
}

GainConvention gain_convention_from_string(const std::string& name) {
  if (name == "amplitude") return GainConvention::amplitude;
  if (name == "intensity") return GainConvention::intensity;
  throw std::invalid_argument("unknown gain convention '" + name +
                              "' (expected amplitude or intensity)");
}

double kappa_from_delta_alpha(double delta_alpha_per_cm, double vacuum_wavelength_um,
                              GainConvention convention) {
  const double alpha_per_um = delta_alpha_per_cm / kUmPerCm;
  const double denom = convention == GainConvention::amplitude ? 2.0 * std::numbers::pi
                                                                : 4.0 * std::numbers::pi;
  return alpha_per_um * vacuum_wavelength_um / denom;
}

double delta_alpha_from_kappa(double kappa, double vacuum_wavelength_um,
                              GainConvention convention) {
  return kappa / kappa_from_delta_alpha(1.0, vacuum_wavelength_um, convention);
}

void CouplerGeometry::validate() const {
  require_positive(n0, "geometry.n0");
  require_positive(delta_n, "geometry.delta_n");
  require_positive(half_width_a, "geometry.half_width_a");
  require_positive(vacuum_wavelength, "geometry.vacuum_wavelength");
  if (!(delta_alpha >= 0.0) || !std::isfinite(delta_alpha)) {
    throw std::invalid_argument("geometry.delta_alpha must be non-negative and finite");
  }
}

double CouplerGeometry::wavenumber() const { return 2.0 * std::numbers::pi / vacuum_wavelength; }

double CouplerGeometry::kappa() const {
  return kappa_from_delta_alpha(delta_alpha, vacuum_wavelength, gain_convention);
}

IndexProfile::IndexProfile(Complex background, std::vector<IndexSegment> segments,
                           double vacuum_wavelength)
    : background_(background), segments_(std::move(segments)), vacuum_wavelength_(vacuum_wavelength) {
  require_positive(vacuum_wavelength_, "vacuum_wavelength");
  check_segments(segments_);
}

Complex IndexProfile::operator()(double x) const { return lookup(segments_, background_, x); }

PotentialProfile::PotentialProfile(Complex background, std::vector<Segment<Complex>> segments,
                                   double wavenumber)
    : background_(background), segments_(std::move(segments)), wavenumber_(wavenumber) {
  require_positive(wavenumber_, "wavenumber");
  check_segments(segments_);
}

Complex PotentialProfile::operator()(double x) const { return lookup(segments_, background_, x); }

IndexProfile build_index_profile(const CouplerGeometry& g) {
  g.validate();
  return build_index_profile_for_kappa(g, g.kappa());
}

IndexProfile build_index_profile_for_kappa(const CouplerGeometry& g, double kappa) {
  g.validate();
  const double a = g.half_width_a;
  const double core = g.core_index();
  // Gain on the left: Im n > 0 there, so n(x) = conj(n(-x)).
  std::vector<IndexSegment> segments{
      {-3.0 * a, -a, Complex(core, kappa)},
      {a, 3.0 * a, Complex(core, -kappa)},
  };
  return IndexProfile(Complex(g.n0, 0.0), std::move(segments), g.vacuum_wavelength);
}

IndexProfile build_single_slab_profile(const CouplerGeometry& g) {
  g.validate();
  const double a = g.half_width_a;
  return IndexProfile(Complex(g.n0, 0.0), {{-a, a, Complex(g.core_index(), 0.0)}},
                      g.vacuum_wavelength);
}

PotentialProfile potential_from_index(const IndexProfile& p) {
  const double k = 2.0 * std::numbers::pi / p.vacuum_wavelength();
  const double scale = -0.5 * k * k;
  std::vector<Segment<Complex>> segments;
  segments.reserve(p.segments().size());
  for (const auto& s : p.segments()) {
    segments.push_back({s.x_lo, s.x_hi, scale * s.value * s.value});
  }
  return PotentialProfile(scale * p.background() * p.background(), std::move(segments), k);
}

bool check_pt_symmetry(const IndexProfile& p, int n_samples) {
  if (n_samples < 2) throw std::invalid_argument("check_pt_symmetry: n_samples must be >= 2");
  double extent = 1.0;
  std::vector<double> xs;
  for (const auto& s : p.segments()) {
    extent = std::max({extent, std::abs(s.x_lo), std::abs(s.x_hi)});
    xs.push_back(s.x_lo);
    xs.push_back(s.x_hi);
  }
  extent *= 1.25;
  for (int i = 0; i < n_samples; ++i) {
    xs.push_back(-extent + 2.0 * extent * i / (n_samples - 1));
  }
  double worst = 0.0;
  for (double x : xs) {
    worst = std::max(worst, std::abs(p(x) - std::conj(p(-x))));
  }
  return worst < 1e-14;
}

}  // namespace ptbranch
