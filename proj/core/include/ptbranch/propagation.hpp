#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "ptbranch/spectral.hpp"

namespace ptbranch {

struct PowerMap {
  std::vector<double> x_grid;  // um
  std::vector<double> z_grid;  // um
  Eigen::MatrixXd power;       // rows follow x_grid, columns z_grid
  double delta_alpha = 0.0;    // 1/cm
  std::optional<double> beat_length;
};

/// 2 pi / |Re beta_1 - Re beta_2| (um), or nothing once the pair has gone
/// complex (max |Im beta| > 1e-9 max |Re beta|). Throws unless the set
/// holds exactly two modes.
std::optional<double> beat_length(const ModeSet& modes);

/// |E_y|^2 with E_y = (w_1 E_1(x) e^{-i beta_1 z} + w_2 E_2(x) e^{-i beta_2 z}) / sqrt 2.
/// Default weights {1, 1} give the equal-amplitude sum field.
PowerMap sum_field_power(const ModeSet& modes, const SineBasis& basis,
                         std::span<const double> x_grid, std::span<const double> z_grid,
                         double delta_alpha = 0.0, std::array<double, 2> weights = {1.0, 1.0});

/// Trapezoid integral of column `z_index` over x.
double total_power(const PowerMap& map, std::size_t z_index);

/// Trapezoid integral over x in [x_lo, x_hi] for every z.
std::vector<double> band_power(const PowerMap& map, double x_lo, double x_hi);

/// Period of the strongest oscillation of `signal` sampled on uniform z:
/// coarse scan of a sinusoid-plus-offset least-squares fit over periods
/// between 3 grid steps and 4x the record length, then golden-section
/// refinement of the best candidate.
double dominant_period(std::span<const double> z, std::span<const double> signal);

std::vector<double> linspace(double a, double b, int n);

/// Writes <stem>.csv (x_um,z_um,power) and <stem>.pgm (P5, width = z
/// samples, height = x samples, power / max scaled to 0..255).
void export_power_map(const PowerMap& map, const std::filesystem::path& stem);

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ptbranch
