#include "ptbranch/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include "ptbranch/format.hpp"

namespace ptbranch {

namespace {

void require_pair(const ModeSet& modes, const char* where) {
  if (modes.size() != 2) {
    throw std::invalid_argument(std::string(where) + ": expected exactly 2 guided modes, got " +
                                std::to_string(modes.size()));
  }
}

double trapezoid(std::span<const double> x, const auto& f) {
  double acc = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) acc += 0.5 * (x[i] - x[i - 1]) * (f(i) + f(i - 1));
  return acc;
}

// Sum of squared residuals of the best fit a + b cos(w z) + c sin(w z).
double sinusoid_misfit(std::span<const double> z, std::span<const double> s, double omega) {
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  double btb = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const Eigen::Vector3d row(1.0, std::cos(omega * z[i]), std::sin(omega * z[i]));
    ata += row * row.transpose();
    atb += row * s[i];
    btb += s[i] * s[i];
  }
  const Eigen::Vector3d coef = ata.ldlt().solve(atb);
  return btb - coef.dot(atb);
}

}  // namespace

std::optional<double> beat_length(const ModeSet& modes) {
  require_pair(modes, "beat_length");
  const Complex b1 = modes.modes[0].beta;
  const Complex b2 = modes.modes[1].beta;
  const double re_scale = std::max(std::abs(b1.real()), std::abs(b2.real()));
  const double im_max = std::max(std::abs(b1.imag()), std::abs(b2.imag()));
  if (im_max > 1e-9 * re_scale) return std::nullopt;
  const double d = std::abs(b1.real() - b2.real());
  if (d == 0.0) return std::nullopt;
  return 2.0 * std::numbers::pi / d;
}

PowerMap sum_field_power(const ModeSet& modes, const SineBasis& basis,
                         std::span<const double> x_grid, std::span<const double> z_grid,
                         double delta_alpha, std::array<double, 2> weights) {
  require_pair(modes, "sum_field_power");
  if (x_grid.empty() || z_grid.empty()) throw std::invalid_argument("sum_field_power: grid empty");

  const auto nx = static_cast<Eigen::Index>(x_grid.size());
  const auto nz = static_cast<Eigen::Index>(z_grid.size());
  CVector f1(nx), f2(nx);
  for (Eigen::Index i = 0; i < nx; ++i) {
    const double x = x_grid[static_cast<std::size_t>(i)];
    f1(i) = weights[0] * basis.evaluate_field(modes.modes[0].field, x);
    f2(i) = weights[1] * basis.evaluate_field(modes.modes[1].field, x);
  }
  const Complex minus_i{0.0, -1.0};
  PowerMap map;
  map.x_grid.assign(x_grid.begin(), x_grid.end());
  map.z_grid.assign(z_grid.begin(), z_grid.end());
  map.delta_alpha = delta_alpha;
  map.beat_length = beat_length(modes);
  map.power.resize(nx, nz);
  for (Eigen::Index j = 0; j < nz; ++j) {
    const double z = z_grid[static_cast<std::size_t>(j)];
    const Complex p1 = std::exp(minus_i * modes.modes[0].beta * z);
    const Complex p2 = std::exp(minus_i * modes.modes[1].beta * z);
    for (Eigen::Index i = 0; i < nx; ++i) {
      map.power(i, j) = 0.5 * std::norm(f1(i) * p1 + f2(i) * p2);
    }
  }
  return map;
}

double total_power(const PowerMap& map, std::size_t z_index) {
  const auto col = static_cast<Eigen::Index>(z_index);
  return trapezoid(map.x_grid, [&](std::size_t i) {
    return map.power(static_cast<Eigen::Index>(i), col);
  });
}

std::vector<double> band_power(const PowerMap& map, double x_lo, double x_hi) {
  std::vector<double> xs;
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < map.x_grid.size(); ++i) {
    if (map.x_grid[i] >= x_lo && map.x_grid[i] <= x_hi) {
      xs.push_back(map.x_grid[i]);
      rows.push_back(static_cast<Eigen::Index>(i));
    }
  }
  std::vector<double> out(map.z_grid.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    out[j] = trapezoid(xs, [&](std::size_t i) { return map.power(rows[i], col); });
  }
  return out;
}

double dominant_period(std::span<const double> z, std::span<const double> signal) {
  if (z.size() != signal.size() || z.size() < 8) {
    throw std::invalid_argument("dominant_period: need >= 8 matching samples");
  }
  const double span = z.back() - z.front();
  const double step = span / static_cast<double>(z.size() - 1);
  const double min_period = 3.0 * step;
  const double max_period = 2.0 * span;
  constexpr int kScan = 600;
  std::vector<double> periods(kScan), misfit(kScan);
  for (int i = 0; i < kScan; ++i) {
    periods[static_cast<std::size_t>(i)] =
        min_period * std::pow(max_period / min_period, static_cast<double>(i) / (kScan - 1));
    misfit[static_cast<std::size_t>(i)] =
        sinusoid_misfit(z, signal, 2.0 * std::numbers::pi / periods[static_cast<std::size_t>(i)]);
  }
  const auto best = static_cast<std::size_t>(
      std::distance(misfit.begin(), std::min_element(misfit.begin(), misfit.end())));
  double lo = periods[best == 0 ? 0 : best - 1];
  double hi = periods[std::min<std::size_t>(best + 1, kScan - 1)];
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  auto f = [&](double period) { return sinusoid_misfit(z, signal, 2.0 * std::numbers::pi / period); };
  double a = hi - golden * (hi - lo);
  double b = lo + golden * (hi - lo);
  double fa = f(a);
  double fb = f(b);
  for (int it = 0; it < 100 && (hi - lo) > 1e-12 * hi; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - golden * (hi - lo);
      fa = f(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + golden * (hi - lo);
      fb = f(b);
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw std::invalid_argument("linspace: n must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = a;
    return out;
  }
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return out;
}

void export_power_map(const PowerMap& map, const std::filesystem::path& stem) {
  if (map.power.size() == 0) throw std::invalid_argument("export_power_map: empty map");
  auto csv_path = stem;
  csv_path += ".csv";
  auto pgm_path = stem;
  pgm_path += ".pgm";

  std::string text = "x_um,z_um,power\n";
  text.reserve(map.x_grid.size() * map.z_grid.size() * 72);
  for (std::size_t i = 0; i < map.x_grid.size(); ++i) {
    const std::string x = sci(map.x_grid[i]) + ',';
    for (std::size_t j = 0; j < map.z_grid.size(); ++j) {
      text += x;
      text += sci(map.z_grid[j]);
      text += ',';
      text += sci(map.power(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      text += '\n';
    }
  }
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw IoError("cannot open " + csv_path.string() + " for writing");
    out << text;
    if (!out) throw IoError("failed writing " + csv_path.string());
  }

  const double peak = map.power.maxCoeff();
  const auto width = map.z_grid.size();
  const auto height = map.x_grid.size();
  std::string pgm = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  pgm.reserve(pgm.size() + width * height);
  for (std::size_t i = 0; i < height; ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      const double p = map.power(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      const double scaled = peak > 0.0 ? std::clamp(255.0 * p / peak, 0.0, 255.0) : 0.0;
      pgm += static_cast<char>(static_cast<unsigned char>(std::lround(scaled)));
    }
  }
  std::ofstream out(pgm_path, std::ios::binary);
  if (!out) throw IoError("cannot open " + pgm_path.string() + " for writing");
  out.write(pgm.data(), static_cast<std::streamsize>(pgm.size()));
  if (!out) throw IoError("failed writing " + pgm_path.string());
}

}  // namespace ptbranch
