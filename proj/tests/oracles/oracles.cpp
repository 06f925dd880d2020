#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oracle {

namespace {

using cd = std::complex<double>;

cd index_at(const Coupler& c, double x) {
  const double ax = std::abs(x);
  if (ax > c.a && ax < 3.0 * c.a) {
    const double sign = x < 0.0 ? 1.0 : -1.0;
    return {c.n0 + c.delta_n, sign * c.kappa};
  }
  return {c.n0, 0.0};
}

bool on_step(const Coupler& c, double x, double h) {
  const double ax = std::abs(x);
  return std::abs(ax - c.a) < 1e-6 * h || std::abs(ax - 3.0 * c.a) < 1e-6 * h;
}

// Solves (T - s) y = b for the symmetric tridiagonal T (no pivoting).
std::vector<cd> thomas(const std::vector<cd>& diag, double off, cd shift, std::vector<cd> b) {
  const std::size_t n = diag.size();
  std::vector<cd> c(n);
  cd denom = diag[0] - shift;
  c[0] = off / denom;
  b[0] /= denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = diag[i] - shift - off * c[i - 1];
    c[i] = off / denom;
    b[i] = (b[i] - off * b[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) b[i] -= c[i] * b[i + 1];
  return b;
}

}  // namespace

FiniteDifference::FiniteDifference(const Coupler& c, double half_domain, int intervals) {
  const double h = 2.0 * half_domain / intervals;
  const double k = 2.0 * std::numbers::pi / c.wavelength;
  diag_.resize(static_cast<std::size_t>(intervals - 1));
  for (int i = 1; i < intervals; ++i) {
    const double x = -half_domain + i * h;
    cd v;
    if (on_step(c, x, h)) {
      const cd nl = index_at(c, x - 0.5 * h);
      const cd nr = index_at(c, x + 0.5 * h);
      v = -0.25 * k * k * (nl * nl + nr * nr);
    } else {
      const cd n = index_at(c, x);
      v = -0.5 * k * k * n * n;
    }
    diag_[static_cast<std::size_t>(i - 1)] = 1.0 / (h * h) + v;
  }
  off_ = -0.5 / (h * h);
}

std::vector<double> FiniteDifference::lowest_energies(int count) const {
  double lo = 0.0, hi = 0.0;
  for (const auto& d : diag_) {
    if (d.imag() != 0.0) throw std::logic_error("Sturm bisection needs a real matrix");
    lo = std::min(lo, d.real() - 2.0 * std::abs(off_));
    hi = std::max(hi, d.real() + 2.0 * std::abs(off_));
  }
  // Number of eigenvalues below x.
  auto below = [&](double x) {
    int n = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < diag_.size(); ++i) {
      q = diag_[i].real() - x - (i == 0 ? 0.0 : off_ * off_ / q);
      if (q == 0.0) q = 1e-300;
      if (q < 0.0) ++n;
    }
    return n;
  };
  std::vector<double> out;
  for (int m = 1; m <= count; ++m) {
    double a = lo, b = hi;
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
      const double mid = 0.5 * (a + b);
      if (below(mid) >= m) b = mid;
      else a = mid;
    }
    out.push_back(0.5 * (a + b));
  }
  return out;
}

std::complex<double> FiniteDifference::refine(std::complex<double> shift) const {
  const std::size_t n = diag_.size();
  std::vector<cd> y(n, cd{1.0, 0.0});
  cd e = shift;
  for (int it = 0; it < 40; ++it) {
    y = thomas(diag_, off_, e, y);
    double norm = 0.0;
    for (const auto& v : y) norm += std::norm(v);
    norm = std::sqrt(norm);
    for (auto& v : y) v /= norm;
    cd num{}, den{};
    for (std::size_t i = 0; i < n; ++i) {
      cd hy = diag_[i] * y[i];
      if (i > 0) hy += off_ * y[i - 1];
      if (i + 1 < n) hy += off_ * y[i + 1];
      num += y[i] * hy;
      den += y[i] * y[i];
    }
    const cd next = num / den;
    const bool done = std::abs(next - e) < 1e-14 * std::abs(next);
    e = next;
    if (done) break;
  }
  return e;
}

double FiniteDifference::beta(double energy) { return std::sqrt(-2.0 * energy); }

std::complex<double> FiniteDifference::beta(std::complex<double> energy) {
  cd b = std::sqrt(-2.0 * energy);
  return b.real() < 0.0 ? -b : b;
}

double slab_fundamental_beta(double n_core, double n_clad, double a, double wavelength) {
  const double k = 2.0 * std::numbers::pi / wavelength;
  const double v = k * a * std::sqrt(n_core * n_core - n_clad * n_clad);
  double lo = 0.0;
  double hi = std::min(v, 0.5 * std::numbers::pi - 1e-15);
  // f(u) = u tan u - sqrt(V^2 - u^2) is increasing on (0, min(V, pi/2)).
  auto f = [&](double u) { return u * std::tan(u) - std::sqrt(v * v - u * u); };
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) hi = mid;
    else lo = mid;
  }
  const double u = 0.5 * (lo + hi);
  return std::sqrt(k * k * n_core * n_core - u * u / (a * a));
}

}  // namespace oracle
