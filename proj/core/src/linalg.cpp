#include "ptbranch/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace ptbranch {

namespace {

std::string self_orthogonal_message(double ratio, double threshold) {
  std::ostringstream os;
  os << "self-orthogonal: at or near exceptional point (|(v|v)|/<v|v> = " << ratio
     << " < " << threshold << ")";
  return os.str();
}

// Indices that sort values by real part, ties (within rounding) by imaginary part.
std::vector<std::size_t> spectrum_order(const std::vector<Complex>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a].real() < values[b].real();
  });
  double scale = 1.0;
  for (const auto& v : values) scale = std::max(scale, std::abs(v));
  const double tie = 1e-12 * scale;
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() &&
           values[order[end]].real() - values[order[end - 1]].real() <= tie) {
      ++end;
    }
    std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(start),
                     order.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) {
                       return values[a].imag() < values[b].imag();
                     });
    start = end;
  }
  return order;
}

struct RawEig {
  std::vector<Complex> values;
  CMatrix vectors;
};

RawEig run_zgeev(const ComplexMatrix& m, bool vectors) {
  const auto n = static_cast<lapack_int>(m.dim());
  CMatrix a = m.entries();  // column-major copy, overwritten by LAPACK
  RawEig out;
  out.values.resize(static_cast<std::size_t>(n));
  if (vectors) out.vectors.resize(n, n);
  Complex dummy{};
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', vectors ? 'V' : 'N', n, a.data(), n, out.values.data(), &dummy, 1,
      vectors ? out.vectors.data() : &dummy, vectors ? n : 1);
  if (info < 0) {
    throw LinalgError("zgeev: illegal argument " + std::to_string(-info));
  }
  if (info > 0) {
    // Eigenvalues info..n-1 (0-based) converged; the rest did not.
    throw ConvergenceError("QR iteration failed to converge", static_cast<std::size_t>(n - info),
                           static_cast<std::size_t>(n));
  }
  return out;
}

// Flip sign so the largest-magnitude component has positive real part.
void fix_sign(Eigen::Ref<CVector> v) {
  Eigen::Index at = 0;
  v.cwiseAbs().maxCoeff(&at);
  const Complex pivot = v(at);
  const double key = std::abs(pivot.real()) > 1e-3 * std::abs(pivot) ? pivot.real() : pivot.imag();
  if (key < 0.0) v = -v;
}

}  // namespace

SelfOrthogonalError::SelfOrthogonalError(double ratio, double threshold)
    : LinalgError(self_orthogonal_message(ratio, threshold)), ratio_(ratio), threshold_(threshold) {}

ConvergenceError::ConvergenceError(std::string what, std::size_t converged, std::size_t total)
    : LinalgError(what + " (" + std::to_string(converged) + " of " + std::to_string(total) +
                  " eigenvalues converged)"),
      converged_(converged),
      total_(total) {}

double ComplexMatrix::symmetry_defect(const CMatrix& m) {
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

ComplexMatrix::ComplexMatrix(CMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) {
    throw std::invalid_argument("ComplexMatrix: non-square input (" +
                                std::to_string(entries_.rows()) + "x" +
                                std::to_string(entries_.cols()) + ")");
  }
  if (entries_.rows() == 0) throw std::invalid_argument("ComplexMatrix: empty matrix");
  if (!entries_.allFinite()) throw std::invalid_argument("ComplexMatrix: non-finite entries");
  const double defect = symmetry_defect(entries_);
  if (defect > 1e-12) {
    std::ostringstream os;
    os << "ComplexMatrix: not complex symmetric (relative defect " << defect << ")";
    throw std::invalid_argument(os.str());
  }
}

void sort_spectrum(std::vector<Complex>& values) {
  const auto order = spectrum_order(values);
  std::vector<Complex> sorted;
  sorted.reserve(values.size());
  for (auto i : order) sorted.push_back(values[i]);
  values = std::move(sorted);
}

std::vector<Complex> eigenvalues_complex_symmetric(const ComplexMatrix& m) {
  auto raw = run_zgeev(m, false);
  sort_spectrum(raw.values);
  return raw.values;
}

EigenSolution eig_complex_symmetric(const ComplexMatrix& m, const EigOptions& options) {
  auto raw = run_zgeev(m, options.compute_vectors);
  const auto order = spectrum_order(raw.values);
  const auto n = static_cast<Eigen::Index>(m.dim());

  EigenSolution sol;
  sol.normalization = options.normalization;
  sol.eigenvalues.reserve(order.size());
  for (auto i : order) sol.eigenvalues.push_back(raw.values[i]);
  if (!options.compute_vectors) return sol;

  sol.eigenvectors.resize(n, n);
  sol.self_orthogonality.resize(order.size());
  sol.c_normalized.assign(order.size(), false);
  for (Eigen::Index col = 0; col < n; ++col) {
    CVector v = raw.vectors.col(static_cast<Eigen::Index>(order[static_cast<std::size_t>(col)]));
    v.normalize();
    sol.self_orthogonality[static_cast<std::size_t>(col)] = self_orthogonality(v);
    if (options.normalization == Normalization::c_product) {
      try {
        v = c_normalize(v, options.self_orthogonal_threshold);
        sol.c_normalized[static_cast<std::size_t>(col)] = true;
      } catch (const SelfOrthogonalError&) {
        // keep unit conventional norm
      }
    }
    fix_sign(v);
    sol.eigenvectors.col(col) = v;
  }

  const double norm = m.entries().norm();
  CMatrix residual = m.entries() * sol.eigenvectors;
  for (Eigen::Index col = 0; col < n; ++col) {
    residual.col(col) -= sol.eigenvalues[static_cast<std::size_t>(col)] * sol.eigenvectors.col(col);
    const double r = residual.col(col).norm() / (norm * sol.eigenvectors.col(col).norm());
    sol.max_residual = std::max(sol.max_residual, r);
  }
  if (!(sol.max_residual <= 1e-10)) {
    std::ostringstream os;
    os << "eigenpair residual " << sol.max_residual << " exceeds 1e-10";
    throw ConvergenceError(os.str(), 0, order.size());
  }
  return sol;
}

Complex c_product(const CVector& u, const CVector& v) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("c_product: length mismatch (" + std::to_string(u.size()) +
                                " vs " + std::to_string(v.size()) + ")");
  }
  return (u.array() * v.array()).sum();
}

Complex c_product(const std::vector<Complex>& u, const std::vector<Complex>& v) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("c_product: length mismatch (" + std::to_string(u.size()) +
                                " vs " + std::to_string(v.size()) + ")");
  }
  return std::inner_product(u.begin(), u.end(), v.begin(), Complex{});
}

double self_orthogonality(const CVector& v) {
  const double conventional = v.squaredNorm();
  if (conventional == 0.0) return 0.0;
  return std::abs(c_product(v, v)) / conventional;
}

CVector c_normalize(const CVector& v, double threshold) {
  const double ratio = self_orthogonality(v);
  if (!(ratio >= threshold)) throw SelfOrthogonalError(ratio, threshold);
  return v / std::sqrt(c_product(v, v));
}

}  // namespace ptbranch
