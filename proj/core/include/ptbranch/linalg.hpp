#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ptbranch {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Relative |(v|v)| / <v|v> below which a vector is treated as self-orthogonal.
inline constexpr double kDefaultSelfOrthogonalThreshold = 1e-10;

class LinalgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by c_normalize when (v|v) vanishes. This happens exactly at an
/// exceptional point, so callers that hunt for one catch it on purpose.
class SelfOrthogonalError : public LinalgError {
 public:
  SelfOrthogonalError(double ratio, double threshold);

  double ratio() const noexcept { return ratio_; }
  double threshold() const noexcept { return threshold_; }

 private:
  double ratio_;
  double threshold_;
};

class ConvergenceError : public LinalgError {
 public:
  ConvergenceError(std::string what, std::size_t converged, std::size_t total);

  std::size_t converged() const noexcept { return converged_; }
  std::size_t total() const noexcept { return total_; }

 private:
  std::size_t converged_;
  std::size_t total_;
};

/// Dense square complex matrix, symmetric under plain transposition (M = M^T).
class ComplexMatrix {
 public:
  /// Throws std::invalid_argument for non-square, non-finite or
  /// non-symmetric input (relative tolerance 1e-12 on max |M - M^T|).
  explicit ComplexMatrix(CMatrix entries);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  const CMatrix& entries() const noexcept { return entries_; }
  Complex operator()(std::size_t row, std::size_t col) const {
    return entries_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  }

  /// max |M - M^T| / max |M|.
  static double symmetry_defect(const CMatrix& m);

 private:
  CMatrix entries_;
};

enum class Normalization { c_product, conventional };

struct EigOptions {
  bool compute_vectors = true;
  Normalization normalization = Normalization::c_product;
  double self_orthogonal_threshold = kDefaultSelfOrthogonalThreshold;
};

/// Eigenpairs sorted by real part, ties broken by imaginary part.
struct EigenSolution {
  std::vector<Complex> eigenvalues;
  CMatrix eigenvectors;  // column i pairs with eigenvalues[i]; empty if not requested
  Normalization normalization = Normalization::c_product;
  // |(v|v)| / <v|v> per pair, independent of the normalization applied.
  std::vector<double> self_orthogonality;
  // False where c-normalization was requested but the vector was
  // self-orthogonal; that column keeps unit conventional norm instead.
  std::vector<bool> c_normalized;
  double max_residual = 0.0;  // max_i ||M v_i - E_i v_i|| / (||M|| ||v_i||)

  std::size_t size() const noexcept { return eigenvalues.size(); }
  bool has_vectors() const noexcept { return eigenvectors.size() > 0; }
};

/// Full dense eigendecomposition (Hessenberg reduction + shifted QR).
/// Throws ConvergenceError if the QR iteration fails or the residual
/// bound 1e-10 is violated.
EigenSolution eig_complex_symmetric(const ComplexMatrix& m, const EigOptions& options = {});

/// Eigenvalues only, sorted the same way as eig_complex_symmetric.
std::vector<Complex> eigenvalues_complex_symmetric(const ComplexMatrix& m);

/// Bilinear product sum_k u_k v_k (no conjugation).
Complex c_product(const CVector& u, const CVector& v);
Complex c_product(const std::vector<Complex>& u, const std::vector<Complex>& v);

/// |(v|v)| / <v|v>; 1 for real vectors, 0 for self-orthogonal ones.
double self_orthogonality(const CVector& v);

/// Returns v / sqrt((v|v)) using the principal root.
CVector c_normalize(const CVector& v, double threshold = kDefaultSelfOrthogonalThreshold);

/// Sort order used for every spectrum in the library.
void sort_spectrum(std::vector<Complex>& values);

}  // namespace ptbranch
