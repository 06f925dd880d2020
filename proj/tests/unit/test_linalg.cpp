#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "ptbranch/linalg.hpp"

using namespace ptbranch;

namespace {

ComplexMatrix dimer(double gamma, double k) {
  CMatrix m(2, 2);
  m << Complex(0.0, gamma), k, k, Complex(0.0, -gamma);
  return ComplexMatrix(m);
}

// Real symmetric block-diagonal by parity plus i * (real symmetric, parity-odd).
ComplexMatrix random_pt_matrix(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  CMatrix m = CMatrix::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = r; c < n; ++c) {
      const bool same = (r % 2) == (c % 2);
      const Complex v = same ? Complex(g(rng), 0.0) : Complex(0.0, 0.3 * g(rng));
      m(r, c) = v;
      m(c, r) = v;
    }
  }
  return ComplexMatrix(m);
}

}  // namespace

TEST_CASE("diagonal matrix gives its entries and unit vectors") {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = 2.0;
  const auto sol = eig_complex_symmetric(ComplexMatrix(m));
  CHECK(std::abs(sol.eigenvalues[0] - Complex(1.0)) < 1e-15);
  CHECK(std::abs(sol.eigenvalues[1] - Complex(2.0)) < 1e-15);
  CHECK(std::abs(sol.eigenvectors(0, 0) - Complex(1.0)) < 1e-15);
  CHECK(std::abs(sol.eigenvectors(1, 1) - Complex(1.0)) < 1e-15);
  CHECK(std::abs(sol.eigenvectors(0, 1)) < 1e-15);
}

TEST_CASE("PT dimer below and above the exceptional point") {
  const auto below = eig_complex_symmetric(dimer(0.5, 1.0));
  CHECK(std::abs(below.eigenvalues[0] - Complex(-std::sqrt(0.75))) < 1e-12);
  CHECK(std::abs(below.eigenvalues[1] - Complex(std::sqrt(0.75))) < 1e-12);

  const auto above = eig_complex_symmetric(dimer(2.0, 1.0));
  CHECK(std::abs(above.eigenvalues[0] - Complex(0.0, -std::sqrt(3.0))) < 1e-12);
  CHECK(std::abs(above.eigenvalues[1] - Complex(0.0, std::sqrt(3.0))) < 1e-12);
}

TEST_CASE("eigenvectors are c-normalized and satisfy the eigen-equation") {
  const auto h = dimer(0.5, 1.0);
  const auto sol = eig_complex_symmetric(h);
  CHECK(sol.normalization == Normalization::c_product);
  for (Eigen::Index i = 0; i < 2; ++i) {
    const CVector v = sol.eigenvectors.col(i);
    CHECK(std::abs(c_product(v, v) - Complex(1.0)) < 1e-13);
    CHECK((h.entries() * v - sol.eigenvalues[static_cast<std::size_t>(i)] * v).norm() < 1e-13);
  }
  CHECK(std::abs(c_product(CVector(sol.eigenvectors.col(0)), CVector(sol.eigenvectors.col(1)))) <
        1e-13);
  CHECK(sol.max_residual < 1e-13);
}

TEST_CASE("near the exceptional point vectors fall back to the conventional norm") {
  const auto sol = eig_complex_symmetric(dimer(1.0 - 1e-14, 1.0));
  for (std::size_t i = 0; i < 2; ++i) {
    if (!sol.c_normalized[i]) {
      CHECK(std::abs(sol.eigenvectors.col(static_cast<Eigen::Index>(i)).norm() - 1.0) < 1e-12);
    }
    CHECK(sol.self_orthogonality[i] < 1e-5);
  }
}

TEST_CASE("self-orthogonality of a PT dimer mode near the exceptional point") {
  // For the dimer the ratio is sqrt(1 - (gamma/k)^2).
  const double gamma = 0.999;
  const auto sol = eig_complex_symmetric(dimer(gamma, 1.0));
  CHECK(sol.self_orthogonality[0] == doctest::Approx(std::sqrt(1.0 - gamma * gamma)).epsilon(1e-8));
}

TEST_CASE("construction rejects invalid matrices") {
  CHECK_THROWS_AS(ComplexMatrix(CMatrix(2, 3)), std::invalid_argument);
  CHECK_THROWS_AS(ComplexMatrix(CMatrix(0, 0)), std::invalid_argument);
  CMatrix asym(2, 2);
  asym << 1.0, 2.0, 3.0, 4.0;
  CHECK_THROWS_AS(ComplexMatrix{asym}, std::invalid_argument);
  CMatrix nan = CMatrix::Identity(2, 2);
  nan(0, 0) = std::nan("");
  CHECK_THROWS_AS(ComplexMatrix{nan}, std::invalid_argument);
}

TEST_CASE("c_product examples") {
  CHECK(c_product(CVector(Eigen::Vector2cd(1.0, 0.0)), CVector(Eigen::Vector2cd(1.0, 0.0))) ==
        Complex(1.0));
  const CVector s = Eigen::Vector2cd(1.0, Complex(0.0, 1.0));
  CHECK(std::abs(c_product(s, s)) == 0.0);
  CHECK(c_product(CVector(Eigen::Vector2cd(1.0, 2.0)), CVector(Eigen::Vector2cd(3.0, -1.0))) ==
        Complex(1.0));
  CHECK_THROWS_AS(c_product(CVector(2), CVector(3)), std::invalid_argument);
  CHECK(c_product(std::vector<Complex>{1.0, 2.0}, std::vector<Complex>{3.0, -1.0}) == Complex(1.0));
}

TEST_CASE("c_normalize examples") {
  const CVector a = c_normalize(Eigen::Vector2cd(2.0, 0.0));
  CHECK(std::abs(a(0) - Complex(1.0)) < 1e-15);
  CHECK(std::abs(a(1)) < 1e-15);
  CHECK_THROWS_AS(c_normalize(Eigen::Vector2cd(1.0, Complex(0.0, 1.0))), SelfOrthogonalError);
  try {
    c_normalize(Eigen::Vector2cd(1.0, Complex(0.0, 1.0)));
  } catch (const SelfOrthogonalError& e) {
    CHECK(std::string(e.what()).find("self-orthogonal") != std::string::npos);
  }
  const CVector b = c_normalize(Eigen::Vector2cd(1.0, 1.0));
  CHECK(std::abs(b(0) - Complex(1.0 / std::sqrt(2.0))) < 1e-15);
  CHECK(std::abs(b(1) - Complex(1.0 / std::sqrt(2.0))) < 1e-15);
}

TEST_CASE("c_product is bilinear without conjugation") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  auto random_vec = [&](int n) {
    CVector v(n);
    for (int i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
    return v;
  };
  for (int trial = 0; trial < 50; ++trial) {
    const CVector u = random_vec(9), b = random_vec(9), v = random_vec(9);
    const Complex a(g(rng), g(rng));
    const Complex lhs = c_product(CVector(a * u + b), v);
    const Complex rhs = a * c_product(u, v) + c_product(b, v);
    CHECK(std::abs(lhs - rhs) < 1e-13 * (1.0 + std::abs(lhs)));
    CHECK(std::abs(c_product(u, v) - c_product(v, u)) < 1e-13 * (1.0 + std::abs(lhs)));
  }
}

TEST_CASE("PT-structured matrices have real eigenvalues or conjugate pairs") {
  std::mt19937_64 rng(11);
  int complex_seen = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto m = random_pt_matrix(rng, 4 + trial % 9);
    const auto values = eigenvalues_complex_symmetric(m);
    for (const auto& e : values) {
      if (std::abs(e.imag()) < 1e-9) continue;
      ++complex_seen;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& f : values) best = std::min(best, std::abs(f - std::conj(e)));
      CHECK(best < 1e-9);
    }
  }
  CHECK(complex_seen > 0);
}

TEST_CASE("real symmetric input matches a reference self-adjoint solver") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int n : {3, 10, 40}) {
    Eigen::MatrixXd a(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = r; c < n; ++c) a(r, c) = a(c, r) = g(rng);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(a);
    const auto sol = eig_complex_symmetric(ComplexMatrix(a.cast<Complex>()));
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(sol.eigenvalues[static_cast<std::size_t>(i)] - Complex(ref.eigenvalues()(i))) <
            1e-10);
      const double overlap =
          std::abs(sol.eigenvectors.col(i).dot(ref.eigenvectors().col(i).cast<Complex>()));
      CHECK(overlap == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("degenerate real symmetric matrix") {
  const Eigen::MatrixXd a = Eigen::Vector4d(2.0, 2.0, 5.0, 5.0).asDiagonal();
  const auto values = eigenvalues_complex_symmetric(ComplexMatrix(a.cast<Complex>()));
  CHECK(std::abs(values[0] - Complex(2.0)) < 1e-14);
  CHECK(std::abs(values[1] - Complex(2.0)) < 1e-14);
  CHECK(std::abs(values[3] - Complex(5.0)) < 1e-14);
}

TEST_CASE("sort_spectrum orders by real part, ties by imaginary part") {
  std::vector<Complex> v{{1.0, 2.0}, {0.0, 0.0}, {1.0, -2.0}, {-3.0, 1.0}};
  sort_spectrum(v);
  CHECK(v[0] == Complex(-3.0, 1.0));
  CHECK(v[1] == Complex(0.0, 0.0));
  CHECK(v[2] == Complex(1.0, -2.0));
  CHECK(v[3] == Complex(1.0, 2.0));
}

TEST_CASE("eigenvalue-only and full decompositions agree") {
  std::mt19937_64 rng(5);
  const auto m = random_pt_matrix(rng, 30);
  const auto values = eigenvalues_complex_symmetric(m);
  const auto sol = eig_complex_symmetric(m);
  for (std::size_t i = 0; i < values.size(); ++i) {
    CHECK(std::abs(values[i] - sol.eigenvalues[i]) < 1e-10);
  }
}
