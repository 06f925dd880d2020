#pragma once

#include <string>
#include <vector>

#include "ptbranch/linalg.hpp"
#include "ptbranch/waveguide.hpp"

namespace ptbranch {

/// Dirichlet sine basis on [-L/2, L/2]:
///   phi_m(x) = sqrt(2/L) sin(m pi (x + L/2) / L),  m = 1..n_funcs.
/// phi_m is even about x = 0 for odd m and odd for even m. Coefficient
/// vectors store phi_1 at index 0.
struct SineBasis {
  double box_length = 90.0;  // um
  int n_funcs = 600;

  /// Throws std::invalid_argument unless box_length > 2 * half_extent
  /// and n_funcs >= 16.
  void validate(double structure_half_extent) const;

  double wavenumber(int m) const;  // m pi / L
  double evaluate(int m, double x) const;
  static bool is_even(int m) { return m % 2 == 1; }

  /// +1 / -1 parity of each basis function, in coefficient order.
  std::vector<int> parities() const;

  Complex evaluate_field(const CVector& coeffs, double x) const;
};

/// H = T + V with T_mm = (m pi / L)^2 / 2 and V_mm' the exact integral of
/// the piecewise-constant potential against phi_m phi_m'. Entries coupling
/// basis functions of equal parity only see the even part of V and those of
/// opposite parity only the odd part, so a PT-symmetric profile yields
/// Re H block-diagonal and Im H block-off-diagonal with exact zeros.
ComplexMatrix assemble_hamiltonian(const PotentialProfile& potential, const SineBasis& basis);

enum class Parity { even, odd, none };
std::string to_string(Parity p);

struct GuidedMode {
  Complex beta;      // 1/um, Re beta > 0
  Complex energy;    // -beta^2 / 2
  Complex n_eff;     // beta / k
  CVector field;     // basis coefficients, c-normalized when possible
  Parity parity = Parity::none;
  int label = 0;
  double self_orthogonality = 1.0;
  bool c_normalized = true;
};

struct ModeSet {
  std::vector<GuidedMode> modes;
  bool labels_reset = false;  // set by track_modes on cardinality mismatch

  std::size_t size() const noexcept { return modes.size(); }
  const GuidedMode& by_label(int label) const;
};

class NoGuidedModeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// beta = sqrt(-2E) with Re beta > 0.
Complex beta_from_energy(Complex energy);

/// Keeps eigenpairs with n0 < Re(beta)/k < n0 + delta_n, classifies the
/// parity of Re(field) (0.99 dominance of one basis parity class), labels
/// modes 0.. in order of decreasing Re(beta).
ModeSet solve_modes(const ComplexMatrix& h, const SineBasis& basis, const CouplerGeometry& g);
ModeSet modes_from_solution(const EigenSolution& sol, const SineBasis& basis,
                            const CouplerGeometry& g);

/// Permutes labels of `next` to maximise sum_i |(prev_i|next_sigma(i))|,
/// each overlap scaled by the conventional norms. Ties go to the
/// lexicographically first permutation. The result is ordered by label.
ModeSet track_modes(const ModeSet& prev, const ModeSet& next);

/// Convenience pipeline: geometry -> index -> potential -> H.
ComplexMatrix coupler_hamiltonian(const CouplerGeometry& g, const SineBasis& basis);
ModeSet solve_coupler(const CouplerGeometry& g, const SineBasis& basis);

}  // namespace ptbranch
