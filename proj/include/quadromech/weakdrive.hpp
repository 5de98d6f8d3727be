#pragma once

#include <array>
#include <utility>
#include <vector>

#include "quadromech/model.hpp"

namespace quadromech {

/// Amplitudes of the weak-drive wavefunction truncated to two photons and
/// four phonons, |psi> = sum c_nm |n, m>. c00 is pinned to 1.
struct AnsatzCoefficients {
  Complex c00 = 1.0;
  Complex c01 = 0.0;
  Complex c02 = 0.0;
  Complex c10 = 0.0;
  Complex c03 = 0.0;
  Complex c11 = 0.0;
  Complex c04 = 0.0;
  Complex c12 = 0.0;
  Complex c20 = 0.0;

  /// Each excitation tier is at most `ratio` times the previous tier's
  /// largest amplitude: c00 > c01 > {c02, c10} > {c03, c11} > {c04, c12, c20}.
  bool hierarchy_holds(double ratio = 0.5) const;
};

/// Steady amplitudes at delta = delta_m = 0 from the damped Schroedinger
/// equations, keeping only the feed from lower tiers:
///   0 = -gamma_m/2 c01 - i eps c00
///   0 = -gamma_c/2 c10 - i sqrt2 J c02
///   0 = -gamma_m c02 - i sqrt2 J* c10 - i sqrt2 eps c01
///   0 = -(gamma_c+gamma_m)/2 c11 - i sqrt6 J c03 - i eps c10
///   0 = -3 gamma_m/2 c03 - i sqrt6 J* c11 - i sqrt3 eps c02
///   0 = -gamma_c c20 - 2i J c12
///   0 = -(gamma_c+2 gamma_m)/2 c12 - 2i sqrt3 J c04 - 2i J* c20 - i sqrt2 eps c11
///   0 = -2 gamma_m c04 - 2i sqrt3 J* c12 - 2i eps c03
/// J* equals J for the real couplings used throughout.
/// Throws Domain off resonance or for eps <= 0, Singularity if the 8x8
/// system is singular.
AnsatzCoefficients solve_coefficients(const EffectiveParams& ep);

/// Right-hand sides of the eight equations above for the given amplitudes.
std::array<Complex, 8> coefficient_residuals(const EffectiveParams& ep,
                                             const AnsatzCoefficients& c);

struct AnsatzCorrelations {
  double n_a = 0.0;
  double n_b = 0.0;
  double g2_aa_0 = 0.0;
  double g2_bb_0 = 0.0;
  double g2_ab_0 = 0.0;
};

/// Pure-state correlations from the occupation probabilities |c_nm|^2.
AnsatzCorrelations ansatz_g2(const AnsatzCoefficients& c);

struct SpectrumReport {
  int manifold = 0;  ///< N = 2 n_a + n_b
  double coupling = 0.0;
  std::vector<std::pair<int, int>> basis;  ///< (photons, phonons) labels
  std::vector<double> eigenvalues;         ///< ascending
  std::vector<std::vector<Complex>> eigenvectors;
};

/// Diagonalizes H_eff (delta = delta_m = eps = 0) inside the manifold
/// 2 n_a + n_b = N, N in 0..4. Eigenvectors are unit norm with their largest
/// component made real and positive.
SpectrumReport manifold_spectrum(double J, int manifold);

}  // namespace quadromech
