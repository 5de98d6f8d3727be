#pragma once

#include <string>
#include <vector>

#include "quadromech/hilbert.hpp"

namespace quadromech {

/// Laboratory-frame parameters of the quadratically coupled system (hbar = 1).
/// Frequencies are angular; rates are energy-damping rates.
struct PhysicalParams {
  double omega_c = 0.0;  ///< optical mode
  double omega_L = 0.0;  ///< strong optical drive
  double omega_m = 0.0;  ///< mechanical mode
  double omega_d = 0.0;  ///< weak mechanical drive
  double g = 0.0;        ///< quadratic coupling, > 0
  Complex Omega = 0.0;   ///< optical drive amplitude
  double epsilon = 0.0;  ///< mechanical drive amplitude
  double gamma_c = 1.0;
  double gamma_m = 0.1;
  double n_th = 0.0;

  double delta_c() const noexcept { return omega_c - omega_L; }

  /// Throws InvalidRate / Domain on gamma_c, gamma_m, g <= 0 or n_th < 0.
  void validate() const;
};

/// Rotating-frame parameters of the linearized Hamiltonian
///   H = delta a^+a + delta_m b^+b + J a^+b^2 + J* a b^+2 + epsilon (b^+ + b).
struct EffectiveParams {
  double delta = 0.0;
  double delta_m = 0.0;
  Complex J = 0.0;
  double epsilon = 0.0;
  double gamma_c = 1.0;
  double gamma_m = 0.1;
  double n_th = 0.0;
  Complex alpha = 0.0;   ///< optical mean field, zero when J is set directly
  double omega_0 = 0.0;  ///< shifted mechanical frequency, zero when J is set directly
  std::vector<std::string> warnings;

  void validate() const;
};

/// Steady optical mean field -2i Omega / (gamma_c + 2i delta_c). The
/// mechanical means vanish (Q_s = P_s = 0) for g > 0 and are not computed.
Complex mean_field_alpha(Complex Omega, double delta_c, double gamma_c);

/// Physical -> effective map. Validity conditions of the linearization
/// (weak mechanical drive, |delta|, |delta_m| << omega_m, |alpha|^2 >> 1)
/// are attached as warnings rather than rejected.
EffectiveParams derive_effective(const PhysicalParams& p);

CsOperator build_h_eff(const EffectiveParams& ep, const TruncatedSpace& space);

/// L = -i[H, .] + gamma_c D[a] + gamma_m (n_th + 1) D[b] + gamma_m n_th D[b^+].
/// The optical bath is at zero temperature.
CsOperator build_liouvillian(const EffectiveParams& ep, const TruncatedSpace& space);

/// Coupling that nulls the two-photon amplitude in the weak-drive limit:
/// sqrt((2 gamma_m + gamma_c)(gamma_m + gamma_c) / 8).
double j_opt(double gamma_c, double gamma_m);

/// Bose-Einstein occupation 1 / (exp(hbar omega_m / k_B T) - 1) with omega_m
/// in rad/s and T in kelvin.
double n_th_from_temperature(double omega_m, double temperature);

}  // namespace quadromech
