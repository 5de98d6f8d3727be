#pragma once

#include <span>
#include <vector>

#include "quadromech/correlations.hpp"
#include "quadromech/hilbert.hpp"
#include "quadromech/steady.hpp"

namespace quadromech {

enum class PropagationMethod { Automatic, MatrixExponential, RungeKutta };

struct PropagationOptions {
  PropagationMethod method = PropagationMethod::Automatic;
  double rtol = 1e-9;
  double atol = 1e-12;
  /// Automatic uses the dense matrix exponential up to this superoperator size.
  Eigen::Index expm_max_superop_dim = 1024;
};

/// Method Automatic resolves to for this Liouvillian.
PropagationMethod resolve_method(const CsOperator& liouvillian, const PropagationOptions& opts);

/// unvec(exp(L t) vec(X)). Throws Domain for t < 0.
DenseMatrix propagate(const CsOperator& liouvillian, const DenseMatrix& x, double t,
                      const PropagationOptions& opts = {});
CsOperator propagate(const CsOperator& liouvillian, const CsOperator& x, double t,
                     const PropagationOptions& opts = {});

/// exp(L t_k) v for ascending, non-negative t_k, sharing work between points.
std::vector<DenseVector> propagate_series(const CsOperator& liouvillian, const DenseVector& v,
                                          std::span<const double> times,
                                          const PropagationOptions& opts = {});

struct CorrelationSeries {
  CorrelationKind kind = CorrelationKind::aa;
  std::vector<double> taus;
  std::vector<double> values;
};

/// Two-time correlations by the quantum regression theorem:
///   aa:        Tr[a^+a e^{L tau}(a rho a^+)] / n_a^2
///   bb:        Tr[b^+b e^{L tau}(b rho b^+)] / n_b^2
///   ab, tau>=0: Tr[b^+b e^{L tau}(a rho a^+)] / (n_a n_b)
///   ab, tau<0:  Tr[a^+a e^{L |tau|}(b rho b^+)] / (n_a n_b)
/// Negative delays swap operator roles; nothing is integrated backwards.
CorrelationSeries g2_tau(const CsOperator& liouvillian, const DensityMatrix& rho_ss,
                         CorrelationKind kind, std::span<const double> taus,
                         const PropagationOptions& opts = {});

/// Uniform delay grid over [0, 20 * 2 pi / delta_m) used for period detection.
std::vector<double> oscillation_window(double delta_m, int points = 512);

struct SpectralPeak {
  double frequency = 0.0;  ///< cycles per unit delay
  double bin_width = 0.0;
};

/// Dominant non-DC frequency of a uniformly sampled series after removing a
/// least-squares cubic trend and applying a Hann window.
SpectralPeak dominant_frequency(std::span<const double> taus, std::span<const double> values);

}  // namespace quadromech
