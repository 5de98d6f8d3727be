#pragma once

#include <string>
#include <vector>

#include "quadromech/errors.hpp"
#include "quadromech/hilbert.hpp"
#include "quadromech/model.hpp"

namespace quadromech {

/// Trace-one, Hermitian, positive-semidefinite state. Construction checks
/// the invariants (Hermitian and trace to 1e-10, min eigenvalue >= -1e-8)
/// and throws Domain if they fail. Nothing is projected.
class DensityMatrix {
 public:
  DensityMatrix(TruncatedSpace space, DenseMatrix rho);

  const TruncatedSpace& space() const noexcept { return space_; }
  const DenseMatrix& matrix() const noexcept { return rho_; }

  Complex expectation(const CsOperator& op) const;

 private:
  TruncatedSpace space_;
  DenseMatrix rho_;
};

DensityMatrix fock_state(const TruncatedSpace& space, int photons, int phonons);
DensityMatrix vacuum_state(const TruncatedSpace& space);
/// Vacuum photons times a (cutoff-renormalized) thermal phonon state.
DensityMatrix thermal_phonon_state(const TruncatedSpace& space, double mean_phonons);
/// Coherent state of one mode (cutoff-renormalized), vacuum in the other.
DensityMatrix coherent_state(const TruncatedSpace& space, Mode mode, Complex amplitude);

struct SteadyStateOptions {
  double residual_tol_per_dim = 1e-10;  ///< ||L vec(rho)||_inf < tol * dim
  double degeneracy_tol = 1e-8;         ///< relative to the largest singular value
};

/// Steady state of a Liouvillian: the (vacuum, vacuum) row of L is replaced
/// by the trace functional and the square system solved by sparse LU. If the
/// LU fails or its residual is too large, falls back to steady_state_nullspace.
/// Superoperators larger than 4096 use ILUT-preconditioned BiCGSTAB with
/// progressively tighter factorizations, and throw Singularity instead of attempting a dense fallback.
DensityMatrix steady_state(const CsOperator& liouvillian, const SteadyStateOptions& opts = {});

/// Dense route: right singular vector of the smallest singular value,
/// normalized to unit trace. Throws Degeneracy if the second smallest
/// singular value is also below tolerance.
DensityMatrix steady_state_nullspace(const CsOperator& liouvillian,
                                     const SteadyStateOptions& opts = {});

/// ||L vec(rho)||_inf
double steady_residual(const CsOperator& liouvillian, const DensityMatrix& rho);

struct Occupations {
  double n_a = 0.0;
  double n_b = 0.0;
};

Occupations occupations(const DensityMatrix& rho);

struct ObservableDelta {
  std::string name;
  double relative_change = 0.0;
};

struct ConvergenceReport {
  TruncatedSpace final_space;
  std::vector<ObservableDelta> observable_deltas;
  std::vector<TruncatedSpace> spaces_tried;
  bool converged = false;
};

struct ConvergedState {
  DensityMatrix rho;
  ConvergenceReport report;
};

class TruncationDivergenceError : public Error {
 public:
  TruncationDivergenceError(const std::string& message, ConvergenceReport report)
      : Error(ErrorCode::TruncationDivergence, message), report_(std::move(report)) {}

  const ConvergenceReport& report() const noexcept { return report_; }

 private:
  ConvergenceReport report_;
};

/// Grows both cutoffs by 50% (rounded up) until n_a, n_b and the three
/// equal-time g2 values each change by less than `tol` (relative) between
/// successive spaces. Returns the smaller space of the final pair. Throws
/// TruncationDivergenceError once the next space would exceed `max_dim`.
ConvergedState converge_truncation(const EffectiveParams& ep, const TruncatedSpace& start,
                                   double tol = 1e-4, int max_dim = 4096);

/// One growth step of converge_truncation.
TruncatedSpace grow_truncation(const TruncatedSpace& space);

}  // namespace quadromech
