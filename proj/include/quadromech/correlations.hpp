#pragma once

#include <string_view>

#include "quadromech/model.hpp"
#include "quadromech/steady.hpp"

namespace quadromech {

enum class CorrelationKind { aa, bb, ab };

std::string_view to_string(CorrelationKind kind);

/// Smallest occupation accepted in a g2 denominator.
inline constexpr double kOccupationGuard = 1e-12;

/// Equal-time normalized correlations:
///   aa: <a^+a^+aa>/n_a^2, bb: <b^+b^+bb>/n_b^2, ab: <a^+a b^+b>/(n_a n_b).
/// Throws UndefinedCorrelation when an occupation is below kOccupationGuard.
double g2_zero(const DensityMatrix& rho, CorrelationKind kind);

struct CorrelationRecord {
  EffectiveParams params;
  TruncatedSpace space;
  double n_a = 0.0;
  double n_b = 0.0;
  double g2_aa_0 = 0.0;
  double g2_bb_0 = 0.0;
  double g2_ab_0 = 0.0;
};

CorrelationRecord record_from_state(const EffectiveParams& ep, const DensityMatrix& rho);

/// One steady-state solve feeding all five observables.
CorrelationRecord record(const EffectiveParams& ep, const TruncatedSpace& space);

}  // namespace quadromech
