#include "quadromech/correlations.hpp"

#include <sstream>

namespace quadromech {

std::string_view to_string(CorrelationKind kind) {
  switch (kind) {
    case CorrelationKind::aa: return "aa";
    case CorrelationKind::bb: return "bb";
    case CorrelationKind::ab: return "ab";
  }
  return "?";
}

namespace {

void guard(double occupation, const char* name) {
  if (!(occupation > kOccupationGuard)) {
    std::ostringstream msg;
    msg << "g2 undefined: " << name << " = " << occupation << " is below " << kOccupationGuard;
    throw Error(ErrorCode::UndefinedCorrelation, msg.str());
  }
}

}  // namespace

double g2_zero(const DensityMatrix& rho, CorrelationKind kind) {
  const auto [a, b] = ladder_operators(rho.space());
  const CsOperator ad = a.adjoint();
  const CsOperator bd = b.adjoint();
  const Occupations occ = occupations(rho);

  switch (kind) {
    case CorrelationKind::aa:
      guard(occ.n_a, "n_a");
      return rho.expectation(ad * ad * a * a).real() / (occ.n_a * occ.n_a);
    case CorrelationKind::bb:
      guard(occ.n_b, "n_b");
      return rho.expectation(bd * bd * b * b).real() / (occ.n_b * occ.n_b);
    case CorrelationKind::ab:
      guard(occ.n_a, "n_a");
      guard(occ.n_b, "n_b");
      return rho.expectation(ad * a * bd * b).real() / (occ.n_a * occ.n_b);
  }
  throw Error(ErrorCode::Internal, "unknown correlation kind");
}

CorrelationRecord record_from_state(const EffectiveParams& ep, const DensityMatrix& rho) {
  const Occupations occ = occupations(rho);
  CorrelationRecord rec{ep, rho.space()};
  rec.n_a = occ.n_a;
  rec.n_b = occ.n_b;
  rec.g2_aa_0 = g2_zero(rho, CorrelationKind::aa);
  rec.g2_bb_0 = g2_zero(rho, CorrelationKind::bb);
  rec.g2_ab_0 = g2_zero(rho, CorrelationKind::ab);
  return rec;
}

CorrelationRecord record(const EffectiveParams& ep, const TruncatedSpace& space) {
  return record_from_state(ep, steady_state(build_liouvillian(ep, space)));
}

}  // namespace quadromech
