#include "quadromech/weakdrive.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "quadromech/errors.hpp"

namespace quadromech {

namespace {

constexpr Complex kI{0.0, 1.0};

// Unknown ordering of the 8x8 system (c00 is pinned).
enum Slot { k01, k02, k10, k03, k11, k04, k12, k20, kSlots };

void require_resonant(const EffectiveParams& ep) {
  ep.validate();
  if (ep.delta != 0.0 || ep.delta_m != 0.0) {
    throw Error(ErrorCode::Domain, "weak-drive amplitudes are derived for delta = delta_m = 0");
  }
  if (!(ep.epsilon > 0.0)) {
    throw Error(ErrorCode::Domain, "weak-drive amplitudes need epsilon > 0");
  }
}

double max_abs(std::initializer_list<Complex> values) {
  double m = 0.0;
  for (const Complex& v : values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

bool AnsatzCoefficients::hierarchy_holds(double ratio) const {
  const double tiers[5] = {std::abs(c00), std::abs(c01), max_abs({c02, c10}),
                           max_abs({c03, c11}), max_abs({c04, c12, c20})};
  for (int k = 1; k < 5; ++k) {
    if (tiers[k] > ratio * tiers[k - 1]) return false;
  }
  return true;
}

std::array<Complex, 8> coefficient_residuals(const EffectiveParams& ep,
                                             const AnsatzCoefficients& c) {
  const double s2 = std::sqrt(2.0);
  const double s3 = std::sqrt(3.0);
  const double s6 = std::sqrt(6.0);
  const double gc = ep.gamma_c;
  const double gm = ep.gamma_m;
  const double eps = ep.epsilon;
  const Complex j = ep.J;
  const Complex jc = std::conj(ep.J);
  return {
      -gm / 2.0 * c.c01 - kI * eps * c.c00,
      -gc / 2.0 * c.c10 - kI * s2 * j * c.c02,
      -gm * c.c02 - kI * s2 * jc * c.c10 - kI * s2 * eps * c.c01,
      -(gc + gm) / 2.0 * c.c11 - kI * s6 * j * c.c03 - kI * eps * c.c10,
      -1.5 * gm * c.c03 - kI * s6 * jc * c.c11 - kI * s3 * eps * c.c02,
      -gc * c.c20 - 2.0 * kI * j * c.c12,
      -(gc + 2.0 * gm) / 2.0 * c.c12 - 2.0 * kI * s3 * j * c.c04 - 2.0 * kI * jc * c.c20 -
          kI * s2 * eps * c.c11,
      -2.0 * gm * c.c04 - 2.0 * kI * s3 * jc * c.c12 - 2.0 * kI * eps * c.c03,
  };
}

AnsatzCoefficients solve_coefficients(const EffectiveParams& ep) {
  require_resonant(ep);

  // The residuals are affine in the unknowns: column k is r(e_k) - r(0).
  AnsatzCoefficients base;
  const auto r0 = coefficient_residuals(ep, base);
  Eigen::Matrix<Complex, kSlots, kSlots> system;
  Eigen::Matrix<Complex, kSlots, 1> rhs;
  const auto set_slot = [](AnsatzCoefficients& c, int slot, Complex v) {
    Complex* fields[kSlots] = {&c.c01, &c.c02, &c.c10, &c.c03, &c.c11, &c.c04, &c.c12, &c.c20};
    *fields[slot] = v;
  };
  for (int col = 0; col < kSlots; ++col) {
    AnsatzCoefficients probe;
    set_slot(probe, col, 1.0);
    const auto r = coefficient_residuals(ep, probe);
    for (int row = 0; row < kSlots; ++row) system(row, col) = r[row] - r0[row];
  }
  for (int row = 0; row < kSlots; ++row) rhs(row) = -r0[row];

  Eigen::FullPivLU<Eigen::Matrix<Complex, kSlots, kSlots>> lu(system);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::Singularity, "weak-drive amplitude system is singular");
  }
  const Eigen::Matrix<Complex, kSlots, 1> x = lu.solve(rhs);

  AnsatzCoefficients c;
  for (int k = 0; k < kSlots; ++k) set_slot(c, k, x(k));
  return c;
}

AnsatzCorrelations ansatz_g2(const AnsatzCoefficients& c) {
  const double p01 = std::norm(c.c01), p02 = std::norm(c.c02), p10 = std::norm(c.c10);
  const double p03 = std::norm(c.c03), p11 = std::norm(c.c11);
  const double p04 = std::norm(c.c04), p12 = std::norm(c.c12), p20 = std::norm(c.c20);

  AnsatzCorrelations out;
  out.n_a = p10 + p11 + p12 + 2.0 * p20;
  out.n_b = p01 + 2.0 * p02 + 3.0 * p03 + p11 + 4.0 * p04 + 2.0 * p12;
  // <a^+a^+aa> = 2 p20; <b^+b^+bb> = sum m(m-1) p_nm; <a^+a b^+b> = sum n m p_nm.
  const double aa = 2.0 * p20;
  const double bb = 2.0 * p02 + 6.0 * p03 + 2.0 * p12 + 12.0 * p04;
  const double ab = p11 + 2.0 * p12;
  out.g2_aa_0 = out.n_a > 0.0 ? aa / (out.n_a * out.n_a) : 0.0;
  out.g2_bb_0 = out.n_b > 0.0 ? bb / (out.n_b * out.n_b) : 0.0;
  out.g2_ab_0 = out.n_a > 0.0 && out.n_b > 0.0 ? ab / (out.n_a * out.n_b) : 0.0;
  return out;
}

SpectrumReport manifold_spectrum(double J, int manifold) {
  if (manifold < 0 || manifold > 4) {
    throw Error(ErrorCode::Domain,
                "manifold index must be in 0..4, got " + std::to_string(manifold));
  }
  if (!std::isfinite(J)) throw Error(ErrorCode::Domain, "coupling must be finite");

  EffectiveParams ep;
  ep.J = J;
  const TruncatedSpace space(2, 4);
  const DenseMatrix h = build_h_eff(ep, space).dense();

  SpectrumReport report;
  report.manifold = manifold;
  report.coupling = J;
  std::vector<int> idx;
  for (int n = manifold / 2; n >= 0; --n) {
    report.basis.emplace_back(n, manifold - 2 * n);
    idx.push_back(space.index(n, manifold - 2 * n));
  }
  const auto size = static_cast<Eigen::Index>(idx.size());
  DenseMatrix block(size, size);
  for (Eigen::Index r = 0; r < size; ++r) {
    for (Eigen::Index c = 0; c < size; ++c) block(r, c) = h(idx[r], idx[c]);
  }

  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(block);
  for (Eigen::Index k = 0; k < size; ++k) {
    report.eigenvalues.push_back(eig.eigenvalues()(k));
    DenseVector v = eig.eigenvectors().col(k);
    Eigen::Index pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    v *= std::abs(v(pivot)) / v(pivot);
    v.normalize();
    report.eigenvectors.emplace_back(v.data(), v.data() + v.size());
  }
  return report;
}

}  // namespace quadromech
