#include "quadromech/oracles.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>

#include "quadromech/correlations.hpp"
#include "quadromech/regression.hpp"
#include "quadromech/steady.hpp"
#include "quadromech/weakdrive.hpp"

namespace quadromech {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

OracleResult guarded(const std::string& name, const std::function<OracleResult()>& check) {
  try {
    OracleResult r = check();
    r.name = name;
    return r;
  } catch (const std::exception& e) {
    return {name, false, std::string("threw: ") + e.what()};
  }
}

EffectiveParams resonant_point(double J, double epsilon) {
  EffectiveParams ep;
  ep.J = J;
  ep.epsilon = epsilon;
  ep.gamma_m = 0.1;
  return ep;
}

// c20 is either real or imaginary along the real-J line, so Re + Im changes
// sign at its zero.
double c20_signed(double J) {
  const Complex c = solve_coefficients(resonant_point(J, 1e-3)).c20;
  return c.real() + c.imag();
}

OracleResult check_j_opt() {
  double lo = 0.05, hi = 1.5;
  double flo = c20_signed(lo);
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = c20_signed(mid);
    if ((fmid > 0) == (flo > 0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  const double root = 0.5 * (lo + hi);
  const double closed = j_opt(1.0, 0.1);
  return {"", std::abs(root - closed) < 1e-6,
          fmt("closed form %.8f, root of c20 %.8f", closed, root)};
}

OracleResult check_spectra() {
  const double J = 0.7;
  const std::vector<std::vector<double>> expected = {
      {0.0}, {0.0}, {-std::sqrt(2.0) * J, std::sqrt(2.0) * J},
      {-std::sqrt(6.0) * J, std::sqrt(6.0) * J}, {-4.0 * J, 0.0, 4.0 * J}};
  double worst = 0.0;
  for (int n = 0; n <= 4; ++n) {
    const SpectrumReport s = manifold_spectrum(J, n);
    if (s.eigenvalues.size() != expected[n].size()) return {"", false, "wrong manifold size"};
    for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
      worst = std::max(worst, std::abs(s.eigenvalues[k] - expected[n][k]));
    }
  }
  return {"", worst < 1e-10, fmt("max eigenvalue error %.3g", worst)};
}

OracleResult check_thermal() {
  EffectiveParams ep;
  ep.n_th = 0.1;
  const DensityMatrix rho = steady_state(build_liouvillian(ep, TruncatedSpace::standard()));
  const double nb = occupations(rho).n_b;
  const double g2 = g2_zero(rho, CorrelationKind::bb);
  return {"", std::abs(nb - 0.1) < 1e-6 && std::abs(g2 - 2.0) < 1e-3,
          fmt("n_b %.10f, g2_bb %.6f", nb, g2)};
}

OracleResult check_lu_vs_nullspace() {
  EffectiveParams ep = resonant_point(0.406, 0.05);
  ep.delta = 0.3;
  ep.delta_m = -0.2;
  ep.n_th = 0.01;
  const CsOperator L = build_liouvillian(ep, TruncatedSpace(2, 6));
  const DenseMatrix lu = steady_state(L).matrix();
  const DenseMatrix svd = steady_state_nullspace(L).matrix();
  const double diff = (lu - svd).cwiseAbs().maxCoeff();
  return {"", diff < 1e-8, fmt("max |rho_lu - rho_svd| = %.3g", diff)};
}

OracleResult check_ansatz() {
  EffectiveParams ep = resonant_point(j_opt(1.0, 0.1), 0.005);
  const AnsatzCorrelations a = ansatz_g2(solve_coefficients(ep));
  const CorrelationRecord m = record(ep, TruncatedSpace::standard());
  const double dbb = std::abs(a.g2_bb_0 - m.g2_bb_0) / m.g2_bb_0;
  const double dab = std::abs(a.g2_ab_0 - m.g2_ab_0) / m.g2_ab_0;
  const bool ok = dbb < 0.1 && dab < 0.1 && a.g2_aa_0 < 1e-3 && m.g2_aa_0 < 1e-3;
  return {"", ok, fmt("relative gap bb %.3g, ab %.3g", dbb, dab)};
}

OracleResult check_propagators() {
  EffectiveParams ep = resonant_point(0.8, 0.1);
  ep.delta_m = 0.5;
  ep.delta = 1.0;
  const TruncatedSpace space(2, 5);
  const CsOperator L = build_liouvillian(ep, space);
  const DenseMatrix rho0 = coherent_state(space, Mode::Phonon, 0.6).matrix();
  PropagationOptions expm, rk;
  expm.method = PropagationMethod::MatrixExponential;
  rk.method = PropagationMethod::RungeKutta;
  const DenseMatrix x = propagate(L, rho0, 3.0, expm);
  const DenseMatrix y = propagate(L, rho0, 3.0, rk);
  const double diff = (x - y).cwiseAbs().maxCoeff();
  const double trace_err = std::abs(x.trace() - 1.0);
  return {"", diff < 1e-7 && trace_err < 1e-10,
          fmt("expm vs rk45 %.3g, trace error %.3g", diff, trace_err)};
}

OracleResult check_steady_invariants() {
  EffectiveParams ep = resonant_point(1.3, 0.2);
  ep.delta = -0.7;
  ep.delta_m = 0.4;
  ep.n_th = 0.05;
  const CsOperator L = build_liouvillian(ep, TruncatedSpace::standard());
  const DensityMatrix rho = steady_state(L);
  const double residual = steady_residual(L, rho);
  const double limit = 1e-10 * static_cast<double>(rho.matrix().rows());
  return {"", residual < limit, fmt("residual %.3g (limit %.3g)", residual, limit)};
}

}  // namespace

std::vector<OracleResult> run_oracle_suite() {
  return {
      guarded("j_opt closed form vs c20 root", check_j_opt),
      guarded("manifold spectra", check_spectra),
      guarded("thermal fixed point", check_thermal),
      guarded("steady state: LU vs SVD null vector", check_lu_vs_nullspace),
      guarded("weak-drive ansatz vs master equation", check_ansatz),
      guarded("expm vs rk45 propagation", check_propagators),
      guarded("steady-state residual", check_steady_invariants),
  };
}

}  // namespace quadromech
