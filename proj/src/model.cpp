#include "quadromech/model.hpp"

#include <cmath>
#include <sstream>

#include "quadromech/errors.hpp"

namespace quadromech {

namespace {

// "much smaller than" is read as a factor of ten.
constexpr double kSmallRatio = 0.1;

void require_positive_rate(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << name << " must be a positive finite rate, got " << value;
    throw Error(ErrorCode::InvalidRate, msg.str());
  }
}

void require_thermal(double n_th) {
  if (!(n_th >= 0.0) || !std::isfinite(n_th)) {
    std::ostringstream msg;
    msg << "n_th must be finite and non-negative, got " << n_th;
    throw Error(ErrorCode::Domain, msg.str());
  }
}

void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::Domain, std::string(name) + " must be finite");
  }
}

}  // namespace

void PhysicalParams::validate() const {
  require_positive_rate(gamma_c, "gamma_c");
  require_positive_rate(gamma_m, "gamma_m");
  require_positive_rate(g, "g");
  require_thermal(n_th);
  require_finite(omega_c, "omega_c");
  require_finite(omega_L, "omega_L");
  require_finite(omega_m, "omega_m");
  require_finite(omega_d, "omega_d");
  require_finite(epsilon, "epsilon");
  require_finite(std::abs(Omega), "Omega");
}

void EffectiveParams::validate() const {
  require_positive_rate(gamma_c, "gamma_c");
  require_positive_rate(gamma_m, "gamma_m");
  require_thermal(n_th);
  require_finite(delta, "delta");
  require_finite(delta_m, "delta_m");
  require_finite(std::abs(J), "J");
  require_finite(epsilon, "epsilon");
}

Complex mean_field_alpha(Complex Omega, double delta_c, double gamma_c) {
  require_positive_rate(gamma_c, "gamma_c");
  const Complex i(0.0, 1.0);
  return -2.0 * i * Omega / (gamma_c + 2.0 * i * delta_c);
}

EffectiveParams derive_effective(const PhysicalParams& p) {
  p.validate();
  EffectiveParams ep;
  ep.alpha = mean_field_alpha(p.Omega, p.delta_c(), p.gamma_c);
  const double shift = 2.0 * p.g * std::norm(ep.alpha);
  ep.omega_0 = p.omega_m + shift;
  ep.delta = p.delta_c() - 2.0 * p.omega_d;
  ep.delta_m = ep.omega_0 - p.omega_d;
  ep.J = p.g * ep.alpha;
  ep.epsilon = p.epsilon;
  ep.gamma_c = p.gamma_c;
  ep.gamma_m = p.gamma_m;
  ep.n_th = p.n_th;

  std::ostringstream w;
  if (std::abs(p.epsilon) > kSmallRatio * p.gamma_c) {
    w << "mechanical drive epsilon=" << p.epsilon << " is not much weaker than gamma_c="
      << p.gamma_c;
    ep.warnings.push_back(w.str());
    w.str("");
  }
  if (std::abs(ep.delta) > kSmallRatio * std::abs(p.omega_m)) {
    w << "|delta|=" << std::abs(ep.delta) << " is not much smaller than omega_m=" << p.omega_m
      << "; rotating-wave approximation is questionable";
    ep.warnings.push_back(w.str());
    w.str("");
  }
  if (std::abs(ep.delta_m) > kSmallRatio * std::abs(p.omega_m)) {
    w << "|delta_m|=" << std::abs(ep.delta_m) << " is not much smaller than omega_m="
      << p.omega_m << "; rotating-wave approximation is questionable";
    ep.warnings.push_back(w.str());
    w.str("");
  }
  // Fluctuations carry at most O(1) quanta in the regimes of interest.
  if (std::norm(ep.alpha) < 1.0 / kSmallRatio) {
    w << "|alpha|^2=" << std::norm(ep.alpha)
      << " is not much larger than the optical fluctuations; linearization is questionable";
    ep.warnings.push_back(w.str());
  }
  return ep;
}

CsOperator build_h_eff(const EffectiveParams& ep, const TruncatedSpace& space) {
  ep.validate();
  const auto [a, b] = ladder_operators(space);
  const CsOperator ad = a.adjoint();
  const CsOperator bd = b.adjoint();

  CsOperator h = ep.delta * (ad * a);
  h += ep.delta_m * (bd * b);
  h += ep.J * (ad * b * b);
  h += std::conj(ep.J) * (a * bd * bd);
  h += Complex(ep.epsilon) * (bd + b);

  if (!h.is_hermitian(1e-12)) {
    throw Error(ErrorCode::Internal, "effective Hamiltonian assembled non-Hermitian");
  }
  return h;
}

CsOperator build_liouvillian(const EffectiveParams& ep, const TruncatedSpace& space) {
  const CsOperator h = build_h_eff(ep, space);
  const auto [a, b] = ladder_operators(space);

  CsOperator l = hamiltonian_superop(h);
  l += Complex(ep.gamma_c) * lindblad_superop(a);
  l += Complex(ep.gamma_m * (ep.n_th + 1.0)) * lindblad_superop(b);
  if (ep.n_th > 0.0) {
    l += Complex(ep.gamma_m * ep.n_th) * lindblad_superop(b.adjoint());
  }
  return l;
}

double j_opt(double gamma_c, double gamma_m) {
  require_positive_rate(gamma_c, "gamma_c");
  // gamma_m = 0 is the lossless-mechanics limit and stays well defined.
  if (!(gamma_m >= 0.0) || !std::isfinite(gamma_m)) {
    std::ostringstream msg;
    msg << "gamma_m must be a non-negative finite rate, got " << gamma_m;
    throw Error(ErrorCode::InvalidRate, msg.str());
  }
  return std::sqrt((2.0 * gamma_m + gamma_c) * (gamma_m + gamma_c) / 8.0);
}

double n_th_from_temperature(double omega_m, double temperature) {
  // hbar / k_B in kelvin-seconds
  constexpr double kHbarOverKb = 7.638232577577646e-12;
  if (!(temperature > 0.0)) {
    throw Error(ErrorCode::Domain, "temperature must be positive");
  }
  if (!(omega_m > 0.0)) {
    throw Error(ErrorCode::Domain, "omega_m must be positive");
  }
  const double x = kHbarOverKb * omega_m / temperature;
  return 1.0 / std::expm1(x);
}

}  // namespace quadromech
