#include "quadromech/regression.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/QR>
#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/MatrixFunctions>

namespace quadromech {

namespace {

void require_superoperator(const CsOperator& l) {
  if (!l.is_superoperator()) {
    throw Error(ErrorCode::Type, "propagation requires a Liouvillian superoperator");
  }
}

void require_nonnegative_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    std::ostringstream msg;
    msg << "propagation time must be finite and non-negative, got " << t;
    throw Error(ErrorCode::Domain, msg.str());
  }
}

// Dormand-Prince 5(4) with first-same-as-last stepping on y' = L y.
class DormandPrince {
 public:
  DormandPrince(const SparseMatrix& l, double rtol, double atol)
      : l_(l), rtol_(rtol), atol_(atol) {
    double norm = 0.0;
    for (Eigen::Index c = 0; c < l.outerSize(); ++c) {
      double col = 0.0;
      for (SparseMatrix::InnerIterator it(l, c); it; ++it) col += std::abs(it.value());
      norm = std::max(norm, col);
    }
    h_ = norm > 0.0 ? 0.5 / norm : 1.0;
  }

  // Advances y by `duration`, landing exactly on the end point.
  void advance(DenseVector& y, double duration) {
    if (duration <= 0.0) return;
    double t = 0.0;
    DenseVector k1 = l_ * y;
    int rejected_in_a_row = 0;
    while (t < duration) {
      const bool last = t + h_ >= duration * (1.0 - 1e-14);
      const double h = last ? duration - t : h_;

      const DenseVector k2 = l_ * (y + h * (kA21 * k1));
      const DenseVector k3 = l_ * (y + h * (kA31 * k1 + kA32 * k2));
      const DenseVector k4 = l_ * (y + h * (kA41 * k1 + kA42 * k2 + kA43 * k3));
      const DenseVector k5 = l_ * (y + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
      const DenseVector k6 =
          l_ * (y + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
      DenseVector y_new =
          y + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
      DenseVector k7 = l_ * y_new;
      const DenseVector err =
          h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

      double err_norm = 0.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double scale = atol_ + rtol_ * std::max(std::abs(y(i)), std::abs(y_new(i)));
        err_norm = std::max(err_norm, std::abs(err(i)) / scale);
      }

      if (err_norm <= 1.0) {
        t = last ? duration : t + h;
        y = std::move(y_new);
        k1 = std::move(k7);
        rejected_in_a_row = 0;
        const double grow =
            err_norm == 0.0 ? kMaxGrow : std::clamp(kSafety * std::pow(err_norm, -0.2), kMinShrink, kMaxGrow);
        // Keep the natural step when the last one was shortened to hit the end point.
        if (!last || h >= h_) h_ = h * grow;
      } else {
        if (++rejected_in_a_row > 200) {
          throw Error(ErrorCode::Internal, "Runge-Kutta step size collapsed");
        }
        h_ = h * std::max(kMinShrink, kSafety * std::pow(err_norm, -0.2));
      }
    }
  }

 private:
  static constexpr double kSafety = 0.9;
  static constexpr double kMinShrink = 0.2;
  static constexpr double kMaxGrow = 5.0;

  static constexpr double kA21 = 1.0 / 5.0;
  static constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
  static constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
  static constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                          kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
  static constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0,
                          kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                          kA65 = -5103.0 / 18656.0;
  static constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                          kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
  // Fifth-order minus embedded fourth-order weights.
  static constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                          kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

  const SparseMatrix& l_;
  double rtol_;
  double atol_;
  double h_;
};

}  // namespace

PropagationMethod resolve_method(const CsOperator& liouvillian, const PropagationOptions& opts) {
  if (opts.method != PropagationMethod::Automatic) return opts.method;
  return liouvillian.size() <= opts.expm_max_superop_dim ? PropagationMethod::MatrixExponential
                                                         : PropagationMethod::RungeKutta;
}

std::vector<DenseVector> propagate_series(const CsOperator& liouvillian, const DenseVector& v,
                                          std::span<const double> times,
                                          const PropagationOptions& opts) {
  require_superoperator(liouvillian);
  if (v.size() != liouvillian.size()) {
    throw Error(ErrorCode::Shape, "vector length does not match the superoperator");
  }
  for (std::size_t k = 0; k < times.size(); ++k) {
    require_nonnegative_time(times[k]);
    if (k > 0 && times[k] < times[k - 1]) {
      throw Error(ErrorCode::Domain, "propagation times must be ascending");
    }
  }

  std::vector<DenseVector> out;
  out.reserve(times.size());
  DenseVector y = v;
  double t = 0.0;

  if (resolve_method(liouvillian, opts) == PropagationMethod::RungeKutta) {
    DormandPrince rk(liouvillian.matrix(), opts.rtol, opts.atol);
    for (double target : times) {
      rk.advance(y, target - t);
      t = target;
      out.push_back(y);
    }
    return out;
  }

  // One exponential per distinct step length; uniform grids reuse a single one.
  constexpr std::size_t kMaxCachedExponentials = 8;
  const DenseMatrix l = liouvillian.dense();
  std::vector<std::pair<double, DenseMatrix>> cache;
  for (double target : times) {
    const double step = target - t;
    if (step > 0.0) {
      auto hit = std::find_if(cache.begin(), cache.end(), [&](const auto& entry) {
        return std::abs(entry.first - step) <= 1e-13 * std::max(1.0, step);
      });
      if (hit == cache.end()) {
        if (cache.size() == kMaxCachedExponentials) cache.erase(cache.begin());
        cache.emplace_back(step, (l * step).exp());
        hit = std::prev(cache.end());
      }
      y = hit->second * y;
    }
    t = target;
    out.push_back(y);
  }
  return out;
}

DenseMatrix propagate(const CsOperator& liouvillian, const DenseMatrix& x, double t,
                      const PropagationOptions& opts) {
  require_superoperator(liouvillian);
  require_nonnegative_time(t);
  const Eigen::Index d = liouvillian.space().dim();
  if (x.rows() != d || x.cols() != d) {
    throw Error(ErrorCode::Shape, "operator shape does not match the Liouvillian's space");
  }
  const double times[] = {t};
  return unvec(propagate_series(liouvillian, vec(x), times, opts).front(), d);
}

CsOperator propagate(const CsOperator& liouvillian, const CsOperator& x, double t,
                     const PropagationOptions& opts) {
  if (x.is_superoperator()) {
    throw Error(ErrorCode::Type, "can only propagate operators, not superoperators");
  }
  const DenseMatrix out = propagate(liouvillian, x.dense(), t, opts);
  return CsOperator(x.space(), out.sparseView(1.0, kPruneThreshold));
}

namespace {

struct Branch {
  CsOperator seed_op;     // X in X rho X^+
  CsOperator measured;    // number operator read out after the delay
  std::vector<std::size_t> indices;
  std::vector<double> delays;
};

void evaluate_branch(const CsOperator& liouvillian, const DensityMatrix& rho_ss, Branch& branch,
                     double normalization, std::vector<Complex>& raw,
                     const PropagationOptions& opts) {
  if (branch.indices.empty()) return;
  const SparseMatrix& x = branch.seed_op.matrix();
  const DenseMatrix seed = x * rho_ss.matrix() * SparseMatrix(x.adjoint());
  if ((seed - seed.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, seed.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::Internal, "regression seed is not Hermitian");
  }
  // Scale the seed to unit trace so the integrator tolerances act on O(1) data.
  const double seed_trace = seed.trace().real();
  if (!(seed_trace > 0.0)) {
    throw Error(ErrorCode::UndefinedCorrelation, "regression seed has zero trace");
  }

  std::vector<std::size_t> order(branch.indices.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return branch.delays[i] < branch.delays[j]; });
  std::vector<double> sorted(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) sorted[k] = branch.delays[order[k]];

  const Eigen::Index d = rho_ss.space().dim();
  const auto evolved = propagate_series(liouvillian, vec(seed / seed_trace), sorted, opts);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const DenseMatrix state = unvec(evolved[k], d);
    raw[branch.indices[order[k]]] =
        trace_product(branch.measured.matrix(), state) * (seed_trace / normalization);
  }
}

}  // namespace

CorrelationSeries g2_tau(const CsOperator& liouvillian, const DensityMatrix& rho_ss,
                         CorrelationKind kind, std::span<const double> taus,
                         const PropagationOptions& opts) {
  require_superoperator(liouvillian);
  if (!(liouvillian.space() == rho_ss.space())) {
    throw Error(ErrorCode::Shape, "steady state and Liouvillian live on different spaces");
  }
  const auto [a, b] = ladder_operators(rho_ss.space());
  const CsOperator na_op = a.adjoint() * a;
  const CsOperator nb_op = b.adjoint() * b;
  const Occupations occ = occupations(rho_ss);

  const auto guard = [](double n, const char* name) {
    if (!(n > kOccupationGuard)) {
      std::ostringstream msg;
      msg << "g2(tau) undefined: " << name << " = " << n << " is below " << kOccupationGuard;
      throw Error(ErrorCode::UndefinedCorrelation, msg.str());
    }
  };

  Branch forward{a, na_op, {}, {}};
  Branch backward{b, na_op, {}, {}};
  double normalization = 1.0;
  switch (kind) {
    case CorrelationKind::aa:
      guard(occ.n_a, "n_a");
      normalization = occ.n_a * occ.n_a;
      break;
    case CorrelationKind::bb:
      guard(occ.n_b, "n_b");
      forward = Branch{b, nb_op, {}, {}};
      normalization = occ.n_b * occ.n_b;
      break;
    case CorrelationKind::ab:
      guard(occ.n_a, "n_a");
      guard(occ.n_b, "n_b");
      forward = Branch{a, nb_op, {}, {}};
      normalization = occ.n_a * occ.n_b;
      break;
  }

  for (std::size_t k = 0; k < taus.size(); ++k) {
    const double tau = taus[k];
    if (!std::isfinite(tau)) throw Error(ErrorCode::Domain, "delay must be finite");
    if (tau < 0.0) {
      if (kind != CorrelationKind::ab) {
        throw Error(ErrorCode::Domain, "auto-correlations are defined for tau >= 0 only");
      }
      backward.indices.push_back(k);
      backward.delays.push_back(-tau);
    } else {
      forward.indices.push_back(k);
      forward.delays.push_back(tau);
    }
  }

  std::vector<Complex> raw(taus.size());
  evaluate_branch(liouvillian, rho_ss, forward, normalization, raw, opts);
  evaluate_branch(liouvillian, rho_ss, backward, normalization, raw, opts);

  CorrelationSeries series{kind, std::vector<double>(taus.begin(), taus.end()), {}};
  series.values.reserve(raw.size());
  for (const Complex& v : raw) {
    if (std::abs(v.imag()) > 1e-8 * std::max(1.0, std::abs(v.real())) || v.real() < -1e-8) {
      std::ostringstream msg;
      msg << "g2(tau) value " << v << " is not real and non-negative";
      throw Error(ErrorCode::Internal, msg.str());
    }
    series.values.push_back(v.real());
  }
  return series;
}

std::vector<double> oscillation_window(double delta_m, int points) {
  if (!(std::abs(delta_m) > 0.0) || points < 8) {
    throw Error(ErrorCode::Domain, "oscillation window needs delta_m != 0 and at least 8 points");
  }
  const double span = 20.0 * 2.0 * std::numbers::pi / std::abs(delta_m);
  std::vector<double> taus(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) taus[static_cast<std::size_t>(k)] = span * k / points;
  return taus;
}

SpectralPeak dominant_frequency(std::span<const double> taus, std::span<const double> values) {
  const std::size_t n = taus.size();
  if (n < 8 || values.size() != n) {
    throw Error(ErrorCode::Domain, "spectral analysis needs at least 8 matching samples");
  }
  const double dt = taus[1] - taus[0];
  for (std::size_t k = 1; k < n; ++k) {
    if (std::abs((taus[k] - taus[k - 1]) - dt) > 1e-9 * std::abs(dt) || !(dt > 0.0)) {
      throw Error(ErrorCode::Domain, "spectral analysis needs a uniform ascending grid");
    }
  }

  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd basis(m, 4);
  Eigen::VectorXd y(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double x = (taus[static_cast<std::size_t>(k)] - taus[0]) / (taus[n - 1] - taus[0]);
    basis(k, 0) = 1.0;
    basis(k, 1) = x;
    basis(k, 2) = x * x;
    basis(k, 3) = x * x * x;
    y(k) = values[static_cast<std::size_t>(k)];
  }
  const Eigen::VectorXd trend = basis * basis.colPivHouseholderQr().solve(y);

  std::vector<double> windowed(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double hann =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n - 1));
    windowed[k] = (y(static_cast<Eigen::Index>(k)) - trend(static_cast<Eigen::Index>(k))) * hann;
  }

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, windowed);

  std::size_t best = 1;
  for (std::size_t k = 2; k <= n / 2; ++k) {
    if (std::abs(spectrum[k]) > std::abs(spectrum[best])) best = k;
  }
  const double bin = 1.0 / (static_cast<double>(n) * dt);
  return {static_cast<double>(best) * bin, bin};
}

}  // namespace quadromech
