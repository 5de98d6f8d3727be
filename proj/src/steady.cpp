#include "quadromech/steady.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include "quadromech/correlations.hpp"

namespace quadromech {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kPsdTol = 1e-8;

void require_superoperator(const CsOperator& l) {
  if (!l.is_superoperator()) {
    throw Error(ErrorCode::Type, "steady state requires a Liouvillian superoperator");
  }
}

DenseMatrix pure_state(const DenseVector& psi) { return psi * psi.adjoint(); }

// Above this superoperator size sparse LU fill-in explodes and a dense SVD is
// out of reach, so the bordered system is solved iteratively instead.
constexpr Eigen::Index kDirectMaxSize = 4096;

template <typename Solver>
bool try_solve(Solver& solver, const SparseMatrix& system, const SparseMatrix& l,
               Eigen::Index d, double tol, DenseVector& out) {
  solver.compute(system);
  if (solver.info() != Eigen::Success) return false;
  DenseVector rhs = DenseVector::Zero(system.rows());
  rhs(0) = 1.0;
  DenseVector x = solver.solve(rhs);
  if (solver.info() != Eigen::Success || !x.allFinite()) return false;
  const DenseVector r = l * x;
  if (!(r.cwiseAbs().maxCoeff() < tol * static_cast<double>(d))) return false;
  out = std::move(x);
  return true;
}

struct IlutTier {
  double droptol;
  int fill;
};

// Cheap first; strong drive needs the tighter factorizations.
constexpr IlutTier kIlutTiers[] = {{1e-2, 2}, {1e-4, 10}, {1e-5, 20}};

}  // namespace

DensityMatrix::DensityMatrix(TruncatedSpace space, DenseMatrix rho)
    : space_(space), rho_(std::move(rho)) {
  const Eigen::Index d = space_.dim();
  if (rho_.rows() != d || rho_.cols() != d) {
    throw Error(ErrorCode::Shape, "density matrix shape does not match the truncated space");
  }
  const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  if (!(herm < kHermitianTol)) {
    std::ostringstream msg;
    msg << "density matrix is not Hermitian (max |rho - rho^+| = " << herm << ")";
    throw Error(ErrorCode::Domain, msg.str());
  }
  const Complex tr = rho_.trace();
  if (!(std::abs(tr - 1.0) < kTraceTol)) {
    std::ostringstream msg;
    msg << "density matrix trace is " << tr << ", expected 1";
    throw Error(ErrorCode::Domain, msg.str());
  }
  const DenseMatrix sym = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(sym, Eigen::EigenvaluesOnly);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (!(min_eig >= -kPsdTol)) {
    std::ostringstream msg;
    msg << "density matrix is not positive semidefinite (min eigenvalue " << min_eig << ")";
    throw Error(ErrorCode::Domain, msg.str());
  }
}

Complex DensityMatrix::expectation(const CsOperator& op) const {
  if (op.is_superoperator() || !(op.space() == space_)) {
    throw Error(ErrorCode::Shape, "expectation needs an operator on the same space");
  }
  return trace_product(op.matrix(), rho_);
}

DensityMatrix fock_state(const TruncatedSpace& space, int photons, int phonons) {
  DenseVector psi = DenseVector::Zero(space.dim());
  psi(space.index(photons, phonons)) = 1.0;
  return DensityMatrix(space, pure_state(psi));
}

DensityMatrix vacuum_state(const TruncatedSpace& space) { return fock_state(space, 0, 0); }

DensityMatrix thermal_phonon_state(const TruncatedSpace& space, double mean_phonons) {
  if (!(mean_phonons >= 0.0)) {
    throw Error(ErrorCode::Domain, "thermal occupation must be non-negative");
  }
  DenseMatrix rho = DenseMatrix::Zero(space.dim(), space.dim());
  const double ratio = mean_phonons / (1.0 + mean_phonons);
  double weight = 1.0;
  double total = 0.0;
  for (int m = 0; m <= space.n_phonon_max(); ++m) {
    rho(m, m) = weight;
    total += weight;
    weight *= ratio;
  }
  rho /= total;
  return DensityMatrix(space, std::move(rho));
}

DensityMatrix coherent_state(const TruncatedSpace& space, Mode mode, Complex amplitude) {
  const int n_max = mode == Mode::Photon ? space.n_photon_max() : space.n_phonon_max();
  DenseVector psi = DenseVector::Zero(space.dim());
  Complex coeff = 1.0;
  for (int k = 0; k <= n_max; ++k) {
    if (k > 0) coeff *= amplitude / std::sqrt(static_cast<double>(k));
    const int idx = mode == Mode::Photon ? space.index(k, 0) : space.index(0, k);
    psi(idx) = coeff;
  }
  psi.normalize();
  return DensityMatrix(space, pure_state(psi));
}

double steady_residual(const CsOperator& liouvillian, const DensityMatrix& rho) {
  const DenseVector r = liouvillian.matrix() * vec(rho.matrix());
  return r.cwiseAbs().maxCoeff();
}

DensityMatrix steady_state(const CsOperator& liouvillian, const SteadyStateOptions& opts) {
  require_superoperator(liouvillian);
  const TruncatedSpace& space = liouvillian.space();
  const Eigen::Index d = space.dim();
  const Eigen::Index n = d * d;
  const SparseMatrix& l = liouvillian.matrix();

  // Row 0 of vec(rho) is rho(0,0): the vacuum diagonal entry.
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(static_cast<std::size_t>(l.nonZeros() + d));
  for (Eigen::Index col = 0; col < l.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(l, col); it; ++it) {
      if (it.row() != 0) triplets.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (Eigen::Index k = 0; k < d; ++k) triplets.emplace_back(0, k + k * d, Complex(1.0));
  SparseMatrix system(n, n);
  system.setFromTriplets(triplets.begin(), triplets.end());
  system.makeCompressed();

  DenseVector x;
  const double tol = opts.residual_tol_per_dim;
  const auto accept = [&] {
    DenseMatrix rho = unvec(x, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    return DensityMatrix(space, std::move(rho));
  };
  if (n > kDirectMaxSize) {
    for (const IlutTier& tier : kIlutTiers) {
      Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<Complex>> bicg;
      bicg.preconditioner().setDroptol(tier.droptol);
      bicg.preconditioner().setFillfactor(tier.fill);
      bicg.setTolerance(1e-14);
      bicg.setMaxIterations(400);
      if (try_solve(bicg, system, l, d, tol, x)) return accept();
    }
    std::ostringstream msg;
    msg << "no steady state found at dimension " << d
        << ": the bordered system is singular or ill-conditioned";
    throw Error(ErrorCode::Singularity, msg.str());
  }
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  if (try_solve(lu, system, l, d, tol, x)) return accept();
  return steady_state_nullspace(liouvillian, opts);
}

DensityMatrix steady_state_nullspace(const CsOperator& liouvillian,
                                     const SteadyStateOptions& opts) {
  require_superoperator(liouvillian);
  const TruncatedSpace& space = liouvillian.space();
  const Eigen::Index d = space.dim();
  const Eigen::Index n = d * d;

  Eigen::BDCSVD<DenseMatrix> svd(liouvillian.dense(), Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double smallest = s(n - 1);
  const double second = s(n - 2);
  if (second <= opts.degeneracy_tol * std::max(s(0), 1.0)) {
    std::ostringstream msg;
    msg << "steady state is not unique: two smallest singular values " << smallest << " and "
        << second;
    throw Error(ErrorCode::Degeneracy, msg.str());
  }
  DenseMatrix rho = unvec(svd.matrixV().col(n - 1), d);
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-14) {
    throw Error(ErrorCode::Degeneracy, "null vector of the Liouvillian is traceless");
  }
  rho /= tr;
  // Exact Hermitian part; the null vector is Hermitian up to rounding.
  rho = 0.5 * (rho + rho.adjoint()).eval();
  DensityMatrix out(space, std::move(rho));
  const double residual = steady_residual(liouvillian, out);
  if (!(residual < opts.residual_tol_per_dim * static_cast<double>(d))) {
    std::ostringstream msg;
    msg << "steady-state residual " << residual << " exceeds tolerance";
    throw Error(ErrorCode::Singularity, msg.str());
  }
  return out;
}

Occupations occupations(const DensityMatrix& rho) {
  const auto [a, b] = ladder_operators(rho.space());
  const Complex na = rho.expectation(a.adjoint() * a);
  const Complex nb = rho.expectation(b.adjoint() * b);
  constexpr double tol = 1e-10;
  if (std::abs(na.imag()) > tol || std::abs(nb.imag()) > tol || na.real() < -tol ||
      nb.real() < -tol) {
    throw Error(ErrorCode::Internal, "occupation numbers are not real and non-negative");
  }
  return {na.real(), nb.real()};
}

TruncatedSpace grow_truncation(const TruncatedSpace& space) {
  const auto grow = [](int n) { return n + (n + 1) / 2; };  // ceil(1.5 n)
  return TruncatedSpace(grow(space.n_photon_max()), grow(space.n_phonon_max()));
}

namespace {

struct Observables {
  double values[5];
};

constexpr const char* kObservableNames[5] = {"n_a", "n_b", "g2_aa_0", "g2_bb_0", "g2_ab_0"};

// Occupations below this are numerically zero.
constexpr double kZeroFloor = 1e-12;

Observables observe(const DensityMatrix& rho) {
  const Occupations occ = occupations(rho);
  const auto guarded = [&](CorrelationKind kind, double denom) {
    return denom > kZeroFloor ? g2_zero(rho, kind) : 0.0;
  };
  return {{occ.n_a, occ.n_b, guarded(CorrelationKind::aa, occ.n_a),
           guarded(CorrelationKind::bb, occ.n_b),
           guarded(CorrelationKind::ab, std::min(occ.n_a, occ.n_b))}};
}

double relative_change(double before, double after) {
  const double scale = std::max(std::abs(before), std::abs(after));
  if (scale < kZeroFloor) return 0.0;
  return std::abs(after - before) / scale;
}

}  // namespace

ConvergedState converge_truncation(const EffectiveParams& ep, const TruncatedSpace& start,
                                   double tol, int max_dim) {
  if (!(tol > 0.0)) throw Error(ErrorCode::Domain, "convergence tolerance must be positive");

  ConvergenceReport report{start, {}, {start}, false};
  TruncatedSpace space = start;
  DensityMatrix rho = steady_state(build_liouvillian(ep, space));
  Observables obs = observe(rho);

  for (;;) {
    const TruncatedSpace next = grow_truncation(space);
    if (next.dim() > max_dim) {
      report.final_space = space;
      std::ostringstream msg;
      msg << "truncation did not converge before dim " << max_dim << " (last space "
          << space.n_photon_max() << "," << space.n_phonon_max() << ")";
      throw TruncationDivergenceError(msg.str(), std::move(report));
    }
    DensityMatrix rho_next = steady_state(build_liouvillian(ep, next));
    const Observables obs_next = observe(rho_next);
    report.spaces_tried.push_back(next);
    report.observable_deltas.clear();
    bool all_within = true;
    for (int k = 0; k < 5; ++k) {
      const double change = relative_change(obs.values[k], obs_next.values[k]);
      report.observable_deltas.push_back({kObservableNames[k], change});
      all_within = all_within && change < tol;
    }
    if (all_within) {
      report.final_space = space;
      report.converged = true;
      return {std::move(rho), std::move(report)};
    }
    space = next;
    rho = std::move(rho_next);
    obs = obs_next;
  }
}

}  // namespace quadromech
