#include "quadromech/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "quadromech/errors.hpp"

namespace quadromech {

namespace {

void prune(SparseMatrix& m) {
  m.prune([](Eigen::Index, Eigen::Index, const Complex& v) {
    return std::abs(v) > kPruneThreshold;
  });
  m.makeCompressed();
}

Eigen::Index expected_size(const TruncatedSpace& space, CsOperator::Kind kind) {
  const Eigen::Index d = space.dim();
  return kind == CsOperator::Kind::Superoperator ? d * d : d;
}

}  // namespace

TruncatedSpace::TruncatedSpace(int n_photon_max, int n_phonon_max)
    : n_photon_max_(n_photon_max), n_phonon_max_(n_phonon_max) {
  if (n_photon_max < 2 || n_phonon_max < 4) {
    throw Error(ErrorCode::InvalidTruncation,
                "truncation requires n_photon_max >= 2 and n_phonon_max >= 4, got (" +
                    std::to_string(n_photon_max) + ", " + std::to_string(n_phonon_max) + ")");
  }
}

int TruncatedSpace::index(int photons, int phonons) const {
  if (photons < 0 || photons > n_photon_max_ || phonons < 0 || phonons > n_phonon_max_) {
    throw Error(ErrorCode::Domain, "Fock label (" + std::to_string(photons) + ", " +
                                       std::to_string(phonons) + ") outside the truncated space");
  }
  return photons * phonon_dim() + phonons;
}

CsOperator::CsOperator(TruncatedSpace space, SparseMatrix matrix, Kind kind)
    : space_(space), matrix_(std::move(matrix)), kind_(kind) {
  const Eigen::Index n = expected_size(space_, kind_);
  if (matrix_.rows() != n || matrix_.cols() != n) {
    throw Error(ErrorCode::Shape, "operator shape " + std::to_string(matrix_.rows()) + "x" +
                                      std::to_string(matrix_.cols()) + " does not match expected " +
                                      std::to_string(n));
  }
  prune(matrix_);
}

CsOperator CsOperator::zero(const TruncatedSpace& space, Kind kind) {
  const Eigen::Index n = expected_size(space, kind);
  return CsOperator(space, SparseMatrix(n, n), kind);
}

CsOperator CsOperator::identity(const TruncatedSpace& space, Kind kind) {
  const Eigen::Index n = expected_size(space, kind);
  SparseMatrix id(n, n);
  id.setIdentity();
  return CsOperator(space, std::move(id), kind);
}

CsOperator CsOperator::adjoint() const {
  return CsOperator(space_, SparseMatrix(matrix_.adjoint()), kind_);
}

double CsOperator::hermiticity_error() const {
  const SparseMatrix diff = matrix_ - SparseMatrix(matrix_.adjoint());
  double worst = 0.0;
  for (Eigen::Index k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) {
      worst = std::max(worst, std::abs(it.value()));
    }
  }
  return worst;
}

void CsOperator::require_compatible(const CsOperator& other) const {
  if (kind_ != other.kind_) {
    throw Error(ErrorCode::Type, "cannot combine an operator with a superoperator");
  }
  if (!(space_ == other.space_)) {
    throw Error(ErrorCode::Shape, "operators act on different truncated spaces");
  }
}

CsOperator& CsOperator::operator+=(const CsOperator& rhs) {
  require_compatible(rhs);
  matrix_ += rhs.matrix_;
  prune(matrix_);
  return *this;
}

CsOperator& CsOperator::operator-=(const CsOperator& rhs) {
  require_compatible(rhs);
  matrix_ -= rhs.matrix_;
  prune(matrix_);
  return *this;
}

CsOperator& CsOperator::operator*=(Complex scale) {
  matrix_ *= scale;
  prune(matrix_);
  return *this;
}

CsOperator operator*(const CsOperator& lhs, const CsOperator& rhs) {
  lhs.require_compatible(rhs);
  return CsOperator(lhs.space_, SparseMatrix(lhs.matrix_ * rhs.matrix_), lhs.kind_);
}

SparseMatrix annihilation(int n_max) {
  if (n_max < 1) {
    throw Error(ErrorCode::InvalidTruncation,
                "ladder operator needs n_max >= 1, got " + std::to_string(n_max));
  }
  SparseMatrix a(n_max + 1, n_max + 1);
  a.reserve(Eigen::VectorXi::Ones(n_max + 1));
  for (int k = 1; k <= n_max; ++k) {
    a.insert(k - 1, k) = std::sqrt(static_cast<double>(k));
  }
  a.makeCompressed();
  return a;
}

SparseMatrix mode_identity(int dimension) {
  SparseMatrix id(dimension, dimension);
  id.setIdentity();
  return id;
}

SparseMatrix kron(const SparseMatrix& lhs, const SparseMatrix& rhs) {
  SparseMatrix out = Eigen::kroneckerProduct(lhs, rhs).eval();
  prune(out);
  return out;
}

CsOperator embed(const SparseMatrix& single_mode, Mode mode, const TruncatedSpace& space) {
  const int d = space.mode_dim(mode);
  if (single_mode.rows() != d || single_mode.cols() != d) {
    throw Error(ErrorCode::Shape, "single-mode operator of size " +
                                      std::to_string(single_mode.rows()) +
                                      " does not match mode dimension " + std::to_string(d));
  }
  if (mode == Mode::Photon) {
    return CsOperator(space, kron(single_mode, mode_identity(space.phonon_dim())));
  }
  return CsOperator(space, kron(mode_identity(space.photon_dim()), single_mode));
}

LadderOperators ladder_operators(const TruncatedSpace& space) {
  return {embed(annihilation(space.n_photon_max()), Mode::Photon, space),
          embed(annihilation(space.n_phonon_max()), Mode::Phonon, space)};
}

CsOperator phonon_position(const TruncatedSpace& space) {
  const CsOperator b = embed(annihilation(space.n_phonon_max()), Mode::Phonon, space);
  return (b.adjoint() + b) * Complex(1.0 / std::sqrt(2.0), 0.0);
}

CsOperator phonon_momentum(const TruncatedSpace& space) {
  const CsOperator b = embed(annihilation(space.n_phonon_max()), Mode::Phonon, space);
  return (b.adjoint() - b) * Complex(0.0, 1.0 / std::sqrt(2.0));
}

CsOperator hamiltonian_superop(const CsOperator& hamiltonian) {
  if (hamiltonian.is_superoperator()) {
    throw Error(ErrorCode::Type, "hamiltonian_superop expects an operator, got a superoperator");
  }
  const SparseMatrix& h = hamiltonian.matrix();
  const SparseMatrix id = mode_identity(static_cast<int>(h.rows()));
  SparseMatrix l = kron(id, h) - kron(SparseMatrix(h.transpose()), id);
  l *= Complex(0.0, -1.0);
  return CsOperator(hamiltonian.space(), std::move(l), CsOperator::Kind::Superoperator);
}

CsOperator lindblad_superop(const CsOperator& jump) {
  if (jump.is_superoperator()) {
    throw Error(ErrorCode::Type, "lindblad_superop expects an operator, got a superoperator");
  }
  const SparseMatrix& c = jump.matrix();
  const SparseMatrix id = mode_identity(static_cast<int>(c.rows()));
  const SparseMatrix cdc = c.adjoint() * c;
  SparseMatrix d = kron(SparseMatrix(c.conjugate()), c);
  d -= 0.5 * kron(id, cdc);
  d -= 0.5 * kron(SparseMatrix(cdc.transpose()), id);
  return CsOperator(jump.space(), std::move(d), CsOperator::Kind::Superoperator);
}

DenseVector vec(const DenseMatrix& m) {
  return Eigen::Map<const DenseVector>(m.data(), m.size());
}

DenseMatrix unvec(const DenseVector& v, Eigen::Index dim) {
  if (v.size() != dim * dim) {
    throw Error(ErrorCode::Shape, "vector of length " + std::to_string(v.size()) +
                                      " is not a vectorized " + std::to_string(dim) + "x" +
                                      std::to_string(dim) + " matrix");
  }
  return Eigen::Map<const DenseMatrix>(v.data(), dim, dim);
}

Eigen::RowVectorXcd trace_functional(Eigen::Index dim) {
  Eigen::RowVectorXcd t = Eigen::RowVectorXcd::Zero(dim * dim);
  for (Eigen::Index k = 0; k < dim; ++k) t(k + k * dim) = 1.0;
  return t;
}

Complex trace_product(const SparseMatrix& op, const DenseMatrix& rho) {
  // Tr(O rho) = sum_{ij} O_ij rho_ji
  Complex sum = 0.0;
  for (Eigen::Index j = 0; j < op.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(op, j); it; ++it) {
      sum += it.value() * rho(j, it.row());
    }
  }
  return sum;
}

}  // namespace quadromech
