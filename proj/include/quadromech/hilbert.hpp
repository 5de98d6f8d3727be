#pragma once

// Operator algebra on the truncated photon (x) phonon Fock space.
//
// Basis ordering: index(n, m) = n * (n_phonon_max + 1) + m, i.e. the photon
// index is the slow one and photon operators are kron(op, I).
// Vectorization is column stacking, vec(A X B) = (B^T (x) A) vec(X).

#include <complex>
#include <cstddef>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace quadromech {

using Complex = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<Complex>;
using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;

/// Magnitude below which stored entries are dropped.
inline constexpr double kPruneThreshold = 1e-15;

enum class Mode { Photon, Phonon };

class TruncatedSpace {
 public:
  /// Throws InvalidTruncation unless n_photon_max >= 2 and n_phonon_max >= 4.
  TruncatedSpace(int n_photon_max, int n_phonon_max);

  /// Defaults used for the weak-driving scenarios.
  static TruncatedSpace standard() { return TruncatedSpace(3, 11); }

  int n_photon_max() const noexcept { return n_photon_max_; }
  int n_phonon_max() const noexcept { return n_phonon_max_; }
  int photon_dim() const noexcept { return n_photon_max_ + 1; }
  int phonon_dim() const noexcept { return n_phonon_max_ + 1; }
  int mode_dim(Mode mode) const noexcept {
    return mode == Mode::Photon ? photon_dim() : phonon_dim();
  }
  int dim() const noexcept { return photon_dim() * phonon_dim(); }

  int index(int photons, int phonons) const;
  int photons_at(int index) const noexcept { return index / phonon_dim(); }
  int phonons_at(int index) const noexcept { return index % phonon_dim(); }

  friend bool operator==(const TruncatedSpace&, const TruncatedSpace&) = default;

 private:
  int n_photon_max_;
  int n_phonon_max_;
};

/// A sparse operator on the two-mode space, or a superoperator acting on
/// vec(rho) (dimension dim^2).
class CsOperator {
 public:
  enum class Kind { Operator, Superoperator };

  /// Shape is checked against the space and kind; small entries are pruned.
  CsOperator(TruncatedSpace space, SparseMatrix matrix, Kind kind = Kind::Operator);

  static CsOperator zero(const TruncatedSpace& space, Kind kind = Kind::Operator);
  static CsOperator identity(const TruncatedSpace& space, Kind kind = Kind::Operator);

  const TruncatedSpace& space() const noexcept { return space_; }
  const SparseMatrix& matrix() const noexcept { return matrix_; }
  Kind kind() const noexcept { return kind_; }
  bool is_superoperator() const noexcept { return kind_ == Kind::Superoperator; }
  Eigen::Index size() const noexcept { return matrix_.rows(); }

  CsOperator adjoint() const;
  DenseMatrix dense() const { return DenseMatrix(matrix_); }

  /// max |M - M^dagger|
  double hermiticity_error() const;
  bool is_hermitian(double tol = 1e-12) const { return hermiticity_error() < tol; }

  CsOperator& operator+=(const CsOperator& rhs);
  CsOperator& operator-=(const CsOperator& rhs);
  CsOperator& operator*=(Complex scale);

  friend CsOperator operator+(CsOperator lhs, const CsOperator& rhs) { return lhs += rhs; }
  friend CsOperator operator-(CsOperator lhs, const CsOperator& rhs) { return lhs -= rhs; }
  friend CsOperator operator*(CsOperator op, Complex scale) { return op *= scale; }
  friend CsOperator operator*(Complex scale, CsOperator op) { return op *= scale; }
  friend CsOperator operator*(const CsOperator& lhs, const CsOperator& rhs);

 private:
  void require_compatible(const CsOperator& other) const;

  TruncatedSpace space_;
  SparseMatrix matrix_;
  Kind kind_;
};

/// Single-mode lowering operator with sqrt(k) at (k-1, k), k = 1..n_max.
SparseMatrix annihilation(int n_max);
SparseMatrix mode_identity(int dimension);

/// Sparse Kronecker product A (x) B with pruning.
SparseMatrix kron(const SparseMatrix& lhs, const SparseMatrix& rhs);

/// kron(op, I) for the photon mode, kron(I, op) for the phonon mode.
CsOperator embed(const SparseMatrix& single_mode, Mode mode, const TruncatedSpace& space);

struct LadderOperators {
  CsOperator a;  // photon
  CsOperator b;  // phonon
};
LadderOperators ladder_operators(const TruncatedSpace& space);

/// q = (b^dagger + b)/sqrt(2) and p = i(b^dagger - b)/sqrt(2).
CsOperator phonon_position(const TruncatedSpace& space);
CsOperator phonon_momentum(const TruncatedSpace& space);

/// -i [H, .] as the superoperator -i (I (x) H - H^T (x) I).
CsOperator hamiltonian_superop(const CsOperator& hamiltonian);

/// D[c] rho = c rho c^dagger - (c^dagger c rho + rho c^dagger c) / 2.
CsOperator lindblad_superop(const CsOperator& jump);

DenseVector vec(const DenseMatrix& m);
DenseMatrix unvec(const DenseVector& v, Eigen::Index dim);

/// Row functional t with t . vec(rho) = Tr(rho): ones at k + k*dim.
Eigen::RowVectorXcd trace_functional(Eigen::Index dim);

/// Tr(op * rho) for a sparse operator and dense state without forming the product.
Complex trace_product(const SparseMatrix& op, const DenseMatrix& rho);

}  // namespace quadromech
