#pragma once

#include <random>

#include <doctest.h>

#include "quadromech/errors.hpp"
#include "quadromech/hilbert.hpp"

namespace qm_test {

using quadromech::Complex;
using quadromech::DenseMatrix;

inline double max_abs(const DenseMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline DenseMatrix random_matrix(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> dist;
  DenseMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(dist(rng), dist(rng));
  return m;
}

inline DenseMatrix random_hermitian(std::mt19937_64& rng, Eigen::Index n) {
  DenseMatrix m = random_matrix(rng, n);
  return (m + m.adjoint()) / 2.0;
}

/// Random density matrix G G^dagger / Tr.
inline DenseMatrix random_state(std::mt19937_64& rng, Eigen::Index n) {
  DenseMatrix g = random_matrix(rng, n);
  DenseMatrix rho = g * g.adjoint();
  return rho / rho.trace();
}

#define CHECK_THROWS_CODE(expr, expected)                        \
  do {                                                           \
    bool thrown_ = false;                                        \
    try {                                                        \
      (void)(expr);                                              \
    } catch (const quadromech::Error& e_) {                      \
      thrown_ = true;                                            \
      CHECK(e_.code() == (expected));                            \
    }                                                            \
    CHECK_MESSAGE(thrown_, "expected quadromech::Error from " #expr); \
  } while (0)

}  // namespace qm_test
