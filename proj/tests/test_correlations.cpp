#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "quadromech/correlations.hpp"
#include "support.hpp"

using namespace quadromech;

TEST_CASE("coherent states are Poissonian") {
  const TruncatedSpace s(3, 30);
  const DensityMatrix phonon = coherent_state(s, Mode::Phonon, Complex(0.8, 0.3));
  CHECK(std::abs(g2_zero(phonon, CorrelationKind::bb) - 1.0) < 1e-10);
  const TruncatedSpace wide(30, 4);
  const DensityMatrix photon = coherent_state(wide, Mode::Photon, 0.5);
  CHECK(std::abs(g2_zero(photon, CorrelationKind::aa) - 1.0) < 1e-10);
}

TEST_CASE("thermal phonons are bunched") {
  const DensityMatrix rho = thermal_phonon_state(TruncatedSpace(2, 40), 0.1);
  CHECK(std::abs(g2_zero(rho, CorrelationKind::bb) - 2.0) < 1e-8);
}

TEST_CASE("one phonon cannot pair") {
  const DensityMatrix rho = fock_state(TruncatedSpace(2, 4), 0, 1);
  CHECK(g2_zero(rho, CorrelationKind::bb) == 0.0);
}

TEST_CASE("product states factorize") {
  // Coherent photons times thermal phonons, built as a Kronecker product.
  const TruncatedSpace s(20, 30);
  const DenseMatrix photons = coherent_state(TruncatedSpace(20, 4), Mode::Photon, 0.4).matrix();
  const DenseMatrix phonons = thermal_phonon_state(TruncatedSpace(2, 30), 0.3).matrix();
  // Reduced single-mode matrices: pick the vacuum block of the other mode.
  DenseMatrix ra(s.photon_dim(), s.photon_dim()), rb(s.phonon_dim(), s.phonon_dim());
  const TruncatedSpace ps(20, 4), ts(2, 30);
  for (int i = 0; i < s.photon_dim(); ++i)
    for (int j = 0; j < s.photon_dim(); ++j) ra(i, j) = photons(ps.index(i, 0), ps.index(j, 0));
  for (int i = 0; i < s.phonon_dim(); ++i)
    for (int j = 0; j < s.phonon_dim(); ++j) rb(i, j) = phonons(ts.index(0, i), ts.index(0, j));
  const DenseMatrix product = Eigen::kroneckerProduct(ra, rb);
  const DensityMatrix rho(s, product);
  CHECK(std::abs(g2_zero(rho, CorrelationKind::ab) - 1.0) < 1e-10);
}

TEST_CASE("empty system has no correlations") {
  EffectiveParams ep;
  ep.J = 0.406;
  CHECK_THROWS_CODE(record(ep, TruncatedSpace::standard()), ErrorCode::UndefinedCorrelation);
  CHECK_THROWS_CODE(g2_zero(vacuum_state(TruncatedSpace(2, 4)), CorrelationKind::aa),
                    ErrorCode::UndefinedCorrelation);
}

TEST_CASE("fig2a operating point is antibunched and anticorrelated") {
  EffectiveParams ep;
  ep.J = 0.406;
  ep.epsilon = 0.05;
  ep.n_th = 1e-4;
  const CorrelationRecord r = record(ep, TruncatedSpace::standard());
  CHECK(r.g2_aa_0 < 0.1);
  CHECK(r.g2_bb_0 < 1.0);
  CHECK(r.g2_ab_0 < 1.0);
  CHECK(r.n_a >= 0.0);
  CHECK(r.g2_aa_0 >= -1e-10);
  CHECK(r.space == TruncatedSpace::standard());
  // Same input, same bits.
  const CorrelationRecord again = record(ep, TruncatedSpace::standard());
  CHECK(again.g2_aa_0 == r.g2_aa_0);
  CHECK(again.n_b == r.n_b);
}

TEST_CASE("fig5c point has correlated pairs") {
  EffectiveParams ep;
  ep.J = 5.0;
  ep.delta_m = 3.9;
  ep.delta = 7.8;
  ep.epsilon = 0.05;
  ep.n_th = 1e-4;
  const CorrelationRecord r = record(ep, TruncatedSpace::standard());
  CHECK(r.g2_aa_0 > 1.0);
  CHECK(r.g2_bb_0 > 1.0);
  CHECK(r.g2_ab_0 > 1.0);
}
