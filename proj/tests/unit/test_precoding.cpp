#include <doctest.h>

#include <oobcov/precoding.hpp>

#include "helpers.hpp"

using namespace oobcov;
using testutil::random_psd;

TEST_CASE("phase codebook") {
  const PhaseCodebook cb(2);
  REQUIRE(cb.size() == 4);
  CHECK(cb.phase(1) == doctest::Approx(kPi / 2));
  CHECK(cb.nearest(0.1) == 0);
  CHECK(cb.nearest(-0.1) == 0);
  CHECK(cb.nearest(kPi / 2 + 0.3) == 1);
  CHECK(cb.nearest(2.0 * kPi - 0.2) == 0);
  CHECK(cb.nearest(-kPi / 2) == 3);
  CHECK(std::abs(cb.entry(3, 0.5) - cd(0.0, -0.5)) < 1e-15);
  CHECK_THROWS_AS(PhaseCodebook(0), Error);
  CHECK_THROWS_AS(PhaseCodebook(17), Error);
}

TEST_CASE("design_digital returns orthonormal top eigenvectors") {
  Rng rng(1);
  const CovarianceMatrix r(random_psd(12, rng));
  const CMat u = design_digital(r, 3);
  CHECK((u.adjoint() * u - CMat::Identity(3, 3)).norm() < 1e-10);
  const RVec& ev = r.eigen().values;
  for (int i = 0; i < 3; ++i) CHECK((r.mat() * u.col(i) - ev[i] * u.col(i)).norm() < 1e-8 * ev[0]);
  CHECK_THROWS_AS(design_digital(r, 0), Error);
  CHECK_THROWS_AS(design_digital(r, 13), Error);
}

TEST_CASE("quantized steering atoms lie on the codebook") {
  const PhaseCodebook cb(2);
  const QuantizedAtoms q = quantized_steering_atoms(UlaGeometry(16), cb, 2);
  CHECK(q.atoms.cols() <= 32);
  CHECK(q.atoms.cols() > 1);
  for (Eigen::Index c = 0; c < q.atoms.cols(); ++c) {
    for (int i = 0; i < 16; ++i) CHECK(q.atoms(i, c) == cb.entry(q.phase_index(i, c), 0.25));
    for (Eigen::Index d = c + 1; d < q.atoms.cols(); ++d) CHECK(q.phase_index.col(c) != q.phase_index.col(d));
  }
}

TEST_CASE("design_hybrid recovers a representable target") {
  const PhaseCodebook cb(2);
  const QuantizedAtoms q = quantized_steering_atoms(UlaGeometry(16), cb, 2);
  const CVec a = q.atoms.col(5);
  const CovarianceMatrix r(a * a.adjoint());
  const HybridPrecoder p = design_hybrid(r, 2, 1, cb, 3);
  REQUIRE(p.residual_history.size() == 2);
  CHECK(p.residual_history[0] <= 1e-8);
  CHECK(p.rf_phase_index.col(0) == q.phase_index.col(5));
  CHECK(p.num_subcarriers() == 3);
  const CMat f = p.effective(1);
  CHECK(std::abs(std::abs(a.normalized().dot(f.col(0))) - 1.0) < 1e-8);
}

TEST_CASE("design_hybrid structure") {
  Rng rng(2);
  const PhaseCodebook cb(3);
  for (int trial = 0; trial < 10; ++trial) {
    const CovarianceMatrix r(random_psd(16, rng, 4));
    const int k = 4, ns = 2, nrf = 6;
    const HybridPrecoder p = design_hybrid(r, nrf, ns, cb, k);
    REQUIRE(p.rf.cols() == nrf);
    for (std::size_t m = 1; m < p.residual_history.size(); ++m)
      CHECK(p.residual_history[m] <= p.residual_history[m - 1] + 1e-12);
    double power = 0.0;
    for (int i = 0; i < k; ++i) power += p.effective(i).squaredNorm();
    CHECK(power == doctest::Approx(k * ns).epsilon(1e-12));
    for (int i = 0; i < 16; ++i)
      for (int m = 0; m < nrf; ++m) CHECK(p.rf(i, m) == cb.entry(p.rf_phase_index(i, m), 0.25));
  }
}

TEST_CASE("design_hybrid errors") {
  Rng rng(3);
  const CovarianceMatrix r(random_psd(8, rng));
  const PhaseCodebook cb(2);
  CHECK_THROWS_AS(design_hybrid(r, 2, 3, cb, 1), Error);
  CHECK_THROWS_AS(design_hybrid(r, 9, 1, cb, 1), Error);
  CHECK_THROWS_AS(design_hybrid(r, 2, 1, cb, 0), Error);
  CHECK_THROWS_AS(quantized_steering_atoms(UlaGeometry(8), cb, 0), Error);
  CHECK_THROWS_AS(HybridPrecoder{}.effective(0), Error);
}

TEST_CASE("digital_as_hybrid") {
  Rng rng(4);
  const CMat u = testutil::random_complex(6, 2, rng);
  const HybridPrecoder p = digital_as_hybrid(u, 5);
  CHECK(p.num_subcarriers() == 5);
  CHECK(p.effective(4) == u);
  CHECK_THROWS_AS(digital_as_hybrid(u, 0), Error);
}
