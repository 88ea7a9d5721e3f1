#include <doctest.h>

#include <oobcov/metrics.hpp>
#include <oobcov/nnls.hpp>
#include <oobcov/translation.hpp>

#include "helpers.hpp"

using namespace oobcov;

namespace {

CovarianceMatrix steering_cov(const UlaGeometry& g, const std::vector<double>& angles) {
  CMat r = CMat::Zero(g.num_antennas(), g.num_antennas());
  for (double a : angles) {
    const CVec v = array_response(g, a);
    r += v * v.adjoint();
  }
  return CovarianceMatrix(r);
}

CovarianceMatrix gaussian(double angle_deg, double as_deg, int n) {
  return theoretical_covariance(PasKind::truncated_gaussian, deg2rad(angle_deg), deg2rad(as_deg),
                                UlaGeometry(n));
}

}  // namespace

TEST_CASE("mdl_order") {
  CHECK(mdl_order(std::vector<double>(8, 3.0), 100) == 0);
  CHECK(mdl_order({100, 90, 1, 1, 1, 1, 1, 1}, 1000) == 2);
  CHECK(mdl_order({50, 1, 1, 1, 1, 1, 1, 1}, 500) == 1);
  CHECK_THROWS_AS(mdl_order({1, 2, 3}, 10), Error);
  CHECK_THROWS_AS(mdl_order({1}, 10), Error);
  CHECK_THROWS_AS(mdl_order({2, 1}, 0), Error);
  // Noise-free spectra with exact zeros stay finite.
  CHECK(mdl_order({4, 2, 0, 0}, 30) == 2);
}

TEST_CASE("cluster_count") {
  CHECK(cluster_count(0) == 1);
  CHECK(cluster_count(1) == 1);
  CHECK(cluster_count(4) == 2);
  CHECK(cluster_count(5) == 2);
  int prev = cluster_count(0);
  for (int p = 1; p < 100; ++p) {
    CHECK(cluster_count(p) >= prev);
    CHECK(cluster_count(p) >= 1);
    prev = cluster_count(p);
  }
  CHECK_THROWS_AS(cluster_count(-1), Error);
}

TEST_CASE("root_music") {
  const UlaGeometry g(8);
  const auto one = root_music(steering_cov(g, {0.2}), 1, g);
  REQUIRE(one.size() == 1);
  CHECK(std::abs(one[0] - 0.2) < 1e-6);

  const auto two = root_music(steering_cov(g, {0.5, -0.5}), 2, g);
  REQUIRE(two.size() == 2);
  CHECK(std::abs(two[0] + 0.5) < 1e-6);
  CHECK(std::abs(two[1] - 0.5) < 1e-6);

  const auto flat = root_music(CovarianceMatrix(CMat::Identity(8, 8)), 1, g);
  REQUIRE(flat.size() == 1);
  CHECK(std::abs(flat[0]) <= kPi / 2);

  CHECK_THROWS_AS(root_music(steering_cov(g, {0.2}), 8, g), Error);
  CHECK_THROWS_AS(root_music(steering_cov(g, {0.2}), 0, g), Error);
}

TEST_CASE("spread_root_music closed loop") {
  const UlaGeometry g(8);
  const auto one = spread_root_music(gaussian(rad2deg(0.1), 3.0, 8), 1, g);
  REQUIRE(one.size() == 1);
  CHECK(std::abs(one[0].angle - 0.1) < 0.01);
  CHECK(std::abs(rad2deg(one[0].spread) - 3.0) < 1.5);

  const auto r2 = synthesize_multicluster({{0.5, gaussian(5, 3, 8)}, {0.5, gaussian(45, 3, 8)}});
  const auto two = spread_root_music(r2, 2, g);
  REQUIRE(two.size() == 2);
  CHECK(std::abs(rad2deg(two[0].angle) - 5.0) < 1.0);
  CHECK(std::abs(rad2deg(two[1].angle) - 45.0) < 1.0);

  // A point source gives a degenerate spread that robustify must catch.
  const auto point = spread_root_music(steering_cov(g, {0.3}), 1, g);
  REQUIRE(point.size() == 1);
  CHECK(point[0].spread >= 0.0);

  CHECK_THROWS_AS(spread_root_music(r2, 4, g), Error);
}

TEST_CASE("robustify") {
  const UlaGeometry g(8);
  const auto r = steering_cov(g, {0.3});
  const auto trip = robustify({{0.3, 0.5}}, r, 0.26, g);
  REQUIRE(trip.size() == 1);
  CHECK(std::abs(trip[0].angle - 0.3) < 1e-6);
  CHECK(trip[0].spread == 0.0);

  const auto keep = robustify({{0.3, 0.02}}, r, 0.26, g);
  CHECK(keep[0].angle == 0.3);
  CHECK(keep[0].spread == 0.02);

  const auto mixed = robustify({{-0.4, 0.01}, {0.9, 0.7}, {0.1, 0.03}}, r, 0.26, g);
  REQUIRE(mixed.size() == 3);
  CHECK(mixed[0].angle == -0.4);
  CHECK(mixed[0].spread == 0.01);
  CHECK(std::abs(mixed[1].angle - 0.3) < 1e-6);
  CHECK(mixed[1].spread == 0.0);
  CHECK(mixed[2].angle == 0.1);

  const auto again = robustify(mixed, r, 0.26, g);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(again[i].angle == mixed[i].angle);
    CHECK(again[i].spread == mixed[i].spread);
  }
  CHECK_THROWS_AS(robustify({{0.3, 0.5}}, r, 0.0, g), Error);
}

TEST_CASE("nnls construct and recover") {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const RMat a = RMat::Random(20, 5);
    RVec x = RVec::Random(5).cwiseAbs();
    x[t % 5] = 0.0;
    const RVec b = a * x;
    const NnlsResult r = nnls(a, b);
    CHECK((r.x - x).lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK(r.x.minCoeff() >= 0.0);
  }
  // Unconstrained optimum outside the orthant: KKT conditions hold.
  const RMat a = RMat::Random(10, 4);
  const RVec b = RVec::Random(10);
  const NnlsResult r = nnls(a, b);
  const RVec grad = a.transpose() * (b - a * r.x);
  for (int i = 0; i < 4; ++i) {
    CHECK(r.x[i] >= 0.0);
    if (r.x[i] > 0.0) CHECK(std::abs(grad[i]) < 1e-8);
    else CHECK(grad[i] <= 1e-8);
  }
  CHECK_THROWS_AS(nnls(RMat::Zero(3, 2), RVec::Zero(4)), Error);
}

TEST_CASE("nnls_powers") {
  const auto r1 = gaussian(-20, 3, 8);
  const auto r2 = gaussian(25, 4, 8);
  const CMat mix = 0.7 * r1.mat() + 0.3 * r2.mat() + 0.1 * CMat::Identity(8, 8);
  const PowerFit f = nnls_powers(CovarianceMatrix(mix), {r1, r2});
  CHECK(std::abs(f.powers[0] - 0.7) < 1e-8);
  CHECK(std::abs(f.powers[1] - 0.3) < 1e-8);
  CHECK(std::abs(f.noise_var - 0.1) < 1e-8);

  const PowerFit g = nnls_powers(r1, {r1});
  CHECK(std::abs(g.powers[0] - 1.0) < 1e-8);
  CHECK(std::abs(g.noise_var) < 1e-8);

  // Grid lower bound: no nonnegative candidate beats the NNLS residual.
  const UlaGeometry geom(8);
  const auto s = steering_cov(geom, {0.4});
  const PowerFit h = nnls_powers(CovarianceMatrix(CMat::Identity(8, 8)), {s});
  CHECK(h.noise_var > 0.5);
  for (double p = 0.0; p <= 2.0; p += 0.05)
    for (double n = 0.0; n <= 2.0; n += 0.05) {
      const double res = (CMat::Identity(8, 8) - p * s.mat() - n * CMat::Identity(8, 8)).norm();
      CHECK(h.residual <= res + 1e-12);
    }
}

TEST_CASE("translate single cluster closed loop") {
  const UlaGeometry sub6(8), mm(64);
  const auto r = theoretical_covariance(PasKind::truncated_gaussian, deg2rad(10), deg2rad(3), sub6);
  const auto truth = theoretical_covariance(PasKind::truncated_gaussian, deg2rad(10), deg2rad(3), mm);
  const auto res = translate(r, sub6, mm, 30);
  CHECK(efficiency(truth, res.mmwave_cov, 1) >= 0.95);
  CHECK(res.mmwave_cov.is_hermitian());
  CHECK(res.mmwave_cov.is_psd());
}

TEST_CASE("translate two separated clusters") {
  const UlaGeometry sub6(8), mm(64);
  // Noise-free 3 degree clusters have eigenvalues down to 1e-6 that MDL
  // counts as sources; a small floor restores the two-cluster picture.
  const auto r = synthesize_multicluster({{0.5, gaussian(5, 3, 8)}, {0.5, gaussian(25, 3, 8)}}, 0.01);
  const auto res = translate(r, sub6, mm, 30);
  REQUIRE(res.estimates.size() == 2);
  CHECK(std::abs(res.estimates[0].power - 0.5) < 0.1);
  CHECK(std::abs(res.estimates[1].power - 0.5) < 0.1);
}

TEST_CASE("translate pure noise") {
  const UlaGeometry sub6(8), mm(64);
  const auto res = translate(CovarianceMatrix(0.2 * CMat::Identity(8, 8)), sub6, mm, 30);
  CHECK(res.estimates.size() == 1);
  CHECK(res.mmwave_cov.is_hermitian());
  CHECK(res.mmwave_cov.is_psd());
  CHECK(res.noise_var >= 0.0);
}

TEST_CASE("translate is scale equivariant") {
  const UlaGeometry sub6(8), mm(32);
  const auto base = synthesize_multicluster({{0.6, gaussian(-10, 2, 8)}, {0.4, gaussian(30, 3, 8)}},
                                            0.05);
  const auto a = translate(base, sub6, mm, 30);
  for (double c : {0.01, 3.0, 250.0}) {
    const auto b = translate(base.scaled(c), sub6, mm, 30);
    REQUIRE(a.estimates.size() == b.estimates.size());
    for (std::size_t i = 0; i < a.estimates.size(); ++i) {
      CHECK(std::abs(a.estimates[i].mean_angle - b.estimates[i].mean_angle) < 1e-8);
      CHECK(std::abs(a.estimates[i].spread - b.estimates[i].spread) < 1e-8);
      CHECK(std::abs(c * a.estimates[i].power - b.estimates[i].power) < 1e-7 * c);
    }
    CHECK(std::abs(c * a.noise_var - b.noise_var) < 1e-7 * c);
    CHECK(testutil::rel_diff(c * a.mmwave_cov.mat(), b.mmwave_cov.mat()) < 1e-7);
  }
}
