#include "oobcov/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace oobcov::linalg {

void canonicalize_phase(Eigen::Ref<CVec> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]);
    if (mag > 1e-12) {
      v *= std::conj(v[i]) / mag;
      v[i] = cd(mag, 0.0);
      return;
    }
  }
}

namespace {

bool lex_less(const CVec& a, const CVec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
    if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
  }
  return false;
}

}  // namespace

HermitianEigen hermitian_eigen(const CMat& a) {
  require(a.rows() == a.cols(), ErrorCode::DimensionMismatch,
          "hermitian_eigen: matrix must be square");
  const auto n = a.rows();
  HermitianEigen out;
  if (n == 0) return out;

  Eigen::SelfAdjointEigenSolver<CMat> solver(hermitian_part(a));
  // Eigen returns ascending values; reverse into descending order.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = n - 1 - i;

  std::vector<CVec> vecs;
  vecs.reserve(order.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    CVec v = solver.eigenvectors().col(i);
    canonicalize_phase(v);
    vecs.push_back(std::move(v));
  }
  const RVec& vals = solver.eigenvalues();
  const double scale = std::max(vals.cwiseAbs().maxCoeff(), 1e-300);
  const double tie = 1e-10 * scale;

  // Sort descending, then reorder within near-degenerate runs.
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return vals[x] > vals[y]; });
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() && vals[order[start]] - vals[order[end]] <= tie) ++end;
    std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(start),
                     order.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](Eigen::Index x, Eigen::Index y) { return lex_less(vecs[x], vecs[y]); });
    start = end;
  }

  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[i] = vals[order[static_cast<std::size_t>(i)]];
    out.vectors.col(i) = vecs[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
  }
  return out;
}

CMat hermitian_part(const CMat& a) {
  return 0.5 * (a + a.adjoint());
}

CMat pinv(const CMat& a) {
  if (a.size() == 0) return CMat(a.cols(), a.rows());
  Eigen::CompleteOrthogonalDecomposition<CMat> cod(a);
  return cod.pseudoInverse();
}

std::vector<cd> polynomial_roots(const std::vector<cd>& coeffs) {
  double scale = 0.0;
  for (const auto& c : coeffs) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return {};
  const double eps = 1e-14 * scale;

  std::size_t lo = 0;
  std::size_t hi = coeffs.size();
  while (hi > 0 && std::abs(coeffs[hi - 1]) <= eps) --hi;
  while (lo < hi && std::abs(coeffs[lo]) <= eps) ++lo;

  std::vector<cd> roots(lo, cd(0.0, 0.0));
  const std::size_t degree = hi - lo - 1;
  if (degree == 0) return roots;

  // Companion matrix of the monic polynomial.
  CMat comp = CMat::Zero(static_cast<Eigen::Index>(degree), static_cast<Eigen::Index>(degree));
  const cd lead = coeffs[hi - 1];
  for (std::size_t k = 0; k < degree; ++k) {
    comp(0, static_cast<Eigen::Index>(k)) = -coeffs[hi - 2 - k] / lead;
  }
  for (std::size_t k = 1; k < degree; ++k) {
    comp(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = 1.0;
  }
  Eigen::ComplexEigenSolver<CMat> solver(comp, false);
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    roots.push_back(solver.eigenvalues()[k]);
  }
  return roots;
}

double principal_angle(const CMat& a, const CMat& b) {
  require(a.rows() == b.rows(), ErrorCode::DimensionMismatch,
          "principal_angle: row counts differ");
  Eigen::HouseholderQR<CMat> qa(a);
  Eigen::HouseholderQR<CMat> qb(b);
  const CMat ua = qa.householderQ() * CMat::Identity(a.rows(), a.cols());
  const CMat ub = qb.householderQ() * CMat::Identity(b.rows(), b.cols());
  const CMat resid = ub - ua * (ua.adjoint() * ub);
  Eigen::JacobiSVD<CMat> svd(resid);
  const double s = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  return std::asin(std::min(1.0, s));
}

double max_abs(const CMat& a) {
  return a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace oobcov::linalg
