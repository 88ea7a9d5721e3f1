#include "oobcov/nnls.hpp"

#include <limits>
#include <vector>

namespace oobcov {

namespace {

RVec solve_passive(const RMat& a, const RVec& b, const std::vector<bool>& passive) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
  RVec z = RVec::Zero(a.cols());
  if (idx.empty()) return z;
  RMat ap(a.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) ap.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
  const RVec zp = ap.colPivHouseholderQr().solve(b);
  for (std::size_t k = 0; k < idx.size(); ++k) z[idx[k]] = zp[static_cast<Eigen::Index>(k)];
  return z;
}

}  // namespace

NnlsResult nnls(const RMat& a, const RVec& b, double tol, int max_iter) {
  require(a.rows() == b.size(), ErrorCode::DimensionMismatch, "nnls: A and b row counts differ");
  const Eigen::Index n = a.cols();
  if (max_iter <= 0) max_iter = static_cast<int>(3 * n + 10);
  const double thresh = tol * std::max(1.0, a.norm() * b.norm());

  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  RVec x = RVec::Zero(n);
  RVec w = a.transpose() * b;
  int iter = 0;

  while (iter < max_iter) {
    Eigen::Index t = -1;
    double best = thresh;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w[j] > best) {
        best = w[j];
        t = j;
      }
    }
    if (t < 0) break;
    passive[static_cast<std::size_t>(t)] = true;
    ++iter;

    // Inner loop: restore feasibility of the passive-set solution.
    while (true) {
      RVec z = solve_passive(a, b, passive);
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) feasible = false;
      if (feasible) {
        x = z;
        break;
      }
      double alpha = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) {
          alpha = std::min(alpha, x[j] / (x[j] - z[j]));
        }
      }
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x[j] <= 1e-15) {
          passive[static_cast<std::size_t>(j)] = false;
          x[j] = 0.0;
        }
      }
    }
    w = a.transpose() * (b - a * x);
  }

  NnlsResult out;
  out.x = x;
  out.residual_norm = (a * x - b).norm();
  out.iterations = iter;
  return out;
}

}  // namespace oobcov
