#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "oobcov/channel.hpp"
#include "oobcov/linalg.hpp"

namespace oobcov {

enum class Side { rx, tx };

/// Hermitian PSD spatial covariance with a lazily computed, shared
/// eigen-decomposition. The stored matrix is symmetrized on construction and
/// never mutated afterwards.
class CovarianceMatrix {
 public:
  CovarianceMatrix() : CovarianceMatrix(CMat(0, 0)) {}
  explicit CovarianceMatrix(const CMat& mat, Side side = Side::rx);

  const CMat& mat() const noexcept { return mat_; }
  Side side() const noexcept { return side_; }
  int size() const noexcept { return static_cast<int>(mat_.rows()); }

  /// Descending eigen-pairs (see linalg::hermitian_eigen).
  const linalg::HermitianEigen& eigen() const;

  bool is_hermitian(double tol = 1e-10) const;
  /// Smallest eigenvalue >= -rel_tol * largest eigenvalue.
  bool is_psd(double rel_tol = 1e-8) const;

  CovarianceMatrix scaled(double c) const { return CovarianceMatrix(c * mat_, side_); }

 private:
  struct Cache {
    std::once_flag once;
    linalg::HermitianEigen eig;
  };
  CMat mat_;
  Side side_;
  std::shared_ptr<Cache> cache_;
};

/// Power azimuth spectrum shapes with closed-form covariances.
enum class PasKind { truncated_laplacian, truncated_gaussian, uniform };

struct SubspaceDecomposition {
  CMat signal_basis;
  RVec signal_values;
  CMat noise_basis;
};

/// (1/K) sum_k (1/N_TX) H[k] H[k]^H.
CovarianceMatrix rx_covariance(const FreqChannel& fc);

/// (1/K) sum_k (1/N_RX) H[k]^H H[k].
CovarianceMatrix tx_covariance(const FreqChannel& fc);

/// Closed-form single-cluster covariance under the small angle-spread model.
/// Entry (i, j) uses the antenna index difference i - j.
CovarianceMatrix theoretical_covariance(PasKind pas, double mean_angle, double spread,
                                        const UlaGeometry& geom, Side side = Side::rx);

struct WeightedComponent {
  double power = 0.0;
  CovarianceMatrix cov;
};

/// sum_c power_c R_c, plus noise_var * I when given.
CovarianceMatrix synthesize_multicluster(const std::vector<WeightedComponent>& components,
                                         std::optional<double> noise_var = std::nullopt);

SubspaceDecomposition subspace_decompose(const CovarianceMatrix& r, int signal_dim);

}  // namespace oobcov
