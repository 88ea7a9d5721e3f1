#include "oobcov/covariance.hpp"

#include <cmath>

namespace oobcov {

CovarianceMatrix::CovarianceMatrix(const CMat& mat, Side side)
    : mat_(linalg::hermitian_part(mat)), side_(side), cache_(std::make_shared<Cache>()) {
  require(mat.rows() == mat.cols(), ErrorCode::DimensionMismatch,
          "CovarianceMatrix: matrix must be square");
}

const linalg::HermitianEigen& CovarianceMatrix::eigen() const {
  std::call_once(cache_->once, [this] { cache_->eig = linalg::hermitian_eigen(mat_); });
  return cache_->eig;
}

bool CovarianceMatrix::is_hermitian(double tol) const {
  return linalg::max_abs(mat_ - mat_.adjoint()) <= tol;
}

bool CovarianceMatrix::is_psd(double rel_tol) const {
  if (mat_.size() == 0) return true;
  const RVec& v = eigen().values;
  const double top = std::max(v[0], 0.0);
  return v[v.size() - 1] >= -rel_tol * top - 1e-300;
}

namespace {

void require_nonempty(const FreqChannel& fc, const char* who) {
  require(!fc.subcarriers.empty(), ErrorCode::InvalidArgument,
          std::string(who) + ": channel has no subcarriers");
}

}  // namespace

CovarianceMatrix rx_covariance(const FreqChannel& fc) {
  require_nonempty(fc, "rx_covariance");
  const auto n_rx = fc.subcarriers.front().rows();
  const auto n_tx = fc.subcarriers.front().cols();
  CMat acc = CMat::Zero(n_rx, n_rx);
  for (const auto& h : fc.subcarriers) acc.noalias() += h * h.adjoint();
  acc /= static_cast<double>(n_tx) * static_cast<double>(fc.subcarriers.size());
  return CovarianceMatrix(acc, Side::rx);
}

CovarianceMatrix tx_covariance(const FreqChannel& fc) {
  require_nonempty(fc, "tx_covariance");
  const auto n_rx = fc.subcarriers.front().rows();
  const auto n_tx = fc.subcarriers.front().cols();
  CMat acc = CMat::Zero(n_tx, n_tx);
  for (const auto& h : fc.subcarriers) acc.noalias() += h.adjoint() * h;
  acc /= static_cast<double>(n_rx) * static_cast<double>(fc.subcarriers.size());
  return CovarianceMatrix(acc, Side::tx);
}

CovarianceMatrix theoretical_covariance(PasKind pas, double mean_angle, double spread,
                                        const UlaGeometry& geom, Side side) {
  require(spread >= 0.0, ErrorCode::InvalidArgument,
          "theoretical_covariance: spread must be >= 0");
  const int n = geom.num_antennas();
  const double two_pi_delta = 2.0 * kPi * geom.spacing();
  const double s = std::sin(mean_angle);
  const double c = std::cos(mean_angle);

  // Laplacian truncation constant; tends to 1 as the spread vanishes.
  const double beta = spread > 0.0 ? 1.0 / (1.0 - std::exp(-std::sqrt(2.0) * kPi / spread)) : 1.0;
  const double varrho = std::sqrt(3.0) * two_pi_delta * spread * c;

  CMat r(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double d = static_cast<double>(i - j);
      const cd phase = std::polar(1.0, d * two_pi_delta * s);
      double env = 1.0;
      switch (pas) {
        case PasKind::truncated_laplacian: {
          const double x = two_pi_delta * d * c;
          env = beta / (1.0 + spread * spread / 2.0 * x * x);
          break;
        }
        case PasKind::truncated_gaussian: {
          const double x = d * two_pi_delta * c * spread;
          env = std::exp(-x * x);
          break;
        }
        case PasKind::uniform: {
          const double x = d * varrho;
          env = std::abs(x) < 1e-12 ? 1.0 : std::sin(x) / x;
          break;
        }
      }
      r(i, j) = env * phase;
    }
  }
  return CovarianceMatrix(r, side);
}

CovarianceMatrix synthesize_multicluster(const std::vector<WeightedComponent>& components,
                                         std::optional<double> noise_var) {
  require(!components.empty(), ErrorCode::InvalidArgument,
          "synthesize_multicluster: no components");
  const int n = components.front().cov.size();
  const Side side = components.front().cov.side();
  CMat acc = CMat::Zero(n, n);
  for (const auto& c : components) {
    require(c.cov.size() == n, ErrorCode::DimensionMismatch,
            "synthesize_multicluster: component sizes differ");
    require(c.cov.side() == side, ErrorCode::DimensionMismatch,
            "synthesize_multicluster: components mix rx and tx sides");
    require(c.power >= 0.0, ErrorCode::InvalidArgument,
            "synthesize_multicluster: negative power");
    acc += c.power * c.cov.mat();
  }
  if (noise_var) acc += *noise_var * CMat::Identity(n, n);
  return CovarianceMatrix(acc, side);
}

SubspaceDecomposition subspace_decompose(const CovarianceMatrix& r, int signal_dim) {
  const int n = r.size();
  require(signal_dim >= 1 && signal_dim <= n, ErrorCode::InvalidArgument,
          "subspace_decompose: signal_dim out of range");
  const auto& eig = r.eigen();
  SubspaceDecomposition out;
  out.signal_basis = eig.vectors.leftCols(signal_dim);
  out.signal_values = eig.values.head(signal_dim).cwiseMax(0.0);
  out.noise_basis = eig.vectors.rightCols(n - signal_dim);
  return out;
}

}  // namespace oobcov
