#include "oobcov/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace oobcov {

EfficiencyValue efficiency_value(const CovarianceMatrix& r_true, const CovarianceMatrix& r_est,
                                 int n_streams) {
  require(r_true.size() == r_est.size(), ErrorCode::DimensionMismatch,
          "efficiency: covariance sizes differ");
  require(n_streams >= 1 && n_streams <= r_true.size(), ErrorCode::InvalidArgument,
          "efficiency: n_streams must be in [1, N]");
  const CMat u = r_true.eigen().vectors.leftCols(n_streams);
  const CMat uh = r_est.eigen().vectors.leftCols(n_streams);
  const double den = (u.adjoint() * r_true.mat() * u).trace().real();
  const double num = (uh.adjoint() * r_true.mat() * uh).trace().real();
  require(den > 0.0, ErrorCode::DegenerateEstimate, "efficiency: true covariance has no power");
  EfficiencyValue v;
  v.raw = num / den;
  v.clipped = std::clamp(v.raw, 0.0, 1.0);
  return v;
}

double efficiency(const CovarianceMatrix& r_true, const CovarianceMatrix& r_est, int n_streams) {
  return efficiency_value(r_true, r_est, n_streams).clipped;
}

void RateConfig::validate() const {
  require(total_power > 0.0, ErrorCode::InvalidArgument, "RateConfig: total_power must be > 0");
  require(noise_var > 0.0, ErrorCode::InvalidArgument, "RateConfig: noise_var must be > 0");
  require(num_subcarriers >= 1 && num_streams >= 1, ErrorCode::InvalidArgument,
          "RateConfig: num_subcarriers and num_streams must be >= 1");
  require(stat_blocks >= 1 && train_blocks >= 0 && train_blocks <= stat_blocks,
          ErrorCode::InvalidArgument, "RateConfig: need 0 <= train_blocks <= stat_blocks");
}

double effective_rate(const FreqChannel& fc, const HybridPrecoder& precoder,
                      const HybridPrecoder& combiner, const RateConfig& cfg) {
  cfg.validate();
  const int nk = fc.num_subcarriers();
  require(nk >= 1, ErrorCode::InvalidArgument, "effective_rate: empty channel");
  const double fraction =
      1.0 - static_cast<double>(cfg.train_blocks) / static_cast<double>(cfg.stat_blocks);
  const double snr_scale = cfg.total_power / (cfg.num_subcarriers * cfg.num_streams);
  double total = 0.0;
  for (int i = 0; i < nk; ++i) {
    const CMat& h = fc.subcarriers[static_cast<std::size_t>(i)];
    const CMat f = precoder.effective(i);
    const CMat w = combiner.effective(i);
    require(h.cols() == f.rows() && h.rows() == w.rows() && f.cols() == w.cols(),
            ErrorCode::DimensionMismatch, "effective_rate: precoder/combiner dimensions");
    const CMat rn = cfg.noise_var * (w.adjoint() * w);
    Eigen::LLT<CMat> llt(rn);
    const double scale = rn.cwiseAbs().maxCoeff();
    if (llt.info() != Eigen::Success || scale <= 0.0 ||
        llt.matrixL().toDenseMatrix().diagonal().real().minCoeff() <= 1e-12 * std::sqrt(scale)) {
      fail(ErrorCode::SingularNoiseCov, "effective_rate: singular noise covariance after combining");
    }
    const CMat a = llt.matrixL().solve(w.adjoint() * h * f);
    const CMat g = CMat::Identity(a.rows(), a.rows()) + snr_scale * (a * a.adjoint());
    Eigen::LLT<CMat> gl(linalg::hermitian_part(g));
    total += 2.0 * gl.matrixLLT().diagonal().real().array().log().sum() / std::log(2.0);
  }
  return fraction * total / nk;
}

double snr_loss(double u_rx_hat_norm_sq, double u_tx_hat_norm_sq) {
  require(u_rx_hat_norm_sq >= 0.0 && u_tx_hat_norm_sq >= 0.0, ErrorCode::InvalidArgument,
          "snr_loss: norms must be non-negative");
  return u_rx_hat_norm_sq * u_tx_hat_norm_sq;
}

namespace {

double loss_factor(double x, double sigma_alpha_sq, int n) {
  return 1.0 + x / (static_cast<double>(n) * n * sigma_alpha_sq * sigma_alpha_sq);
}

void check_perturbation(const Perturbation& p, int n_rx, int n_tx) {
  require(p.delta_rx.rows() == n_rx && p.delta_rx.cols() == n_rx && p.delta_tx.rows() == n_tx &&
              p.delta_tx.cols() == n_tx,
          ErrorCode::DimensionMismatch, "perturbation dimensions do not match arrays");
}

}  // namespace

double snr_loss_approx(const Perturbation& pert, const CVec& u_rx, const CVec& u_tx,
                       double sigma_alpha_sq, int n_rx, int n_tx) {
  check_perturbation(pert, n_rx, n_tx);
  require(sigma_alpha_sq > 0.0, ErrorCode::InvalidArgument, "snr_loss_approx: sigma_alpha_sq <= 0");
  return loss_factor((pert.delta_rx * u_rx).squaredNorm(), sigma_alpha_sq, n_rx) *
         loss_factor((pert.delta_tx * u_tx).squaredNorm(), sigma_alpha_sq, n_tx);
}

std::pair<double, double> snr_loss_bounds(const Perturbation& pert, double sigma_alpha_sq,
                                          int n_rx, int n_tx) {
  check_perturbation(pert, n_rx, n_tx);
  require(sigma_alpha_sq > 0.0, ErrorCode::InvalidArgument, "snr_loss_bounds: sigma_alpha_sq <= 0");
  const RVec s_rx = Eigen::JacobiSVD<CMat>(pert.delta_rx).singularValues();
  const RVec s_tx = Eigen::JacobiSVD<CMat>(pert.delta_tx).singularValues();
  const double lo = loss_factor(s_rx.minCoeff() * s_rx.minCoeff(), sigma_alpha_sq, n_rx) *
                    loss_factor(s_tx.minCoeff() * s_tx.minCoeff(), sigma_alpha_sq, n_tx);
  const double hi = loss_factor(s_rx.maxCoeff() * s_rx.maxCoeff(), sigma_alpha_sq, n_rx) *
                    loss_factor(s_tx.maxCoeff() * s_tx.maxCoeff(), sigma_alpha_sq, n_tx);
  return {lo, hi};
}

namespace {

CVec single_stream(const CovarianceMatrix& r, const SnrExperiment& s, int n_rf) {
  CVec v;
  if (s.mode == PrecodingMode::digital) {
    v = design_digital(r, 1).col(0);
  } else {
    const HybridPrecoder p = design_hybrid(r, n_rf, 1, PhaseCodebook(s.phase_bits), 1);
    v = p.effective(0).col(0);
  }
  return v / v.norm();
}

}  // namespace

double monte_carlo_snr(const SnrExperiment& s, const Perturbation& pert, int trials, Rng& rng) {
  const int nr = s.rx.num_antennas();
  const int nt = s.tx.num_antennas();
  check_perturbation(pert, nr, nt);
  require(trials >= 1, ErrorCode::InvalidArgument, "monte_carlo_snr: trials must be >= 1");
  const CVec ar = array_response(s.rx, s.aoa);
  const CVec at = array_response(s.tx, s.aod);
  const CMat r_rx = nr * s.sigma_alpha_sq * (ar * ar.adjoint());
  const CMat r_tx = nt * s.sigma_alpha_sq * (at * at.adjoint());

  const CVec w0 = single_stream(CovarianceMatrix(r_rx), s, s.n_rf_rx);
  const CVec f0 = single_stream(CovarianceMatrix(r_tx, Side::tx), s, s.n_rf_tx);
  const CVec w1 = single_stream(CovarianceMatrix(r_rx + pert.delta_rx), s, s.n_rf_rx);
  const CVec f1 = single_stream(CovarianceMatrix(r_tx + pert.delta_tx, Side::tx), s, s.n_rf_tx);

  const double root = std::sqrt(static_cast<double>(nr) * nt);
  const cd sig0 = root * w0.dot(ar) * at.dot(f0);
  const cd sig1 = root * w1.dot(ar) * at.dot(f1);
  double p0 = 0.0, p1 = 0.0, n0 = 0.0, n1 = 0.0;
  CVec noise(nr);
  for (int t = 0; t < trials; ++t) {
    const cd alpha = complex_normal(rng, s.sigma_alpha_sq);
    p0 += std::norm(alpha * sig0);
    p1 += std::norm(alpha * sig1);
    if (s.expected_noise) {
      n0 += s.noise_var * w0.squaredNorm();
      n1 += s.noise_var * w1.squaredNorm();
      continue;
    }
    for (int i = 0; i < nr; ++i) noise[i] = complex_normal(rng, s.noise_var);
    n0 += std::norm(w0.dot(noise));
    n1 += std::norm(w1.dot(noise));
  }
  require(p1 > 0.0 && n0 > 0.0, ErrorCode::DegenerateEstimate,
          "monte_carlo_snr: estimated link carries no signal");
  return (p0 / n0) / (p1 / n1);
}

}  // namespace oobcov
