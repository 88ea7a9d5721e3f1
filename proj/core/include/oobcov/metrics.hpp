#pragma once

#include <utility>

#include "oobcov/channel.hpp"
#include "oobcov/covariance.hpp"
#include "oobcov/precoding.hpp"

namespace oobcov {

struct EfficiencyValue {
  double raw = 0.0;
  /// raw clipped to [0, 1].
  double clipped = 0.0;
};

/// Fraction of the true covariance power captured by the estimated dominant
/// subspace, tr(Uh^H R Uh) / tr(U^H R U), with U (Uh) the top n_streams
/// eigenvectors of R (R_est). Invariant to scaling of either argument.
EfficiencyValue efficiency_value(const CovarianceMatrix& r_true, const CovarianceMatrix& r_est,
                                 int n_streams);

/// efficiency_value(...).clipped.
double efficiency(const CovarianceMatrix& r_true, const CovarianceMatrix& r_est, int n_streams);

struct RateConfig {
  double total_power = 1.0;
  double noise_var = 1.0;
  int num_subcarriers = 1;
  int num_streams = 1;
  int stat_blocks = 1;
  int train_blocks = 0;

  void validate() const;
};

/// (1 - T_train/T_stat) times the mean over the subcarriers present in `fc`
/// of log2 det(I + P/(K N_s) R_n^-1 W^H H F F^H H^H W), R_n = noise_var W^H W.
/// Subcarrier i of fc uses bb[i] of both precoders.
double effective_rate(const FreqChannel& fc, const HybridPrecoder& precoder,
                      const HybridPrecoder& combiner, const RateConfig& cfg);

struct Perturbation {
  CMat delta_rx;
  CMat delta_tx;
};

/// ||u_rx_hat||^2 ||u_tx_hat||^2.
double snr_loss(double u_rx_hat_norm_sq, double u_tx_hat_norm_sq);

/// First-order loss (1 + ||dR_rx u_rx||^2 / (N_rx^2 s^2)) (1 + ||dR_tx u_tx||^2 / (N_tx^2 s^2)),
/// s = sigma_alpha_sq.
double snr_loss_approx(const Perturbation& pert, const CVec& u_rx, const CVec& u_tx,
                       double sigma_alpha_sq, int n_rx, int n_tx);

/// (lower, upper) from the smallest and largest singular values.
std::pair<double, double> snr_loss_bounds(const Perturbation& pert, double sigma_alpha_sq,
                                          int n_rx, int n_tx);

enum class PrecodingMode { digital, hybrid };

struct SnrExperiment {
  UlaGeometry rx{16};
  UlaGeometry tx{16};
  double aoa = 0.0;
  double aod = 0.0;
  double sigma_alpha_sq = 1.0;
  double noise_var = 1.0;
  PrecodingMode mode = PrecodingMode::digital;
  /// Hybrid mode only.
  int n_rf_rx = 4;
  int n_rf_tx = 4;
  int phase_bits = 2;
  /// Replace the sampled noise power |w^H n|^2 by its expectation
  /// noise_var ||w||^2; gains are still sampled.
  bool expected_noise = true;
};

/// Single-path Monte-Carlo SNR ratio SNR(true) / SNR(estimated). Both links
/// see the same gain and noise draws; precoders and combiners are the
/// normalized single-stream designs from the respective covariances.
double monte_carlo_snr(const SnrExperiment& setup, const Perturbation& pert, int trials, Rng& rng);

}  // namespace oobcov
