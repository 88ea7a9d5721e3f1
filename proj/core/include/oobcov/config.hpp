#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "oobcov/channel.hpp"
#include "oobcov/compressed.hpp"
#include "oobcov/covariance.hpp"

namespace oobcov {

// Angles in the config file are degrees; everything else is SI.

struct SystemConfig {
  int n_rx_sub6 = 8;
  int n_tx_sub6 = 4;
  int n_rx = 64;
  int n_tx = 32;
  int m_rx = 16;
  int m_tx = 8;
  int n_streams = 4;
  int k_sub6 = 32;
  int k = 128;
  double cp_fraction = 0.25;
  double spacing = 0.5;
  double fc_sub6_hz = 3.5e9;
  double fc_hz = 28e9;
  double bw_sub6_hz = 150e6;
  double bw_hz = 850e6;
  /// Sub-6 transmit power is specified per reference bandwidth.
  double power_sub6_dbm = 30.0;
  double power_sub6_ref_bw_hz = 25e6;
  double power_dbm = 43.0;
  double pathloss_exponent = 3.0;
  double thermal_dbm_per_hz = -174.0;
  double noise_figure_db = 1.0;
  int phase_bits = 2;

  int taps_sub6() const;
  int taps() const;
};

struct TwoClusterConfig {
  int rays = 100;
  double as_deg = 3.0;
  double first_aoa_deg = 5.0;
  std::vector<double> separations_deg = {5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
  /// Second cluster of the efficiency-vs-distance experiment.
  double far_aoa_deg = 45.0;
  double max_delay_s = 10e-9;
};

struct ChannelConfig {
  Congruence mode = Congruence::realistic;
  int sub6_clusters = 10;
  int mmwave_clusters = 5;
  int sub6_rays = 20;
  int mmwave_rays = 20;
  double sub6_as_deg = 4.0;
  double mmwave_as_deg = 2.0;
  double sub6_rms_delay_s = 3.8e-9;
  double mmwave_rms_delay_s = 2.7e-9;
  double sub6_power_mu = 0.2;
  double mmwave_power_mu = 0.1;
  double angle_limit_deg = 60.0;
  double mean_angle_perturbation_deg = 0.0;
  double ray_delay_fraction = 0.1;
  double distance_m = 90.0;
  std::vector<double> distances_m = {30, 45, 60, 75, 90, 105, 120};
  double snapshot_distance_m = 70.0;
  TwoClusterConfig two_cluster;

  /// Generator parameters for the realistic (mismatched) channel.
  ClusterGenConfig realistic() const;
};

struct EstimationConfig {
  int snapshots = 30;
  std::vector<int> snapshot_sweep = {5, 10, 15, 20, 25, 30, 40, 50, 60, 80, 100, 120, 160};
  int sub6_snapshots = 30;
  int oversampling = 2;
  double j_rho = 0.9;
  double j_w_factor = 0.1;
  std::vector<double> j_rho_candidates = {0.5, 0.7, 0.9, 0.99};
  double as_threshold_deg = 15.0;
  PasKind pas = PasKind::truncated_gaussian;
  double spread_scale = 0.70710678118654752;
  StopNorm stop_norm = StopNorm::trace;
  /// Pilot subcarrier for compressed estimation; negative selects K/2.
  int pilot_subcarrier = -1;
  /// Streams used by the efficiency metric.
  int eta_streams = 4;
  int t_stat = 2048;
  /// Evenly spaced subcarriers averaged in the rate metric.
  int rate_subcarriers = 8;

  int pilot(int k) const { return pilot_subcarrier < 0 ? k / 2 : pilot_subcarrier; }
};

struct SnrLossConfig {
  std::vector<int> antennas = {16, 64};
  std::vector<double> snr_db = {0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
  double sigma_alpha_sq = 1.0;
  int mc_trials = 200;
  bool expected_noise = true;
};

struct RunConfig {
  int trials = 100;
  std::uint64_t seed = 1;
  std::string output = "results.csv";
};

struct ExperimentConfig {
  SystemConfig system;
  ChannelConfig channel;
  EstimationConfig estimation;
  SnrLossConfig snr_loss;
  RunConfig run;

  /// Throws Error(ConfigError) naming the first offending field path.
  void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);

/// Missing fields keep their defaults; unknown fields are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);

ExperimentConfig load_config(const std::string& path);

/// Applies "dotted.path=value" overrides; the value is parsed as JSON when
/// possible and taken as a string otherwise.
ExperimentConfig apply_overrides(const ExperimentConfig& base,
                                 const std::vector<std::string>& assignments);

/// Link budget of one band at a given distance.
struct LinkBudget {
  double tx_power_dbm = 0.0;
  double pathloss_db = 0.0;
  double noise_dbm = 0.0;
  double snr_db = 0.0;
  /// Noise variance relative to a unit-gain channel: 10^(-snr_db/10).
  double noise_var = 0.0;
};

/// Free-space loss at 1 m, then pathloss_exponent * 10 log10(d).
LinkBudget sub6_link(const SystemConfig& s, double distance_m);
LinkBudget mmwave_link(const SystemConfig& s, double distance_m);

}  // namespace oobcov
