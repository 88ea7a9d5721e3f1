#include "oobcov/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace oobcov {

using nlohmann::json;

int SystemConfig::taps_sub6() const {
  return static_cast<int>(std::lround(cp_fraction * k_sub6)) + 1;
}

int SystemConfig::taps() const { return static_cast<int>(std::lround(cp_fraction * k)) + 1; }

ClusterGenConfig ChannelConfig::realistic() const {
  ClusterGenConfig g;
  g.mode = Congruence::realistic;
  g.sub6_clusters = sub6_clusters;
  g.mmwave_clusters = mmwave_clusters;
  g.sub6_rays = sub6_rays;
  g.mmwave_rays = mmwave_rays;
  g.sub6_angle_spread = deg2rad(sub6_as_deg);
  g.mmwave_angle_spread = deg2rad(mmwave_as_deg);
  g.sub6_rms_delay = sub6_rms_delay_s;
  g.mmwave_rms_delay = mmwave_rms_delay_s;
  g.sub6_power_mu = sub6_power_mu;
  g.mmwave_power_mu = mmwave_power_mu;
  g.angle_limit = deg2rad(angle_limit_deg);
  g.mean_angle_perturbation = deg2rad(mean_angle_perturbation_deg);
  g.ray_delay_fraction = ray_delay_fraction;
  return g;
}

void to_json(json& j, const Congruence& c) {
  j = c == Congruence::congruent ? "congruent" : "realistic";
}

void from_json(const json& j, Congruence& c) {
  const auto s = j.get<std::string>();
  if (s == "congruent") {
    c = Congruence::congruent;
  } else if (s == "realistic") {
    c = Congruence::realistic;
  } else {
    fail(ErrorCode::ConfigError, "channel.mode: expected \"congruent\" or \"realistic\", got \"" + s + "\"");
  }
}

void to_json(json& j, const PasKind& p) {
  switch (p) {
    case PasKind::truncated_laplacian: j = "laplacian"; break;
    case PasKind::truncated_gaussian: j = "gaussian"; break;
    case PasKind::uniform: j = "uniform"; break;
  }
}

void from_json(const json& j, PasKind& p) {
  const auto s = j.get<std::string>();
  if (s == "laplacian") {
    p = PasKind::truncated_laplacian;
  } else if (s == "gaussian") {
    p = PasKind::truncated_gaussian;
  } else if (s == "uniform") {
    p = PasKind::uniform;
  } else {
    fail(ErrorCode::ConfigError, "estimation.pas: expected laplacian, gaussian or uniform, got \"" + s + "\"");
  }
}

void to_json(json& j, const StopNorm& n) { j = n == StopNorm::trace ? "trace" : "frobenius"; }

void from_json(const json& j, StopNorm& n) {
  const auto s = j.get<std::string>();
  if (s == "trace") {
    n = StopNorm::trace;
  } else if (s == "frobenius") {
    n = StopNorm::frobenius;
  } else {
    fail(ErrorCode::ConfigError, "estimation.stop_norm: expected \"trace\" or \"frobenius\", got \"" + s + "\"");
  }
}

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SystemConfig, n_rx_sub6, n_tx_sub6, n_rx, n_tx, m_rx,
                                                m_tx, n_streams, k_sub6, k, cp_fraction, spacing,
                                                fc_sub6_hz, fc_hz, bw_sub6_hz, bw_hz, power_sub6_dbm,
                                                power_sub6_ref_bw_hz, power_dbm, pathloss_exponent,
                                                thermal_dbm_per_hz, noise_figure_db, phase_bits)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TwoClusterConfig, rays, as_deg, first_aoa_deg,
                                                separations_deg, far_aoa_deg, max_delay_s)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ChannelConfig, mode, sub6_clusters, mmwave_clusters,
                                                sub6_rays, mmwave_rays, sub6_as_deg, mmwave_as_deg,
                                                sub6_rms_delay_s, mmwave_rms_delay_s, sub6_power_mu,
                                                mmwave_power_mu, angle_limit_deg,
                                                mean_angle_perturbation_deg, ray_delay_fraction,
                                                distance_m, distances_m, snapshot_distance_m,
                                                two_cluster)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EstimationConfig, snapshots, snapshot_sweep,
                                                sub6_snapshots, oversampling, j_rho, j_w_factor,
                                                j_rho_candidates, as_threshold_deg, pas, spread_scale,
                                                stop_norm,
                                                pilot_subcarrier, eta_streams, t_stat, rate_subcarriers)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SnrLossConfig, antennas, snr_db, sigma_alpha_sq,
                                                mc_trials, expected_noise)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RunConfig, trials, seed, output)

void to_json(json& j, const ExperimentConfig& c) {
  j = json{{"system", c.system},
           {"channel", c.channel},
           {"estimation", c.estimation},
           {"snr_loss", c.snr_loss},
           {"run", c.run}};
}

namespace {

void check_known(const json& given, const json& known, const std::string& prefix) {
  for (auto it = given.begin(); it != given.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!known.contains(it.key())) fail(ErrorCode::ConfigError, path + ": unknown field");
    if (it->is_object() && known.at(it.key()).is_object()) {
      check_known(*it, known.at(it.key()), path);
    }
  }
}

template <class T>
void read_block(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigError, std::string(key) + ": " + e.what());
  }
}

void check(bool cond, const std::string& path, const std::string& msg) {
  if (!cond) fail(ErrorCode::ConfigError, path + ": " + msg);
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorCode::ConfigError, "config: top level must be an object");
  const ExperimentConfig defaults;
  check_known(j, json(defaults), "");
  ExperimentConfig c;
  read_block(j, "system", c.system);
  read_block(j, "channel", c.channel);
  read_block(j, "estimation", c.estimation);
  read_block(j, "snr_loss", c.snr_loss);
  read_block(j, "run", c.run);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "config: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ConfigError, "config: " + std::string(e.what()));
  }
  return config_from_json(j);
}

ExperimentConfig apply_overrides(const ExperimentConfig& base,
                                 const std::vector<std::string>& assignments) {
  json j = base;
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    check(eq != std::string::npos && eq > 0, a, "override must look like path=value");
    const std::string path = a.substr(0, eq);
    const std::string text = a.substr(eq + 1);
    std::string pointer;
    std::stringstream ss(path);
    std::string part;
    while (std::getline(ss, part, '.')) pointer += "/" + part;
    const json::json_pointer ptr(pointer);
    check(j.contains(ptr), path, "unknown field");
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    j[ptr] = value;
  }
  return config_from_json(j);
}

void ExperimentConfig::validate() const {
  const auto& s = system;
  check(s.n_rx_sub6 >= 2, "system.n_rx_sub6", "must be >= 2");
  check(s.n_tx_sub6 >= 2, "system.n_tx_sub6", "must be >= 2");
  check(s.n_rx >= 1, "system.n_rx", "must be >= 1");
  check(s.n_tx >= 1, "system.n_tx", "must be >= 1");
  check(s.n_streams >= 1, "system.n_streams", "must be >= 1");
  check(s.m_rx >= s.n_streams && s.m_rx <= s.n_rx, "system.m_rx", "must be in [n_streams, n_rx]");
  check(s.m_tx >= s.n_streams && s.m_tx <= s.n_tx, "system.m_tx", "must be in [n_streams, n_tx]");
  check(s.cp_fraction >= 0.0 && s.cp_fraction < 1.0, "system.cp_fraction", "must be in [0, 1)");
  check(s.k_sub6 >= s.taps_sub6(), "system.k_sub6", "must be >= number of delay taps");
  check(s.k >= s.taps(), "system.k", "must be >= number of delay taps");
  check(s.spacing > 0.0, "system.spacing", "must be > 0");
  check(s.fc_sub6_hz > 0.0, "system.fc_sub6_hz", "must be > 0");
  check(s.fc_hz > 0.0, "system.fc_hz", "must be > 0");
  check(s.bw_sub6_hz > 0.0, "system.bw_sub6_hz", "must be > 0");
  check(s.bw_hz > 0.0, "system.bw_hz", "must be > 0");
  check(s.power_sub6_ref_bw_hz > 0.0, "system.power_sub6_ref_bw_hz", "must be > 0");
  check(s.pathloss_exponent > 0.0, "system.pathloss_exponent", "must be > 0");
  check(s.phase_bits >= 1 && s.phase_bits <= 16, "system.phase_bits", "must be in [1, 16]");

  const auto& c = channel;
  try {
    c.realistic().validate();
  } catch (const Error& e) {
    fail(ErrorCode::ConfigError, e.what());
  }
  check(c.distance_m > 0.0, "channel.distance_m", "must be > 0");
  check(c.snapshot_distance_m > 0.0, "channel.snapshot_distance_m", "must be > 0");
  check(!c.distances_m.empty(), "channel.distances_m", "must not be empty");
  for (double d : c.distances_m) check(d > 0.0, "channel.distances_m", "entries must be > 0");
  const auto& t = c.two_cluster;
  check(t.rays >= 1, "channel.two_cluster.rays", "must be >= 1");
  check(t.as_deg >= 0.0, "channel.two_cluster.as_deg", "must be >= 0");
  check(t.max_delay_s >= 0.0, "channel.two_cluster.max_delay_s", "must be >= 0");
  check(!t.separations_deg.empty(), "channel.two_cluster.separations_deg", "must not be empty");

  const auto& e = estimation;
  check(e.snapshots >= 1, "estimation.snapshots", "must be >= 1");
  check(!e.snapshot_sweep.empty(), "estimation.snapshot_sweep", "must not be empty");
  for (int v : e.snapshot_sweep) check(v >= 1, "estimation.snapshot_sweep", "entries must be >= 1");
  check(e.sub6_snapshots >= 1, "estimation.sub6_snapshots", "must be >= 1");
  check(e.oversampling >= 1, "estimation.oversampling", "must be >= 1");
  check(e.j_rho > 0.0 && e.j_rho <= 1.0, "estimation.j_rho", "must be in (0, 1]");
  check(e.j_w_factor >= 0.0, "estimation.j_w_factor", "must be >= 0");
  check(!e.j_rho_candidates.empty(), "estimation.j_rho_candidates", "must not be empty");
  for (double v : e.j_rho_candidates)
    check(v > 0.0 && v <= 1.0, "estimation.j_rho_candidates", "entries must be in (0, 1]");
  check(e.as_threshold_deg > 0.0, "estimation.as_threshold_deg", "must be > 0");
  check(e.spread_scale > 0.0, "estimation.spread_scale", "must be > 0");
  check(e.pilot_subcarrier < s.k, "estimation.pilot_subcarrier", "must be < system.k");
  check(e.eta_streams >= 1 && e.eta_streams <= s.n_rx, "estimation.eta_streams",
        "must be in [1, system.n_rx]");
  check(e.t_stat >= 1, "estimation.t_stat", "must be >= 1");
  for (int v : e.snapshot_sweep)
    check(4 * v <= e.t_stat, "estimation.snapshot_sweep", "training blocks 4T exceed t_stat");
  check(4 * e.snapshots <= e.t_stat, "estimation.snapshots", "training blocks 4T exceed t_stat");
  check(e.rate_subcarriers >= 1 && e.rate_subcarriers <= s.k, "estimation.rate_subcarriers",
        "must be in [1, system.k]");

  const auto& l = snr_loss;
  check(!l.antennas.empty(), "snr_loss.antennas", "must not be empty");
  for (int n : l.antennas) check(n >= 2, "snr_loss.antennas", "entries must be >= 2");
  check(!l.snr_db.empty(), "snr_loss.snr_db", "must not be empty");
  check(l.sigma_alpha_sq > 0.0, "snr_loss.sigma_alpha_sq", "must be > 0");
  check(l.mc_trials >= 1, "snr_loss.mc_trials", "must be >= 1");

  check(run.trials >= 1, "run.trials", "must be >= 1");
  check(!run.output.empty(), "run.output", "must not be empty");
}

namespace {

constexpr double kLightSpeed = 299792458.0;

LinkBudget link(double power_dbm, double fc, double bw, const SystemConfig& s, double d) {
  require(d > 0.0, ErrorCode::InvalidArgument, "link budget: distance must be > 0");
  LinkBudget b;
  b.tx_power_dbm = power_dbm;
  b.pathloss_db = 20.0 * std::log10(4.0 * kPi * fc / kLightSpeed) +
                  10.0 * s.pathloss_exponent * std::log10(d);
  b.noise_dbm = s.thermal_dbm_per_hz + 10.0 * std::log10(bw) + s.noise_figure_db;
  b.snr_db = b.tx_power_dbm - b.pathloss_db - b.noise_dbm;
  b.noise_var = std::pow(10.0, -b.snr_db / 10.0);
  return b;
}

}  // namespace

LinkBudget sub6_link(const SystemConfig& s, double distance_m) {
  const double p = s.power_sub6_dbm + 10.0 * std::log10(s.bw_sub6_hz / s.power_sub6_ref_bw_hz);
  return link(p, s.fc_sub6_hz, s.bw_sub6_hz, s, distance_m);
}

LinkBudget mmwave_link(const SystemConfig& s, double distance_m) {
  return link(s.power_dbm, s.fc_hz, s.bw_hz, s, distance_m);
}

}  // namespace oobcov
