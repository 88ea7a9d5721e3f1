#include "oobcov/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oobcov {

UlaGeometry::UlaGeometry(int num_antennas, double spacing)
    : n_(num_antennas), spacing_(spacing) {
  require(num_antennas >= 1, ErrorCode::InvalidArgument, "UlaGeometry: num_antennas must be >= 1");
  require(spacing > 0.0, ErrorCode::InvalidArgument, "UlaGeometry: spacing must be > 0");
}

CVec array_response(const UlaGeometry& geom, double angle) {
  const int n = geom.num_antennas();
  const double phase = 2.0 * kPi * geom.spacing() * std::sin(angle);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * std::polar(1.0, i * phase);
  return v;
}

CMat steering_matrix(const UlaGeometry& geom, const std::vector<double>& angles) {
  CMat a(geom.num_antennas(), static_cast<Eigen::Index>(angles.size()));
  for (std::size_t i = 0; i < angles.size(); ++i) {
    a.col(static_cast<Eigen::Index>(i)) = array_response(geom, angles[i]);
  }
  return a;
}

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a - kPi;
}

}  // namespace

double raised_cosine(double t, double rolloff, double symbol_interval) {
  require(symbol_interval > 0.0, ErrorCode::InvalidArgument,
          "raised_cosine: symbol_interval must be > 0");
  const double x = t / symbol_interval;
  if (rolloff <= 0.0) return sinc(x);
  const double denom = 1.0 - (2.0 * rolloff * x) * (2.0 * rolloff * x);
  if (std::abs(denom) < 1e-10) {
    return kPi / 4.0 * sinc(1.0 / (2.0 * rolloff));
  }
  return sinc(x) * std::cos(kPi * rolloff * x) / denom;
}

PulseShape raised_cosine_pulse(double rolloff, double symbol_interval) {
  require(symbol_interval > 0.0, ErrorCode::InvalidArgument,
          "raised_cosine_pulse: symbol_interval must be > 0");
  return [rolloff, symbol_interval](double t) { return raised_cosine(t, rolloff, symbol_interval); };
}

std::size_t ClusterSet::num_rays() const {
  std::size_t n = 0;
  for (const auto& c : clusters) n += c.rays.size();
  return n;
}

double ClusterSet::total_power() const {
  double p = 0.0;
  for (const auto& c : clusters) p += c.power;
  return p;
}

void ClusterSet::normalize_powers() {
  const double total = total_power();
  if (total <= 0.0) return;
  for (auto& c : clusters) c.power /= total;
}

std::vector<double> ClusterSet::ray_aoas() const {
  std::vector<double> out;
  out.reserve(num_rays());
  for (const auto& c : clusters)
    for (const auto& r : c.rays) out.push_back(c.mean_aoa + r.aoa_shift);
  return out;
}

std::vector<double> ClusterSet::ray_aods() const {
  std::vector<double> out;
  out.reserve(num_rays());
  for (const auto& c : clusters)
    for (const auto& r : c.rays) out.push_back(c.mean_aod + r.aod_shift);
  return out;
}

void ClusterGenConfig::validate() const {
  auto check = [](bool ok, const char* what) {
    require(ok, ErrorCode::ConfigError, std::string("channel.") + what);
  };
  check(sub6_clusters >= 1, "sub6_clusters must be >= 1");
  check(mmwave_clusters >= 1, "mmwave_clusters must be >= 1");
  check(sub6_rays >= 1, "sub6_rays must be >= 1");
  check(mmwave_rays >= 1, "mmwave_rays must be >= 1");
  check(sub6_angle_spread >= 0.0, "sub6_angle_spread must be >= 0");
  check(mmwave_angle_spread >= 0.0, "mmwave_angle_spread must be >= 0");
  check(sub6_rms_delay >= 0.0, "sub6_rms_delay must be >= 0");
  check(mmwave_rms_delay >= 0.0, "mmwave_rms_delay must be >= 0");
  check(sub6_power_mu > 0.0, "sub6_power_mu must be > 0");
  check(mmwave_power_mu > 0.0, "mmwave_power_mu must be > 0");
  check(angle_limit > 0.0 && angle_limit <= kPi, "angle_limit must be in (0, pi]");
  check(mean_angle_perturbation >= 0.0, "mean_angle_perturbation must be >= 0");
  check(ray_delay_fraction >= 0.0, "ray_delay_fraction must be >= 0");
  check(max_cluster_delay >= 0.0, "max_cluster_delay must be >= 0");
  check(path_gain > 0.0, "path_gain must be > 0");
  if (mode == Congruence::realistic) {
    check(mmwave_clusters <= sub6_clusters,
          "mmwave_clusters must not exceed sub6_clusters in realistic mode");
  }
  if (!fixed_aoas.empty()) {
    check(static_cast<int>(fixed_aoas.size()) == sub6_clusters,
          "fixed_aoas must list one angle per cluster");
  }
  if (!fixed_aods.empty()) {
    check(static_cast<int>(fixed_aods.size()) == sub6_clusters,
          "fixed_aods must list one angle per cluster");
  }
  if (!fixed_powers.empty()) {
    check(static_cast<int>(fixed_powers.size()) == sub6_clusters,
          "fixed_powers must list one power per cluster");
    for (double p : fixed_powers) check(p >= 0.0, "fixed_powers must be >= 0");
  }
}

namespace {

std::vector<Ray> draw_rays(int count, double angle_spread, double delay_std, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<Ray> rays(static_cast<std::size_t>(count));
  for (auto& r : rays) {
    r.aoa_shift = wrap_angle(angle_spread * n01(rng));
    r.aod_shift = wrap_angle(angle_spread * n01(rng));
    r.rel_delay = std::abs(delay_std * n01(rng));
  }
  return rays;
}

ClusterSet congruent_sets(const ClusterGenConfig& cfg, Rng& rng) {
  std::uniform_real_distribution<double> angle(-cfg.angle_limit, cfg.angle_limit);
  std::uniform_real_distribution<double> delay(0.0, cfg.max_cluster_delay);
  ClusterSet set;
  set.band_tag = Band::sub6;
  const int count = cfg.sub6_clusters;
  for (int c = 0; c < count; ++c) {
    Cluster cl;
    const auto idx = static_cast<std::size_t>(c);
    cl.mean_aoa = cfg.fixed_aoas.empty() ? angle(rng) : cfg.fixed_aoas[idx];
    cl.mean_aod = cfg.fixed_aods.empty() ? angle(rng) : cfg.fixed_aods[idx];
    cl.mean_delay = (c == 0) ? 0.0 : delay(rng);
    cl.power = cfg.fixed_powers.empty() ? 1.0 : cfg.fixed_powers[idx];
    cl.rays = draw_rays(cfg.sub6_rays, cfg.sub6_angle_spread,
                        cfg.ray_delay_fraction * cfg.sub6_rms_delay, rng);
    set.clusters.push_back(std::move(cl));
  }
  set.normalize_powers();
  return set;
}

// Normalized arrival u in [0,1): delay u * sqrt(12) * rms, power exp(-u / mu).
Cluster realistic_cluster(double u, double aoa, double aod, int rays, double spread,
                          double rms_delay, double mu, double ray_fraction, Rng& rng) {
  Cluster cl;
  cl.mean_aoa = aoa;
  cl.mean_aod = aod;
  cl.mean_delay = u * std::sqrt(12.0) * rms_delay;
  cl.power = std::exp(-u / mu);
  cl.rays = draw_rays(rays, spread, ray_fraction * rms_delay, rng);
  return cl;
}

double clamp_angle(double a, double limit) {
  return std::clamp(a, -limit, std::nextafter(limit, 0.0));
}

}  // namespace

void redraw_gains(ClusterSet& set, Rng& rng, double path_gain) {
  for (auto& c : set.clusters) {
    const double var = c.rays.empty() ? 0.0 : path_gain * c.power / static_cast<double>(c.rays.size());
    for (auto& r : c.rays) r.gain = complex_normal(rng, var);
  }
}

std::pair<ClusterSet, ClusterSet> gen_cluster_sets(const ClusterGenConfig& cfg, Rng& rng) {
  cfg.validate();
  if (cfg.mode == Congruence::congruent) {
    ClusterSet sub6 = congruent_sets(cfg, rng);
    redraw_gains(sub6, rng, cfg.path_gain);
    ClusterSet mm = sub6;
    mm.band_tag = Band::mmwave;
    return {std::move(sub6), std::move(mm)};
  }

  std::uniform_real_distribution<double> angle(-cfg.angle_limit, cfg.angle_limit);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> n01(0.0, 1.0);

  struct Mean {
    double u, aoa, aod;
  };
  std::vector<Mean> means;
  for (int c = 0; c < cfg.sub6_clusters; ++c) {
    const auto idx = static_cast<std::size_t>(c);
    Mean m{unit(rng), cfg.fixed_aoas.empty() ? angle(rng) : cfg.fixed_aoas[idx],
           cfg.fixed_aods.empty() ? angle(rng) : cfg.fixed_aods[idx]};
    means.push_back(m);
  }
  std::sort(means.begin(), means.end(), [](const Mean& a, const Mean& b) { return a.u < b.u; });

  ClusterSet sub6;
  sub6.band_tag = Band::sub6;
  for (const auto& m : means) {
    sub6.clusters.push_back(realistic_cluster(m.u, m.aoa, m.aod, cfg.sub6_rays,
                                              cfg.sub6_angle_spread, cfg.sub6_rms_delay,
                                              cfg.sub6_power_mu, cfg.ray_delay_fraction, rng));
  }

  std::vector<std::size_t> pick(means.size());
  std::iota(pick.begin(), pick.end(), 0);
  std::shuffle(pick.begin(), pick.end(), rng);
  pick.resize(static_cast<std::size_t>(cfg.mmwave_clusters));
  std::sort(pick.begin(), pick.end());

  ClusterSet mm;
  mm.band_tag = Band::mmwave;
  for (std::size_t idx : pick) {
    const auto& m = means[idx];
    const double aoa = clamp_angle(m.aoa + cfg.mean_angle_perturbation * n01(rng), cfg.angle_limit);
    const double aod = clamp_angle(m.aod + cfg.mean_angle_perturbation * n01(rng), cfg.angle_limit);
    mm.clusters.push_back(realistic_cluster(m.u, aoa, aod, cfg.mmwave_rays,
                                            cfg.mmwave_angle_spread, cfg.mmwave_rms_delay,
                                            cfg.mmwave_power_mu, cfg.ray_delay_fraction, rng));
  }
  sub6.normalize_powers();
  mm.normalize_powers();
  redraw_gains(sub6, rng, cfg.path_gain);
  redraw_gains(mm, rng, cfg.path_gain);
  return {std::move(sub6), std::move(mm)};
}

ChannelRealization build_delay_taps(const ClusterSet& clusters, const UlaGeometry& rx,
                                    const UlaGeometry& tx, int num_taps,
                                    double sample_interval, const PulseShape& pulse) {
  require(num_taps >= 1, ErrorCode::InvalidArgument, "build_delay_taps: num_taps must be >= 1");
  require(sample_interval > 0.0, ErrorCode::InvalidArgument,
          "build_delay_taps: sample_interval must be > 0");
  const double scale = std::sqrt(static_cast<double>(rx.num_antennas()) * tx.num_antennas());
  ChannelRealization out;
  out.sample_interval = sample_interval;
  out.delay_taps.assign(static_cast<std::size_t>(num_taps),
                        CMat::Zero(rx.num_antennas(), tx.num_antennas()));
  for (const auto& c : clusters.clusters) {
    for (const auto& r : c.rays) {
      const CMat outer = array_response(rx, c.mean_aoa + r.aoa_shift) *
                         array_response(tx, c.mean_aod + r.aod_shift).adjoint();
      for (int d = 0; d < num_taps; ++d) {
        const double p = pulse(d * sample_interval - c.mean_delay - r.rel_delay);
        out.delay_taps[static_cast<std::size_t>(d)] += (scale * p) * r.gain * outer;
      }
    }
  }
  return out;
}

FreqChannel delay_to_freq(const ChannelRealization& ch, int num_subcarriers) {
  const int taps = static_cast<int>(ch.delay_taps.size());
  require(taps >= 1, ErrorCode::InvalidArgument, "delay_to_freq: no taps");
  require(num_subcarriers >= taps, ErrorCode::InvalidArgument,
          "delay_to_freq: num_subcarriers must be >= num_taps");
  const auto rows = ch.delay_taps.front().rows();
  const auto cols = ch.delay_taps.front().cols();
  FreqChannel out;
  out.subcarriers.assign(static_cast<std::size_t>(num_subcarriers), CMat::Zero(rows, cols));
  for (int k = 0; k < num_subcarriers; ++k) {
    auto& hk = out.subcarriers[static_cast<std::size_t>(k)];
    for (int d = 0; d < taps; ++d) {
      const double w = -2.0 * kPi * static_cast<double>((static_cast<long>(k) * d) % num_subcarriers) /
                       num_subcarriers;
      hk += std::polar(1.0, w) * ch.delay_taps[static_cast<std::size_t>(d)];
    }
  }
  return out;
}

CVec ray_frequency_gains(const ClusterSet& clusters, int num_taps, double sample_interval,
                         const PulseShape& pulse, int k, int num_subcarriers) {
  CVec g(static_cast<Eigen::Index>(clusters.num_rays()));
  Eigen::Index i = 0;
  for (const auto& c : clusters.clusters) {
    for (const auto& r : c.rays) {
      cd acc{0.0, 0.0};
      for (int d = 0; d < num_taps; ++d) {
        const double w = -2.0 * kPi *
                         static_cast<double>((static_cast<long>(k) * d) % num_subcarriers) /
                         num_subcarriers;
        acc += pulse(d * sample_interval - c.mean_delay - r.rel_delay) * std::polar(1.0, w);
      }
      g[i++] = r.gain * acc;
    }
  }
  return g;
}

FreqChannel freq_channel(const ClusterSet& clusters, const UlaGeometry& rx,
                         const UlaGeometry& tx, int num_taps, double sample_interval,
                         const PulseShape& pulse, const std::vector<int>& ks,
                         int num_subcarriers) {
  require(num_taps >= 1 && num_subcarriers >= num_taps, ErrorCode::InvalidArgument,
          "freq_channel: need 1 <= num_taps <= num_subcarriers");
  const CMat a_rx = steering_matrix(rx, clusters.ray_aoas());
  const CMat a_tx_h = steering_matrix(tx, clusters.ray_aods()).adjoint();
  const double scale = std::sqrt(static_cast<double>(rx.num_antennas()) * tx.num_antennas());
  FreqChannel out;
  out.subcarriers.reserve(ks.size());
  for (int k : ks) {
    const CVec g = ray_frequency_gains(clusters, num_taps, sample_interval, pulse, k, num_subcarriers);
    out.subcarriers.push_back(scale * (a_rx * g.asDiagonal() * a_tx_h));
  }
  return out;
}

}  // namespace oobcov
