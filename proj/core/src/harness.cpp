#include "oobcov/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "oobcov/metrics.hpp"
#include "oobcov/precoding.hpp"

namespace oobcov {

namespace {

const std::vector<std::pair<Experiment, std::string>>& experiment_names() {
  static const std::vector<std::pair<Experiment, std::string>> names = {
      {Experiment::fig4_cluster_count, "fig4_cluster_count"},
      {Experiment::fig5_eta_separation, "fig5_eta_separation"},
      {Experiment::fig6_eta_distance, "fig6_eta_distance"},
      {Experiment::fig7_rate_distance, "fig7_rate_distance"},
      {Experiment::fig7b_rate_snapshots, "fig7b_rate_snapshots"},
      {Experiment::fig8_snr_bound, "fig8_snr_bound"},
  };
  return names;
}

}  // namespace

std::string experiment_name(Experiment e) {
  for (const auto& [k, v] : experiment_names())
    if (k == e) return v;
  return "unknown";
}

Experiment parse_experiment(const std::string& name) {
  for (const auto& [k, v] : experiment_names())
    if (v == name) return k;
  fail(ErrorCode::ConfigError, "experiment: unknown name \"" + name + "\"");
}

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> all = [] {
    std::vector<Experiment> v;
    for (const auto& p : experiment_names()) v.push_back(p.first);
    return v;
  }();
  return all;
}

void Accumulator::add(double x) {
  ++n_;
  const double d = x - mean_;
  mean_ += d / n_;
  m2_ += d * (x - mean_);
}

double Accumulator::stderr_of_mean() const {
  if (n_ < 2) return 0.0;
  return std::sqrt(m2_ / (n_ - 1) / n_);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t master, Experiment e, double sweep_value, int trial) {
  std::uint64_t bits = 0;
  static_assert(sizeof(bits) == sizeof(sweep_value));
  std::memcpy(&bits, &sweep_value, sizeof(bits));
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ static_cast<std::uint64_t>(e));
  h = splitmix64(h ^ bits);
  return splitmix64(h ^ static_cast<std::uint64_t>(trial));
}

int thread_count() {
  const char* env = std::getenv("OOBCOV_THREADS");
  if (env == nullptr) return 1;
  const int n = std::atoi(env);
  if (n <= 0) return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return n;
}

ClusterGenConfig two_cluster_gen(const ExperimentConfig& cfg, double aoa1, double aoa2) {
  const auto& t = cfg.channel.two_cluster;
  ClusterGenConfig g;
  g.mode = Congruence::congruent;
  g.sub6_clusters = 2;
  g.mmwave_clusters = 2;
  g.sub6_rays = t.rays;
  g.mmwave_rays = t.rays;
  g.sub6_angle_spread = deg2rad(t.as_deg);
  g.mmwave_angle_spread = deg2rad(t.as_deg);
  g.ray_delay_fraction = 0.0;
  g.max_cluster_delay = t.max_delay_s;
  g.angle_limit = kPi / 2.0;
  g.fixed_aoas = {aoa1, aoa2};
  g.fixed_aods = {aoa1, aoa2};
  g.fixed_powers = {0.5, 0.5};
  return g;
}

CovarianceMatrix two_cluster_truth(const ExperimentConfig& cfg, double aoa1, double aoa2) {
  const UlaGeometry g(cfg.system.n_rx, cfg.system.spacing);
  const double s = deg2rad(cfg.channel.two_cluster.as_deg) / std::sqrt(2.0);
  return synthesize_multicluster(
      {{0.5, theoretical_covariance(PasKind::truncated_gaussian, aoa1, s, g)},
       {0.5, theoretical_covariance(PasKind::truncated_gaussian, aoa2, s, g)}});
}

namespace {

// Frequency response of a fixed ray geometry; only the complex gains change
// between draws, so steering matrices and pulse sums are computed once.
class RayChannel {
 public:
  RayChannel(const ClusterSet& set, const UlaGeometry& rx, const UlaGeometry& tx, int taps,
             double ts, int num_subcarriers, const std::vector<int>& ks)
      : set_(set) {
    a_rx_ = steering_matrix(rx, set.ray_aoas());
    a_tx_h_ = steering_matrix(tx, set.ray_aods()).adjoint();
    scale_ = std::sqrt(static_cast<double>(rx.num_antennas()) * tx.num_antennas());
    ClusterSet unit = set;
    for (auto& c : unit.clusters)
      for (auto& r : c.rays) r.gain = 1.0;
    const auto pulse = raised_cosine_pulse(1.0, ts);
    for (int k : ks) kernels_.push_back(ray_frequency_gains(unit, taps, ts, pulse, k, num_subcarriers));
  }

  /// Redraws every ray gain and returns the channel at each configured subcarrier.
  std::vector<CMat> draw(Rng& rng) {
    redraw_gains(set_, rng);
    CVec g(static_cast<Eigen::Index>(set_.num_rays()));
    Eigen::Index i = 0;
    for (const auto& c : set_.clusters)
      for (const auto& r : c.rays) g[i++] = r.gain;
    std::vector<CMat> out;
    out.reserve(kernels_.size());
    for (const auto& kern : kernels_)
      out.push_back(scale_ * (a_rx_ * g.cwiseProduct(kern).asDiagonal() * a_tx_h_));
    return out;
  }

  /// Expected covariance sum over rays of power * N * a a^H (pulse ignored).
  CovarianceMatrix ray_covariance(Side side) const {
    const CMat& a = side == Side::rx ? a_rx_ : CMat(a_tx_h_.adjoint());
    RVec w(static_cast<Eigen::Index>(set_.num_rays()));
    Eigen::Index i = 0;
    for (const auto& c : set_.clusters)
      for (std::size_t r = 0; r < c.rays.size(); ++r) w[i++] = c.power / static_cast<double>(c.rays.size());
    const double n = static_cast<double>(a.rows());
    return CovarianceMatrix(n * a * w.asDiagonal() * a.adjoint(), side);
  }

 private:
  ClusterSet set_;
  CMat a_rx_;
  CMat a_tx_h_;
  double scale_ = 1.0;
  std::vector<CVec> kernels_;
};

std::vector<int> all_subcarriers(int k) {
  std::vector<int> ks(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) ks[static_cast<std::size_t>(i)] = i;
  return ks;
}

std::vector<int> spaced_subcarriers(int k, int count) {
  std::vector<int> ks;
  for (int i = 0; i < count; ++i) ks.push_back(static_cast<int>((static_cast<long>(i) * k) / count));
  return ks;
}

}  // namespace

CovarianceMatrix sub6_sample_covariance(const ExperimentConfig& cfg, ClusterSet set,
                                        double noise_var, Side side, Rng& rng) {
  const auto& s = cfg.system;
  const UlaGeometry rx(s.n_rx_sub6, s.spacing), tx(s.n_tx_sub6, s.spacing);
  RayChannel ch(set, rx, tx, s.taps_sub6(), 1.0 / s.bw_sub6_hz, s.k_sub6, all_subcarriers(s.k_sub6));
  const int n = side == Side::rx ? s.n_rx_sub6 : s.n_tx_sub6;
  const int other = side == Side::rx ? s.n_tx_sub6 : s.n_rx_sub6;
  CMat acc = CMat::Zero(n, n);
  const int t_count = cfg.estimation.sub6_snapshots;
  for (int t = 0; t < t_count; ++t) {
    for (CMat h : ch.draw(rng)) {
      for (Eigen::Index j = 0; j < h.cols(); ++j)
        for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, j) += complex_normal(rng, noise_var);
      if (side == Side::rx) {
        acc.noalias() += h * h.adjoint();
      } else {
        acc.noalias() += h.adjoint() * h;
      }
    }
  }
  acc /= static_cast<double>(t_count) * s.k_sub6 * other;
  return CovarianceMatrix(acc, side);
}

std::vector<CMat> mmwave_snapshot_channels(const ExperimentConfig& cfg, ClusterSet set, int count,
                                           Rng& rng) {
  const auto& s = cfg.system;
  const UlaGeometry rx(s.n_rx, s.spacing), tx(s.n_tx, s.spacing);
  RayChannel ch(set, rx, tx, s.taps(), 1.0 / s.bw_hz, s.k, {cfg.estimation.pilot(s.k)});
  std::vector<CMat> out;
  for (int t = 0; t < count; ++t) out.push_back(ch.draw(rng).front());
  return out;
}

int effective_cluster_count(const TranslationResult& r) {
  double total = 0.0;
  for (const auto& e : r.estimates) total += e.power;
  int count = 0;
  for (const auto& e : r.estimates)
    if (e.power > 1e-9 * std::max(total, 1e-300)) ++count;
  return count;
}

namespace {

using Metrics = std::vector<std::pair<std::string, double>>;

struct Sweep {
  std::string name;
  std::vector<double> values;
  std::function<Metrics(double, Rng&)> trial;
};

TranslationOptions translation_options(const ExperimentConfig& cfg) {
  TranslationOptions o;
  o.pas = cfg.estimation.pas;
  o.as_threshold = deg2rad(cfg.estimation.as_threshold_deg);
  o.spread_scale = cfg.estimation.spread_scale;
  return o;
}

// Compressed estimates of one side, with and without the sub-6 prior, from
// shared snapshots.
struct CompressedPair {
  CovarianceMatrix dcomp;
  CovarianceMatrix lw_dcomp;
};

CompressedPair estimate_side(const ExperimentConfig& cfg, const std::vector<CMat>& channels,
                             const CovarianceMatrix& sub6_cov, Side side, double noise_var,
                             double j_rho, Rng& rng) {
  const auto& s = cfg.system;
  const bool rx = side == Side::rx;
  const int n_own = rx ? s.n_rx : s.n_tx;
  const int n_other = rx ? s.n_tx : s.n_rx;
  const int m = rx ? s.m_rx : s.m_tx;
  const int n_sub6 = rx ? s.n_rx_sub6 : s.n_tx_sub6;
  const PhaseCodebook codebook(s.phase_bits);

  std::vector<CMat> combiners, effective;
  for (const auto& h : channels) {
    combiners.push_back(random_rf_matrix(n_own, m, codebook, rng));
    effective.push_back(rx ? h : CMat(h.adjoint()));
  }
  const SnapshotSet snaps = collect_snapshots(effective, combiners, noise_var, rng);
  const Dictionary dict = build_dictionary(UlaGeometry(n_own, s.spacing), cfg.estimation.oversampling);
  const Dictionary sub6_dict = dictionary_on_grid(UlaGeometry(n_sub6, s.spacing), dict.grid_angles);

  const auto plain = dcomp(snaps, dict, noise_var, std::nullopt, cfg.estimation.stop_norm);
  const double j_w = adaptive_jw(snaps, dict, cfg.estimation.j_w_factor);
  const PriorWeights w = logit_weight(prob_proxy(sub6_cov, sub6_dict, j_rho), j_w);
  const auto weighted = lw_dcomp(snaps, dict, noise_var, w, std::nullopt, cfg.estimation.stop_norm);
  return {assemble_covariance(plain, dict, n_own, n_other, side),
          assemble_covariance(weighted, dict, n_own, n_other, side)};
}

double rate_of(const ExperimentConfig& cfg, const FreqChannel& fc, const CovarianceMatrix& r_tx,
               const CovarianceMatrix& r_rx, double noise_var, int train_blocks) {
  const auto& s = cfg.system;
  const PhaseCodebook codebook(s.phase_bits);
  const HybridPrecoder f = design_hybrid(r_tx, s.m_tx, s.n_streams, codebook, fc.num_subcarriers());
  const HybridPrecoder w = design_hybrid(r_rx, s.m_rx, s.n_streams, codebook, fc.num_subcarriers());
  RateConfig rc;
  rc.total_power = s.k;
  rc.noise_var = noise_var;
  rc.num_subcarriers = s.k;
  rc.num_streams = s.n_streams;
  rc.stat_blocks = cfg.estimation.t_stat;
  rc.train_blocks = train_blocks;
  return effective_rate(fc, f, w, rc);
}

Metrics two_cluster_translation(const ExperimentConfig& cfg, double separation_deg, Rng& rng,
                                bool count_only) {
  const auto& s = cfg.system;
  const double a1 = deg2rad(cfg.channel.two_cluster.first_aoa_deg);
  const double a2 = a1 + deg2rad(separation_deg);
  auto [sub6, mm] = gen_cluster_sets(two_cluster_gen(cfg, a1, a2), rng);
  const double nv = sub6_link(s, cfg.channel.distance_m).noise_var;
  const CovarianceMatrix r = sub6_sample_covariance(cfg, sub6, nv, Side::rx, rng);
  const TranslationResult tr = translate(r, UlaGeometry(s.n_rx_sub6, s.spacing),
                                         UlaGeometry(s.n_rx, s.spacing), cfg.estimation.sub6_snapshots,
                                         translation_options(cfg));
  if (count_only) {
    return {{"cluster_count", static_cast<double>(effective_cluster_count(tr))},
            {"mdl_sources", static_cast<double>(tr.point_sources)}};
  }
  const double eta = efficiency(two_cluster_truth(cfg, a1, a2), tr.mmwave_cov, cfg.estimation.eta_streams);
  return {{"eta", eta}};
}

Metrics eta_distance_trial(const ExperimentConfig& cfg, double distance, double j_rho, Rng& rng) {
  const auto& s = cfg.system;
  const double a1 = deg2rad(cfg.channel.two_cluster.first_aoa_deg);
  const double a2 = deg2rad(cfg.channel.two_cluster.far_aoa_deg);
  auto [sub6, mm] = gen_cluster_sets(two_cluster_gen(cfg, a1, a2), rng);
  const CovarianceMatrix r6 =
      sub6_sample_covariance(cfg, sub6, sub6_link(s, distance).noise_var, Side::rx, rng);
  const auto channels = mmwave_snapshot_channels(cfg, mm, cfg.estimation.snapshots, rng);
  const auto est = estimate_side(cfg, channels, r6, Side::rx, mmwave_link(s, distance).noise_var,
                                 j_rho, rng);
  const CovarianceMatrix truth = two_cluster_truth(cfg, a1, a2);
  const double e0 = efficiency(truth, est.dcomp, cfg.estimation.eta_streams);
  const double e1 = efficiency(truth, est.lw_dcomp, cfg.estimation.eta_streams);
  return {{"eta_dcomp", e0}, {"eta_lw_dcomp", e1}, {"eta_gain", e1 - e0}};
}

// Realistic channel: compressed estimates on both sides plus the rate of
// each covariance source on a fresh realization.
Metrics rate_trial(const ExperimentConfig& cfg, double distance, int snapshots, bool with_translation,
                   Rng& rng) {
  const auto& s = cfg.system;
  auto [sub6, mm] = gen_cluster_sets(cfg.channel.realistic(), rng);
  const double nv6 = sub6_link(s, distance).noise_var;
  const double nv = mmwave_link(s, distance).noise_var;
  const CovarianceMatrix r6_rx = sub6_sample_covariance(cfg, sub6, nv6, Side::rx, rng);
  const CovarianceMatrix r6_tx = sub6_sample_covariance(cfg, sub6, nv6, Side::tx, rng);

  const auto channels = mmwave_snapshot_channels(cfg, mm, snapshots, rng);
  const auto rx = estimate_side(cfg, channels, r6_rx, Side::rx, nv, cfg.estimation.j_rho, rng);
  const auto tx_channels = mmwave_snapshot_channels(cfg, mm, snapshots, rng);
  const auto tx = estimate_side(cfg, tx_channels, r6_tx, Side::tx, nv, cfg.estimation.j_rho, rng);

  const UlaGeometry g_rx(s.n_rx, s.spacing), g_tx(s.n_tx, s.spacing);
  RayChannel eval(mm, g_rx, g_tx, s.taps(), 1.0 / s.bw_hz, s.k,
                  spaced_subcarriers(s.k, cfg.estimation.rate_subcarriers));
  FreqChannel fc;
  fc.subcarriers = eval.draw(rng);

  const int train = 4 * snapshots;
  Metrics out = {{"rate_dcomp", rate_of(cfg, fc, tx.dcomp, rx.dcomp, nv, train)},
                 {"rate_lw_dcomp", rate_of(cfg, fc, tx.lw_dcomp, rx.lw_dcomp, nv, train)}};
  if (with_translation) {
    const auto opts = translation_options(cfg);
    const auto t_rx = translate(r6_rx, UlaGeometry(s.n_rx_sub6, s.spacing), g_rx,
                                cfg.estimation.sub6_snapshots, opts);
    const auto t_tx = translate(r6_tx, UlaGeometry(s.n_tx_sub6, s.spacing), g_tx,
                                cfg.estimation.sub6_snapshots, opts);
    out.push_back({"rate_translation", rate_of(cfg, fc, t_tx.mmwave_cov, t_rx.mmwave_cov, nv, 0)});
    out.push_back({"rate_perfect", rate_of(cfg, fc, eval.ray_covariance(Side::tx),
                                           eval.ray_covariance(Side::rx), nv, 0)});
  }
  return out;
}

CMat hermitian_gaussian(int n, double variance, Rng& rng) {
  CMat d(n, n);
  std::normal_distribution<double> real(0.0, std::sqrt(variance));
  for (int i = 0; i < n; ++i) {
    d(i, i) = real(rng);
    for (int j = i + 1; j < n; ++j) {
      d(i, j) = complex_normal(rng, variance);
      d(j, i) = std::conj(d(i, j));
    }
  }
  return d;
}

Metrics snr_bound_trial(const ExperimentConfig& cfg, double snr_db, Rng& rng) {
  const auto& l = cfg.snr_loss;
  const double var = std::pow(10.0, -snr_db / 10.0);
  std::uniform_real_distribution<double> angle(-kPi / 3.0, kPi / 3.0);
  Metrics out;
  for (int n : l.antennas) {
    SnrExperiment e;
    e.rx = UlaGeometry(n, cfg.system.spacing);
    e.tx = UlaGeometry(n, cfg.system.spacing);
    e.aoa = angle(rng);
    e.aod = angle(rng);
    e.sigma_alpha_sq = l.sigma_alpha_sq;
    e.noise_var = 1.0;
    e.phase_bits = cfg.system.phase_bits;
    e.expected_noise = l.expected_noise;
    e.n_rf_rx = e.n_rf_tx = std::max(1, static_cast<int>(std::lround(std::sqrt(n))));
    Perturbation p{hermitian_gaussian(n, var, rng), hermitian_gaussian(n, var, rng)};

    const std::uint64_t mc_seed = rng();
    Rng r1(mc_seed), r2(mc_seed);
    const double digital = monte_carlo_snr(e, p, l.mc_trials, r1);
    e.mode = PrecodingMode::hybrid;
    const double hybrid = monte_carlo_snr(e, p, l.mc_trials, r2);
    const auto [lo, hi] = snr_loss_bounds(p, l.sigma_alpha_sq, n, n);
    const double approx = snr_loss_approx(p, array_response(e.rx, e.aoa), array_response(e.tx, e.aod),
                                          l.sigma_alpha_sq, n, n);
    const std::string tag = "_n" + std::to_string(n);
    out.push_back({"gamma_digital" + tag, digital});
    out.push_back({"gamma_hybrid" + tag, hybrid});
    out.push_back({"gamma_approx" + tag, approx});
    out.push_back({"upper_bound" + tag, hi});
    out.push_back({"lower_bound" + tag, lo});
    out.push_back({"bound_holds" + tag, digital <= hi ? 1.0 : 0.0});
  }
  return out;
}

Sweep make_sweep(const ExperimentConfig& cfg, Experiment e) {
  switch (e) {
    case Experiment::fig4_cluster_count:
      return {"separation_deg", cfg.channel.two_cluster.separations_deg,
              [&cfg](double v, Rng& rng) { return two_cluster_translation(cfg, v, rng, true); }};
    case Experiment::fig5_eta_separation:
      return {"separation_deg", cfg.channel.two_cluster.separations_deg,
              [&cfg](double v, Rng& rng) { return two_cluster_translation(cfg, v, rng, false); }};
    case Experiment::fig6_eta_distance:
      return {"distance_m", cfg.channel.distances_m, [&cfg](double v, Rng& rng) {
                return eta_distance_trial(cfg, v, cfg.estimation.j_rho, rng);
              }};
    case Experiment::fig7_rate_distance:
      return {"distance_m", cfg.channel.distances_m, [&cfg](double v, Rng& rng) {
                return rate_trial(cfg, v, cfg.estimation.snapshots, true, rng);
              }};
    case Experiment::fig7b_rate_snapshots: {
      std::vector<double> ts(cfg.estimation.snapshot_sweep.begin(), cfg.estimation.snapshot_sweep.end());
      return {"snapshots", ts, [&cfg](double v, Rng& rng) {
                return rate_trial(cfg, cfg.channel.snapshot_distance_m, static_cast<int>(v), false, rng);
              }};
    }
    case Experiment::fig8_snr_bound:
      return {"snr_db", cfg.snr_loss.snr_db,
              [&cfg](double v, Rng& rng) { return snr_bound_trial(cfg, v, rng); }};
  }
  fail(ErrorCode::InvalidArgument, "run_experiment: unknown experiment");
}

// Evaluates fn(point, trial) for every pair, in parallel, keeping results
// addressable by index so aggregation order never depends on scheduling.
std::vector<std::vector<Metrics>> evaluate(const Sweep& sweep, int trials, std::uint64_t master,
                                           Experiment e) {
  const std::size_t points = sweep.values.size();
  std::vector<std::vector<Metrics>> results(points, std::vector<Metrics>(static_cast<std::size_t>(trials)));
  const std::size_t jobs = points * static_cast<std::size_t>(trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= jobs) return;
      const std::size_t p = job / static_cast<std::size_t>(trials);
      const int t = static_cast<int>(job % static_cast<std::size_t>(trials));
      try {
        Rng rng(trial_seed(master, e, sweep.values[p], t));
        results[p][static_cast<std::size_t>(t)] = sweep.trial(sweep.values[p], rng);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(jobs);
      }
    }
  };
  const int n_threads = std::min<int>(thread_count(), static_cast<int>(std::max<std::size_t>(jobs, 1)));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return results;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, Experiment e) {
  cfg.validate();
  const Sweep sweep = make_sweep(cfg, e);
  const auto results = evaluate(sweep, cfg.run.trials, cfg.run.seed, e);

  std::vector<ResultRow> rows;
  for (std::size_t p = 0; p < sweep.values.size(); ++p) {
    std::map<std::string, Accumulator> acc;
    for (const auto& trial : results[p])
      for (const auto& [name, value] : trial) acc[name].add(value);
    for (const auto& [name, a] : acc) {
      rows.push_back({experiment_name(e), sweep.name, sweep.values[p], name, a.mean(),
                      a.stderr_of_mean(), a.count(), cfg.run.seed});
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
    return a.metric < b.metric;
  });
  return rows;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "experiment,sweep_name,sweep_value,metric,mean,stderr,trials,seed\n";
  std::ostringstream line;
  for (const auto& r : rows) {
    line.str("");
    line << std::setprecision(17) << r.experiment << ',' << r.sweep_name << ',' << r.sweep_value << ','
         << r.metric << ',' << r.mean << ',' << r.stderr_ << ',' << r.trials << ',' << r.seed << '\n';
    out << line.str();
  }
}

nlohmann::json sidecar_json(const ExperimentConfig& cfg, Experiment e) {
  nlohmann::json j;
  j["experiment"] = experiment_name(e);
  j["config"] = cfg;
  nlohmann::json budget = nlohmann::json::array();
  std::vector<double> distances = cfg.channel.distances_m;
  distances.push_back(cfg.channel.distance_m);
  distances.push_back(cfg.channel.snapshot_distance_m);
  std::sort(distances.begin(), distances.end());
  distances.erase(std::unique(distances.begin(), distances.end()), distances.end());
  for (double d : distances) {
    const auto lo = sub6_link(cfg.system, d);
    const auto hi = mmwave_link(cfg.system, d);
    budget.push_back({{"distance_m", d},
                      {"sub6", {{"tx_power_dbm", lo.tx_power_dbm}, {"pathloss_db", lo.pathloss_db},
                                {"noise_dbm", lo.noise_dbm}, {"snr_db", lo.snr_db}}},
                      {"mmwave", {{"tx_power_dbm", hi.tx_power_dbm}, {"pathloss_db", hi.pathloss_db},
                                  {"noise_dbm", hi.noise_dbm}, {"snr_db", hi.snr_db}}}});
  }
  j["link_budget"] = budget;
  j["link_budget_model"] = {{"reference_distance_m", 1.0},
                            {"reference_loss", "free space at carrier"},
                            {"speed_of_light_m_s", 299792458.0}};
  j["delay_taps"] = {{"sub6", cfg.system.taps_sub6()}, {"mmwave", cfg.system.taps()}};
  j["training_blocks_per_snapshot"] = 4;
  return j;
}

JRhoSweep sweep_j_rho(const ExperimentConfig& cfg, const std::vector<double>& candidates) {
  cfg.validate();
  require(!candidates.empty(), ErrorCode::InvalidArgument, "sweep_j_rho: no candidates");
  JRhoSweep out;
  std::vector<double> sorted = candidates;
  std::sort(sorted.begin(), sorted.end());
  out.candidates = sorted;
  double best = -1.0;
  for (double jr : sorted) {
    require(jr > 0.0 && jr <= 1.0, ErrorCode::InvalidArgument, "sweep_j_rho: candidates must be in (0, 1]");
    Sweep s{"j_rho", {cfg.channel.distance_m}, [&cfg, jr](double, Rng& rng) {
              return eta_distance_trial(cfg, cfg.channel.distance_m, jr, rng);
            }};
    // Every candidate sees the same channels.
    const auto res = evaluate(s, cfg.run.trials, cfg.run.seed, Experiment::fig6_eta_distance);
    Accumulator a;
    for (const auto& trial : res.front())
      for (const auto& [name, v] : trial)
        if (name == "eta_lw_dcomp") a.add(v);
    out.mean_eta.push_back(a.mean());
    if (a.mean() > best) {
      best = a.mean();
      out.best = jr;
    }
  }
  return out;
}

}  // namespace oobcov
