#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "oobcov/compressed.hpp"
#include "oobcov/config.hpp"
#include "oobcov/translation.hpp"

namespace oobcov {

enum class Experiment {
  fig4_cluster_count,
  fig5_eta_separation,
  fig6_eta_distance,
  fig7_rate_distance,
  fig7b_rate_snapshots,
  fig8_snr_bound,
};

std::string experiment_name(Experiment e);
Experiment parse_experiment(const std::string& name);
const std::vector<Experiment>& all_experiments();

struct ResultRow {
  std::string experiment;
  std::string sweep_name;
  double sweep_value = 0.0;
  std::string metric;
  double mean = 0.0;
  double stderr_ = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
};

/// Streaming mean and variance (Welford).
class Accumulator {
 public:
  void add(double x);
  int count() const { return n_; }
  double mean() const { return mean_; }
  /// Sample standard deviation divided by sqrt(n); 0 for n < 2.
  double stderr_of_mean() const;

 private:
  int n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for one trial; sweep_value enters through its bit pattern.
std::uint64_t trial_seed(std::uint64_t master, Experiment e, double sweep_value, int trial);

/// Worker threads from OOBCOV_THREADS (default 1).
int thread_count();

/// Runs the sweep and returns rows sorted by (sweep_value, metric).
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, Experiment e);

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);

/// Resolved config plus the derived link budgets.
nlohmann::json sidecar_json(const ExperimentConfig& cfg, Experiment e);

struct JRhoSweep {
  std::vector<double> candidates;
  std::vector<double> mean_eta;
  double best = 0.0;
};

/// Mean LW-DCOMP efficiency of the two-cluster channel at channel.distance_m
/// for each candidate; ties go to the smallest candidate.
JRhoSweep sweep_j_rho(const ExperimentConfig& cfg, const std::vector<double>& candidates);

// Building blocks shared by the experiments, exposed for tests.

/// Congruent two-cluster generator: equal powers, one delay fixed at 0.
ClusterGenConfig two_cluster_gen(const ExperimentConfig& cfg, double aoa1, double aoa2);

/// Theoretical mmWave covariance of the two-cluster channel. Ray offsets are
/// drawn with standard deviation as_deg, which corresponds to the closed-form
/// Gaussian kernel at spread as_deg / sqrt(2).
CovarianceMatrix two_cluster_truth(const ExperimentConfig& cfg, double aoa1, double aoa2);

/// Sample covariance of noisy sub-6 channel estimates over `snapshots`
/// independent gain draws and every sub-6 subcarrier.
CovarianceMatrix sub6_sample_covariance(const ExperimentConfig& cfg, ClusterSet set,
                                        double noise_var, Side side, Rng& rng);

/// mmWave channels at one subcarrier over `count` independent gain draws.
std::vector<CMat> mmwave_snapshot_channels(const ExperimentConfig& cfg, ClusterSet set, int count,
                                           Rng& rng);

/// Number of translated clusters carrying positive power.
int effective_cluster_count(const TranslationResult& r);

}  // namespace oobcov
