#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "oobcov/types.hpp"

namespace oobcov {

/// Uniform linear array: antenna count and element spacing in wavelengths.
class UlaGeometry {
 public:
  UlaGeometry(int num_antennas, double spacing = 0.5);

  int num_antennas() const noexcept { return n_; }
  double spacing() const noexcept { return spacing_; }

 private:
  int n_;
  double spacing_;
};

/// Unit-norm steering vector; entry n is exp(j n 2 pi spacing sin(angle)) / sqrt(N).
CVec array_response(const UlaGeometry& geom, double angle);

/// Columns are array_response at each angle.
CMat steering_matrix(const UlaGeometry& geom, const std::vector<double>& angles);

/// Raised-cosine impulse response normalized to p(0) = 1.
double raised_cosine(double t, double rolloff, double symbol_interval);

using PulseShape = std::function<double(double)>;

PulseShape raised_cosine_pulse(double rolloff, double symbol_interval);

struct Ray {
  cd gain{0.0, 0.0};
  double rel_delay = 0.0;
  double aoa_shift = 0.0;
  double aod_shift = 0.0;
};

struct Cluster {
  double mean_delay = 0.0;
  double mean_aoa = 0.0;
  double mean_aod = 0.0;
  double power = 0.0;
  std::vector<Ray> rays;
};

enum class Band { sub6, mmwave };

struct ClusterSet {
  std::vector<Cluster> clusters;
  Band band_tag = Band::sub6;

  std::size_t num_rays() const;
  double total_power() const;
  /// Rescales cluster powers to sum to one; no-op when all powers are zero.
  void normalize_powers();
  std::vector<double> ray_aoas() const;
  std::vector<double> ray_aods() const;
};

enum class Congruence { congruent, realistic };

/// Channel-block parameters consumed by gen_cluster_sets.
///
/// Angles are radians, delays seconds. In congruent mode the sub-6 fields
/// describe the shared geometry; fixed_aoas/fixed_powers pin the cluster means
/// (used by the two-cluster experiments).
struct ClusterGenConfig {
  Congruence mode = Congruence::realistic;
  int sub6_clusters = 10;
  int mmwave_clusters = 5;
  int sub6_rays = 20;
  int mmwave_rays = 20;
  double sub6_angle_spread = deg2rad(4.0);
  double mmwave_angle_spread = deg2rad(2.0);
  double sub6_rms_delay = 3.8e-9;
  double mmwave_rms_delay = 2.7e-9;
  double sub6_power_mu = 0.2;
  double mmwave_power_mu = 0.1;
  double angle_limit = kPi / 3.0;
  double mean_angle_perturbation = 0.0;
  /// Relative ray delay std as a fraction of the RMS delay spread.
  double ray_delay_fraction = 0.1;
  /// Congruent mode: first cluster arrives at 0, the rest uniform in [0, max].
  double max_cluster_delay = 10e-9;
  std::vector<double> fixed_aoas;
  std::vector<double> fixed_aods;
  std::vector<double> fixed_powers;
  /// Linear power scale applied to every ray gain (path loss).
  double path_gain = 1.0;

  void validate() const;
};

/// Draws the sub-6 and mmWave cluster sets, including one set of ray gains.
std::pair<ClusterSet, ClusterSet> gen_cluster_sets(const ClusterGenConfig& cfg, Rng& rng);

/// Redraws every ray gain as CN(0, path_gain * power_c / R_c); angles and
/// delays are untouched.
void redraw_gains(ClusterSet& set, Rng& rng, double path_gain = 1.0);

struct ChannelRealization {
  std::vector<CMat> delay_taps;
  double sample_interval = 0.0;
};

struct FreqChannel {
  /// Entry i holds subcarrier index i of the K-point DFT (index 0 is k = K).
  std::vector<CMat> subcarriers;

  int num_subcarriers() const { return static_cast<int>(subcarriers.size()); }
};

ChannelRealization build_delay_taps(const ClusterSet& clusters, const UlaGeometry& rx,
                                    const UlaGeometry& tx, int num_taps,
                                    double sample_interval, const PulseShape& pulse);

FreqChannel delay_to_freq(const ChannelRealization& ch, int num_subcarriers);

/// Per-ray frequency response at subcarrier k (the sum over taps of gain,
/// pulse sample, and DFT kernel).
CVec ray_frequency_gains(const ClusterSet& clusters, int num_taps, double sample_interval,
                         const PulseShape& pulse, int k, int num_subcarriers);

/// Channel at subcarriers `ks` via the factored form
/// sqrt(N_RX N_TX) A_RX diag(gains_k) A_TX^H; equal to delay_to_freq of
/// build_delay_taps without forming the taps.
FreqChannel freq_channel(const ClusterSet& clusters, const UlaGeometry& rx,
                         const UlaGeometry& tx, int num_taps, double sample_interval,
                         const PulseShape& pulse, const std::vector<int>& ks,
                         int num_subcarriers);

}  // namespace oobcov
