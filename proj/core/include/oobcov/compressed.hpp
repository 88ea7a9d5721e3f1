#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "oobcov/covariance.hpp"
#include "oobcov/phase_codebook.hpp"

namespace oobcov {

/// Angular grid and the matching array-response atoms (one column per angle).
struct Dictionary {
  std::vector<double> grid_angles;
  CMat atoms;

  int size() const { return static_cast<int>(grid_angles.size()); }
};

/// Received snapshots with the analog combiners that produced them.
struct SnapshotSet {
  std::vector<CVec> received;
  std::vector<CMat> combiners;
  /// Per-frame pre-combining noise variance.
  double noise_var = 0.0;

  int num_snapshots() const { return static_cast<int>(received.size()); }
  int num_rf() const { return received.empty() ? 0 : static_cast<int>(received.front().size()); }
};

struct PriorWeights {
  RVec probabilities;
  RVec weights;
};

struct CompressedEstimate {
  std::vector<int> support;
  CMat gain_cov;
  /// Sum over snapshots of the residual Frobenius norms, before each
  /// iteration and after the last.
  std::vector<double> residual_history;
  std::optional<CovarianceMatrix> assembled;
};

inline constexpr double kProbabilityClamp = 1e-6;

/// Norm of W_t^H W_t in the stopping threshold 2 noise_var sum_t ||W_t^H W_t||.
/// `trace` equals E||y_t y_t^H||_F on pure noise; `frobenius` is the literal
/// rule, which on pure noise keeps selecting until the support limit when M > 1.
enum class StopNorm { trace, frobenius };

/// f1 = [1,..,1]/sqrt(N), f2 = [1,-1,..,-1]/sqrt(N); f1 + f2 = (2/sqrt(N)) e1.
std::pair<CVec, CVec> omni_precoder_pair(int n_tx);

/// Constant-modulus combiner with phases drawn uniformly from the codebook.
CMat random_rf_matrix(int n, int m, const PhaseCodebook& codebook, Rng& rng);

/// Two-frame snapshots y_t = W_t^H H_t (f1 + f2) + W_t^H (n_t1 + n_t2).
SnapshotSet collect_snapshots(const std::vector<CMat>& channels, const std::vector<CMat>& combiners,
                              double noise_var, Rng& rng);

/// B = oversampling * N atoms on a grid uniform in sin(angle) over [-1, 1).
Dictionary build_dictionary(const UlaGeometry& geom, int oversampling);

/// Atoms for `geom` evaluated at an existing grid.
Dictionary dictionary_on_grid(const UlaGeometry& geom, const std::vector<double>& grid_angles);

/// rho = j_rho |mean_b [A^H R A]_{:,b}| / max(...).
RVec prob_proxy(const CovarianceMatrix& r_sub6, const Dictionary& sub6_dict, double j_rho);

/// w_i = j_w log(rho_i / (1 - rho_i)), rho clamped to [1e-6, 1 - 1e-6].
PriorWeights logit_weight(const RVec& rho, double j_w);

/// Uniform (zero) weights.
PriorWeights uniform_weights(int grid_size);

/// Data term sum_t |phi_{t,i}^H y_t y_t^H phi_{t,i}| of the first selection.
RVec first_selection_scores(const SnapshotSet& snapshots, const Dictionary& dict);

/// Additive-weight scale: factor * median of first_selection_scores.
double adaptive_jw(const SnapshotSet& snapshots, const Dictionary& dict, double factor);

/// Logit-weighted dynamic covariance OMP. `max_support` defaults to the
/// number of RF chains.
CompressedEstimate lw_dcomp(const SnapshotSet& snapshots, const Dictionary& dict, double noise_var,
                            const PriorWeights& weights, std::optional<int> max_support = std::nullopt,
                            StopNorm stop = StopNorm::trace);

/// Unweighted DCOMP; lw_dcomp with all-zero weights.
CompressedEstimate dcomp(const SnapshotSet& snapshots, const Dictionary& dict, double noise_var,
                         std::optional<int> max_support = std::nullopt,
                         StopNorm stop = StopNorm::trace);

/// (n_other / 4) * A_S R_g A_S^H, Hermitian and PSD-projected. For receive
/// estimates n_other is N_TX; for transmit estimates it is N_RX.
CovarianceMatrix assemble_covariance(const CompressedEstimate& est, const Dictionary& dict,
                                     int n_own, int n_other, Side side = Side::rx);

/// Transmit-side estimate: the receiver synthesizes the omni combiner over
/// two frames while the transmitter cycles RF precoders, so the problem is
/// the receive one on H_t^H.
CompressedEstimate tx_side_estimate(const std::vector<CMat>& channels,
                                    const std::vector<CMat>& precoders, double noise_var,
                                    const Dictionary& tx_dict, const PriorWeights& weights, Rng& rng,
                                    std::optional<int> max_support = std::nullopt,
                                    StopNorm stop = StopNorm::trace);

}  // namespace oobcov
