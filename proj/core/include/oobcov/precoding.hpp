#pragma once

#include <vector>

#include "oobcov/covariance.hpp"
#include "oobcov/phase_codebook.hpp"

namespace oobcov {

/// Analog matrix plus per-subcarrier baseband matrices. Used for both the
/// transmit precoder and the receive combiner.
struct HybridPrecoder {
  CMat rf;
  /// Codebook index of every rf entry.
  Eigen::MatrixXi rf_phase_index;
  std::vector<CMat> bb;
  /// ||U - F_RF F_BB||_F before normalization, one entry per selected column.
  std::vector<double> residual_history;

  /// rf * bb[k]; a single stored bb is shared by every subcarrier.
  CMat effective(int k) const;
  int num_subcarriers() const { return static_cast<int>(bb.size()); }
};

/// Top n_streams eigenvectors of R (phase-canonicalized, orthonormal).
CMat design_digital(const CovarianceMatrix& r, int n_streams);

/// Wraps an unconstrained N x N_s matrix as a fully digital precoder
/// (rf = I, bb = u on every subcarrier). Not phase-constrained.
HybridPrecoder digital_as_hybrid(const CMat& u, int num_subcarriers);

/// Quantized steering atoms: grid steering vectors (B = oversampling * N,
/// uniform in sin) with every phase snapped to the codebook. Duplicate
/// columns are dropped.
struct QuantizedAtoms {
  CMat atoms;
  Eigen::MatrixXi phase_index;
};

QuantizedAtoms quantized_steering_atoms(const UlaGeometry& geom, const PhaseCodebook& codebook,
                                        int oversampling = 2);

/// Greedy factorization U ~ F_RF F_BB over quantized steering atoms with
/// least-squares baseband updates; U = design_digital(R, n_streams). bb is the
/// same on every subcarrier and scaled so that
/// sum_k ||F_RF F_BB[k]||_F^2 = K n_streams.
HybridPrecoder design_hybrid(const CovarianceMatrix& r, int n_rf, int n_streams,
                             const PhaseCodebook& codebook, int num_subcarriers,
                             int oversampling = 2);

}  // namespace oobcov
