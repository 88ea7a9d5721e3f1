#pragma once

#include <vector>

#include "oobcov/covariance.hpp"

namespace oobcov {

struct AngleSpread {
  double angle = 0.0;
  double spread = 0.0;
};

struct ClusterEstimate {
  double mean_angle = 0.0;
  double spread = 0.0;
  double power = 0.0;
};

struct TranslationResult {
  std::vector<ClusterEstimate> estimates;
  double noise_var = 0.0;
  CovarianceMatrix mmwave_cov;
  int point_sources = 0;
  /// True when the pipeline fell back to a single AoA-only cluster.
  bool aoa_only_fallback = false;
};

struct TranslationOptions {
  PasKind pas = PasKind::truncated_gaussian;
  double as_threshold = deg2rad(15.0);
  /// Multiplier on the half-separation of each root pair.
  double spread_scale = 1.0;
};

/// Wax-Kailath MDL source count over m = 0..N-1. Eigenvalues are floored at
/// 1e-10 of the largest so that noise-free spectra stay finite.
int mdl_order(const std::vector<double>& eigenvalues_desc, int num_snapshots);

/// max(floor(point_sources / 2), 1).
int cluster_count(int point_sources);

/// Point-source angles (radians, ascending) from the noise-subspace polynomial.
std::vector<double> root_music(const CovarianceMatrix& r, int num_sources,
                               const UlaGeometry& geom);

/// Two-point surrogate per cluster: root-MUSIC for 2C sources, adjacent
/// pairing, midpoint mean and scaled half-separation spread.
std::vector<AngleSpread> spread_root_music(const CovarianceMatrix& r, int num_clusters,
                                           const UlaGeometry& geom, double spread_scale = 1.0);

/// Replaces every entry whose spread exceeds the threshold by the
/// single-source root-MUSIC angle with zero spread.
std::vector<AngleSpread> robustify(const std::vector<AngleSpread>& raw,
                                   const CovarianceMatrix& r, double as_threshold,
                                   const UlaGeometry& geom);

struct PowerFit {
  std::vector<double> powers;
  double noise_var = 0.0;
  double residual = 0.0;
};

/// Non-negative fit of vec(R) onto [vec(R_1) .. vec(R_C) vec(I)] with real
/// and imaginary parts stacked.
PowerFit nnls_powers(const CovarianceMatrix& r_sub6,
                     const std::vector<CovarianceMatrix>& components);

TranslationResult translate(const CovarianceMatrix& r_sub6, const UlaGeometry& sub6_geom,
                            const UlaGeometry& mmwave_geom, int num_snapshots,
                            const TranslationOptions& opts = {});

}  // namespace oobcov
