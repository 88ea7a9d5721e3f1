#include "oobcov/compressed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oobcov {

std::pair<CVec, CVec> omni_precoder_pair(int n_tx) {
  require(n_tx >= 1, ErrorCode::InvalidArgument, "omni_precoder_pair: n_tx must be >= 1");
  const double s = 1.0 / std::sqrt(static_cast<double>(n_tx));
  CVec f1 = CVec::Constant(n_tx, cd(s, 0.0));
  CVec f2 = CVec::Constant(n_tx, cd(-s, 0.0));
  f2[0] = cd(s, 0.0);
  return {f1, f2};
}

CMat random_rf_matrix(int n, int m, const PhaseCodebook& codebook, Rng& rng) {
  require(n >= 1 && m >= 1, ErrorCode::InvalidArgument, "random_rf_matrix: empty dimensions");
  std::uniform_int_distribution<int> pick(0, codebook.size() - 1);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  CMat w(n, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) w(i, j) = codebook.entry(pick(rng), scale);
  return w;
}

SnapshotSet collect_snapshots(const std::vector<CMat>& channels, const std::vector<CMat>& combiners,
                              double noise_var, Rng& rng) {
  require(channels.size() == combiners.size(), ErrorCode::DimensionMismatch,
          "collect_snapshots: one combiner per snapshot required");
  require(noise_var >= 0.0, ErrorCode::InvalidArgument, "collect_snapshots: negative noise_var");
  SnapshotSet out;
  out.noise_var = noise_var;
  if (channels.empty()) return out;
  const auto n_rx = channels.front().rows();
  const auto n_tx = channels.front().cols();
  const auto m = combiners.front().cols();
  const auto [f1, f2] = omni_precoder_pair(static_cast<int>(n_tx));

  for (std::size_t t = 0; t < channels.size(); ++t) {
    const CMat& h = channels[t];
    const CMat& w = combiners[t];
    require(h.rows() == n_rx && h.cols() == n_tx, ErrorCode::DimensionMismatch,
            "collect_snapshots: channel dimensions differ across snapshots");
    require(w.rows() == n_rx && w.cols() == m, ErrorCode::DimensionMismatch,
            "collect_snapshots: combiner dimensions do not match");
    CVec n1(n_rx), n2(n_rx);
    for (Eigen::Index i = 0; i < n_rx; ++i) n1[i] = complex_normal(rng, noise_var);
    for (Eigen::Index i = 0; i < n_rx; ++i) n2[i] = complex_normal(rng, noise_var);
    const CMat wh = w.adjoint();
    const CVec y1 = wh * (h * f1) + wh * n1;
    const CVec y2 = wh * (h * f2) + wh * n2;
    out.received.push_back(y1 + y2);
    out.combiners.push_back(w);
  }
  return out;
}

Dictionary dictionary_on_grid(const UlaGeometry& geom, const std::vector<double>& grid_angles) {
  Dictionary d;
  d.grid_angles = grid_angles;
  d.atoms = steering_matrix(geom, grid_angles);
  return d;
}

Dictionary build_dictionary(const UlaGeometry& geom, int oversampling) {
  require(oversampling >= 1, ErrorCode::InvalidArgument, "build_dictionary: oversampling must be >= 1");
  const int b = oversampling * geom.num_antennas();
  std::vector<double> grid(static_cast<std::size_t>(b));
  for (int i = 0; i < b; ++i) {
    grid[static_cast<std::size_t>(i)] = std::asin(-1.0 + 2.0 * i / static_cast<double>(b));
  }
  return dictionary_on_grid(geom, grid);
}

RVec prob_proxy(const CovarianceMatrix& r_sub6, const Dictionary& sub6_dict, double j_rho) {
  require(j_rho > 0.0 && j_rho <= 1.0, ErrorCode::InvalidArgument, "prob_proxy: j_rho must be in (0, 1]");
  require(r_sub6.size() == sub6_dict.atoms.rows(), ErrorCode::DimensionMismatch,
          "prob_proxy: dictionary does not match covariance size");
  const CMat& a = sub6_dict.atoms;
  const CMat spectrum = a.adjoint() * r_sub6.mat() * a;
  const CVec col_mean = spectrum.rowwise().mean();
  RVec mag = col_mean.cwiseAbs();
  const double top = mag.size() ? mag.maxCoeff() : 0.0;
  if (top <= 0.0) return RVec::Constant(mag.size(), j_rho);
  return j_rho * mag / top;
}

PriorWeights logit_weight(const RVec& rho, double j_w) {
  require(j_w >= 0.0, ErrorCode::InvalidArgument, "logit_weight: j_w must be >= 0");
  PriorWeights out;
  out.probabilities = rho.cwiseMax(kProbabilityClamp).cwiseMin(1.0 - kProbabilityClamp);
  out.weights.resize(rho.size());
  for (Eigen::Index i = 0; i < rho.size(); ++i) {
    const double p = out.probabilities[i];
    out.weights[i] = j_w * std::log(p / (1.0 - p));
  }
  return out;
}

PriorWeights uniform_weights(int grid_size) {
  return {RVec::Constant(grid_size, 0.5), RVec::Zero(grid_size)};
}

namespace {

void require_snapshots(const SnapshotSet& s, const Dictionary& dict) {
  require(s.num_snapshots() >= 1, ErrorCode::InvalidArgument, "lw_dcomp: empty snapshot set");
  require(s.combiners.size() == s.received.size(), ErrorCode::DimensionMismatch,
          "lw_dcomp: combiner count mismatch");
  for (std::size_t t = 0; t < s.received.size(); ++t) {
    require(s.combiners[t].cols() == s.received[t].size() &&
                s.combiners[t].rows() == dict.atoms.rows(),
            ErrorCode::DimensionMismatch, "lw_dcomp: snapshot dimensions do not match dictionary");
  }
}

// sum_t |phi_i^H V_t phi_i| for every grid index.
RVec selection_scores(const std::vector<CMat>& phis, const std::vector<CMat>& residuals) {
  RVec score = RVec::Zero(phis.front().cols());
  for (std::size_t t = 0; t < phis.size(); ++t) {
    const CMat vp = residuals[t] * phis[t];
    for (Eigen::Index i = 0; i < score.size(); ++i) {
      score[i] += std::abs(phis[t].col(i).dot(vp.col(i)));
    }
  }
  return score;
}

}  // namespace

RVec first_selection_scores(const SnapshotSet& snapshots, const Dictionary& dict) {
  require_snapshots(snapshots, dict);
  std::vector<CMat> phis, res;
  for (int t = 0; t < snapshots.num_snapshots(); ++t) {
    const auto ts = static_cast<std::size_t>(t);
    phis.push_back(snapshots.combiners[ts].adjoint() * dict.atoms);
    res.push_back(snapshots.received[ts] * snapshots.received[ts].adjoint());
  }
  return selection_scores(phis, res);
}

double adaptive_jw(const SnapshotSet& snapshots, const Dictionary& dict, double factor) {
  require(factor >= 0.0, ErrorCode::InvalidArgument, "adaptive_jw: factor must be >= 0");
  RVec s = first_selection_scores(snapshots, dict);
  std::vector<double> v(s.data(), s.data() + s.size());
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double median = *mid;
  if (v.size() % 2 == 0) {
    const double lower = *std::max_element(v.begin(), mid);
    median = 0.5 * (median + lower);
  }
  return factor * median;
}

CompressedEstimate lw_dcomp(const SnapshotSet& snapshots, const Dictionary& dict, double noise_var,
                            const PriorWeights& weights, std::optional<int> max_support,
                            StopNorm stop) {
  require_snapshots(snapshots, dict);
  const int b = dict.size();
  require(weights.weights.size() == b, ErrorCode::DimensionMismatch,
          "lw_dcomp: weights length must equal grid size");
  const int t_count = snapshots.num_snapshots();
  const int m_rf = snapshots.num_rf();
  const int limit = std::min(max_support.value_or(m_rf), b);

  std::vector<CMat> phis, residuals, yy;
  double threshold = 0.0;
  for (int t = 0; t < t_count; ++t) {
    const auto ts = static_cast<std::size_t>(t);
    const CMat& w = snapshots.combiners[ts];
    phis.push_back(w.adjoint() * dict.atoms);
    yy.push_back(snapshots.received[ts] * snapshots.received[ts].adjoint());
    const CMat gram = w.adjoint() * w;
    threshold += stop == StopNorm::trace ? gram.trace().real() : gram.norm();
  }
  threshold *= 2.0 * noise_var;
  residuals = yy;

  auto residual_sum = [&] {
    double s = 0.0;
    for (const auto& v : residuals) s += v.norm();
    return s;
  };

  CompressedEstimate est;
  std::vector<bool> chosen(static_cast<std::size_t>(b), false);
  std::vector<CMat> per_snapshot;
  double current = residual_sum();
  est.residual_history.push_back(current);
  // Rounding floor for noise-free input.
  threshold = std::max(threshold, 1e-12 * current);

  int i = 0;
  while (current > threshold && i < limit) {
    const RVec score = selection_scores(phis, residuals) + weights.weights;
    int j = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < b; ++k) {
      if (chosen[static_cast<std::size_t>(k)]) continue;
      if (score[k] > best) {
        best = score[k];
        j = k;
      }
    }
    if (j < 0) break;
    chosen[static_cast<std::size_t>(j)] = true;
    est.support.push_back(j);

    const auto s = static_cast<Eigen::Index>(est.support.size());
    per_snapshot.assign(static_cast<std::size_t>(t_count), CMat());
    for (int t = 0; t < t_count; ++t) {
      const auto ts = static_cast<std::size_t>(t);
      CMat phi_s(phis[ts].rows(), s);
      for (Eigen::Index c = 0; c < s; ++c) phi_s.col(c) = phis[ts].col(est.support[static_cast<std::size_t>(c)]);
      const CMat pinv = linalg::pinv(phi_s);
      per_snapshot[ts] = pinv * yy[ts] * pinv.adjoint();
      residuals[ts] = yy[ts] - phi_s * per_snapshot[ts] * phi_s.adjoint();
    }
    ++i;
    current = residual_sum();
    est.residual_history.push_back(current);
  }

  const auto s = static_cast<Eigen::Index>(est.support.size());
  est.gain_cov = CMat::Zero(s, s);
  for (const auto& g : per_snapshot) est.gain_cov += g;
  if (!per_snapshot.empty()) est.gain_cov /= static_cast<double>(t_count);
  return est;
}

CompressedEstimate dcomp(const SnapshotSet& snapshots, const Dictionary& dict, double noise_var,
                         std::optional<int> max_support, StopNorm stop) {
  return lw_dcomp(snapshots, dict, noise_var, uniform_weights(dict.size()), max_support, stop);
}

CovarianceMatrix assemble_covariance(const CompressedEstimate& est, const Dictionary& dict,
                                     int n_own, int n_other, Side side) {
  require(dict.atoms.rows() == n_own, ErrorCode::DimensionMismatch,
          "assemble_covariance: dictionary does not match array size");
  require(n_other >= 1, ErrorCode::InvalidArgument, "assemble_covariance: n_other must be >= 1");
  const auto s = static_cast<Eigen::Index>(est.support.size());
  if (s == 0) return CovarianceMatrix(CMat::Zero(n_own, n_own), side);
  require(est.gain_cov.rows() == s && est.gain_cov.cols() == s, ErrorCode::DimensionMismatch,
          "assemble_covariance: gain covariance does not match support");
  CMat a_s(n_own, s);
  for (Eigen::Index c = 0; c < s; ++c) {
    const int idx = est.support[static_cast<std::size_t>(c)];
    require(idx >= 0 && idx < dict.size(), ErrorCode::InvalidArgument,
            "assemble_covariance: support index out of range");
    a_s.col(c) = dict.atoms.col(idx);
  }
  const CMat raw = linalg::hermitian_part(a_s * est.gain_cov * a_s.adjoint()) *
                   (static_cast<double>(n_other) / 4.0);
  const auto eig = linalg::hermitian_eigen(raw);
  const CMat psd = eig.vectors * eig.values.cwiseMax(0.0).asDiagonal() * eig.vectors.adjoint();
  return CovarianceMatrix(psd, side);
}

CompressedEstimate tx_side_estimate(const std::vector<CMat>& channels,
                                    const std::vector<CMat>& precoders, double noise_var,
                                    const Dictionary& tx_dict, const PriorWeights& weights, Rng& rng,
                                    std::optional<int> max_support, StopNorm stop) {
  std::vector<CMat> transposed;
  transposed.reserve(channels.size());
  for (const auto& h : channels) transposed.push_back(h.adjoint());
  const SnapshotSet snaps = collect_snapshots(transposed, precoders, noise_var, rng);
  return lw_dcomp(snaps, tx_dict, noise_var, weights, max_support, stop);
}

}  // namespace oobcov
