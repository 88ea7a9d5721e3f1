#include "oobcov/precoding.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace oobcov {

PhaseCodebook::PhaseCodebook(int bits) : bits_(bits) {
  require(bits >= 1 && bits <= 16, ErrorCode::InvalidArgument,
          "PhaseCodebook: bits must be in [1, 16]");
  const int n = 1 << bits;
  phases_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) phases_[static_cast<std::size_t>(i)] = 2.0 * kPi * i / n;
}

int PhaseCodebook::nearest(double phase) const {
  const double step = 2.0 * kPi / size();
  double wrapped = std::fmod(phase, 2.0 * kPi);
  if (wrapped < 0.0) wrapped += 2.0 * kPi;
  const auto idx = static_cast<int>(std::lround(wrapped / step));
  return idx % size();
}

CMat HybridPrecoder::effective(int k) const {
  require(!bb.empty(), ErrorCode::InvalidArgument, "HybridPrecoder: no baseband matrices");
  const auto i = bb.size() == 1 ? 0 : static_cast<std::size_t>(k);
  require(i < bb.size(), ErrorCode::InvalidArgument, "HybridPrecoder: subcarrier out of range");
  return rf * bb[i];
}

CMat design_digital(const CovarianceMatrix& r, int n_streams) {
  require(n_streams >= 1 && n_streams <= r.size(), ErrorCode::InvalidArgument,
          "design_digital: n_streams must be in [1, N]");
  return r.eigen().vectors.leftCols(n_streams);
}

HybridPrecoder digital_as_hybrid(const CMat& u, int num_subcarriers) {
  require(num_subcarriers >= 1, ErrorCode::InvalidArgument,
          "digital_as_hybrid: num_subcarriers must be >= 1");
  HybridPrecoder p;
  p.rf = CMat::Identity(u.rows(), u.rows());
  p.bb.assign(static_cast<std::size_t>(num_subcarriers), u);
  return p;
}

QuantizedAtoms quantized_steering_atoms(const UlaGeometry& geom, const PhaseCodebook& codebook,
                                        int oversampling) {
  require(oversampling >= 1, ErrorCode::InvalidArgument,
          "quantized_steering_atoms: oversampling must be >= 1");
  const int n = geom.num_antennas();
  const int b = oversampling * n;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<std::vector<int>> kept;
  std::set<std::vector<int>> seen;
  for (int g = 0; g < b; ++g) {
    const double s = -1.0 + 2.0 * g / static_cast<double>(b);
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      idx[static_cast<std::size_t>(i)] = codebook.nearest(2.0 * kPi * geom.spacing() * i * s);
    }
    if (seen.insert(idx).second) kept.push_back(std::move(idx));
  }
  QuantizedAtoms out;
  out.atoms.resize(n, static_cast<Eigen::Index>(kept.size()));
  out.phase_index.resize(n, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    for (int i = 0; i < n; ++i) {
      const int p = kept[c][static_cast<std::size_t>(i)];
      out.phase_index(i, static_cast<Eigen::Index>(c)) = p;
      out.atoms(i, static_cast<Eigen::Index>(c)) = codebook.entry(p, scale);
    }
  }
  return out;
}

HybridPrecoder design_hybrid(const CovarianceMatrix& r, int n_rf, int n_streams,
                             const PhaseCodebook& codebook, int num_subcarriers,
                             int oversampling) {
  const int n = r.size();
  require(n_streams >= 1 && n_streams <= n_rf && n_rf <= n, ErrorCode::InvalidArgument,
          "design_hybrid: need 1 <= n_streams <= n_rf <= N");
  require(num_subcarriers >= 1, ErrorCode::InvalidArgument,
          "design_hybrid: num_subcarriers must be >= 1");
  const CMat u = design_digital(r, n_streams);
  const QuantizedAtoms dict = quantized_steering_atoms(UlaGeometry(n), codebook, oversampling);
  const auto b = dict.atoms.cols();

  HybridPrecoder p;
  p.rf.resize(n, 0);
  p.rf_phase_index.resize(n, 0);
  std::vector<bool> used(static_cast<std::size_t>(b), false);
  CMat residual = u;
  CMat bb;
  for (int m = 0; m < n_rf; ++m) {
    const RVec corr = (dict.atoms.adjoint() * residual).rowwise().squaredNorm();
    Eigen::Index pick = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < b; ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      if (corr[c] > best) {
        best = corr[c];
        pick = c;
      }
    }
    if (pick < 0) break;
    used[static_cast<std::size_t>(pick)] = true;
    p.rf.conservativeResize(Eigen::NoChange, m + 1);
    p.rf_phase_index.conservativeResize(Eigen::NoChange, m + 1);
    p.rf.col(m) = dict.atoms.col(pick);
    p.rf_phase_index.col(m) = dict.phase_index.col(pick);
    bb = linalg::pinv(p.rf) * u;
    residual = u - p.rf * bb;
    p.residual_history.push_back(residual.norm());
  }

  const double power = (p.rf * bb).norm();
  require(power > 0.0, ErrorCode::DegenerateEstimate, "design_hybrid: zero precoder");
  bb *= std::sqrt(static_cast<double>(n_streams)) / power;
  p.bb.assign(static_cast<std::size_t>(num_subcarriers), bb);
  return p;
}

}  // namespace oobcov
