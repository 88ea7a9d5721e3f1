#include "oobcov/translation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "oobcov/nnls.hpp"

namespace oobcov {

int mdl_order(const std::vector<double>& eig, int num_snapshots) {
  const int n = static_cast<int>(eig.size());
  require(n >= 2, ErrorCode::InvalidArgument, "mdl_order: need at least two eigenvalues");
  require(num_snapshots >= 1, ErrorCode::InvalidArgument, "mdl_order: num_snapshots must be >= 1");
  const double top = eig.front();
  for (int i = 1; i < n; ++i) {
    require(eig[static_cast<std::size_t>(i)] <= eig[static_cast<std::size_t>(i - 1)] +
                                                     1e-9 * std::max(std::abs(top), 1.0),
            ErrorCode::InvalidArgument, "mdl_order: eigenvalues must be descending");
  }
  if (top <= 0.0) return 0;
  const double floor = 1e-10 * top;
  const double t = static_cast<double>(num_snapshots);

  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int m = 0; m < n; ++m) {
    const int tail = n - m;
    double log_geo = 0.0;
    double arith = 0.0;
    for (int i = m; i < n; ++i) {
      const double v = std::max(eig[static_cast<std::size_t>(i)], floor);
      log_geo += std::log(v);
      arith += v;
    }
    log_geo /= tail;
    arith /= tail;
    const double val = -t * tail * (log_geo - std::log(arith)) +
                       0.5 * m * (2.0 * n - m) * std::log(t);
    if (val < best_val) {
      best_val = val;
      best = m;
    }
  }
  return best;
}

int cluster_count(int point_sources) {
  require(point_sources >= 0, ErrorCode::InvalidArgument, "cluster_count: negative input");
  return std::max(point_sources / 2, 1);
}

std::vector<double> root_music(const CovarianceMatrix& r, int num_sources, const UlaGeometry& geom) {
  const int n = r.size();
  require(n == geom.num_antennas(), ErrorCode::DimensionMismatch,
          "root_music: covariance size does not match geometry");
  require(num_sources >= 1 && num_sources < n, ErrorCode::InvalidArgument,
          "root_music: need 1 <= num_sources < N");

  const auto sub = subspace_decompose(r, num_sources);
  const CMat c = sub.noise_basis * sub.noise_basis.adjoint();

  // a(w)^H C a(w) = sum_l b_l z^l, z = exp(j w); shift by z^(N-1).
  std::vector<cd> coeffs(static_cast<std::size_t>(2 * n - 1), cd(0.0, 0.0));
  for (int row = 0; row < n; ++row)
    for (int col = 0; col < n; ++col)
      coeffs[static_cast<std::size_t>(col - row + n - 1)] += c(row, col);

  std::vector<cd> roots = linalg::polynomial_roots(coeffs);
  std::vector<std::size_t> order(roots.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(std::abs(roots[a]) - 1.0) < std::abs(std::abs(roots[b]) - 1.0);
  });

  const double wmax = 2.0 * kPi * geom.spacing();
  std::vector<bool> used(roots.size(), false);
  std::vector<double> angles;
  for (std::size_t oi = 0; oi < order.size() && static_cast<int>(angles.size()) < num_sources; ++oi) {
    const std::size_t i = order[oi];
    if (used[i]) continue;
    const cd z = roots[i];
    const double mag = std::abs(z);
    if (mag > 1.0 + 1e-6) continue;
    used[i] = true;
    // Roots at the origin carry no direction (flat spectra); they sort last
    // and map to broadside.
    if (mag < 1e-12) {
      angles.push_back(0.0);
      continue;
    }
    // Drop the conjugate-reciprocal partner so a double root counts once.
    const cd partner = 1.0 / std::conj(z);
    std::size_t best = roots.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < roots.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(roots[j] - partner);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best < roots.size() && best_d < 0.1 * std::abs(partner)) used[best] = true;

    const double w = std::arg(z);
    if (std::abs(w) > wmax) continue;
    angles.push_back(std::asin(std::clamp(w / wmax, -1.0, 1.0)));
  }
  if (static_cast<int>(angles.size()) < num_sources) {
    fail(ErrorCode::InsufficientRoots, "root_music: fewer mappable roots than sources");
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

std::vector<AngleSpread> spread_root_music(const CovarianceMatrix& r, int num_clusters,
                                           const UlaGeometry& geom, double spread_scale) {
  require(num_clusters >= 1 && 2 * num_clusters < r.size(), ErrorCode::InvalidArgument,
          "spread_root_music: need 1 <= C and 2C < N");
  const auto pts = root_music(r, 2 * num_clusters, geom);
  std::vector<AngleSpread> out;
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    out.push_back({0.5 * (pts[i] + pts[i + 1]), spread_scale * 0.5 * std::abs(pts[i + 1] - pts[i])});
  }
  std::sort(out.begin(), out.end(),
            [](const AngleSpread& a, const AngleSpread& b) { return a.angle < b.angle; });
  return out;
}

std::vector<AngleSpread> robustify(const std::vector<AngleSpread>& raw, const CovarianceMatrix& r,
                                   double as_threshold, const UlaGeometry& geom) {
  require(as_threshold > 0.0, ErrorCode::InvalidArgument, "robustify: threshold must be > 0");
  std::vector<AngleSpread> out = raw;
  bool computed = false;
  double aoa = 0.0;
  for (auto& e : out) {
    if (e.spread > as_threshold) {
      if (!computed) {
        aoa = root_music(r, 1, geom).front();
        computed = true;
      }
      e = {aoa, 0.0};
    }
  }
  return out;
}

namespace {

void stack_column(RMat& a, Eigen::Index col, const CMat& m) {
  const Eigen::Index n2 = m.size();
  for (Eigen::Index i = 0; i < n2; ++i) {
    a(i, col) = m(i % m.rows(), i / m.rows()).real();
    a(i + n2, col) = m(i % m.rows(), i / m.rows()).imag();
  }
}

}  // namespace

PowerFit nnls_powers(const CovarianceMatrix& r_sub6, const std::vector<CovarianceMatrix>& components) {
  require(!components.empty(), ErrorCode::InvalidArgument, "nnls_powers: no components");
  const int n = r_sub6.size();
  for (const auto& c : components)
    require(c.size() == n, ErrorCode::DimensionMismatch, "nnls_powers: component size mismatch");

  const Eigen::Index rows = 2 * static_cast<Eigen::Index>(n) * n;
  const auto cols = static_cast<Eigen::Index>(components.size() + 1);
  RMat a(rows, cols);
  for (std::size_t c = 0; c < components.size(); ++c)
    stack_column(a, static_cast<Eigen::Index>(c), components[c].mat());
  stack_column(a, cols - 1, CMat::Identity(n, n));

  RMat bm(rows, 1);
  stack_column(bm, 0, r_sub6.mat());
  const auto sol = nnls(a, bm.col(0), 1e-10);

  PowerFit out;
  for (Eigen::Index c = 0; c + 1 < cols; ++c) out.powers.push_back(sol.x[c]);
  out.noise_var = sol.x[cols - 1];
  out.residual = sol.residual_norm;
  return out;
}

TranslationResult translate(const CovarianceMatrix& r_sub6, const UlaGeometry& sub6_geom,
                            const UlaGeometry& mmwave_geom, int num_snapshots,
                            const TranslationOptions& opts) {
  const int n = r_sub6.size();
  require(n == sub6_geom.num_antennas(), ErrorCode::DimensionMismatch,
          "translate: covariance size does not match sub-6 geometry");
  require(n >= 2, ErrorCode::InvalidArgument, "translate: need at least two sub-6 antennas");

  const RVec& vals = r_sub6.eigen().values;
  std::vector<double> eig(vals.data(), vals.data() + vals.size());
  TranslationResult out;
  out.point_sources = mdl_order(eig, num_snapshots);

  const int max_clusters = std::max((n - 1) / 2, 1);
  const int clusters = std::min(cluster_count(out.point_sources), max_clusters);

  std::vector<AngleSpread> params;
  const bool can_spread = 2 * clusters < n;
  if (out.point_sources <= 1 || !can_spread) {
    params = {{root_music(r_sub6, 1, sub6_geom).front(), 0.0}};
    out.aoa_only_fallback = true;
  } else {
    try {
      params = spread_root_music(r_sub6, clusters, sub6_geom, opts.spread_scale);
      params = robustify(params, r_sub6, opts.as_threshold, sub6_geom);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientRoots) throw;
      params = {{root_music(r_sub6, 1, sub6_geom).front(), 0.0}};
      out.aoa_only_fallback = true;
    }
  }

  std::vector<CovarianceMatrix> sub6_components;
  for (const auto& p : params)
    sub6_components.push_back(theoretical_covariance(opts.pas, p.angle, p.spread, sub6_geom,
                                                     r_sub6.side()));
  const PowerFit fit = nnls_powers(r_sub6, sub6_components);
  out.noise_var = fit.noise_var;

  std::vector<WeightedComponent> mm;
  for (std::size_t c = 0; c < params.size(); ++c) {
    out.estimates.push_back({params[c].angle, params[c].spread, fit.powers[c]});
    mm.push_back({fit.powers[c], theoretical_covariance(opts.pas, params[c].angle, params[c].spread,
                                                        mmwave_geom, r_sub6.side())});
  }
  out.mmwave_cov = synthesize_multicluster(mm);
  return out;
}

}  // namespace oobcov
