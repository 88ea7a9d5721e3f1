#pragma once

#include <vector>

#include "oobcov/types.hpp"

namespace oobcov::linalg {

/// Eigen-pairs of a Hermitian matrix, eigenvalues descending.
///
/// Each eigenvector is phase-canonicalized (first entry with magnitude above
/// 1e-12 is real and positive). Runs of eigenvalues equal within
/// 1e-10 * max|lambda| are ordered by lexicographic comparison of the
/// canonicalized vectors (real part, then imaginary part, entry by entry).
struct HermitianEigen {
  RVec values;
  CMat vectors;
};

HermitianEigen hermitian_eigen(const CMat& a);

/// Rotates v so that its first significant entry has zero phase.
void canonicalize_phase(Eigen::Ref<CVec> v);

CMat hermitian_part(const CMat& a);

/// Moore-Penrose pseudo-inverse via complete orthogonal decomposition.
CMat pinv(const CMat& a);

/// Roots of sum_k coeffs[k] z^k. Leading and trailing (near-)zero
/// coefficients are trimmed; trailing zeros contribute roots at the origin.
std::vector<cd> polynomial_roots(const std::vector<cd>& coeffs);

/// Largest principal angle (radians) between the column spans of a and b.
double principal_angle(const CMat& a, const CMat& b);

double max_abs(const CMat& a);

}  // namespace oobcov::linalg
