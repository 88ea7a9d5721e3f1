#pragma once

#include <oobcov/types.hpp>

namespace testutil {

using namespace oobcov;

inline CMat random_complex(int rows, int cols, Rng& rng) {
  CMat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = complex_normal(rng);
  return m;
}

inline CMat random_psd(int n, Rng& rng, int rank = -1) {
  const CMat g = random_complex(n, rank < 0 ? n : rank, rng);
  return g * g.adjoint();
}

inline CMat random_hermitian(int n, Rng& rng) {
  const CMat g = random_complex(n, n, rng);
  return 0.5 * (g + g.adjoint());
}

inline double rel_diff(const CMat& a, const CMat& b) {
  const double scale = std::max(a.norm(), 1e-300);
  return (a - b).norm() / scale;
}

}  // namespace testutil
