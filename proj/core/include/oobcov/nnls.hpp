#pragma once

#include "oobcov/types.hpp"

namespace oobcov {

struct NnlsResult {
  RVec x;
  double residual_norm = 0.0;
  int iterations = 0;
};

/// min ||A x - b||_2 subject to x >= 0, Lawson-Hanson active set.
///
/// `tol` is relative: a coordinate enters the passive set only while its
/// dual gradient exceeds tol * max(1, ||A||_F * ||b||_2).
NnlsResult nnls(const RMat& a, const RVec& b, double tol = 1e-10, int max_iter = 0);

}  // namespace oobcov
