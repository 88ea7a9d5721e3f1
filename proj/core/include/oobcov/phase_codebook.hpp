#pragma once

#include <vector>

#include "oobcov/types.hpp"

namespace oobcov {

/// 2^bits phase-shifter settings, uniform over [0, 2 pi).
class PhaseCodebook {
 public:
  explicit PhaseCodebook(int bits = 2);

  int bits() const noexcept { return bits_; }
  int size() const noexcept { return static_cast<int>(phases_.size()); }
  const std::vector<double>& phases() const noexcept { return phases_; }
  double phase(int index) const { return phases_.at(static_cast<std::size_t>(index)); }

  /// Index of the codebook phase nearest to `phase` on the circle.
  int nearest(double phase) const;

  /// Constant-modulus entry scale * exp(j phase(index)), bit-reproducible.
  cd entry(int index, double scale) const { return std::polar(scale, phase(index)); }

 private:
  int bits_;
  std::vector<double> phases_;
};

}  // namespace oobcov
