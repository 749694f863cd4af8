#pragma once

#include <cstddef>

#include "gibbslab/spectral/basis.hpp"

namespace gibbslab::spectral {

// tr[h^{-p}] split into the computed modes and a tail from the analytic
// eigenvalue growth. On the interval the tail is a rigorous upper bound
// (lambda_j >= ((j-1) pi/2)^2); on the line it is a WKB estimate.
struct SchattenTrace {
  double p = 1.0;
  bool divergent = false;
  double partial_sum = 0.0;     // sum_{j <= K} lambda_j^{-p}
  double tail_explicit = 0.0;   // analytic eigenvalues K < j <= K + K_tail
  double tail_remainder = 0.0;  // integral bound/estimate beyond K + K_tail
  std::size_t modes = 0;
  std::size_t tail_terms = 0;

  double tail() const { return tail_explicit + tail_remainder; }
  double value() const { return partial_sum + tail(); }
};

// Exponent beta with lambda_j ~ j^beta: 2 on the interval, 2a/(a+2) on the line.
double eigenvalue_growth(const OneBodySpec& spec);

// A request with p * growth <= 1 (p <= 1/2 on the interval) is flagged
// divergent rather than summed.
SchattenTrace schatten_trace(const SpectralBasis& basis, double p, std::size_t tail_terms = 0);

}  // namespace gibbslab::spectral
