#include "gibbslab/spectral/schatten.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gibbslab::spectral {

double eigenvalue_growth(const OneBodySpec& spec) {
  if (const auto* line = std::get_if<AnharmonicLine>(&spec.domain)) {
    return 2.0 * line->exponent / (line->exponent + 2.0);
  }
  return 2.0;
}

SchattenTrace schatten_trace(const SpectralBasis& basis, double p, std::size_t tail_terms) {
  if (!(p >= 0.0)) throw std::invalid_argument("schatten_trace: p must be nonnegative");
  SchattenTrace out;
  out.p = p;
  out.modes = basis.size();
  out.tail_terms = tail_terms;
  for (double lambda : basis.eigenvalues) out.partial_sum += std::pow(lambda, -p);

  const double growth = eigenvalue_growth(basis.spec);
  if (p * growth <= 1.0) {
    out.divergent = true;
    return out;
  }

  const std::size_t k = basis.size();
  const std::size_t last = k + tail_terms;
  const double mass = basis.spec.mass;
  if (const auto* interval = std::get_if<Interval>(&basis.spec.domain)) {
    for (std::size_t j = k + 1; j <= last; ++j) {
      out.tail_explicit += std::pow(interval_eigenvalue(interval->boundary, mass, j), -p);
    }
    // sum_{j > J} ((j-1) pi/2)^{-2p} <= int_{J-1}^inf (pi y/2)^{-2p} dy
    const double start = std::max(1.0, static_cast<double>(last) - 1.0);
    out.tail_remainder = std::pow(2.0 / std::numbers::pi, 2.0 * p) *
                         std::pow(start, 1.0 - 2.0 * p) / (2.0 * p - 1.0);
  } else {
    const double a = std::get<AnharmonicLine>(basis.spec.domain).exponent;
    for (std::size_t j = k + 1; j <= last; ++j) {
      out.tail_explicit += std::pow(wkb_eigenvalue(a, mass, static_cast<double>(j)), -p);
    }
    // lambda(x) ~ c (x - 1/2)^growth, integrated from J + 1/2.
    const double c = wkb_eigenvalue(a, 0.0, 1.5);
    const double exponent = p * growth;
    out.tail_remainder =
        std::pow(c, -p) * std::pow(static_cast<double>(last), 1.0 - exponent) / (exponent - 1.0);
  }
  return out;
}

}  // namespace gibbslab::spectral
