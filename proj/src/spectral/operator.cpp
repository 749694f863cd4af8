#include "gibbslab/spectral/operator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gibbslab::spectral {

void OneBodySpec::validate() const {
  if (grid_points < 64) {
    throw std::invalid_argument("grid_points must be >= 64, got " + std::to_string(grid_points));
  }
  if (const auto* line = std::get_if<AnharmonicLine>(&domain)) {
    if (!(line->exponent > 2.0)) {
      throw std::invalid_argument("anharmonic exponent must exceed 2");
    }
    if (!(line->half_width > 0.0)) throw std::invalid_argument("box half-width must be positive");
    if (!std::isfinite(mass)) throw std::invalid_argument("mass must be finite");
  } else if (!(mass > 0.0)) {
    throw std::invalid_argument("interval operators need m > 0 to be positive definite");
  }
}

double OneBodySpec::potential(double x) const {
  if (const auto* line = std::get_if<AnharmonicLine>(&domain)) {
    return std::pow(std::abs(x), line->exponent) + mass;
  }
  return mass;
}

namespace {

Grid make_grid(const OneBodySpec& spec) {
  Grid grid;
  const std::size_t n = spec.grid_points;
  Boundary bc = Boundary::Dirichlet;
  if (const auto* line = std::get_if<AnharmonicLine>(&spec.domain)) {
    grid.lo = -line->half_width;
    grid.hi = line->half_width;
  } else {
    bc = std::get<Interval>(spec.domain).boundary;
  }
  const double length = grid.hi - grid.lo;
  grid.nodes.resize(n);
  switch (bc) {
    case Boundary::Dirichlet:
      grid.spacing = length / static_cast<double>(n + 1);
      for (std::size_t i = 0; i < n; ++i) grid.nodes[i] = grid.lo + double(i + 1) * grid.spacing;
      break;
    case Boundary::Neumann:
      grid.spacing = length / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) grid.nodes[i] = grid.lo + (double(i) + 0.5) * grid.spacing;
      break;
    case Boundary::Periodic:
      grid.periodic = true;
      grid.spacing = length / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) grid.nodes[i] = grid.lo + double(i) * grid.spacing;
      break;
  }
  return grid;
}

}  // namespace

DiscreteOperator build_operator(const OneBodySpec& spec) {
  spec.validate();
  DiscreteOperator op;
  op.spec = spec;
  op.grid = make_grid(spec);
  const std::size_t n = op.grid.size();
  const double inv_h2 = 1.0 / (op.grid.spacing * op.grid.spacing);

  op.diagonal.resize(n);
  for (std::size_t i = 0; i < n; ++i) op.diagonal[i] = 2.0 * inv_h2 + spec.potential(op.grid.nodes[i]);
  op.off_diagonal.assign(n - 1, -inv_h2);

  if (const auto* interval = std::get_if<Interval>(&spec.domain)) {
    if (interval->boundary == Boundary::Neumann) {
      // Ghost cell u_{-1} = u_0 (and mirrored at the right end).
      op.diagonal.front() -= inv_h2;
      op.diagonal.back() -= inv_h2;
    } else if (interval->boundary == Boundary::Periodic) {
      op.corner = -inv_h2;
    }
  }
  return op;
}

Eigen::MatrixXd DiscreteOperator::dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) a(i, i) = diagonal[i];
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    a(i, i + 1) = off_diagonal[i];
    a(i + 1, i) = off_diagonal[i];
  }
  if (grid.periodic) {
    a(0, n - 1) += corner;
    a(n - 1, 0) += corner;
  }
  return a;
}

void DiscreteOperator::apply(std::span<const double> in, std::span<double> out) const {
  const std::size_t n = size();
  if (in.size() != n || out.size() != n) throw std::invalid_argument("apply: size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    double v = diagonal[i] * in[i];
    if (i > 0) v += off_diagonal[i - 1] * in[i - 1];
    if (i + 1 < n) v += off_diagonal[i] * in[i + 1];
    out[i] = v;
  }
  if (grid.periodic) {
    out[0] += corner * in[n - 1];
    out[n - 1] += corner * in[0];
  }
}

}  // namespace gibbslab::spectral
