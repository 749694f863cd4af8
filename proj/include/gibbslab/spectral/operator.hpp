#pragma once

// One-body Schrodinger operators h = -d^2/dx^2 + V(x) discretized by second
// order central differences on a uniform grid.

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace gibbslab::spectral {

enum class Boundary { Dirichlet, Neumann, Periodic };

// -d^2/dx^2 + |x|^a + m on the line, truncated to [-L, L] with Dirichlet walls.
struct AnharmonicLine {
  double exponent = 4.0;
  double half_width = 6.0;
};

// -d^2/dx^2 + m on [-1, 1].
struct Interval {
  Boundary boundary = Boundary::Dirichlet;
};

struct OneBodySpec {
  std::variant<AnharmonicLine, Interval> domain = Interval{};
  double mass = 1.0;
  std::size_t grid_points = 512;

  // Throws std::invalid_argument unless the operator is positive definite
  // (a > 2 on the line, m > 0 on the interval) and grid_points >= 64.
  void validate() const;

  // External potential |x|^a + m (line) or m (interval).
  double potential(double x) const;

  bool is_interval() const { return std::holds_alternative<Interval>(domain); }
};

// Uniform grid; every node carries the same quadrature weight `spacing`.
//  Dirichlet / line: interior nodes of [lo, hi], spacing (hi-lo)/(n+1)
//  Neumann:          cell centres, spacing (hi-lo)/n
//  Periodic:         x_i = lo + i*spacing, spacing (hi-lo)/n
struct Grid {
  std::vector<double> nodes;
  double spacing = 0.0;
  double lo = -1.0;
  double hi = 1.0;
  bool periodic = false;

  std::size_t size() const { return nodes.size(); }
};

// Symmetric tridiagonal matrix, plus the wrap-around coupling A(0, n-1) for
// periodic grids (which makes it circulant when the potential is constant).
struct DiscreteOperator {
  OneBodySpec spec;
  Grid grid;
  std::vector<double> diagonal;
  std::vector<double> off_diagonal;  // A(i, i+1), size n-1
  double corner = 0.0;               // A(0, n-1) = A(n-1, 0)

  std::size_t size() const { return diagonal.size(); }
  bool is_tridiagonal() const { return !grid.periodic; }

  Eigen::MatrixXd dense() const;
  void apply(std::span<const double> in, std::span<double> out) const;
};

DiscreteOperator build_operator(const OneBodySpec& spec);

}  // namespace gibbslab::spectral
