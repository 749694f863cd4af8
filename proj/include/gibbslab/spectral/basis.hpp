#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gibbslab/spectral/operator.hpp"

namespace gibbslab::spectral {

using ModeMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// The K lowest eigenpairs of a discretized one-body operator. Row j of
// `modes` holds u_j at the grid nodes, normalized so sum_x u_i u_j dx = delta_ij.
struct SpectralBasis {
  OneBodySpec spec;
  Grid grid;
  std::vector<double> eigenvalues;  // ascending, all > 0
  ModeMatrix modes;                 // K x grid_points

  std::size_t size() const { return eigenvalues.size(); }
  std::size_t grid_size() const { return grid.size(); }
  std::span<const double> mode(std::size_t j) const {
    return {modes.data() + j * grid_size(), grid_size()};
  }

  // max_ij |<u_i, u_j> - delta_ij| under the grid quadrature.
  double orthonormality_error() const;
  // max_j ||h u_j - lambda_j u_j|| / lambda_j in discrete L^2.
  double max_relative_residual(const DiscreteOperator& op) const;
};

// Lowest K eigenpairs (K <= grid_points / 4). Eigenvectors get a deterministic
// sign (first significant component positive); degenerate eigenspaces are
// re-orthonormalized by projecting grid indicator vectors in ascending order.
// Throws NumericalError when the solver fails or the result misses the
// orthonormality (1e-8) or residual (1e-6 relative) bounds.
SpectralBasis eigendecompose(const DiscreteOperator& op, std::size_t modes);

// Box half-width for the anharmonic line such that L^a >= 10 * lambda_K,
// using the WKB estimate of lambda_K.
double default_half_width(double exponent, double mass, std::size_t modes);

// WKB (Bohr-Sommerfeld) estimate of the j-th eigenvalue (1-based) of
// -d^2/dx^2 + |x|^a + m on the whole line.
double wkb_eigenvalue(double exponent, double mass, double j);

// Closed-form j-th eigenvalue (1-based) of -d^2/dx^2 + m on [-1, 1].
double interval_eigenvalue(Boundary boundary, double mass, std::size_t j);

// CSV with columns j, lambda_j, then the grid values of u_j.
void write_spectrum_csv(const SpectralBasis& basis, const std::filesystem::path& path);
// CSV with columns i, x, weight.
void write_grid_csv(const Grid& grid, const std::filesystem::path& path);

}  // namespace gibbslab::spectral
