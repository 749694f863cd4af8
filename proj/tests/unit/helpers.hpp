#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "gibbslab/fock/space.hpp"
#include "gibbslab/fock/state.hpp"
#include "gibbslab/spectral/basis.hpp"

namespace testutil {

inline gibbslab::spectral::SpectralBasis dirichlet_basis(std::size_t modes, std::size_t grid = 512, double m = 1.0) {
  gibbslab::spectral::OneBodySpec spec;
  spec.domain = gibbslab::spectral::Interval{gibbslab::spectral::Boundary::Dirichlet};
  spec.mass = m;
  spec.grid_points = grid;
  return gibbslab::spectral::eigendecompose(gibbslab::spectral::build_operator(spec), modes);
}

// K = 1 periodic, lambda_1 = m, u_1 = 1/sqrt(2).
inline gibbslab::spectral::SpectralBasis constant_mode_basis(double m = 1.0, std::size_t grid = 128) {
  gibbslab::spectral::OneBodySpec spec;
  spec.domain = gibbslab::spectral::Interval{gibbslab::spectral::Boundary::Periodic};
  spec.mass = m;
  spec.grid_points = grid;
  return gibbslab::spectral::eigendecompose(gibbslab::spectral::build_operator(spec), 1);
}

inline Eigen::MatrixXcd random_density(std::mt19937_64& rng, Eigen::Index n, Eigen::Index rank = -1) {
  std::normal_distribution<double> normal;
  if (rank < 0) rank = n;
  Eigen::MatrixXcd a(n, rank);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < rank; ++j) a(i, j) = {normal(rng), normal(rng)};
  Eigen::MatrixXcd rho = a * a.adjoint();
  return rho / rho.trace().real();
}

// Random state, sector-diagonal unless `dense`.
inline gibbslab::fock::FockState random_state(std::mt19937_64& rng, const gibbslab::fock::FockBasisPtr& basis,
                                              bool dense) {
  if (dense) {
    return gibbslab::fock::FockState::from_dense(basis, random_density(rng, static_cast<Eigen::Index>(basis->dim())));
  }
  std::uniform_real_distribution<double> unit(0.1, 1.0);
  std::vector<Eigen::MatrixXcd> blocks;
  std::vector<double> mass;
  double total = 0.0;
  for (std::size_t n = 0; n < basis->sectors(); ++n) {
    mass.push_back(unit(rng));
    total += mass.back();
  }
  for (std::size_t n = 0; n < basis->sectors(); ++n) {
    blocks.push_back(random_density(rng, static_cast<Eigen::Index>(basis->sector_size(n))) * (mass[n] / total));
  }
  return gibbslab::fock::FockState::from_blocks(basis, std::move(blocks));
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("gibbslab_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
