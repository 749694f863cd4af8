#pragma once

// Truncated bosonic Fock space over C^K: occupation states |n_1, ..., n_K>
// with n_1 + ... + n_K <= n_max, and the operators built on it.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "gibbslab/combinatorics.hpp"
#include "gibbslab/spectral/interaction.hpp"

namespace gibbslab::fock {

inline constexpr std::size_t kDefaultDimBudget = 20000;

// States are grouped by total particle number n = 0..n_max and ordered colex
// inside each sector.
class FockBasis {
 public:
  // Throws gibbslab::BudgetError when C(K + n_max, K) exceeds `budget`.
  FockBasis(std::size_t modes, std::size_t n_max, std::size_t budget = kDefaultDimBudget);

  std::size_t modes() const { return modes_; }
  std::size_t n_max() const { return n_max_; }
  std::size_t dim() const { return states_.size(); }
  std::size_t sectors() const { return n_max_ + 1; }

  const MultiIndex& state(std::size_t i) const { return states_[i]; }
  const std::vector<MultiIndex>& states() const { return states_; }
  std::size_t sector_offset(std::size_t n) const { return offsets_[n]; }
  std::size_t sector_size(std::size_t n) const { return offsets_[n + 1] - offsets_[n]; }
  std::span<const MultiIndex> sector_states(std::size_t n) const {
    return {states_.data() + offsets_[n], sector_size(n)};
  }

  // Global index of an occupation state, or -1 when it lies outside the basis.
  std::ptrdiff_t find(const MultiIndex& m) const;
  // Index inside its own sector, or -1.
  std::ptrdiff_t find_in_sector(const MultiIndex& m) const;

 private:
  std::size_t modes_;
  std::size_t n_max_;
  std::vector<MultiIndex> states_;
  std::vector<std::size_t> offsets_;
  MultiIndexTable table_;
};

using FockBasisPtr = std::shared_ptr<const FockBasis>;

FockBasisPtr build_fock_basis(std::size_t modes, std::size_t n_max,
                              std::size_t budget = kDefaultDimBudget);

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct LadderPair {
  SparseMatrix lower;  // a_j
  SparseMatrix raise;  // a_j^dagger, images above n_max dropped
};

// Mode index j is 0-based.
LadderPair ladder(const FockBasis& basis, std::size_t j);

// Real symmetric operator that commutes with the particle number, stored as
// one dense block per sector.
struct FockOperator {
  FockBasisPtr basis;
  std::vector<Eigen::MatrixXd> blocks;

  Eigen::MatrixXd dense() const;
  double hermiticity_error() const;
};

FockOperator number_operator(FockBasisPtr basis);

// H = sum_j lambda_j a_j^dagger a_j + coupling/2 sum_{ijkl} W[i,j,k,l] a_i^dagger a_j^dagger a_l a_k.
// Throws std::invalid_argument for mismatched mode counts or negative coupling.
FockOperator build_hamiltonian(FockBasisPtr basis, std::span<const double> eigenvalues,
                               const spectral::TwoBodyTensor& tensor, double coupling);

// sqrt(prod_j C(N_j, m_j)): the matrix element <N - m| B_m |N> of the
// normalized annihilator B_m = prod_j a_j^{m_j} / sqrt(m_j!). Zero unless m <= N.
double annihilation_amplitude(const MultiIndex& state, const MultiIndex& removed);

}  // namespace gibbslab::fock
