#include "gibbslab/fock/space.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "gibbslab/error.hpp"

namespace gibbslab::fock {

FockBasis::FockBasis(std::size_t modes, std::size_t n_max, std::size_t budget)
    : modes_(modes), n_max_(n_max) {
  if (modes == 0) throw std::invalid_argument("FockBasis: need at least one mode");
  std::uint64_t dim = 0;
  try {
    dim = binomial(modes + n_max, modes);
  } catch (const std::overflow_error&) {
    throw BudgetError("FockBasis: dimension overflows");
  }
  if (dim > budget) {
    throw BudgetError("FockBasis: dimension " + std::to_string(dim) + " for K=" + std::to_string(modes) +
                      ", n_max=" + std::to_string(n_max) + " exceeds budget " + std::to_string(budget));
  }
  states_.reserve(dim);
  offsets_.reserve(n_max + 2);
  for (std::size_t n = 0; n <= n_max; ++n) {
    offsets_.push_back(states_.size());
    for (auto& m : colex_compositions(modes, n)) states_.push_back(std::move(m));
  }
  offsets_.push_back(states_.size());
  table_ = MultiIndexTable(states_, static_cast<int>(n_max));
}

std::ptrdiff_t FockBasis::find(const MultiIndex& m) const {
  if (m.size() != modes_) return -1;
  return table_.find(m);
}

std::ptrdiff_t FockBasis::find_in_sector(const MultiIndex& m) const {
  const std::ptrdiff_t i = find(m);
  if (i < 0) return -1;
  return i - static_cast<std::ptrdiff_t>(offsets_[static_cast<std::size_t>(total(m))]);
}

FockBasisPtr build_fock_basis(std::size_t modes, std::size_t n_max, std::size_t budget) {
  return std::make_shared<const FockBasis>(modes, n_max, budget);
}

LadderPair ladder(const FockBasis& basis, std::size_t j) {
  if (j >= basis.modes()) throw std::invalid_argument("ladder: mode index out of range");
  const auto dim = static_cast<Eigen::Index>(basis.dim());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(basis.dim());
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    MultiIndex m = basis.state(i);
    if (m[j] == 0) continue;
    const double amp = std::sqrt(static_cast<double>(m[j]));
    --m[j];
    const std::ptrdiff_t target = basis.find(m);
    entries.emplace_back(static_cast<Eigen::Index>(target), static_cast<Eigen::Index>(i), amp);
  }
  LadderPair out;
  out.lower.resize(dim, dim);
  out.lower.setFromTriplets(entries.begin(), entries.end());
  out.raise = out.lower.transpose();
  return out;
}

Eigen::MatrixXd FockOperator::dense() const {
  const auto dim = static_cast<Eigen::Index>(basis->dim());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t n = 0; n < blocks.size(); ++n) {
    const auto off = static_cast<Eigen::Index>(basis->sector_offset(n));
    out.block(off, off, blocks[n].rows(), blocks[n].cols()) = blocks[n];
  }
  return out;
}

double FockOperator::hermiticity_error() const {
  double err = 0.0;
  for (const auto& b : blocks) err = std::max(err, (b - b.transpose()).cwiseAbs().maxCoeff());
  return err;
}

FockOperator number_operator(FockBasisPtr basis) {
  FockOperator op;
  op.blocks.reserve(basis->sectors());
  for (std::size_t n = 0; n < basis->sectors(); ++n) {
    const auto size = static_cast<Eigen::Index>(basis->sector_size(n));
    op.blocks.push_back(static_cast<double>(n) * Eigen::MatrixXd::Identity(size, size));
  }
  op.basis = std::move(basis);
  return op;
}

double annihilation_amplitude(const MultiIndex& state, const MultiIndex& removed) {
  double log_amp = 0.0;
  for (std::size_t j = 0; j < state.size(); ++j) {
    if (removed[j] > state[j]) return 0.0;
    log_amp += log_factorial(state[j]) - log_factorial(removed[j]) - log_factorial(state[j] - removed[j]);
  }
  return std::exp(0.5 * log_amp);
}

FockOperator build_hamiltonian(FockBasisPtr basis, std::span<const double> eigenvalues,
                               const spectral::TwoBodyTensor& tensor, double coupling) {
  const std::size_t k = basis->modes();
  if (eigenvalues.size() != k) throw std::invalid_argument("build_hamiltonian: eigenvalue count mismatch");
  if (tensor.modes() != k) throw std::invalid_argument("build_hamiltonian: tensor mode count mismatch");
  if (!(coupling >= 0.0)) throw std::invalid_argument("build_hamiltonian: coupling must be >= 0");

  const bool interacting = coupling > 0.0 && !tensor.is_zero();
  const auto pairs = colex_compositions(k, 2);
  const Eigen::MatrixXd pair_matrix = interacting ? tensor.symmetric_pair_matrix() : Eigen::MatrixXd();

  FockOperator op;
  op.blocks.resize(basis->sectors());
  for (std::size_t n = 0; n < basis->sectors(); ++n) {
    const auto states = basis->sector_states(n);
    const auto size = static_cast<Eigen::Index>(states.size());
    Eigen::MatrixXd& block = op.blocks[n];
    block = Eigen::MatrixXd::Zero(size, size);
    for (Eigen::Index c = 0; c < size; ++c) {
      const MultiIndex& state = states[static_cast<std::size_t>(c)];
      double diag = 0.0;
      for (std::size_t j = 0; j < k; ++j) diag += eigenvalues[j] * state[j];
      block(c, c) += diag;
    }
    if (!interacting || n < 2) continue;
    // W = sum_{m, m'} P[m, m'] B_m^dagger B_m' over pair occupations m, m'.
    MultiIndex rest(k);
    MultiIndex target(k);
    for (Eigen::Index c = 0; c < size; ++c) {
      const MultiIndex& state = states[static_cast<std::size_t>(c)];
      for (std::size_t q = 0; q < pairs.size(); ++q) {
        const double down = annihilation_amplitude(state, pairs[q]);
        if (down == 0.0) continue;
        for (std::size_t j = 0; j < k; ++j) rest[j] = state[j] - pairs[q][j];
        for (std::size_t p = 0; p < pairs.size(); ++p) {
          const double w = pair_matrix(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
          if (w == 0.0) continue;
          for (std::size_t j = 0; j < k; ++j) target[j] = rest[j] + pairs[p][j];
          const std::ptrdiff_t r = basis->find_in_sector(target);
          block(r, c) += coupling * w * down * annihilation_amplitude(target, pairs[p]);
        }
      }
    }
    block = 0.5 * (block + block.transpose()).eval();
  }
  op.basis = std::move(basis);
  return op;
}

}  // namespace gibbslab::fock
