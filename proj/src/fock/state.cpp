#include "gibbslab/fock/state.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "gibbslab/csv.hpp"
#include "gibbslab/error.hpp"
#include "gibbslab/parallel.hpp"

namespace gibbslab::fock {

namespace {

constexpr double kZeroEigenvalue = 1e-300;
constexpr double kSupportTolerance = 1e-14;

using ComplexSolver = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>;

void check_blocks(const FockBasis& basis, const std::vector<Eigen::MatrixXcd>& blocks) {
  if (blocks.size() != basis.sectors()) throw std::invalid_argument("FockState: sector count mismatch");
  for (std::size_t n = 0; n < blocks.size(); ++n) {
    const auto size = static_cast<Eigen::Index>(basis.sector_size(n));
    if (blocks[n].rows() != size || blocks[n].cols() != size) {
      throw std::invalid_argument("FockState: block " + std::to_string(n) + " has the wrong shape");
    }
  }
}

double x_log_x_sum(const Eigen::VectorXd& p) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > kZeroEigenvalue) s += p(i) * std::log(p(i));
  }
  return s;
}

void require_order(const FockState& state, std::size_t k) {
  if (k < 1) throw std::invalid_argument("reduced density matrix: order must be >= 1");
  if (k > state.basis()->n_max()) {
    throw std::invalid_argument("reduced density matrix: order " + std::to_string(k) + " exceeds n_max " +
                                std::to_string(state.basis()->n_max()));
  }
}

double pair_trace(const FockState& state, const spectral::TwoBodyTensor& tensor) {
  if (state.basis()->n_max() < 2 || tensor.is_zero()) return 0.0;
  const Eigen::MatrixXcd g2 = reduced_density_matrix(state, 2);
  const Eigen::MatrixXd p = tensor.symmetric_pair_matrix();
  return (p.cast<std::complex<double>>() * g2).trace().real();
}

}  // namespace

FockState FockState::from_blocks(FockBasisPtr basis, std::vector<Eigen::MatrixXcd> blocks) {
  check_blocks(*basis, blocks);
  FockState s;
  s.basis_ = std::move(basis);
  s.blocks_ = std::move(blocks);
  return s;
}

FockState FockState::from_dense(FockBasisPtr basis, Eigen::MatrixXcd matrix) {
  const auto dim = static_cast<Eigen::Index>(basis->dim());
  if (basis->dim() > kMaxDenseDim) {
    throw BudgetError("FockState: dense states are limited to dimension " + std::to_string(kMaxDenseDim));
  }
  if (matrix.rows() != dim || matrix.cols() != dim) throw std::invalid_argument("FockState: shape mismatch");
  std::vector<Eigen::MatrixXcd> blocks;
  blocks.reserve(basis->sectors());
  for (std::size_t n = 0; n < basis->sectors(); ++n) {
    const auto off = static_cast<Eigen::Index>(basis->sector_offset(n));
    const auto size = static_cast<Eigen::Index>(basis->sector_size(n));
    blocks.push_back(matrix.block(off, off, size, size));
  }
  FockState s = from_blocks(std::move(basis), std::move(blocks));
  s.dense_ = std::move(matrix);
  return s;
}

FockState FockState::vacuum(FockBasisPtr basis) {
  MultiIndex empty(basis->modes(), 0);
  return occupation(std::move(basis), empty);
}

FockState FockState::occupation(FockBasisPtr basis, const MultiIndex& state) {
  const std::ptrdiff_t local = basis->find_in_sector(state);
  if (local < 0) throw std::invalid_argument("FockState::occupation: state outside the basis");
  std::vector<Eigen::MatrixXcd> blocks;
  for (std::size_t n = 0; n < basis->sectors(); ++n) {
    const auto size = static_cast<Eigen::Index>(basis->sector_size(n));
    blocks.push_back(Eigen::MatrixXcd::Zero(size, size));
  }
  blocks[static_cast<std::size_t>(total(state))](local, local) = 1.0;
  return from_blocks(std::move(basis), std::move(blocks));
}

Eigen::MatrixXcd FockState::dense() const {
  if (dense_) return *dense_;
  const auto dim = static_cast<Eigen::Index>(basis_->dim());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t n = 0; n < blocks_.size(); ++n) {
    const auto off = static_cast<Eigen::Index>(basis_->sector_offset(n));
    out.block(off, off, blocks_[n].rows(), blocks_[n].cols()) = blocks_[n];
  }
  return out;
}

double FockState::trace() const {
  double t = 0.0;
  for (const auto& b : blocks_) t += b.trace().real();
  return t;
}

double FockState::top_sector_mass() const {
  const std::size_t top = blocks_.size() - 1;
  return sector_mass(top) + (top > 0 ? sector_mass(top - 1) : 0.0);
}

FockState::Validation FockState::validate() const {
  Validation v;
  v.trace_error = std::abs(trace() - 1.0);
  auto check = [&](const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return;
    v.hermiticity = std::max(v.hermiticity, (m - m.adjoint()).cwiseAbs().maxCoeff());
    const ComplexSolver solver(m, Eigen::EigenvaluesOnly);
    v.min_eigenvalue = std::min(v.min_eigenvalue, solver.eigenvalues().minCoeff());
  };
  if (dense_) {
    check(*dense_);
  } else {
    for (const auto& b : blocks_) check(b);
  }
  return v;
}

GibbsResult gibbs_state(const FockOperator& hamiltonian, double temperature, std::size_t threads) {
  if (!(temperature > 0.0)) throw std::invalid_argument("gibbs_state: temperature must be positive");
  const std::size_t sectors = hamiltonian.blocks.size();
  std::vector<Eigen::VectorXd> energies(sectors);
  std::vector<Eigen::MatrixXd> vectors(sectors);
  parallel_for(sectors, threads, [&](std::size_t n) {
    const Eigen::MatrixXd& h = hamiltonian.blocks[n];
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff())) {
      throw NumericalError("gibbs_state: sector " + std::to_string(n) + " is not symmetric");
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success) throw NumericalError("gibbs_state: eigensolver failed");
    energies[n] = solver.eigenvalues();
    vectors[n] = solver.eigenvectors();
  });

  double e0 = std::numeric_limits<double>::infinity();
  for (const auto& e : energies) e0 = std::min(e0, e.minCoeff());
  double sum = 0.0;
  for (const auto& e : energies) sum += (-(e.array() - e0) / temperature).exp().sum();
  const double log_sum = std::log(sum);

  FockState::Spectrum spectrum;
  spectrum.log_eigenvalues.resize(sectors);
  spectrum.vectors.resize(sectors);
  std::vector<Eigen::MatrixXcd> blocks(sectors);
  parallel_for(sectors, threads, [&](std::size_t n) {
    spectrum.log_eigenvalues[n] = -(energies[n].array() - e0) / temperature - log_sum;
    const Eigen::VectorXd p = spectrum.log_eigenvalues[n].array().exp();
    blocks[n] = (vectors[n] * p.asDiagonal() * vectors[n].transpose()).cast<std::complex<double>>();
    spectrum.vectors[n] = vectors[n].cast<std::complex<double>>();
  });

  GibbsResult result{FockState::from_blocks(hamiltonian.basis, std::move(blocks)),
                     -e0 / temperature + log_sum};
  result.state.set_spectrum(std::move(spectrum));
  return result;
}

Eigen::MatrixXcd reduced_density_matrix(const FockState& state, std::size_t k) {
  require_order(state, k);
  const FockBasis& basis = *state.basis();
  const std::size_t modes = basis.modes();
  const auto index = colex_compositions(modes, k);
  const auto d = static_cast<Eigen::Index>(index.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);

  MultiIndex row_state(modes);
  std::vector<std::ptrdiff_t> rows(index.size());
  std::vector<double> coeffs(index.size());
  for (std::size_t n = k; n <= basis.n_max(); ++n) {
    const Eigen::MatrixXcd& g = state.block(n);
    // Sym^n = Sym^k (x)_s Sym^{n-k}: |N> = sum_m c(N, m) |m> (x) |N - m> with
    // c(N, m) = sqrt(prod C(N_j, m_j) / C(n, k)); the partial trace over the
    // second factor carries the weight C(n, k).
    const double weight = std::exp(log_factorial(static_cast<int>(n)) - log_factorial(static_cast<int>(k)) -
                                   log_factorial(static_cast<int>(n - k)));
    for (const MultiIndex& rest : basis.sector_states(n - k)) {
      for (std::size_t a = 0; a < index.size(); ++a) {
        for (std::size_t j = 0; j < modes; ++j) row_state[j] = rest[j] + index[a][j];
        rows[a] = basis.find_in_sector(row_state);
        coeffs[a] = annihilation_amplitude(row_state, index[a]) / std::sqrt(weight);
      }
      for (std::size_t a = 0; a < index.size(); ++a) {
        for (std::size_t b = 0; b < index.size(); ++b) {
          out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
              weight * coeffs[a] * coeffs[b] * g(rows[a], rows[b]);
        }
      }
    }
  }
  return out;
}

Eigen::MatrixXcd reduced_dm_normal_ordered(const FockState& state, std::size_t k) {
  require_order(state, k);
  const FockBasis& basis = *state.basis();
  if (basis.dim() > kMaxDenseDim) throw BudgetError("reduced_dm_normal_ordered: dimension too large");
  const Eigen::MatrixXcd gamma = state.dense();
  const auto index = colex_compositions(basis.modes(), k);
  const auto dim = static_cast<Eigen::Index>(basis.dim());

  std::vector<SparseMatrix> lowers;
  for (std::size_t j = 0; j < basis.modes(); ++j) lowers.push_back(ladder(basis, j).lower);
  std::vector<SparseMatrix> annihilators;
  for (const MultiIndex& m : index) {
    SparseMatrix b(dim, dim);
    b.setIdentity();
    double norm = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) {
      for (int p = 0; p < m[j]; ++p) b = (lowers[j] * b).pruned();
      norm += log_factorial(m[j]);
    }
    annihilators.push_back(b * std::exp(-0.5 * norm));
  }

  const auto d = static_cast<Eigen::Index>(index.size());
  Eigen::MatrixXcd out(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    const Eigen::MatrixXcd x = annihilators[static_cast<std::size_t>(a)] * gamma;
    for (Eigen::Index b = 0; b < d; ++b) {
      std::complex<double> t = 0.0;
      const SparseMatrix& bm = annihilators[static_cast<std::size_t>(b)];
      for (Eigen::Index r = 0; r < bm.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(bm, r); it; ++it) t += x(it.row(), it.col()) * it.value();
      }
      out(a, b) = t;
    }
  }
  return out;
}

double particle_number(const FockState& state) {
  double n = 0.0;
  for (std::size_t s = 0; s < state.sectors(); ++s) n += static_cast<double>(s) * state.sector_mass(s);
  return n;
}

EnergyDecomposition energy_decomposition(const FockState& state, const FockOperator& hamiltonian,
                                         std::span<const double> eigenvalues,
                                         const spectral::TwoBodyTensor& tensor, double coupling) {
  if (hamiltonian.blocks.size() != state.sectors()) {
    throw std::invalid_argument("energy_decomposition: Hamiltonian and state bases differ");
  }
  EnergyDecomposition e;
  for (std::size_t n = 0; n < state.sectors(); ++n) {
    e.total += (hamiltonian.blocks[n].cast<std::complex<double>>() * state.block(n)).trace().real();
  }
  if (state.basis()->n_max() >= 1) {
    const Eigen::MatrixXcd g1 = reduced_density_matrix(state, 1);
    for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
      e.one_body += eigenvalues[j] * g1(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)).real();
    }
  }
  if (coupling != 0.0) e.two_body = coupling * pair_trace(state, tensor);
  return e;
}

double von_neumann_entropy(const FockState& state) {
  if (state.spectrum()) {
    double s = 0.0;
    for (const auto& lp : state.spectrum()->log_eigenvalues) {
      for (Eigen::Index i = 0; i < lp.size(); ++i) {
        if (std::isfinite(lp(i))) s -= std::exp(lp(i)) * lp(i);
      }
    }
    return s;
  }
  if (state.is_dense()) {
    const ComplexSolver solver(*state.dense_matrix(), Eigen::EigenvaluesOnly);
    return -x_log_x_sum(solver.eigenvalues());
  }
  double s = 0.0;
  for (std::size_t n = 0; n < state.sectors(); ++n) {
    if (state.block(n).size() == 0) continue;
    const ComplexSolver solver(state.block(n), Eigen::EigenvaluesOnly);
    s -= x_log_x_sum(solver.eigenvalues());
  }
  return s;
}

double relative_entropy(const FockState& state, const FockState& reference) {
  if (reference.is_dense()) {
    throw std::invalid_argument("relative_entropy: the reference state must be sector-diagonal");
  }
  if (state.sectors() != reference.sectors() || state.basis()->dim() != reference.basis()->dim()) {
    throw std::invalid_argument("relative_entropy: states live on different bases");
  }
  // -tr[Gamma log Gamma'] only involves the sector-diagonal blocks of Gamma.
  double cross = 0.0;
  for (std::size_t n = 0; n < state.sectors(); ++n) {
    const Eigen::MatrixXcd& g = state.block(n);
    if (g.size() == 0) continue;
    Eigen::VectorXd log_p;
    Eigen::MatrixXcd v;
    if (reference.spectrum()) {
      log_p = reference.spectrum()->log_eigenvalues[n];
      v = reference.spectrum()->vectors[n];
    } else {
      const ComplexSolver solver(reference.block(n));
      v = solver.eigenvectors();
      log_p.resize(solver.eigenvalues().size());
      for (Eigen::Index i = 0; i < log_p.size(); ++i) {
        const double p = solver.eigenvalues()(i);
        log_p(i) = p > kZeroEigenvalue ? std::log(p) : -std::numeric_limits<double>::infinity();
      }
    }
    const Eigen::MatrixXcd gv = g * v;
    for (Eigen::Index i = 0; i < log_p.size(); ++i) {
      const double weight = v.col(i).dot(gv.col(i)).real();
      if (!std::isfinite(log_p(i)) || log_p(i) < std::log(kZeroEigenvalue)) {
        if (weight > kSupportTolerance) return std::numeric_limits<double>::infinity();
        continue;
      }
      cross -= weight * log_p(i);
    }
  }
  return -von_neumann_entropy(state) + cross;
}

double relative_free_energy(const FockState& state, const FockState& free_gibbs,
                            const spectral::TwoBodyTensor& tensor, double coupling, double temperature) {
  const double interaction = coupling != 0.0 ? coupling * pair_trace(state, tensor) : 0.0;
  return interaction + temperature * relative_entropy(state, free_gibbs);
}

double free_energy(const FockState& state, const FockOperator& hamiltonian, double temperature) {
  double energy = 0.0;
  for (std::size_t n = 0; n < state.sectors(); ++n) {
    energy += (hamiltonian.blocks[n].cast<std::complex<double>>() * state.block(n)).trace().real();
  }
  return energy - temperature * von_neumann_entropy(state);
}

Cutoff choose_cutoff(std::span<const double> eigenvalues, double temperature, double threshold,
                     std::size_t budget) {
  if (eigenvalues.empty()) throw std::invalid_argument("choose_cutoff: no modes");
  if (!(temperature > 0.0)) throw std::invalid_argument("choose_cutoff: temperature must be positive");
  if (!(threshold > 0.0)) throw std::invalid_argument("choose_cutoff: threshold must be positive");
  const std::size_t modes = eigenvalues.size();
  for (std::size_t n_max = 2;; ++n_max) {
    std::uint64_t dim = 0;
    try {
      dim = binomial(modes + n_max, modes);
    } catch (const std::overflow_error&) {
      dim = std::numeric_limits<std::uint64_t>::max();
    }
    if (dim > budget) {
      throw BudgetError("choose_cutoff: tail mass " + format_double(threshold) + " at T=" +
                        format_double(temperature) + " needs dimension above budget " + std::to_string(budget));
    }
    // Sector weights sum_{|N| = n} exp(-sum_j lambda_j N_j / T) by mode-wise convolution.
    std::vector<double> q(n_max + 1, 0.0);
    q[0] = 1.0;
    for (double lambda : eigenvalues) {
      const double r = std::exp(-lambda / temperature);
      for (std::size_t n = 1; n <= n_max; ++n) q[n] += r * q[n - 1];
    }
    double z = 0.0;
    for (double v : q) z += v;
    const double tail = (q[n_max] + q[n_max - 1]) / z;
    if (tail < threshold) return {n_max, tail, static_cast<std::size_t>(dim)};
  }
}

void write_state_csv(const FockState& state, const std::filesystem::path& path, double drop) {
  CsvWriter csv(path, {"row", "col", "real", "imag"});
  const FockBasis& basis = *state.basis();
  auto emit = [&](std::size_t r, std::size_t c, std::complex<double> v) {
    if (std::abs(v) <= drop || v == 0.0) return;
    csv.cell(r).cell(c).cell(v.real()).cell(v.imag());
    csv.end_row();
  };
  if (state.is_dense()) {
    const auto& m = *state.dense_matrix();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        emit(static_cast<std::size_t>(r), static_cast<std::size_t>(c), m(r, c));
    return;
  }
  for (std::size_t n = 0; n < state.sectors(); ++n) {
    const std::size_t off = basis.sector_offset(n);
    const auto& b = state.block(n);
    for (Eigen::Index r = 0; r < b.rows(); ++r)
      for (Eigen::Index c = 0; c < b.cols(); ++c)
        emit(off + static_cast<std::size_t>(r), off + static_cast<std::size_t>(c), b(r, c));
  }
}

void write_reduced_csv(const Eigen::MatrixXcd& matrix, std::size_t modes, std::size_t k,
                       const std::filesystem::path& path) {
  classical::MomentMatrix m;
  m.order = k;
  m.modes = modes;
  m.index = colex_compositions(modes, k);
  if (static_cast<Eigen::Index>(m.index.size()) != matrix.rows()) {
    throw std::invalid_argument("write_reduced_csv: matrix does not match Sym^k dimension");
  }
  m.values = matrix;
  classical::write_moment_csv(m, path);
}

}  // namespace gibbslab::fock
