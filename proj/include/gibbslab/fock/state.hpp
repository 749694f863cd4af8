#pragma once

// Mixed states on the truncated Fock space, grand-canonical Gibbs states and
// the quantities read off them.

#include <complex>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gibbslab/classical/moments.hpp"
#include "gibbslab/fock/space.hpp"
#include "gibbslab/spectral/interaction.hpp"

namespace gibbslab::fock {

// Largest dimension for which a dense (sector-coherent) state is allowed.
inline constexpr std::size_t kMaxDenseDim = 4096;

// A state is either sector-diagonal (one Hermitian block per particle number)
// or dense. Reduced density matrices, particle number and energies only see
// the sector-diagonal blocks, so both forms share those code paths.
class FockState {
 public:
  struct Spectrum {
    std::vector<Eigen::VectorXd> log_eigenvalues;  // per sector, -inf for exact zeros
    std::vector<Eigen::MatrixXcd> vectors;
  };

  static FockState from_blocks(FockBasisPtr basis, std::vector<Eigen::MatrixXcd> blocks);
  // Throws gibbslab::BudgetError above kMaxDenseDim.
  static FockState from_dense(FockBasisPtr basis, Eigen::MatrixXcd matrix);
  static FockState vacuum(FockBasisPtr basis);
  // |N><N| for an occupation state inside the basis.
  static FockState occupation(FockBasisPtr basis, const MultiIndex& state);

  const FockBasisPtr& basis() const { return basis_; }
  bool is_dense() const { return dense_.has_value(); }
  const Eigen::MatrixXcd& block(std::size_t n) const { return blocks_[n]; }
  std::size_t sectors() const { return blocks_.size(); }
  const std::optional<Eigen::MatrixXcd>& dense_matrix() const { return dense_; }
  Eigen::MatrixXcd dense() const;

  const std::optional<Spectrum>& spectrum() const { return spectrum_; }
  void set_spectrum(Spectrum spectrum) { spectrum_ = std::move(spectrum); }

  double trace() const;
  double sector_mass(std::size_t n) const { return blocks_[n].trace().real(); }
  // Mass of the two highest sectors kept by the cutoff.
  double top_sector_mass() const;

  // max over Hermiticity defect, |trace - 1| and -min eigenvalue.
  struct Validation {
    double hermiticity = 0.0;
    double trace_error = 0.0;
    double min_eigenvalue = 0.0;
    bool ok(double herm_tol = 1e-12, double trace_tol = 1e-10, double eig_tol = 1e-12) const {
      return hermiticity <= herm_tol && trace_error <= trace_tol && min_eigenvalue >= -eig_tol;
    }
  };
  Validation validate() const;

 private:
  FockBasisPtr basis_;
  std::vector<Eigen::MatrixXcd> blocks_;
  std::optional<Eigen::MatrixXcd> dense_;
  std::optional<Spectrum> spectrum_;
};

struct GibbsResult {
  FockState state;
  double log_z = 0.0;
};

// exp(-H/T)/Z by per-sector eigendecomposition with a global log-sum-exp shift.
// Throws std::invalid_argument for T <= 0 and NumericalError for a
// non-symmetric block.
GibbsResult gibbs_state(const FockOperator& hamiltonian, double temperature, std::size_t threads = 1);

// Gamma^(k) by binomially weighted symmetric partial traces of the sector
// blocks. tr Gamma^(1) = <N>. Throws std::invalid_argument for k < 1 or
// k > n_max.
Eigen::MatrixXcd reduced_density_matrix(const FockState& state, std::size_t k);

// Gamma^(k)_{m m'} = tr[B_m'^dagger B_m Gamma] from explicit sparse ladder
// products on the dense state. Meant as an independent check; limited to
// kMaxDenseDim.
Eigen::MatrixXcd reduced_dm_normal_ordered(const FockState& state, std::size_t k);

double particle_number(const FockState& state);

struct EnergyDecomposition {
  double total = 0.0;
  double one_body = 0.0;
  double two_body = 0.0;
};

EnergyDecomposition energy_decomposition(const FockState& state, const FockOperator& hamiltonian,
                                         std::span<const double> eigenvalues,
                                         const spectral::TwoBodyTensor& tensor, double coupling);

// -tr[Gamma log Gamma], with 0 log 0 = 0.
double von_neumann_entropy(const FockState& state);

// tr[Gamma (log Gamma - log Gamma')]. Returns +infinity when Gamma has weight
// above 1e-14 on the kernel of Gamma'. Gamma' must be sector-diagonal.
double relative_entropy(const FockState& state, const FockState& reference);

// coupling tr[W Gamma^(2)] + T S(Gamma, Gamma_0).
double relative_free_energy(const FockState& state, const FockState& free_gibbs,
                            const spectral::TwoBodyTensor& tensor, double coupling, double temperature);

// tr[H Gamma] - T S(Gamma).
double free_energy(const FockState& state, const FockOperator& hamiltonian, double temperature);

struct Cutoff {
  std::size_t n_max = 0;
  double tail_mass = 0.0;  // top-two-sector mass of the truncated free Gibbs state
  std::size_t dim = 0;
};

// Smallest n_max >= 2 whose truncated free Gibbs state puts mass below
// `threshold` on its two highest sectors. Throws BudgetError when the
// required dimension exceeds `budget`.
Cutoff choose_cutoff(std::span<const double> eigenvalues, double temperature, double threshold,
                     std::size_t budget = kDefaultDimBudget);

// CSV of nonzero entries: row, col, real, imag (global basis indices).
void write_state_csv(const FockState& state, const std::filesystem::path& path, double drop = 0.0);
// CSV: row, col (multi-indices), real, imag.
void write_reduced_csv(const Eigen::MatrixXcd& matrix, std::size_t modes, std::size_t k,
                       const std::filesystem::path& path);

}  // namespace gibbslab::fock
