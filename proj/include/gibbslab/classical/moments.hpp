#pragma once

// k-body moments gamma^(k) = int |u^{(x)k}><u^{(x)k}| dmu(u) as matrices on
// Sym^k(C^K), in the normalized occupation basis |m> (colex order).

#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gibbslab/classical/ensemble.hpp"
#include "gibbslab/combinatorics.hpp"

namespace gibbslab::classical {

struct MomentMatrix {
  std::size_t order = 0;
  std::size_t modes = 0;
  std::vector<MultiIndex> index;  // colex_compositions(modes, order)
  Eigen::MatrixXcd values;
  Eigen::MatrixXd se_real;  // entrywise standard errors; zero for exact matrices
  Eigen::MatrixXd se_imag;

  std::size_t dim() const { return index.size(); }
};

// <m | alpha^{(x)k}> = sqrt(k! / prod m_j!) prod alpha_j^{m_j} for every m in `index`.
Eigen::VectorXcd symmetric_power(std::span<const std::complex<double>> alpha,
                                 const std::vector<MultiIndex>& index);

// Largest Sym^k dimension moment_matrix will allocate.
inline constexpr std::size_t kMaxMomentDim = 4096;

// Self-normalized weighted average over the ensemble. Throws
// std::invalid_argument for k < 1 and gibbslab::BudgetError when
// C(K+k-1, k) exceeds kMaxMomentDim.
MomentMatrix moment_matrix(const WeightedEnsemble& ensemble, std::size_t k, std::size_t threads = 1);

// k! (h^{-1})^{(x)k} on Sym^k: diagonal, entries k! prod_j lambda_j^{-m_j}.
MomentMatrix free_moment_matrix(std::span<const double> eigenvalues, std::size_t k);

// Columns: row, col (multi-indices written as n1:n2:...), real, imag.
void write_moment_csv(const MomentMatrix& moments, const std::filesystem::path& path);

std::string format_multi_index(const MultiIndex& m);

}  // namespace gibbslab::classical
