#include "gibbslab/classical/moments.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "gibbslab/csv.hpp"
#include "gibbslab/error.hpp"
#include "gibbslab/parallel.hpp"

namespace gibbslab::classical {

Eigen::VectorXcd symmetric_power(std::span<const std::complex<double>> alpha,
                                 const std::vector<MultiIndex>& index) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(index.size()));
  for (std::size_t r = 0; r < index.size(); ++r) {
    const MultiIndex& m = index[r];
    if (m.size() != alpha.size()) throw std::invalid_argument("symmetric_power: mode count mismatch");
    std::complex<double> v = std::sqrt(std::exp(log_multinomial(m)));
    for (std::size_t j = 0; j < m.size(); ++j) {
      for (int p = 0; p < m[j]; ++p) v *= alpha[j];
    }
    out(static_cast<Eigen::Index>(r)) = v;
  }
  return out;
}

MomentMatrix moment_matrix(const WeightedEnsemble& ensemble, std::size_t k, std::size_t threads) {
  if (k < 1) throw std::invalid_argument("moment_matrix: order must be >= 1");
  const std::size_t modes = ensemble.modes();
  const std::uint64_t dim = binomial(modes + k - 1, k);
  if (dim > kMaxMomentDim) {
    throw BudgetError("moment_matrix: Sym^" + std::to_string(k) + " dimension " + std::to_string(dim) +
                      " exceeds " + std::to_string(kMaxMomentDim));
  }
  MomentMatrix out;
  out.order = k;
  out.modes = modes;
  out.index = colex_compositions(modes, k);
  const auto d = static_cast<Eigen::Index>(dim);
  const std::size_t n = ensemble.size();
  const std::vector<double> w = ensemble.weights();

  // Per-chunk partial sums keep the reduction order fixed for any thread count.
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<Eigen::MatrixXcd> partial(chunks, Eigen::MatrixXcd::Zero(d, d));
  std::vector<double> partial_w(chunks, 0.0);
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t s = c * kChunk; s < end; ++s) {
      const Eigen::VectorXcd v = symmetric_power(ensemble.coefficients(s), out.index);
      partial[c].noalias() += w[s] * (v * v.adjoint());
      partial_w[c] += w[s];
    }
  });
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d, d);
  double sum_w = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    sum += partial[c];
    sum_w += partial_w[c];
  }
  out.values = sum / sum_w;

  std::vector<Eigen::MatrixXd> acc_re(chunks, Eigen::MatrixXd::Zero(d, d));
  std::vector<Eigen::MatrixXd> acc_im(chunks, Eigen::MatrixXd::Zero(d, d));
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t s = c * kChunk; s < end; ++s) {
      const Eigen::VectorXcd v = symmetric_power(ensemble.coefficients(s), out.index);
      const Eigen::MatrixXcd dev = w[s] * (v * v.adjoint() - out.values);
      acc_re[c] += dev.real().cwiseAbs2();
      acc_im[c] += dev.imag().cwiseAbs2();
    }
  });
  out.se_real = Eigen::MatrixXd::Zero(d, d);
  out.se_imag = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t c = 0; c < chunks; ++c) {
    out.se_real += acc_re[c];
    out.se_imag += acc_im[c];
  }
  out.se_real = out.se_real.cwiseSqrt() / sum_w;
  out.se_imag = out.se_imag.cwiseSqrt() / sum_w;
  return out;
}

MomentMatrix free_moment_matrix(std::span<const double> eigenvalues, std::size_t k) {
  if (k < 1) throw std::invalid_argument("free_moment_matrix: order must be >= 1");
  MomentMatrix out;
  out.order = k;
  out.modes = eigenvalues.size();
  out.index = colex_compositions(eigenvalues.size(), k);
  const auto d = static_cast<Eigen::Index>(out.index.size());
  out.values = Eigen::MatrixXcd::Zero(d, d);
  out.se_real = Eigen::MatrixXd::Zero(d, d);
  out.se_imag = Eigen::MatrixXd::Zero(d, d);
  const double log_kfact = log_factorial(static_cast<int>(k));
  for (Eigen::Index r = 0; r < d; ++r) {
    const MultiIndex& m = out.index[static_cast<std::size_t>(r)];
    double log_v = log_kfact;
    for (std::size_t j = 0; j < m.size(); ++j) log_v -= m[j] * std::log(eigenvalues[j]);
    out.values(r, r) = std::exp(log_v);
  }
  return out;
}

std::string format_multi_index(const MultiIndex& m) {
  std::string s;
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (j) s += ':';
    s += std::to_string(m[j]);
  }
  return s;
}

void write_moment_csv(const MomentMatrix& moments, const std::filesystem::path& path) {
  CsvWriter csv(path, {"row", "col", "real", "imag"});
  for (std::size_t r = 0; r < moments.dim(); ++r) {
    for (std::size_t c = 0; c < moments.dim(); ++c) {
      const auto v = moments.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      csv.cell(format_multi_index(moments.index[r]))
          .cell(format_multi_index(moments.index[c]))
          .cell(v.real())
          .cell(v.imag());
      csv.end_row();
    }
  }
}

}  // namespace gibbslab::classical
