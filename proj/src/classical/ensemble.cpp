#include "gibbslab/classical/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "gibbslab/classical/moments.hpp"
#include "gibbslab/csv.hpp"
#include "gibbslab/parallel.hpp"
#include "gibbslab/simd/kernels.hpp"

namespace gibbslab::classical {

namespace {

std::atomic<std::uint64_t> corruption_counter{0};

std::mt19937_64 chunk_engine(std::uint64_t seed, std::uint64_t chunk, SeedSplitting splitting) {
  std::uint64_t nonce = 0;
  if (splitting == SeedSplitting::CorruptedForTesting) nonce = ++corruption_counter;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32),
                    static_cast<std::uint32_t>(nonce)};
  return std::mt19937_64(seq);
}

}  // namespace

std::vector<double> WeightedEnsemble::weights() const {
  std::vector<double> w(log_weights.size());
  for (std::size_t s = 0; s < w.size(); ++s) w[s] = std::exp(log_weights[s]);
  return w;
}

WeightedEnsemble sample_free(const spectral::SpectralBasis& basis, std::size_t n_samples,
                             std::uint64_t seed, const SamplingOptions& options) {
  if (n_samples == 0) throw std::invalid_argument("sample_free: need at least one sample");
  if (options.chunk_size == 0) throw std::invalid_argument("sample_free: chunk_size must be positive");
  const std::size_t k = basis.size();
  std::vector<double> scale(k);
  for (std::size_t j = 0; j < k; ++j) scale[j] = 1.0 / std::sqrt(2.0 * basis.eigenvalues[j]);

  WeightedEnsemble ens;
  ens.coeffs.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n_samples));
  ens.log_weights.assign(n_samples, 0.0);
  const std::size_t chunks = (n_samples + options.chunk_size - 1) / options.chunk_size;
  parallel_for(chunks, options.threads, [&](std::size_t c) {
    auto engine = chunk_engine(seed, c, options.seed_splitting);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t end = std::min(n_samples, (c + 1) * options.chunk_size);
    for (std::size_t s = c * options.chunk_size; s < end; ++s) {
      for (std::size_t j = 0; j < k; ++j) {
        const double re = normal(engine);
        const double im = normal(engine);
        ens.coeffs(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(s)) =
            std::complex<double>(re * scale[j], im * scale[j]);
      }
    }
  });
  ens.z_r = {1.0, 0.0};
  ens.ess = static_cast<double>(n_samples);
  return ens;
}

NonlinearEnergy::NonlinearEnergy(const spectral::SpectralBasis& basis,
                                 const spectral::InteractionKernel& kernel)
    : basis_(&basis),
      pair_(basis.grid, kernel),
      zero_(kernel.is_zero()),
      alpha_re_(basis.size()),
      alpha_im_(basis.size()),
      rho_(basis.grid_size()) {}

double NonlinearEnergy::operator()(std::span<const std::complex<double>> coeffs) {
  if (coeffs.size() != basis_->size()) throw std::invalid_argument("F_NL: coefficient count mismatch");
  if (zero_) return 0.0;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    alpha_re_[j] = coeffs[j].real();
    alpha_im_[j] = coeffs[j].imag();
  }
  simd::field_density({basis_->modes.data(), static_cast<std::size_t>(basis_->modes.size())},
                      basis_->size(), alpha_re_, alpha_im_, rho_);
  return 0.5 * pair_.self_form(rho_);
}

double eval_F_NL(const FieldSample& sample, const spectral::SpectralBasis& basis,
                 const spectral::InteractionKernel& kernel) {
  NonlinearEnergy energy(basis, kernel);
  return energy({sample.coeffs.data(), static_cast<std::size_t>(sample.coeffs.size())});
}

double eval_quadratic_form(const FieldSample& sample, const spectral::SpectralBasis& basis) {
  if (static_cast<std::size_t>(sample.coeffs.size()) != basis.size()) {
    throw std::invalid_argument("quadratic form: coefficient count mismatch");
  }
  double value = 0.0;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    value += basis.eigenvalues[j] * std::norm(sample.coeffs(static_cast<Eigen::Index>(j)));
  }
  return value;
}

WeightedEnsemble reweight(WeightedEnsemble ensemble, const spectral::SpectralBasis& basis,
                          const spectral::InteractionKernel& kernel, std::size_t threads) {
  if (ensemble.modes() != basis.size()) throw std::invalid_argument("reweight: mode count mismatch");
  const std::size_t n = ensemble.size();
  ensemble.interaction.assign(n, 0.0);
  constexpr std::size_t kChunk = 2048;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  parallel_for(chunks, threads, [&](std::size_t c) {
    NonlinearEnergy energy(basis, kernel);
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t s = c * kChunk; s < end; ++s) ensemble.interaction[s] = energy(ensemble.coefficients(s));
  });

  double sum_w = 0.0;
  double sum_w2 = 0.0;
  ensemble.log_weights.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    ensemble.log_weights[s] = -ensemble.interaction[s];
    const double w = std::exp(ensemble.log_weights[s]);
    sum_w += w;
    sum_w2 += w * w;
  }
  const double mean = sum_w / static_cast<double>(n);
  const double var = std::max(0.0, sum_w2 / static_cast<double>(n) - mean * mean);
  ensemble.z_r = {mean, std::sqrt(var / static_cast<double>(n))};
  ensemble.ess = sum_w * sum_w / sum_w2;
  ensemble.reweighted = true;
  return ensemble;
}

Estimate self_normalized_mean(std::span<const double> weights, std::span<const double> values) {
  if (weights.size() != values.size() || weights.empty()) {
    throw std::invalid_argument("self_normalized_mean: size mismatch");
  }
  double sum_w = 0.0;
  double sum_wf = 0.0;
  for (std::size_t s = 0; s < weights.size(); ++s) {
    sum_w += weights[s];
    sum_wf += weights[s] * values[s];
  }
  const double mean = sum_wf / sum_w;
  double acc = 0.0;
  for (std::size_t s = 0; s < weights.size(); ++s) {
    const double d = weights[s] * (values[s] - mean);
    acc += d * d;
  }
  return {mean, std::sqrt(acc) / sum_w};
}

MeanInteraction mean_F_NL_free(const WeightedEnsemble& free_ensemble,
                               const spectral::SpectralBasis& basis,
                               const spectral::TwoBodyTensor& tensor) {
  if (!free_ensemble.reweighted) {
    throw std::invalid_argument("mean_F_NL_free: per-sample F_NL missing; call reweight first");
  }
  const std::vector<double> ones(free_ensemble.size(), 1.0);
  MeanInteraction out;
  out.monte_carlo = self_normalized_mean(ones, free_ensemble.interaction);
  const Eigen::MatrixXd pair = tensor.symmetric_pair_matrix();
  const MomentMatrix wick = free_moment_matrix(basis.eigenvalues, 2);
  out.closed_form = 0.5 * (pair.cast<std::complex<double>>() * wick.values).trace().real();
  return out;
}

ClassicalFreeEnergy classical_relative_free_energy(const WeightedEnsemble& ensemble) {
  if (!ensemble.reweighted) {
    throw std::invalid_argument("classical_relative_free_energy: ensemble was not reweighted");
  }
  ClassicalFreeEnergy out;
  const double log_z = std::log(ensemble.z_r.value);
  out.value = {-log_z, ensemble.z_r.std_error / ensemble.z_r.value};
  const auto w = ensemble.weights();
  out.interaction_term = self_normalized_mean(w, ensemble.interaction);
  // log(dmu/dmu0) = -F_NL - log Z_r
  std::vector<double> log_density(ensemble.size());
  for (std::size_t s = 0; s < log_density.size(); ++s) log_density[s] = -ensemble.interaction[s] - log_z;
  out.entropy_term = self_normalized_mean(w, log_density);
  return out;
}

void write_ensemble_csv(const WeightedEnsemble& ensemble, const std::filesystem::path& path) {
  std::vector<std::string> header{"sample"};
  for (std::size_t j = 0; j < ensemble.modes(); ++j) header.push_back("abs2_alpha_" + std::to_string(j + 1));
  header.push_back("log_weight");
  CsvWriter csv(path, std::move(header));
  for (std::size_t s = 0; s < ensemble.size(); ++s) {
    csv.cell(s);
    for (const auto& a : ensemble.coefficients(s)) csv.cell(std::norm(a));
    csv.cell(ensemble.log_weights[s]);
    csv.end_row();
  }
}

}  // namespace gibbslab::classical
