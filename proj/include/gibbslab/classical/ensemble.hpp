#pragma once

// Monte Carlo realization of the free Gaussian measure mu_0 (covariance h^{-1})
// truncated to K modes, and of the interacting measure
// mu = exp(-F_NL) mu_0 / Z_r by importance reweighting.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gibbslab/spectral/basis.hpp"
#include "gibbslab/spectral/interaction.hpp"

namespace gibbslab::classical {

// u = sum_j coeffs_j u_j.
struct FieldSample {
  Eigen::VectorXcd coeffs;
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

enum class SeedSplitting {
  Deterministic,
  // Negative control for the determinism self-check: chain seeds also depend on
  // a process-wide call counter, so two identical requests disagree.
  CorruptedForTesting,
};

struct SamplingOptions {
  std::size_t threads = 1;
  std::size_t chunk_size = 4096;
  SeedSplitting seed_splitting = SeedSplitting::Deterministic;
};

class WeightedEnsemble {
 public:
  Eigen::MatrixXcd coeffs;          // K x S, one column per sample
  std::vector<double> log_weights;  // -F_NL per sample after reweighting, 0 before
  std::vector<double> interaction;  // F_NL per sample (empty before reweighting)
  bool reweighted = false;
  Estimate z_r{1.0, 0.0};
  double ess = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(coeffs.cols()); }
  std::size_t modes() const { return static_cast<std::size_t>(coeffs.rows()); }
  FieldSample sample(std::size_t s) const { return {coeffs.col(static_cast<Eigen::Index>(s))}; }
  std::span<const std::complex<double>> coefficients(std::size_t s) const {
    return {coeffs.data() + s * modes(), modes()};
  }
  std::vector<double> weights() const;
};

// alpha_j ~ complex normal with E|alpha_j|^2 = 1/lambda_j, independent. Samples
// are generated in fixed-size chunks, chunk c seeded from (seed, c), so the
// result is identical for any thread count.
WeightedEnsemble sample_free(const spectral::SpectralBasis& basis, std::size_t n_samples,
                             std::uint64_t seed, const SamplingOptions& options = {});

// F_NL[u] = 1/2 iint |u(x)|^2 w(x-y) |u(y)|^2 dx dy evaluated by grid
// quadrature; reusable scratch makes repeated calls allocation-free.
class NonlinearEnergy {
 public:
  NonlinearEnergy(const spectral::SpectralBasis& basis, const spectral::InteractionKernel& kernel);

  double operator()(std::span<const std::complex<double>> coeffs);

 private:
  const spectral::SpectralBasis* basis_;
  spectral::PairOperator pair_;
  bool zero_;
  std::vector<double> alpha_re_;
  std::vector<double> alpha_im_;
  std::vector<double> rho_;
};

double eval_F_NL(const FieldSample& sample, const spectral::SpectralBasis& basis,
                 const spectral::InteractionKernel& kernel);

// <u, h u> = sum_j lambda_j |alpha_j|^2.
double eval_quadratic_form(const FieldSample& sample, const spectral::SpectralBasis& basis);

// Sets log_weights = -F_NL, estimates Z_r = mean exp(-F_NL) and the effective
// sample size (sum w)^2 / sum w^2.
WeightedEnsemble reweight(WeightedEnsemble ensemble, const spectral::SpectralBasis& basis,
                          const spectral::InteractionKernel& kernel, std::size_t threads = 1);

// Self-normalized weighted mean sum w f / sum w with its delta-method
// standard error sqrt(sum w^2 (f - mean)^2) / sum w.
Estimate self_normalized_mean(std::span<const double> weights, std::span<const double> values);

struct MeanInteraction {
  Estimate monte_carlo;  // int F_NL d mu_0 from samples
  double closed_form = 0.0;  // 1/2 tr[w gamma_0^(2)] on Sym^2
};

// Monte Carlo and Wick closed form of int F_NL d mu_0. `free_ensemble` must be
// unweighted samples of mu_0 already passed through reweight() (so the
// per-sample F_NL values are available).
MeanInteraction mean_F_NL_free(const WeightedEnsemble& free_ensemble,
                               const spectral::SpectralBasis& basis,
                               const spectral::TwoBodyTensor& tensor);

struct ClassicalFreeEnergy {
  Estimate value;              // -log Z_r
  Estimate interaction_term;   // int F_NL d mu
  Estimate entropy_term;       // int (dmu/dmu0) log(dmu/dmu0) dmu0 = -int F_NL dmu - log Z_r
};

// Throws std::invalid_argument for an ensemble that was never reweighted.
ClassicalFreeEnergy classical_relative_free_energy(const WeightedEnsemble& ensemble);

// CSV: sample, |alpha_1|^2, ..., |alpha_K|^2, log_weight.
void write_ensemble_csv(const WeightedEnsemble& ensemble, const std::filesystem::path& path);

}  // namespace gibbslab::classical
