#pragma once

// Coherent states, trial states built from them, and Husimi densities.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gibbslab/classical/ensemble.hpp"
#include "gibbslab/fock/state.hpp"

namespace gibbslab::semiclassics {

inline constexpr double kCoherentTailWarning = 1e-6;

// xi(v) = exp(-|v|^2/2) sum_N prod_j v_j^{N_j} / sqrt(N_j!) |N>, cut at n_max.
struct CoherentVector {
  Eigen::VectorXcd v;
  Eigen::VectorXcd amplitudes;  // over the full Fock basis
  double tail_bound = 0.0;      // Poisson(|v|^2) mass above n_max
  bool tail_warning = false;    // tail_bound > kCoherentTailWarning
};

CoherentVector coherent(std::span<const std::complex<double>> v, const fock::FockBasis& basis);

// P(Poisson(mean) > n_max).
double poisson_tail(double mean, std::size_t n_max);

struct TrialOptions {
  // Keep only sector-diagonal blocks. Exact in expectation because the
  // interacting measure is invariant under u -> e^{i theta} u.
  bool phase_average = true;
  // Use the first `max_samples` ensemble samples (0: all of them).
  std::size_t max_samples = 0;
  std::size_t threads = 1;
};

struct TrialState {
  fock::FockState state;
  std::size_t samples_used = 0;
  std::size_t offending_samples = 0;  // coherent tail above kCoherentTailWarning
  double max_tail = 0.0;
  double lost_mass = 0.0;  // 1 - trace before renormalization
};

// sum_s w_s |xi(sqrt(T) alpha_s)><xi(sqrt(T) alpha_s)| / sum_s w_s,
// renormalized to unit trace.
TrialState trial_state(const classical::WeightedEnsemble& ensemble, double temperature,
                       fock::FockBasisPtr basis, const TrialOptions& options = {});

// Evaluates (pi eps)^{-K} <xi(u / sqrt(eps))| Gamma |xi(u / sqrt(eps))> at many
// points, reusing planar copies of the state for the SIMD quadratic form.
class HusimiEvaluator {
 public:
  HusimiEvaluator(const fock::FockState& state, double eps);

  double operator()(std::span<const std::complex<double>> u) const;
  std::vector<double> evaluate(const std::vector<Eigen::VectorXcd>& points, std::size_t threads = 1) const;

  double eps() const { return eps_; }
  std::size_t modes() const { return basis_->modes(); }

 private:
  fock::FockBasisPtr basis_;
  double eps_;
  bool dense_;
  std::vector<std::vector<double>> re_;  // per sector (or one dense matrix), row-major
  std::vector<std::vector<double>> im_;
};

std::vector<double> husimi_density(const fock::FockState& state, double eps,
                                   const std::vector<Eigen::VectorXcd>& points, std::size_t threads = 1);

// Polar quadrature of the K = 1 Husimi density over |u| <= radius.
double husimi_integral_k1(const fock::FockState& state, double eps, double radius,
                          std::size_t radial_nodes = 400, std::size_t angular_nodes = 64);

// CSV: point index, Re u_j, Im u_j per mode, density.
void write_husimi_csv(const std::vector<Eigen::VectorXcd>& points, std::span<const double> values,
                      const std::filesystem::path& path);

}  // namespace gibbslab::semiclassics
