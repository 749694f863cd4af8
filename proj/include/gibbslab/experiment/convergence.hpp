#pragma once

// The high-temperature limit experiment: for each T in the schedule, the
// Gibbs state of H_lambda with lambda = coupling_rule / T is compared with the
// interacting classical measure through rescaled reduced density matrices and
// the relative free energy.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gibbslab/classical/ensemble.hpp"
#include "gibbslab/classical/moments.hpp"
#include "gibbslab/experiment/config.hpp"
#include "gibbslab/semiclassics/diagnostics.hpp"
#include "gibbslab/spectral/basis.hpp"
#include "gibbslab/spectral/interaction.hpp"

namespace gibbslab::experiment {

struct RunOptions {
  std::size_t threads = 1;
  bool trial = true;           // variational check with the coherent trial state
  bool berezin_lieb = true;    // Husimi relative-entropy comparison
  bool keep_states = false;    // retain Gibbs states in the rows (tests)
  classical::SeedSplitting seed_splitting = classical::SeedSplitting::Deterministic;
};

struct DistanceMetric {
  std::size_t k = 0;
  double value = 0.0;      // || (k!/T^k) Gamma^(k) - gamma^(k) ||_tr
  double std_error = 0.0;  // linearized Monte Carlo error of the classical side
  double hilbert_schmidt = 0.0;
};

struct TemperatureRow {
  double temperature = 0.0;
  double coupling = 0.0;
  std::size_t n_max = 0;
  std::size_t dim = 0;
  double tail_mass = 0.0;              // top-two-sector mass, free Gibbs state
  double tail_mass_interacting = 0.0;  // same for the interacting Gibbs state
  std::vector<DistanceMetric> distances;
  double log_z_free = 0.0;
  double log_z = 0.0;
  double free_energy_metric = 0.0;  // (F_lambda - F_0) / T = log Z_0 - log Z_lambda
  double relative_free_energy_gibbs = 0.0;  // from the functional
  std::optional<double> relative_free_energy_trial;
  std::size_t trial_offending_samples = 0;
  double trial_lost_mass = 0.0;
  std::optional<semiclassics::BerezinLiebGap> berezin_lieb;
  double particle_number = 0.0;
  double seconds = 0.0;
  std::optional<fock::FockState> gibbs;
  std::optional<fock::FockState> free_gibbs;
};

struct ConvergenceResult {
  ExperimentConfig config;
  spectral::SpectralBasis basis;
  spectral::TwoBodyTensor tensor;
  classical::Estimate z_r;
  classical::Estimate minus_log_z_r;
  classical::MeanInteraction mean_interaction;
  double ess = 0.0;
  bool exact_classical = false;  // w = 0: classical moments from Wick's formula
  std::vector<classical::MomentMatrix> classical_moments;  // k = 1..k_max
  std::vector<TemperatureRow> rows;
  double seconds = 0.0;
};

ConvergenceResult run_convergence(const ExperimentConfig& config, const RunOptions& options = {});

// sum_j |1/(T (e^{lambda_j/T} - 1)) - 1/lambda_j|: d_1(T) of the free system
// without particle cutoff.
double free_distance_k1(const std::vector<double>& eigenvalues, double temperature);

struct PropertyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Monotone distances (k = 1, 2) and free-energy errors within 2 standard
// errors, tail masses under the policy, trial-state variational bound
// (-1e-8), Berezin-Lieb gap at the largest T (-0.05), nonnegative distances.
std::vector<PropertyCheck> evaluate_properties(const ConvergenceResult& result);

}  // namespace gibbslab::experiment
