#pragma once

// Finite-T diagnostics for the semiclassical limit: moment bounds along a
// sequence of states and the Berezin-Lieb comparison of relative entropies.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "gibbslab/classical/ensemble.hpp"
#include "gibbslab/classical/moments.hpp"
#include "gibbslab/fock/state.hpp"

namespace gibbslab::semiclassics {

struct ScaledState {
  const fock::FockState* state = nullptr;
  double eps = 0.0;
};

struct MomentBoundEntry {
  std::size_t k = 0;
  double eps = 0.0;
  double scaled_trace = 0.0;      // eps^k tr Gamma^(k)
  double running_constant = 0.0;  // max of scaled_trace so far
  std::optional<double> distance;  // || k! eps^k Gamma^(k) - gamma^(k) ||_tr
};

struct MomentBoundReport {
  std::vector<MomentBoundEntry> entries;  // state-major, then k
  std::vector<double> constants;          // final C_k for k = 1..k_max
  bool bounded = true;
};

// k runs over 1..min(k_max, n_max). `candidates[k-1]`, when given, is the
// classical moment matrix of order k. The sequence counts as bounded when
// every scaled trace is finite and the last one does not exceed 1.5 times the
// largest earlier value.
MomentBoundReport definetti_moment_check(const std::vector<ScaledState>& states, std::size_t k_max = 3,
                                         const std::vector<classical::MomentMatrix>& candidates = {});

// Trace norm of a Hermitian matrix.
double trace_norm(const Eigen::MatrixXcd& hermitian);

struct BerezinLiebOptions {
  std::size_t samples = 4000;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  double min_ess = 100.0;
};

struct BerezinLiebGap {
  double quantum = 0.0;             // S(Gamma, Gamma')
  classical::Estimate classical;    // KL of the Husimi densities
  double gap = 0.0;                 // quantum - classical
  double ess = 0.0;
  bool degenerate = false;          // ess < min_ess
};

// Classical term by self-normalized importance sampling from a product of
// complex Gaussians with E|u_j|^2 = eps (1 + Gamma'^(1)_jj), the Husimi
// density of a free thermal reference state.
BerezinLiebGap berezin_lieb_gap(const fock::FockState& state, const fock::FockState& reference, double eps,
                                const BerezinLiebOptions& options = {});

// K = 1 polar-quadrature value of the Husimi KL divergence (cross-check).
double husimi_kl_k1(const fock::FockState& state, const fock::FockState& reference, double eps,
                    double radius, std::size_t radial_nodes = 400, std::size_t angular_nodes = 32);

}  // namespace gibbslab::semiclassics
