#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gibbslab/experiment/config.hpp"

namespace gibbslab::experiment {

struct SelfCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct SelfCheckOptions {
  std::size_t threads = 1;
  // Negative control: seeds of repeated sampling requests differ, so the
  // determinism check must fail.
  bool corrupt_seed_splitting = false;
};

// Wick moments, partial trace vs normal ordering, tr Gamma^(1) = <N>, energy
// decomposition, free closed forms, mean-interaction identity, coherent
// overlaps, seed determinism and the single-mode closed-form bundle.
std::vector<SelfCheck> run_selfchecks(const ExperimentConfig& config, const SelfCheckOptions& options = {});

// int_0^inf exp(-r - c r^2) dr by adaptive Simpson quadrature.
double quartic_partition_quadrature(double c);

}  // namespace gibbslab::experiment
