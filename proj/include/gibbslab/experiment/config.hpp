#pragma once

// Experiment configuration read from a `key = value` text file. Blank lines
// and text after '#' are ignored; unknown keys are errors.
//
//   operator.domain      interval | line
//   operator.boundary    dirichlet | neumann | periodic      (interval)
//   operator.m           mass term m > 0 (line: m >= 0)
//   operator.grid_points
//   operator.exponent    a > 2                               (line)
//   operator.half_width  box half-width, default from the WKB estimate (line)
//   kernel.type          delta | zero | gaussian | point_mass
//   kernel.g             coupling / amplitude / total mass
//   kernel.width         gaussian width or point-mass offset
//   K, T_schedule (comma list, ascending), coupling_rule, k_max, mc_samples,
//   seed, n_max_policy, output_dir, trial_samples, bl_samples, dim_budget

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gibbslab/spectral/interaction.hpp"
#include "gibbslab/spectral/operator.hpp"

namespace gibbslab::experiment {

enum class KernelType { Zero, Delta, Gaussian, PointMass };

struct KernelConfig {
  KernelType type = KernelType::Delta;
  double g = 1.0;
  double width = 0.1;

  spectral::InteractionKernel build(const spectral::Grid& grid) const;
};

struct ExperimentConfig {
  spectral::OneBodySpec operator_spec;
  bool half_width_given = false;
  KernelConfig kernel;
  std::size_t modes = 2;
  std::vector<double> temperatures{5.0, 10.0, 20.0, 40.0};
  double coupling_rule = 1.0;
  std::size_t k_max = 2;
  std::size_t mc_samples = 100000;
  std::uint64_t seed = 20240607;
  double n_max_policy = 1e-8;
  std::filesystem::path output_dir = "gibbslab_out";
  std::size_t trial_samples = 8192;
  std::size_t bl_samples = 4000;
  std::size_t dim_budget = 20000;

  // Throws std::invalid_argument when an invariant fails (ascending positive
  // schedule, coupling_rule > 0, 1 <= k_max <= 3, K >= 1, positive counts).
  void validate() const;

  // Resolved operator spec (line half-width filled in when not given).
  spectral::OneBodySpec resolved_operator() const;
};

// Throws std::invalid_argument with the line number on malformed input and
// gibbslab::IoError when the file cannot be read.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical key/value rendering (used for the JSON echo).
std::map<std::string, std::string> config_entries(const ExperimentConfig& config);

std::string kernel_type_name(KernelType type);

}  // namespace gibbslab::experiment
