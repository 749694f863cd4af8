#pragma once

#include <filesystem>
#include <vector>

#include "gibbslab/experiment/convergence.hpp"
#include "gibbslab/experiment/selfcheck.hpp"

namespace gibbslab::experiment {

// One trace_distance row per (T, k) and one free_energy row per T. Columns:
// T, lambda, n_max, tail_mass, metric, k, value, std_error, target,
// target_std_error, aux_hs. Wall-clock times are kept out so reruns with the
// same seed are byte-identical.
void write_convergence_csv(const std::vector<TemperatureRow>& rows, const ConvergenceResult* result,
                           const std::filesystem::path& path);

// T, quantum_rel_ent, classical_rel_ent, classical_std_error, gap, ess.
void write_bl_gap_csv(const std::vector<TemperatureRow>& rows, const std::filesystem::path& path);

struct ReportPaths {
  std::filesystem::path csv;
  std::filesystem::path bl_gap;
  std::filesystem::path summary;
};

// Writes convergence.csv, bl_gap.csv and summary.json (config echo, oracle
// values, per-row diagnostics, property checks, timing) under `dir`.
// Throws gibbslab::IoError naming the path on failure.
ReportPaths emit_report(const ConvergenceResult& result, const std::vector<PropertyCheck>& properties,
                        const std::filesystem::path& dir);

void write_selfcheck_json(const std::vector<SelfCheck>& checks, const std::filesystem::path& path);

}  // namespace gibbslab::experiment
