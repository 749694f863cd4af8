// gibbslab: command-line driver for the spectral, classical, Fock-space and
// convergence computations. Exit codes: 0 success, 2 failed property, 1 error.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gibbslab/classical/ensemble.hpp"
#include "gibbslab/classical/moments.hpp"
#include "gibbslab/csv.hpp"
#include "gibbslab/error.hpp"
#include "gibbslab/experiment/config.hpp"
#include "gibbslab/experiment/convergence.hpp"
#include "gibbslab/experiment/report.hpp"
#include "gibbslab/experiment/selfcheck.hpp"
#include "gibbslab/fock/space.hpp"
#include "gibbslab/fock/state.hpp"
#include "gibbslab/spectral/basis.hpp"
#include "gibbslab/spectral/schatten.hpp"

namespace gl = gibbslab;
namespace ex = gibbslab::experiment;
using nlohmann::json;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::size_t threads = 1;
};

ex::ExperimentConfig resolve(const Common& common) {
  ex::ExperimentConfig config = common.config_path.empty() ? ex::ExperimentConfig{} : ex::load_config(common.config_path);
  if (common.seed) config.seed = *common.seed;
  if (!common.out.empty()) config.output_dir = common.out;
  config.validate();
  gl::ensure_directory(config.output_dir);
  return config;
}

void write_json(const json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw gl::IoError("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
}

gl::spectral::SpectralBasis basis_for(const ex::ExperimentConfig& config) {
  return gl::spectral::eigendecompose(gl::spectral::build_operator(config.resolved_operator()), config.modes);
}

int cmd_spectrum(const Common& common) {
  const auto config = resolve(common);
  const auto op = gl::spectral::build_operator(config.resolved_operator());
  const auto basis = gl::spectral::eigendecompose(op, config.modes);
  gl::spectral::write_spectrum_csv(basis, config.output_dir / "spectrum.csv");
  gl::spectral::write_grid_csv(basis.grid, config.output_dir / "grid.csv");
  const auto trace = gl::spectral::schatten_trace(basis, 1.0);
  write_json({{"eigenvalues", basis.eigenvalues},
              {"orthonormality_error", basis.orthonormality_error()},
              {"max_relative_residual", basis.max_relative_residual(op)},
              {"trace_h_inverse", {{"partial_sum", trace.partial_sum}, {"tail", trace.tail()},
                                   {"value", trace.value()}, {"divergent", trace.divergent}}}},
             config.output_dir / "spectrum.json");
  for (std::size_t j = 0; j < basis.size(); ++j) std::printf("lambda_%zu = %.12g\n", j + 1, basis.eigenvalues[j]);
  return 0;
}

int cmd_sample(const Common& common) {
  const auto config = resolve(common);
  const auto basis = basis_for(config);
  const auto kernel = config.kernel.build(basis.grid);
  gl::classical::SamplingOptions sampling;
  sampling.threads = common.threads;
  const auto ensemble = gl::classical::reweight(
      gl::classical::sample_free(basis, config.mc_samples, config.seed, sampling), basis, kernel, common.threads);
  gl::classical::write_ensemble_csv(ensemble, config.output_dir / "ensemble.csv");
  for (std::size_t k = 1; k <= config.k_max; ++k) {
    const auto m = gl::classical::moment_matrix(ensemble, k, common.threads);
    gl::classical::write_moment_csv(m, config.output_dir / ("moments_k" + std::to_string(k) + ".csv"));
  }
  const auto tensor = gl::spectral::interaction_elements(basis, kernel);
  const auto fe = gl::classical::classical_relative_free_energy(ensemble);
  const auto mean = gl::classical::mean_F_NL_free(ensemble, basis, tensor);
  write_json({{"z_r", {{"value", ensemble.z_r.value}, {"std_error", ensemble.z_r.std_error}}},
              {"minus_log_z_r", {{"value", fe.value.value}, {"std_error", fe.value.std_error}}},
              {"interaction_term", fe.interaction_term.value},
              {"entropy_term", fe.entropy_term.value},
              {"ess", ensemble.ess},
              {"mean_interaction_free", {{"monte_carlo", mean.monte_carlo.value},
                                         {"std_error", mean.monte_carlo.std_error},
                                         {"closed_form", mean.closed_form}}}},
             config.output_dir / "sample.json");
  std::printf("Z_r = %.6f +- %.2e, -log Z_r = %.6f, ESS = %.0f\n", ensemble.z_r.value, ensemble.z_r.std_error,
              fe.value.value, ensemble.ess);
  return 0;
}

int cmd_quantum(const Common& common) {
  const auto config = resolve(common);
  const auto basis = basis_for(config);
  const auto kernel = config.kernel.build(basis.grid);
  const auto tensor = gl::spectral::interaction_elements(basis, kernel);
  json rows = json::array();
  for (double t : config.temperatures) {
    const double coupling = config.coupling_rule / t;
    const auto cutoff = gl::fock::choose_cutoff(basis.eigenvalues, t, config.n_max_policy, config.dim_budget);
    const auto fb = gl::fock::build_fock_basis(config.modes, cutoff.n_max, config.dim_budget);
    const auto h = gl::fock::build_hamiltonian(fb, basis.eigenvalues, tensor, coupling);
    const auto h0 = gl::fock::build_hamiltonian(fb, basis.eigenvalues, tensor, 0.0);
    const auto g = gl::fock::gibbs_state(h, t, common.threads);
    const auto g0 = gl::fock::gibbs_state(h0, t, common.threads);
    for (std::size_t k = 1; k <= std::min(config.k_max, cutoff.n_max); ++k) {
      gl::fock::write_reduced_csv(gl::fock::reduced_density_matrix(g.state, k), config.modes, k,
                                  config.output_dir /
                                      ("reduced_T" + gl::format_double(t) + "_k" + std::to_string(k) + ".csv"));
    }
    const auto e = gl::fock::energy_decomposition(g.state, h, basis.eigenvalues, tensor, coupling);
    rows.push_back({{"T", t}, {"lambda", coupling}, {"n_max", cutoff.n_max}, {"dim", cutoff.dim},
                    {"log_z", g.log_z}, {"log_z_free", g0.log_z},
                    {"tail_mass_free", cutoff.tail_mass}, {"tail_mass", g.state.top_sector_mass()},
                    {"particle_number", gl::fock::particle_number(g.state)},
                    {"energy", {{"total", e.total}, {"one_body", e.one_body}, {"two_body", e.two_body}}}});
    std::printf("T = %g: n_max = %zu, dim = %zu, log Z = %.10g\n", t, cutoff.n_max, cutoff.dim, g.log_z);
  }
  write_json(rows, config.output_dir / "quantum.json");
  return 0;
}

int report_properties(const std::vector<ex::PropertyCheck>& checks) {
  bool ok = true;
  for (const auto& c : checks) {
    std::printf("%-24s %s  %s\n", c.name.c_str(), c.passed ? "PASS" : "FAIL", c.detail.c_str());
    ok = ok && c.passed;
  }
  return ok ? 0 : 2;
}

int cmd_converge(const Common& common) {
  const auto config = resolve(common);
  ex::RunOptions options;
  options.threads = common.threads;
  const auto result = ex::run_convergence(config, options);
  const auto checks = ex::evaluate_properties(result);
  const auto paths = ex::emit_report(result, checks, config.output_dir);
  std::printf("-log Z_r = %.6f +- %.2e\n", result.minus_log_z_r.value, result.minus_log_z_r.std_error);
  for (const auto& row : result.rows) {
    std::printf("T = %-6g n_max = %-4zu", row.temperature, row.n_max);
    for (const auto& d : row.distances) std::printf(" d%zu = %.5f", d.k, d.value);
    std::printf(" f = %.6f\n", row.free_energy_metric);
  }
  std::printf("wrote %s\n", paths.csv.string().c_str());
  return report_properties(checks);
}

int cmd_bl_gap(const Common& common) {
  const auto config = resolve(common);
  ex::RunOptions options;
  options.threads = common.threads;
  options.trial = false;
  const auto result = ex::run_convergence(config, options);
  ex::write_bl_gap_csv(result.rows, config.output_dir / "bl_gap.csv");
  for (const auto& row : result.rows) {
    const auto& bl = *row.berezin_lieb;
    std::printf("T = %-6g quantum = %.6f classical = %.6f +- %.1e gap = %.6f\n", row.temperature, bl.quantum,
                bl.classical.value, bl.classical.std_error, bl.gap);
  }
  const auto& last = *result.rows.back().berezin_lieb;
  return last.gap >= -0.05 && !last.degenerate ? 0 : 2;
}

int cmd_selfcheck(const Common& common, bool corrupt) {
  const auto config = resolve(common);
  ex::SelfCheckOptions options;
  options.threads = common.threads;
  options.corrupt_seed_splitting = corrupt;
  const auto checks = ex::run_selfchecks(config, options);
  ex::write_selfcheck_json(checks, config.output_dir / "selfcheck.json");
  bool ok = true;
  for (const auto& c : checks) {
    std::printf("%-34s %s  measured %.3g (tol %.3g) %s\n", c.name.c_str(), c.passed ? "PASS" : "FAIL", c.measured,
                c.tolerance, c.detail.c_str());
    ok = ok && c.passed;
  }
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-temperature Gibbs states: classical measures vs truncated bosonic Fock space"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "key = value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", common.seed, "override the configured seed");
    sub->add_option("--out", common.out, "output directory");
    sub->add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);
  };
  bool corrupt = false;
  auto* spectrum = app.add_subcommand("spectrum", "one-body eigenpairs and tr h^-1");
  auto* sample = app.add_subcommand("sample", "free and interacting classical ensembles, moments, Z_r");
  auto* quantum = app.add_subcommand("quantum", "Gibbs states and reduced density matrices per temperature");
  auto* converge = app.add_subcommand("converge", "full convergence experiment and report");
  auto* selfcheck = app.add_subcommand("selfcheck", "module invariant suite");
  auto* bl = app.add_subcommand("bl-gap", "Berezin-Lieb gap trajectory");
  for (auto* sub : {spectrum, sample, quantum, converge, selfcheck, bl}) add_common(sub);
  selfcheck->add_flag("--corrupt-seed-splitting", corrupt, "negative control for the determinism check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    if (*spectrum) return cmd_spectrum(common);
    if (*sample) return cmd_sample(common);
    if (*quantum) return cmd_quantum(common);
    if (*converge) return cmd_converge(common);
    if (*selfcheck) return cmd_selfcheck(common, corrupt);
    if (*bl) return cmd_bl_gap(common);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
