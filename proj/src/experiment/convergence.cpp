#include "gibbslab/experiment/convergence.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "gibbslab/csv.hpp"
#include "gibbslab/fock/space.hpp"
#include "gibbslab/fock/state.hpp"
#include "gibbslab/parallel.hpp"
#include "gibbslab/semiclassics/coherent.hpp"

namespace gibbslab::experiment {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

DistanceMetric distance(const Eigen::MatrixXcd& quantum, const classical::MomentMatrix& target,
                        const classical::WeightedEnsemble& ensemble, bool exact) {
  DistanceMetric m;
  m.k = target.order;
  const Eigen::MatrixXcd diff = quantum - target.values;
  const Eigen::MatrixXcd herm = 0.5 * (diff + diff.adjoint());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm);
  const Eigen::VectorXd ev = solver.eigenvalues();
  m.value = ev.cwiseAbs().sum();
  m.hilbert_schmidt = herm.norm();
  if (exact) return m;
  // d = tr[S (Q - gamma)] with S = sign(Q - gamma); to first order the
  // error is that of the self-normalized mean of v_s^* S v_s.
  const Eigen::VectorXd sign = ev.unaryExpr([](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
  const Eigen::MatrixXcd s = solver.eigenvectors() * sign.asDiagonal() * solver.eigenvectors().adjoint();
  const std::size_t n = ensemble.size();
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXcd v = classical::symmetric_power(ensemble.coefficients(i), target.index);
    values[i] = v.dot(s * v).real();
  }
  const auto w = ensemble.weights();
  m.std_error = classical::self_normalized_mean(w, values).std_error;
  return m;
}

}  // namespace

double free_distance_k1(const std::vector<double>& eigenvalues, double temperature) {
  double d = 0.0;
  for (double lambda : eigenvalues) {
    d += std::abs(1.0 / (temperature * std::expm1(lambda / temperature)) - 1.0 / lambda);
  }
  return d;
}

ConvergenceResult run_convergence(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const auto start = Clock::now();
  ConvergenceResult result;
  result.config = config;
  const spectral::OneBodySpec spec = config.resolved_operator();
  result.basis = spectral::eigendecompose(spectral::build_operator(spec), config.modes);
  const spectral::InteractionKernel kernel = config.kernel.build(result.basis.grid);
  kernel.validate(result.basis.grid_size());
  result.tensor = spectral::interaction_elements(result.basis, kernel);

  classical::SamplingOptions sampling;
  sampling.threads = options.threads;
  sampling.seed_splitting = options.seed_splitting;
  const classical::WeightedEnsemble ensemble = classical::reweight(
      classical::sample_free(result.basis, config.mc_samples, config.seed, sampling), result.basis, kernel,
      options.threads);
  result.z_r = ensemble.z_r;
  result.minus_log_z_r = classical::classical_relative_free_energy(ensemble).value;
  result.mean_interaction = classical::mean_F_NL_free(ensemble, result.basis, result.tensor);
  result.ess = ensemble.ess;
  result.exact_classical = kernel.is_zero();
  for (std::size_t k = 1; k <= config.k_max; ++k) {
    result.classical_moments.push_back(result.exact_classical
                                           ? classical::free_moment_matrix(result.basis.eigenvalues, k)
                                           : classical::moment_matrix(ensemble, k, options.threads));
  }

  const std::size_t rows = config.temperatures.size();
  result.rows.resize(rows);
  parallel_for(rows, options.threads, [&](std::size_t r) {
    const auto row_start = Clock::now();
    TemperatureRow& row = result.rows[r];
    const double t = config.temperatures[r];
    row.temperature = t;
    row.coupling = config.coupling_rule / t;
    const fock::Cutoff cutoff =
        fock::choose_cutoff(result.basis.eigenvalues, t, config.n_max_policy, config.dim_budget);
    row.n_max = cutoff.n_max;
    row.dim = cutoff.dim;
    row.tail_mass = cutoff.tail_mass;
    const auto fb = fock::build_fock_basis(config.modes, cutoff.n_max, config.dim_budget);
    const auto h0 = fock::build_hamiltonian(fb, result.basis.eigenvalues, result.tensor, 0.0);
    const auto h = fock::build_hamiltonian(fb, result.basis.eigenvalues, result.tensor, row.coupling);
    fock::GibbsResult free_gibbs = fock::gibbs_state(h0, t);
    fock::GibbsResult gibbs = fock::gibbs_state(h, t);
    row.log_z_free = free_gibbs.log_z;
    row.log_z = gibbs.log_z;
    row.free_energy_metric = free_gibbs.log_z - gibbs.log_z;
    row.tail_mass_interacting = gibbs.state.top_sector_mass();
    row.particle_number = fock::particle_number(gibbs.state);

    for (std::size_t k = 1; k <= std::min(config.k_max, cutoff.n_max); ++k) {
      const double scale = std::exp(log_factorial(static_cast<int>(k)) - static_cast<double>(k) * std::log(t));
      const Eigen::MatrixXcd q = scale * fock::reduced_density_matrix(gibbs.state, k);
      row.distances.push_back(distance(q, result.classical_moments[k - 1], ensemble, result.exact_classical));
    }

    row.relative_free_energy_gibbs =
        fock::relative_free_energy(gibbs.state, free_gibbs.state, result.tensor, row.coupling, t);
    if (options.trial) {
      semiclassics::TrialOptions trial_options;
      trial_options.max_samples = config.trial_samples;
      const auto trial = semiclassics::trial_state(ensemble, t, fb, trial_options);
      row.relative_free_energy_trial =
          fock::relative_free_energy(trial.state, free_gibbs.state, result.tensor, row.coupling, t);
      row.trial_offending_samples = trial.offending_samples;
      row.trial_lost_mass = trial.lost_mass;
    }
    if (options.berezin_lieb) {
      semiclassics::BerezinLiebOptions bl;
      bl.samples = config.bl_samples;
      bl.seed = config.seed + 1000003ULL * (r + 1);
      row.berezin_lieb = semiclassics::berezin_lieb_gap(gibbs.state, free_gibbs.state, 1.0 / t, bl);
    }
    if (options.keep_states) {
      row.gibbs = std::move(gibbs.state);
      row.free_gibbs = std::move(free_gibbs.state);
    }
    row.seconds = seconds_since(row_start);
  });
  result.seconds = seconds_since(start);
  return result;
}

std::vector<PropertyCheck> evaluate_properties(const ConvergenceResult& result) {
  std::vector<PropertyCheck> checks;
  const auto& rows = result.rows;
  const auto& config = result.config;

  {
    PropertyCheck c{"distances_nonnegative", true, ""};
    for (const auto& row : rows)
      for (const auto& d : row.distances)
        if (!(d.value >= 0.0)) c.passed = false;
    checks.push_back(c);
  }
  {
    PropertyCheck c{"tail_mass_policy", true, ""};
    double worst = 0.0;
    for (const auto& row : rows) {
      worst = std::max(worst, row.tail_mass);
      if (!(row.tail_mass < config.n_max_policy)) c.passed = false;
    }
    c.detail = "max tail " + format_double(worst) + " vs " + format_double(config.n_max_policy);
    checks.push_back(c);
  }
  for (std::size_t k = 1; k <= std::min<std::size_t>(2, config.k_max); ++k) {
    PropertyCheck c{"monotone_d" + std::to_string(k), true, ""};
    double worst = -1e300;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      if (rows[i].distances.size() < k || rows[i + 1].distances.size() < k) continue;
      const auto& a = rows[i].distances[k - 1];
      const auto& b = rows[i + 1].distances[k - 1];
      const double slack = b.value - a.value - 2.0 * std::max(a.std_error, b.std_error);
      worst = std::max(worst, slack);
      if (slack > 0.0) c.passed = false;
    }
    c.detail = rows.size() < 2 ? "single temperature" : "max excess " + format_double(worst);
    checks.push_back(c);
  }
  {
    PropertyCheck c{"monotone_free_energy", true, ""};
    const double target = result.minus_log_z_r.value;
    const double se = result.minus_log_z_r.std_error;
    double worst = -1e300;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      const double a = std::abs(rows[i].free_energy_metric - target);
      const double b = std::abs(rows[i + 1].free_energy_metric - target);
      worst = std::max(worst, b - a - 2.0 * se);
      if (b - a > 2.0 * se) c.passed = false;
    }
    c.detail = rows.size() < 2 ? "single temperature" : "max excess " + format_double(worst);
    checks.push_back(c);
  }
  {
    bool any = false;
    PropertyCheck c{"trial_variational", true, ""};
    double worst = 1e300;
    for (const auto& row : rows) {
      if (!row.relative_free_energy_trial) continue;
      any = true;
      const double margin = *row.relative_free_energy_trial - row.relative_free_energy_gibbs;
      worst = std::min(worst, margin);
      if (margin < -1e-8) c.passed = false;
    }
    if (any) {
      c.detail = "min margin " + format_double(worst);
      checks.push_back(c);
    }
  }
  if (!rows.empty() && rows.back().berezin_lieb) {
    const auto& bl = *rows.back().berezin_lieb;
    checks.push_back({"berezin_lieb_gap", bl.gap >= -0.05 && !bl.degenerate,
                      "gap " + format_double(bl.gap) + " at T=" + format_double(rows.back().temperature)});
  }
  return checks;
}

}  // namespace gibbslab::experiment
