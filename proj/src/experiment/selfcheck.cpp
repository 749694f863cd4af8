#include "gibbslab/experiment/selfcheck.hpp"

#include <cmath>
#include <cstring>
#include <functional>
#include <random>

#include "gibbslab/classical/ensemble.hpp"
#include "gibbslab/classical/moments.hpp"
#include "gibbslab/csv.hpp"
#include "gibbslab/fock/space.hpp"
#include "gibbslab/fock/state.hpp"
#include "gibbslab/semiclassics/coherent.hpp"
#include "gibbslab/spectral/basis.hpp"

namespace gibbslab::experiment {

namespace {

SelfCheck make_check(std::string name, double measured, double tolerance, std::string detail = {}) {
  return {std::move(name), measured <= tolerance, measured, tolerance, std::move(detail)};
}

fock::FockState random_state(const fock::FockBasisPtr& basis, std::mt19937_64& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto dim = static_cast<Eigen::Index>(basis->dim());
  Eigen::MatrixXcd a(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c) a(r, c) = {normal(engine), normal(engine)};
  Eigen::MatrixXcd rho = a * a.adjoint();
  rho /= rho.trace().real();
  return fock::FockState::from_dense(basis, rho);
}

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

spectral::SpectralBasis config_basis(const ExperimentConfig& config, std::size_t modes) {
  return spectral::eigendecompose(spectral::build_operator(config.resolved_operator()), modes);
}

}  // namespace

double quartic_partition_quadrature(double c) {
  const std::function<double(double)> f = [c](double r) { return std::exp(-r - c * r * r); };
  const double a = 0.0;
  const double b = 60.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, b, fa, fm, fb, whole, 1e-14, 50);
}

std::vector<SelfCheck> run_selfchecks(const ExperimentConfig& config, const SelfCheckOptions& options) {
  config.validate();
  std::vector<SelfCheck> checks;
  const std::size_t samples = config.mc_samples;
  classical::SamplingOptions sampling;
  sampling.threads = options.threads;
  sampling.seed_splitting = options.corrupt_seed_splitting ? classical::SeedSplitting::CorruptedForTesting
                                                           : classical::SeedSplitting::Deterministic;

  const std::size_t modes = std::min<std::size_t>(config.modes, 3);
  const spectral::SpectralBasis basis = config_basis(config, modes);
  const spectral::InteractionKernel kernel = config.kernel.build(basis.grid);
  const spectral::TwoBodyTensor tensor = spectral::interaction_elements(basis, kernel);

  // Free moments against k! (h^{-1})^{(x)k}.
  {
    const auto ensemble = classical::sample_free(basis, samples, config.seed, sampling);
    double worst = 0.0;
    for (std::size_t k = 1; k <= 3; ++k) {
      const auto mc = classical::moment_matrix(ensemble, k, options.threads);
      const auto exact = classical::free_moment_matrix(basis.eigenvalues, k);
      for (Eigen::Index r = 0; r < mc.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < mc.values.cols(); ++c) {
          const auto d = mc.values(r, c) - exact.values(r, c);
          if (mc.se_real(r, c) > 0.0) worst = std::max(worst, std::abs(d.real()) / mc.se_real(r, c));
          if (mc.se_imag(r, c) > 0.0) worst = std::max(worst, std::abs(d.imag()) / mc.se_imag(r, c));
        }
      }
    }
    checks.push_back(make_check("wick_free_moments", worst, 5.0, "max |z| over entries, k = 1..3"));
  }

  // Two identical sampling requests.
  {
    const std::size_t n = std::min<std::size_t>(samples, 20000);
    const auto a = classical::sample_free(basis, n, config.seed, sampling);
    const auto b = classical::sample_free(basis, n, config.seed, sampling);
    const bool same = std::memcmp(a.coeffs.data(), b.coeffs.data(),
                                  sizeof(std::complex<double>) * static_cast<std::size_t>(a.coeffs.size())) == 0;
    checks.push_back({"seed_determinism", same, same ? 0.0 : 1.0, 0.0, "bitwise comparison of two ensembles"});
  }

  // Exact algebraic identities on random dense states.
  {
    std::mt19937_64 engine(config.seed ^ 0x5eedULL);
    const auto fb = fock::build_fock_basis(modes, modes == 3 ? 6 : 8);
    const double coupling = 0.7;
    const auto h = fock::build_hamiltonian(fb, basis.eigenvalues, tensor, coupling);
    double trace_gap = 0.0;
    double number_gap = 0.0;
    double energy_gap = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const auto state = random_state(fb, engine);
      for (std::size_t k = 1; k <= 3; ++k) {
        const auto a = fock::reduced_density_matrix(state, k);
        const auto b = fock::reduced_dm_normal_ordered(state, k);
        trace_gap = std::max(trace_gap, (a - b).cwiseAbs().maxCoeff());
      }
      const auto g1 = fock::reduced_density_matrix(state, 1);
      number_gap = std::max(number_gap, std::abs(g1.trace().real() - fock::particle_number(state)));
      const auto e = fock::energy_decomposition(state, h, basis.eigenvalues, tensor, coupling);
      energy_gap = std::max(energy_gap, std::abs(e.total - e.one_body - e.two_body) / std::abs(e.total));
    }
    checks.push_back(make_check("partial_trace_vs_normal_ordered", trace_gap, 1e-10));
    checks.push_back(make_check("number_trace_identity", number_gap, 1e-10));
    checks.push_back(make_check("energy_decomposition", energy_gap, 1e-9, "relative"));
  }

  // Free Gibbs one-body matrix against the Bose occupations.
  {
    const double t = config.temperatures.front();
    const auto cutoff = fock::choose_cutoff(basis.eigenvalues, t, 1e-12, config.dim_budget);
    const auto fb = fock::build_fock_basis(modes, cutoff.n_max, config.dim_budget);
    const auto g = fock::gibbs_state(fock::build_hamiltonian(fb, basis.eigenvalues, tensor, 0.0), t);
    const auto g1 = fock::reduced_density_matrix(g.state, 1);
    double worst = 0.0;
    for (std::size_t j = 0; j < modes; ++j) {
      const double bose = 1.0 / std::expm1(basis.eigenvalues[j] / t);
      worst = std::max(worst, std::abs(g1(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)).real() - bose));
    }
    checks.push_back(make_check("free_state_occupations", worst, 1e-8, "T = " + format_double(t)));
  }

  // int F_NL d mu_0: Monte Carlo against the Wick closed form.
  {
    const auto ensemble =
        classical::reweight(classical::sample_free(basis, samples, config.seed + 1, sampling), basis, kernel);
    const auto mean = classical::mean_F_NL_free(ensemble, basis, tensor);
    const double se = mean.monte_carlo.std_error;
    const double z = se > 0.0 ? std::abs(mean.monte_carlo.value - mean.closed_form) / se
                              : std::abs(mean.monte_carlo.value - mean.closed_form);
    checks.push_back(make_check("mean_interaction_identity", z, 3.0, "|MC - closed form| / se"));
  }

  // |<xi(v), xi(w)>|^2 = exp(-|v - w|^2).
  {
    std::mt19937_64 engine(config.seed ^ 0xc0ffeeULL);
    std::uniform_real_distribution<double> uni(-1.5, 1.5);
    const auto fb = fock::build_fock_basis(2, 60);
    double worst = 0.0;
    for (int pair = 0; pair < 50; ++pair) {
      const std::complex<double> v[2] = {{uni(engine), uni(engine)}, {uni(engine), uni(engine)}};
      const std::complex<double> w[2] = {{uni(engine), uni(engine)}, {uni(engine), uni(engine)}};
      const auto xv = semiclassics::coherent(v, *fb);
      const auto xw = semiclassics::coherent(w, *fb);
      const double overlap = std::norm(xv.amplitudes.dot(xw.amplitudes));
      const double expected = std::exp(-std::norm(v[0] - w[0]) - std::norm(v[1] - w[1]));
      worst = std::max(worst, std::abs(overlap - expected));
    }
    checks.push_back(make_check("coherent_overlap_law", worst, 1e-8));
  }

  // Single-mode closed forms: geometric partition function and the quartic Z_r.
  {
    const auto fb = fock::build_fock_basis(1, 10);
    const double lambda1[1] = {1.0};
    const auto g = fock::gibbs_state(fock::build_hamiltonian(fb, lambda1, spectral::TwoBodyTensor(1), 0.0), 1.0);
    const double expected = std::log(-std::expm1(-11.0) / -std::expm1(-1.0));
    checks.push_back(make_check("single_mode_geometric_log_z", std::abs(g.log_z - expected), 1e-10));

    spectral::OneBodySpec ring;
    ring.domain = spectral::Interval{spectral::Boundary::Periodic};
    ring.mass = 1.0;
    ring.grid_points = 512;
    const auto ring_basis = spectral::eigendecompose(spectral::build_operator(ring), 1);
    // One constant mode u = 1/sqrt(2): g = 4 gives F_NL = |alpha|^4.
    const auto quartic = spectral::InteractionKernel::delta(4.0);
    const auto ens = classical::reweight(classical::sample_free(ring_basis, samples, config.seed + 2, sampling),
                                         ring_basis, quartic);
    const double oracle = quartic_partition_quadrature(1.0);
    const double z = std::abs(ens.z_r.value - oracle) / ens.z_r.std_error;
    checks.push_back(make_check("single_mode_quartic_z_r", z, 3.0,
                                "estimate " + format_double(ens.z_r.value) + " vs " + format_double(oracle)));
  }
  return checks;
}

}  // namespace gibbslab::experiment
