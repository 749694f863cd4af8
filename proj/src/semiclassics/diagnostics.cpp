#include "gibbslab/semiclassics/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "gibbslab/parallel.hpp"
#include "gibbslab/semiclassics/coherent.hpp"

namespace gibbslab::semiclassics {

double trace_norm(const Eigen::MatrixXcd& hermitian) {
  if (hermitian.size() == 0) return 0.0;
  const Eigen::MatrixXcd h = 0.5 * (hermitian + hermitian.adjoint());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().sum();
}

MomentBoundReport definetti_moment_check(const std::vector<ScaledState>& states, std::size_t k_max,
                                         const std::vector<classical::MomentMatrix>& candidates) {
  if (k_max < 1) throw std::invalid_argument("definetti_moment_check: k_max must be >= 1");
  MomentBoundReport report;
  report.constants.assign(k_max, 0.0);
  std::vector<std::vector<double>> history(k_max);
  for (const ScaledState& item : states) {
    if (item.state == nullptr || !(item.eps > 0.0)) {
      throw std::invalid_argument("definetti_moment_check: need a state and eps > 0");
    }
    const std::size_t top = std::min(k_max, item.state->basis()->n_max());
    for (std::size_t k = 1; k <= top; ++k) {
      const Eigen::MatrixXcd g = fock::reduced_density_matrix(*item.state, k);
      const double scale = std::pow(item.eps, static_cast<double>(k));
      MomentBoundEntry e;
      e.k = k;
      e.eps = item.eps;
      e.scaled_trace = scale * g.trace().real();
      report.constants[k - 1] = std::max(report.constants[k - 1], e.scaled_trace);
      e.running_constant = report.constants[k - 1];
      if (k <= candidates.size()) {
        const double kfact = std::exp(log_factorial(static_cast<int>(k)));
        e.distance = trace_norm(kfact * scale * g - candidates[k - 1].values);
      }
      if (!std::isfinite(e.scaled_trace)) report.bounded = false;
      history[k - 1].push_back(e.scaled_trace);
      report.entries.push_back(e);
    }
  }
  for (const auto& h : history) {
    if (h.size() < 2) continue;
    double earlier = 0.0;
    for (std::size_t i = 0; i + 1 < h.size(); ++i) earlier = std::max(earlier, h[i]);
    if (h.back() > 1.5 * earlier && h.back() > 0.0) report.bounded = false;
  }
  return report;
}

BerezinLiebGap berezin_lieb_gap(const fock::FockState& state, const fock::FockState& reference, double eps,
                                const BerezinLiebOptions& options) {
  if (options.samples == 0) throw std::invalid_argument("berezin_lieb_gap: need samples");
  const std::size_t modes = state.basis()->modes();
  BerezinLiebGap out;
  out.quantum = fock::relative_entropy(state, reference);

  // Proposal: the Husimi density of the free thermal state with the
  // reference's one-body occupations.
  const Eigen::MatrixXcd g1 = fock::reduced_density_matrix(reference, 1);
  std::vector<double> variance(modes);
  for (std::size_t j = 0; j < modes; ++j) {
    variance[j] = eps * (1.0 + g1(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)).real());
  }
  std::vector<Eigen::VectorXcd> points(options.samples, Eigen::VectorXcd(static_cast<Eigen::Index>(modes)));
  std::vector<double> log_proposal(options.samples);
  {
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                      0x42u, 0x4cu};
    std::mt19937_64 engine(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t s = 0; s < options.samples; ++s) {
      double lp = 0.0;
      for (std::size_t j = 0; j < modes; ++j) {
        const double sd = std::sqrt(0.5 * variance[j]);
        const double re = normal(engine);
        const double im = normal(engine);
        const std::complex<double> u(sd * re, sd * im);
        points[s](static_cast<Eigen::Index>(j)) = u;
        lp += -std::log(std::numbers::pi * variance[j]) - std::norm(u) / variance[j];
      }
      log_proposal[s] = lp;
    }
  }
  const auto h = HusimiEvaluator(state, eps).evaluate(points, options.threads);
  const auto h_ref = HusimiEvaluator(reference, eps).evaluate(points, options.threads);

  std::vector<double> weights(options.samples, 0.0);
  std::vector<double> values(options.samples, 0.0);
  double sum_w = 0.0;
  double sum_w2 = 0.0;
  for (std::size_t s = 0; s < options.samples; ++s) {
    if (h[s] <= 1e-300) continue;
    if (h_ref[s] <= 1e-300) {
      out.classical = {std::numeric_limits<double>::infinity(), 0.0};
      out.gap = out.quantum - out.classical.value;
      return out;
    }
    weights[s] = std::exp(std::log(h[s]) - log_proposal[s]);
    values[s] = std::log(h[s] / h_ref[s]);
    sum_w += weights[s];
    sum_w2 += weights[s] * weights[s];
  }
  out.ess = sum_w > 0.0 ? sum_w * sum_w / sum_w2 : 0.0;
  out.degenerate = out.ess < options.min_ess;
  out.classical = classical::self_normalized_mean(weights, values);
  out.gap = out.quantum - out.classical.value;
  return out;
}

double husimi_kl_k1(const fock::FockState& state, const fock::FockState& reference, double eps, double radius,
                    std::size_t radial_nodes, std::size_t angular_nodes) {
  if (state.basis()->modes() != 1) throw std::invalid_argument("husimi_kl_k1: needs K = 1");
  const HusimiEvaluator h(state, eps);
  const HusimiEvaluator h_ref(reference, eps);
  const double dr = radius / static_cast<double>(radial_nodes);
  const double dphi = 2.0 * std::numbers::pi / static_cast<double>(angular_nodes);
  double sum = 0.0;
  for (std::size_t i = 0; i < radial_nodes; ++i) {
    const double r = (static_cast<double>(i) + 0.5) * dr;
    for (std::size_t a = 0; a < angular_nodes; ++a) {
      const std::complex<double> u = std::polar(r, static_cast<double>(a) * dphi);
      const double p = h({&u, 1});
      const double q = h_ref({&u, 1});
      if (p <= 1e-300) continue;
      if (q <= 1e-300) return std::numeric_limits<double>::infinity();
      sum += p * std::log(p / q) * r;
    }
  }
  return sum * dr * dphi;
}

}  // namespace gibbslab::semiclassics
