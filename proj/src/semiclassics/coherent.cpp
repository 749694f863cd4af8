#include "gibbslab/semiclassics/coherent.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "gibbslab/csv.hpp"
#include "gibbslab/parallel.hpp"
#include "gibbslab/simd/kernels.hpp"

namespace gibbslab::semiclassics {

namespace {

// table[j][n] = exp(-|v_j|^2 / 2) v_j^n / sqrt(n!) for n = 0..n_max.
std::vector<std::vector<std::complex<double>>> power_table(std::span<const std::complex<double>> v,
                                                           std::size_t n_max) {
  std::vector<std::vector<std::complex<double>>> table(v.size(), std::vector<std::complex<double>>(n_max + 1));
  for (std::size_t j = 0; j < v.size(); ++j) {
    table[j][0] = std::exp(-0.5 * std::norm(v[j]));
    for (std::size_t n = 1; n <= n_max; ++n) {
      table[j][n] = table[j][n - 1] * v[j] / std::sqrt(static_cast<double>(n));
    }
  }
  return table;
}

std::complex<double> amplitude(const std::vector<std::vector<std::complex<double>>>& table,
                               const MultiIndex& state) {
  std::complex<double> a = 1.0;
  for (std::size_t j = 0; j < state.size(); ++j) a *= table[j][static_cast<std::size_t>(state[j])];
  return a;
}

void to_planar(const Eigen::MatrixXcd& m, std::vector<double>& re, std::vector<double>& im) {
  const auto n = static_cast<std::size_t>(m.rows());
  re.resize(n * n);
  im.resize(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const auto v = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      re[r * n + c] = v.real();
      im[r * n + c] = v.imag();
    }
  }
}

// Rebuilds a Hermitian matrix from the lower triangle of planar storage.
Eigen::MatrixXcd from_lower_planar(const std::vector<double>& re, const std::vector<double>& im, std::size_t n,
                                   double scale) {
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c <= r; ++c) {
      const std::complex<double> v(re[r * n + c] * scale, im[r * n + c] * scale);
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
      m(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = std::conj(v);
    }
    m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r)).imag(0.0);
  }
  return m;
}

}  // namespace

double poisson_tail(double mean, std::size_t n_max) {
  if (mean < 0.0) throw std::invalid_argument("poisson_tail: negative mean");
  if (mean == 0.0) return 0.0;
  // Sum the upper tail directly so tiny tails keep full relative precision.
  double log_term = -mean + static_cast<double>(n_max + 1) * std::log(mean) -
                    log_factorial(static_cast<int>(n_max + 1));
  double sum = 0.0;
  for (std::size_t n = n_max + 1;; ++n) {
    const double term = std::exp(log_term);
    sum += term;
    if (static_cast<double>(n) > mean && term <= 1e-17 * sum) break;
    if (static_cast<double>(n) > mean && term == 0.0) break;
    log_term += std::log(mean) - std::log(static_cast<double>(n + 1));
  }
  return std::min(1.0, sum);
}

CoherentVector coherent(std::span<const std::complex<double>> v, const fock::FockBasis& basis) {
  if (v.size() != basis.modes()) throw std::invalid_argument("coherent: mode count mismatch");
  CoherentVector out;
  out.v = Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
  const auto table = power_table(v, basis.n_max());
  out.amplitudes.resize(static_cast<Eigen::Index>(basis.dim()));
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    out.amplitudes(static_cast<Eigen::Index>(i)) = amplitude(table, basis.state(i));
  }
  out.tail_bound = poisson_tail(out.v.squaredNorm(), basis.n_max());
  out.tail_warning = out.tail_bound > kCoherentTailWarning;
  return out;
}

TrialState trial_state(const classical::WeightedEnsemble& ensemble, double temperature,
                       fock::FockBasisPtr basis, const TrialOptions& options) {
  if (!(temperature > 0.0)) throw std::invalid_argument("trial_state: temperature must be positive");
  if (ensemble.modes() != basis->modes()) throw std::invalid_argument("trial_state: mode count mismatch");
  const std::size_t samples =
      options.max_samples == 0 ? ensemble.size() : std::min(options.max_samples, ensemble.size());
  if (samples == 0) throw std::invalid_argument("trial_state: empty ensemble");
  const std::size_t modes = basis->modes();
  const std::size_t n_max = basis->n_max();
  const double root_t = std::sqrt(temperature);

  TrialState out;
  out.samples_used = samples;
  std::vector<double> weights(samples);
  double weight_sum = 0.0;
  // tables[s][j * (n_max + 1) + n], planar.
  std::vector<std::vector<double>> table_re(samples);
  std::vector<std::vector<double>> table_im(samples);
  std::vector<std::complex<double>> v(modes);
  for (std::size_t s = 0; s < samples; ++s) {
    weights[s] = std::exp(ensemble.log_weights[s]);
    weight_sum += weights[s];
    const auto alpha = ensemble.coefficients(s);
    double norm2 = 0.0;
    for (std::size_t j = 0; j < modes; ++j) {
      v[j] = root_t * alpha[j];
      norm2 += std::norm(v[j]);
    }
    const double tail = poisson_tail(norm2, n_max);
    out.max_tail = std::max(out.max_tail, tail);
    if (tail > kCoherentTailWarning) ++out.offending_samples;
    const auto table = power_table(v, n_max);
    table_re[s].resize(modes * (n_max + 1));
    table_im[s].resize(modes * (n_max + 1));
    for (std::size_t j = 0; j < modes; ++j) {
      for (std::size_t n = 0; n <= n_max; ++n) {
        table_re[s][j * (n_max + 1) + n] = table[j][n].real();
        table_im[s][j * (n_max + 1) + n] = table[j][n].imag();
      }
    }
  }

  auto fill_amplitudes = [&](std::size_t s, std::span<const MultiIndex> states, std::vector<double>& c_re,
                             std::vector<double>& c_im) {
    for (std::size_t i = 0; i < states.size(); ++i) {
      std::complex<double> a = 1.0;
      for (std::size_t j = 0; j < modes; ++j) {
        const std::size_t at = j * (n_max + 1) + static_cast<std::size_t>(states[i][j]);
        a *= std::complex<double>(table_re[s][at], table_im[s][at]);
      }
      c_re[i] = a.real();
      c_im[i] = a.imag();
    }
  };

  if (options.phase_average) {
    std::vector<Eigen::MatrixXcd> blocks(basis->sectors());
    parallel_for(basis->sectors(), options.threads, [&](std::size_t n) {
      const auto states = basis->sector_states(n);
      const std::size_t size = states.size();
      std::vector<double> g_re(size * size, 0.0), g_im(size * size, 0.0);
      std::vector<double> c_re(size), c_im(size);
      for (std::size_t s = 0; s < samples; ++s) {
        fill_amplitudes(s, states, c_re, c_im);
        simd::her_rank1(weights[s], c_re, c_im, g_re, g_im);
      }
      blocks[n] = from_lower_planar(g_re, g_im, size, 1.0 / weight_sum);
    });
    out.state = fock::FockState::from_blocks(basis, std::move(blocks));
  } else {
    const std::size_t dim = basis->dim();
    if (dim > fock::kMaxDenseDim) {
      throw std::invalid_argument("trial_state: dense trial states are limited to dimension " +
                                  std::to_string(fock::kMaxDenseDim));
    }
    std::vector<double> g_re(dim * dim, 0.0), g_im(dim * dim, 0.0);
    std::vector<double> c_re(dim), c_im(dim);
    for (std::size_t s = 0; s < samples; ++s) {
      fill_amplitudes(s, basis->states(), c_re, c_im);
      simd::her_rank1(weights[s], c_re, c_im, g_re, g_im);
    }
    out.state = fock::FockState::from_dense(basis, from_lower_planar(g_re, g_im, dim, 1.0 / weight_sum));
  }

  const double tr = out.state.trace();
  out.lost_mass = 1.0 - tr;
  if (out.state.is_dense()) {
    out.state = fock::FockState::from_dense(basis, *out.state.dense_matrix() / tr);
  } else {
    std::vector<Eigen::MatrixXcd> blocks;
    for (std::size_t n = 0; n < out.state.sectors(); ++n) blocks.push_back(out.state.block(n) / tr);
    out.state = fock::FockState::from_blocks(basis, std::move(blocks));
  }
  return out;
}

HusimiEvaluator::HusimiEvaluator(const fock::FockState& state, double eps)
    : basis_(state.basis()), eps_(eps), dense_(state.is_dense()) {
  if (!(eps > 0.0)) throw std::invalid_argument("husimi: eps must be positive");
  if (dense_) {
    re_.resize(1);
    im_.resize(1);
    to_planar(*state.dense_matrix(), re_[0], im_[0]);
  } else {
    re_.resize(state.sectors());
    im_.resize(state.sectors());
    for (std::size_t n = 0; n < state.sectors(); ++n) to_planar(state.block(n), re_[n], im_[n]);
  }
}

double HusimiEvaluator::operator()(std::span<const std::complex<double>> u) const {
  const std::size_t modes = basis_->modes();
  if (u.size() != modes) throw std::invalid_argument("husimi: point dimension mismatch");
  std::vector<std::complex<double>> v(modes);
  const double scale = 1.0 / std::sqrt(eps_);
  for (std::size_t j = 0; j < modes; ++j) v[j] = u[j] * scale;
  const auto table = power_table(v, basis_->n_max());
  double value = 0.0;
  if (dense_) {
    const std::size_t dim = basis_->dim();
    std::vector<double> c_re(dim), c_im(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      const auto a = amplitude(table, basis_->state(i));
      c_re[i] = a.real();
      c_im[i] = a.imag();
    }
    value = simd::herm_form(re_[0], im_[0], c_re, c_im);
  } else {
    std::vector<double> c_re, c_im;
    for (std::size_t n = 0; n < re_.size(); ++n) {
      const auto states = basis_->sector_states(n);
      c_re.resize(states.size());
      c_im.resize(states.size());
      for (std::size_t i = 0; i < states.size(); ++i) {
        const auto a = amplitude(table, states[i]);
        c_re[i] = a.real();
        c_im[i] = a.imag();
      }
      value += simd::herm_form(re_[n], im_[n], c_re, c_im);
    }
  }
  return std::max(0.0, value) / std::pow(std::numbers::pi * eps_, static_cast<double>(modes));
}

std::vector<double> HusimiEvaluator::evaluate(const std::vector<Eigen::VectorXcd>& points,
                                              std::size_t threads) const {
  std::vector<double> out(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    out[i] = (*this)({points[i].data(), static_cast<std::size_t>(points[i].size())});
  });
  return out;
}

std::vector<double> husimi_density(const fock::FockState& state, double eps,
                                   const std::vector<Eigen::VectorXcd>& points, std::size_t threads) {
  return HusimiEvaluator(state, eps).evaluate(points, threads);
}

double husimi_integral_k1(const fock::FockState& state, double eps, double radius, std::size_t radial_nodes,
                          std::size_t angular_nodes) {
  if (state.basis()->modes() != 1) throw std::invalid_argument("husimi_integral_k1: needs K = 1");
  const HusimiEvaluator h(state, eps);
  const double dr = radius / static_cast<double>(radial_nodes);
  const double dphi = 2.0 * std::numbers::pi / static_cast<double>(angular_nodes);
  double sum = 0.0;
  for (std::size_t i = 0; i < radial_nodes; ++i) {
    const double r = (static_cast<double>(i) + 0.5) * dr;
    for (std::size_t a = 0; a < angular_nodes; ++a) {
      const std::complex<double> u = std::polar(r, static_cast<double>(a) * dphi);
      sum += h({&u, 1}) * r;
    }
  }
  return sum * dr * dphi;
}

void write_husimi_csv(const std::vector<Eigen::VectorXcd>& points, std::span<const double> values,
                      const std::filesystem::path& path) {
  if (points.size() != values.size()) throw std::invalid_argument("write_husimi_csv: size mismatch");
  const std::size_t modes = points.empty() ? 0 : static_cast<std::size_t>(points.front().size());
  std::vector<std::string> header{"point"};
  for (std::size_t j = 0; j < modes; ++j) {
    header.push_back("re_u" + std::to_string(j + 1));
    header.push_back("im_u" + std::to_string(j + 1));
  }
  header.push_back("density");
  CsvWriter csv(path, std::move(header));
  for (std::size_t i = 0; i < points.size(); ++i) {
    csv.cell(i);
    for (Eigen::Index j = 0; j < points[i].size(); ++j) csv.cell(points[i](j).real()).cell(points[i](j).imag());
    csv.cell(values[i]);
    csv.end_row();
  }
}

}  // namespace gibbslab::semiclassics
